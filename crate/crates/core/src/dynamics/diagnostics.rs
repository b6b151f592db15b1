//! Inversion detection and conservation checks on sampled trajectories.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::dynamics::glide::glide_derivative;
use crate::dynamics::trajectory::{Sample, Trajectory};
use crate::model::{contact_arm, d_general};
use crate::vec3;

/// Rise of `theta` above its initial value that marks the onset of inversion.
pub const ONSET_RISE: f64 = 0.1;
/// Inversion counts as complete once `theta > pi - INVERTED_MARGIN`.
pub const INVERTED_MARGIN: f64 = 0.2;
/// `theta'` must leave this band before its sign is registered.
pub const SIGN_HYSTERESIS: f64 = 1e-6;
/// Derivative residuals are only formed where the predicted rate exceeds
/// this fraction of its largest magnitude along the trajectory.
pub const NOISE_FLOOR: f64 = 1e-2;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InversionReport {
    pub onset_time: Option<f64>,
    /// Time from onset until `theta` first exceeds `pi - 0.2`.
    pub inversion_time: Option<f64>,
    pub final_theta: f64,
    pub sign_changes: usize,
    pub completed: bool,
}

/// Locates the onset and end of inversion at sample resolution.
///
/// Sign changes of `theta'` are counted from the onset (or the first sample
/// when `theta` never rises) to the end of inversion (or the last sample).
pub fn detect_inversion(traj: &Trajectory) -> InversionReport {
    let samples = traj.samples();
    let Some(first) = samples.first() else {
        return InversionReport {
            onset_time: None,
            inversion_time: None,
            final_theta: f64::NAN,
            sign_changes: 0,
            completed: false,
        };
    };
    let onset = samples.iter().position(|s| s.state.theta > first.state.theta + ONSET_RISE);
    let start = onset.unwrap_or(0);
    let end = samples[start..].iter().position(|s| s.state.theta > PI - INVERTED_MARGIN).map(|i| i + start);
    let window = &samples[start..=end.unwrap_or(samples.len() - 1)];

    let mut sign_changes = 0;
    let mut last = 0.0f64;
    for s in window {
        let v = s.state.theta_dot;
        if v.abs() <= SIGN_HYSTERESIS {
            continue;
        }
        if last != 0.0 && (v > 0.0) != (last > 0.0) {
            sign_changes += 1;
        }
        last = v;
    }

    let final_theta = samples.last().map(|s| s.state.theta).unwrap_or(f64::NAN);
    InversionReport {
        onset_time: onset.map(|i| samples[i].t),
        inversion_time: match (onset, end) {
            (Some(o), Some(e)) => Some(samples[e].t - samples[o].t),
            _ => None,
        },
        final_theta,
        sign_changes,
        completed: final_theta > PI - INVERTED_MARGIN,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    /// `max |lambda(t) - lambda(0)| / |lambda(0)|`.
    pub lambda_drift: f64,
    pub energy_monotone: bool,
    /// Largest increase of the total energy between consecutive samples.
    pub max_energy_rise: f64,
    /// Allowed increase between consecutive samples.
    pub energy_tolerance: f64,
    /// Largest relative mismatch between the differenced `D` and its
    /// predicted rate, over samples above the noise floor.
    pub d_derivative_residual: Option<f64>,
    /// Same for the modified energy.
    pub e_tilde_derivative_residual: Option<f64>,
    pub routh_min: f64,
    pub routh_max: f64,
}

/// Predicted `dD/dt = gamma m R sin(theta) (phi' nu_x + nu_y') / sqrt(d)` and
/// `dE~/dt = m dv_A/dt . (omega x a)` at one sample.
fn predicted_rates(s: &Sample, traj: &Trajectory) -> Option<(f64, f64)> {
    let p = traj.params();
    let st = &s.state;
    let rate = glide_derivative(st, p, traj.friction()).ok()?;
    let (sin, cos) = st.theta.sin_cos();
    let ax = rate[4] - st.phi_dot * st.nu_y;
    let ay = rate[5] + st.phi_dot * st.nu_x;
    let d_rate = p.gamma() * p.m() * p.radius() * sin * ay / d_general(cos, p).sqrt();
    let acc = [ax * cos, ay, ax * sin];
    let lever = vec3::cross(st.angular_velocity(), contact_arm(st.theta, p));
    Some((d_rate, p.m() * vec3::dot(acc, lever)))
}

/// Fourth-order centred difference at interior sample `k`.
fn centred(values: &[f64], k: usize, dt: f64) -> f64 {
    (values[k - 2] - 8.0 * values[k - 1] + 8.0 * values[k + 1] - values[k + 2]) / (12.0 * dt)
}

fn residual(values: &[f64], predicted: &[Option<f64>], dt: f64) -> Option<f64> {
    let n = values.len();
    if n < 5 {
        return None;
    }
    let peak = predicted.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
    if peak == 0.0 {
        return None;
    }
    (2..n - 2)
        .filter_map(|k| {
            let pr = predicted[k]?;
            (pr.abs() >= NOISE_FLOOR * peak).then(|| (centred(values, k, dt) - pr).abs() / pr.abs())
        })
        .reduce(f64::max)
}

pub fn conservation_report(traj: &Trajectory) -> ConservationReport {
    let samples = traj.samples();
    let lambda0 = samples.first().map(|s| s.diag.lambda).unwrap_or(f64::NAN);
    let lambda_drift = samples.iter().map(|s| (s.diag.lambda - lambda0).abs() / lambda0.abs()).fold(0.0, f64::max);

    let energy_tolerance = 10.0 * traj.settings().atol;
    let max_energy_rise =
        samples.windows(2).map(|w| w[1].diag.total_energy - w[0].diag.total_energy).fold(0.0, f64::max);

    let dt = traj.settings().sample_dt;
    let uniform = samples.windows(2).all(|w| ((w[1].t - w[0].t) - dt).abs() <= 1e-9 * dt);
    let (d_res, e_res) = if uniform {
        let rates: Vec<Option<(f64, f64)>> = samples.iter().map(|s| predicted_rates(s, traj)).collect();
        let d: Vec<f64> = samples.iter().map(|s| s.diag.routh).collect();
        let e: Vec<f64> = samples.iter().map(|s| s.diag.modified_energy).collect();
        let d_pred: Vec<Option<f64>> = rates.iter().map(|r| r.map(|r| r.0)).collect();
        let e_pred: Vec<Option<f64>> = rates.iter().map(|r| r.map(|r| r.1)).collect();
        (residual(&d, &d_pred, dt), residual(&e, &e_pred, dt))
    } else {
        (None, None)
    };

    ConservationReport {
        lambda_drift,
        energy_monotone: max_energy_rise <= energy_tolerance,
        max_energy_rise,
        energy_tolerance,
        d_derivative_residual: d_res,
        e_tilde_derivative_residual: e_res,
        routh_min: samples.iter().map(|s| s.diag.routh).fold(f64::INFINITY, f64::min),
        routh_max: samples.iter().map(|s| s.diag.routh).fold(f64::NEG_INFINITY, f64::max),
    }
}
