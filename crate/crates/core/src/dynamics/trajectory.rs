//! Sampled solutions of the gliding equations.

use std::ops::ControlFlow;

use serde::{Deserialize, Serialize};

use crate::dynamics::glide::{glide_derivative, normal_force, FrictionModel};
use crate::error::{Error, Result};
use crate::model::{jellett, modified_energy, routh, total_energy, GlideState, IntegralSnapshot, TopParameters};
use crate::ode::{self, Tolerances};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegrationSettings {
    pub t_end: f64,
    pub rtol: f64,
    pub atol: f64,
    pub sample_dt: f64,
}

impl IntegrationSettings {
    /// Default tolerances `rtol = 1e-9`, `atol = 1e-12`.
    pub fn new(t_end: f64, sample_dt: f64) -> Self {
        let tol = Tolerances::default();
        Self { t_end, rtol: tol.rtol, atol: tol.atol, sample_dt }
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [("t_end", self.t_end), ("rtol", self.rtol), ("atol", self.atol), ("sample_dt", self.sample_dt)];
        for (name, value) in checks {
            if !(value > 0.0 && value.is_finite()) {
                return Err(Error::InvalidParameter { name, value, reason: "must be positive and finite" });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub state: GlideState,
    pub diag: IntegralSnapshot,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    Completed,
    Aborted { t: f64, error: Error },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryMeta {
    pub accepted_steps: usize,
    pub rejected_steps: usize,
    pub evaluations: usize,
    pub max_error_estimate: f64,
    pub termination: Termination,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    params: TopParameters,
    friction: FrictionModel,
    settings: IntegrationSettings,
    samples: Vec<Sample>,
    meta: TrajectoryMeta,
}

impl Trajectory {
    /// Trajectory from given states; diagnostics are recomputed.
    pub fn from_states(
        params: TopParameters,
        friction: FrictionModel,
        settings: IntegrationSettings,
        states: &[(f64, GlideState)],
    ) -> Result<Self> {
        if states.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(Error::InvalidParameter {
                name: "t",
                value: f64::NAN,
                reason: "sample times must increase strictly",
            });
        }
        Ok(Self {
            samples: states
                .iter()
                .map(|&(t, state)| Sample { t, state, diag: snapshot(&state, &params, &friction) })
                .collect(),
            params,
            friction,
            settings,
            meta: TrajectoryMeta {
                accepted_steps: 0,
                rejected_steps: 0,
                evaluations: 0,
                max_error_estimate: 0.0,
                termination: Termination::Completed,
            },
        })
    }

    pub fn params(&self) -> &TopParameters {
        &self.params
    }
    pub fn friction(&self) -> &FrictionModel {
        &self.friction
    }
    pub fn settings(&self) -> &IntegrationSettings {
        &self.settings
    }
    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }
    pub fn meta(&self) -> &TrajectoryMeta {
        &self.meta
    }
    pub fn is_complete(&self) -> bool {
        self.meta.termination == Termination::Completed
    }
}

/// All integrals at one state. A normal force that cannot be evaluated is
/// reported as NaN.
pub fn snapshot(s: &GlideState, p: &TopParameters, f: &FrictionModel) -> IntegralSnapshot {
    IntegralSnapshot {
        lambda: jellett(s, p),
        routh: routh(s, p),
        modified_energy: modified_energy(s, p),
        total_energy: total_energy(s, p),
        g_n: normal_force(s, p, f).unwrap_or(f64::NAN),
    }
}

/// Integrates the gliding equations from `s0` and samples the dense output
/// at multiples of `sample_dt`.
///
/// Invalid inputs are errors. A failure during the run ends the trajectory
/// early; the reason is kept in the metadata together with every sample
/// reached so far.
pub fn integrate(
    s0: &GlideState,
    p: &TopParameters,
    f: &FrictionModel,
    settings: &IntegrationSettings,
) -> Result<Trajectory> {
    settings.validate()?;
    s0.validate()?;
    glide_derivative(s0, p, f)?;

    let dt = settings.sample_dt;
    let last_index = (settings.t_end / dt * (1.0 + 1e-12)).floor() as u64;
    let mut samples = Vec::with_capacity(last_index as usize + 1);
    let push = |samples: &mut Vec<Sample>, t: f64, y: [f64; 6]| {
        let state = GlideState::from_array(y);
        samples.push(Sample { t, state, diag: snapshot(&state, p, f) });
    };
    push(&mut samples, 0.0, s0.to_array());
    let mut next = 1u64;

    let tol = Tolerances { rtol: settings.rtol, atol: settings.atol, ..Tolerances::default() };
    let mut last_step = None;
    let result = ode::integrate(
        |_, y: &[f64; 6]| glide_derivative(&GlideState::from_array(*y), p, f),
        0.0,
        s0.to_array(),
        settings.t_end,
        &tol,
        |step| {
            while next <= last_index {
                let t = next as f64 * dt;
                if t > step.t1() {
                    break;
                }
                push(&mut samples, t, step.eval(t));
                next += 1;
            }
            last_step = Some(*step);
            ControlFlow::Continue(())
        },
    );

    let (stats, termination) = match result {
        Ok(stats) => {
            // Sample times that round just past the final step.
            if let Some(step) = last_step {
                while next <= last_index {
                    let t = next as f64 * dt;
                    push(&mut samples, t, step.eval(t));
                    next += 1;
                }
            }
            (stats, Termination::Completed)
        }
        Err((stats, t, error)) => (stats, Termination::Aborted { t, error }),
    };

    Ok(Trajectory {
        params: *p,
        friction: *f,
        settings: *settings,
        samples,
        meta: TrajectoryMeta {
            accepted_steps: stats.accepted,
            rejected_steps: stats.rejected,
            evaluations: stats.evaluations,
            max_error_estimate: stats.max_error,
            termination,
        },
    })
}
