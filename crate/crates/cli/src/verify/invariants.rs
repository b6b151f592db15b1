//! Module properties checked at run time on seeded random inputs.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tippe_core::dynamics::{conservation_report, glide_derivative, integrate, integrate_rolling, IntegrationSettings};
use tippe_core::elliptic::elliptic_k;
use tippe_core::model::{boundary_values, jellett, lambda_threshold};
use tippe_core::nutation::period_report;
use tippe_core::ode::Tolerances;
use tippe_core::potential::{ab_beta, find_minimum, g_rational, minimum_path, v_rational};
use tippe_core::{FrictionModel, GlideState};

use super::criteria::rational_case;
use super::{CheckResult, Context, RATIONAL_RUN};
use crate::config::{self, RunConfig};

type Outcome = Result<(bool, String), String>;
type Check = (&'static str, &'static str, fn(&Context) -> Outcome);

pub fn all(ctx: &Context) -> Vec<CheckResult> {
    let checks: [Check; 8] = [
        ("jellett", "Jellett integral along the vector field", jellett_flow),
        ("ab-identity", "b + alpha a = alpha gamma lambda", ab_identity),
        ("min-path", "minimum path monotone in D", min_path),
        ("degenerate-band", "degenerate band limit", degenerate_band),
        ("rolling-energy", "rolling energy conservation", rolling_energy),
        ("elliptic", "complete elliptic integral values", elliptic),
        ("config-gate", "zero-duration run rejected", config_gate),
        ("smoke", "short inverting run", smoke),
    ];
    checks
        .iter()
        .map(|(id, title, f)| match f(ctx) {
            Ok((passed, detail)) => CheckResult::new(*id, title, passed, detail),
            Err(e) => CheckResult::new(*id, title, false, format!("error: {e}")),
        })
        .collect()
}

fn rng(ctx: &Context, stream: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(ctx.seed);
    r.set_stream(100 + stream);
    r
}

/// Rate of Jellett's integral along the flow by a centred difference.
fn jellett_flow(ctx: &Context) -> Outcome {
    let (p, _) = rational_case();
    let f = FrictionModel::new(0.3).map_err(|e| e.to_string())?;
    let mut r = rng(ctx, 1);
    let mut worst = 0.0f64;
    let mut evaluated = 0;
    for _ in 0..1000 {
        let s = GlideState {
            theta: r.random_range(0.2..2.9),
            theta_dot: r.random_range(-20.0..20.0),
            phi_dot: r.random_range(-40.0..40.0),
            omega3: r.random_range(-150.0..150.0),
            nu_x: r.random_range(-0.05..0.05),
            nu_y: r.random_range(-0.05..0.05),
        };
        let Ok(rate) = glide_derivative(&s, &p, &f) else { continue };
        let y = s.to_array();
        let h = 1e-6 / rate.iter().fold(1.0f64, |m, v| m.max(v.abs())).sqrt();
        let shifted = |sign: f64| GlideState::from_array(std::array::from_fn(|i| y[i] + sign * h * rate[i]));
        let dl = (jellett(&shifted(1.0), &p) - jellett(&shifted(-1.0), &p)) / (2.0 * h);
        let scale = p.radius() * p.i3() * (s.omega3.abs() + s.phi_dot.abs() + s.theta_dot.abs());
        worst = worst.max(dl.abs() / scale);
        evaluated += 1;
    }
    Ok((worst < 1e-6, format!("max scaled |dlambda/dt| = {worst:.2e} over {evaluated} states")))
}

fn ab_identity(ctx: &Context) -> Outcome {
    let (p, _) = rational_case();
    let thres = lambda_threshold(&p).map_err(|e| e.to_string())?;
    let mut r = rng(ctx, 2);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let lambda = r.random_range(0.01..10.0) * thres;
        let bv = boundary_values(lambda, &p).map_err(|e| e.to_string())?;
        let d = bv.d1 + r.random_range(-0.5..1.5) * (bv.d0 - bv.d1);
        let pp = ab_beta(d, lambda, &p).map_err(|e| e.to_string())?;
        let target = lambda * p.gamma() * p.alpha();
        worst = worst.max(((pp.b + p.alpha() * pp.a) - target).abs() / target);
    }
    Ok((worst < 1e-12, format!("max relative residual {worst:.2e}")))
}

fn min_path(_: &Context) -> Outcome {
    let (p, lambda) = rational_case();
    let path = minimum_path(lambda, &p, 200).map_err(|e| e.to_string())?;
    let monotone = path.windows(2).all(|w| w[1].1 <= w[0].1);
    let (first, last) = (path[0].1, path[path.len() - 1].1);
    Ok((
        monotone && first == 1.0 && last == -1.0,
        format!("z_min from {first} at D0 to {last} at D1, monotone: {monotone}"),
    ))
}

fn degenerate_band(_: &Context) -> Outcome {
    let (p, lambda) = rational_case();
    let bv = boundary_values(lambda, &p).map_err(|e| e.to_string())?;
    let d = 0.5 * (bv.d0 + bv.d1);
    let m = find_minimum(d, lambda, &p).map_err(|e| e.to_string())?;
    let vmin = v_rational(m.z, d, lambda, &p).map_err(|e| e.to_string())?;
    let rep = period_report(vmin, d, lambda, &p).map_err(|e| e.to_string())?;
    let ok = rep.k2 == 0.0 && (rep.k - PI / 2.0).abs() < 1e-15;
    Ok((ok, format!("k^2 = {}, K = {}", rep.k2, rep.k)))
}

fn rolling_energy(_: &Context) -> Outcome {
    let (p, lambda) = rational_case();
    let bv = boundary_values(lambda, &p).map_err(|e| e.to_string())?;
    let d = bv.d1 + 0.3 * (bv.d0 - bv.d1);
    let m = find_minimum(d, lambda, &p).map_err(|e| e.to_string())?;
    let g = g_rational(m.z, &p).map_err(|e| e.to_string())?;
    let theta_dot = (0.05 * p.energy_scale() / g).sqrt();
    let tol = Tolerances { rtol: 1e-12, atol: 1e-15, ..Tolerances::default() };
    let orbit = integrate_rolling(m.z.acos(), theta_dot, d, lambda, &p, 5.0, &tol).map_err(|e| e.to_string())?;
    Ok((
        orbit.max_energy_drift < 1e-9,
        format!("relative drift {:.2e} over {} reversals", orbit.max_energy_drift, orbit.reversals.len()),
    ))
}

fn elliptic(_: &Context) -> Outcome {
    // K(1/2) = Gamma(1/4)^2 / (4 sqrt(pi)).
    let k_half = 1.854_074_677_301_372;
    let k0 = elliptic_k(0.0).map_err(|e| e.to_string())?;
    let kh = elliptic_k(0.5).map_err(|e| e.to_string())?;
    let ok = (k0 - PI / 2.0).abs() < 1e-15 && (kh - k_half).abs() < 1e-14 && elliptic_k(1.0).is_err();
    Ok((ok, format!("K(0) = {k0}, K(1/2) = {kh}")))
}

fn config_gate(_: &Context) -> Outcome {
    let mut cfg: RunConfig = config::parse(RATIONAL_RUN).map_err(|e| e.to_string())?;
    cfg.t_end = 0.0;
    let rejected = cfg.validate().is_err_and(|e| e.exit_code() == 2);
    Ok((rejected, format!("t_end = 0 rejected with exit code 2: {rejected}")))
}

/// First two seconds of the rational run: no abort, bounded drift.
fn smoke(_: &Context) -> Outcome {
    let cfg: RunConfig = config::parse(RATIONAL_RUN).map_err(|e| e.to_string())?;
    let inputs = cfg.validate().map_err(|e| e.to_string())?;
    let settings = IntegrationSettings { t_end: 2.0, sample_dt: 1e-3, ..inputs.settings };
    let traj = integrate(&inputs.initial, &inputs.params, &inputs.friction, &settings).map_err(|e| e.to_string())?;
    let cons = conservation_report(&traj);
    Ok((
        traj.is_complete() && cons.lambda_drift < 1e-6 && cons.energy_monotone,
        format!("complete: {}, lambda drift {:.2e}", traj.is_complete(), cons.lambda_drift),
    ))
}
