//! Pure rolling reduced to the single equation `E~ = g(cos theta) theta'^2 + V`.

use std::ops::ControlFlow;

use crate::dynamics::glide::MIN_SIN_THETA;
use crate::error::{Error, Result};
use crate::model::TopParameters;
use crate::ode::{self, Tolerances};
use crate::potential::{ab_beta, g_rational, g_rational_slope, v_rational, v_rational_dz, PotentialParams};

/// Rolling system at fixed `(D, lambda)`.
#[derive(Debug, Clone, Copy)]
pub struct RollingSystem {
    params: TopParameters,
    pot: PotentialParams,
    g_slope: f64,
}

impl RollingSystem {
    pub fn new(routh: f64, lambda: f64, p: &TopParameters) -> Result<Self> {
        Ok(Self { params: *p, pot: ab_beta(routh, lambda, p)?, g_slope: g_rational_slope(p)? })
    }

    pub fn potential(&self) -> &PotentialParams {
        &self.pot
    }

    /// `(theta', theta'')` with `theta'' = sin(theta) (g' theta'^2 + V') / (2 g)`.
    pub fn derivative(&self, theta: f64, theta_dot: f64) -> Result<(f64, f64)> {
        let (sin, z) = theta.sin_cos();
        if sin < MIN_SIN_THETA {
            return Err(Error::SinThetaUnderflow(sin));
        }
        let g = g_rational(z, &self.params)?;
        let dv = v_rational_dz(z, &self.pot, &self.params)?;
        Ok((theta_dot, sin * (self.g_slope * theta_dot * theta_dot + dv) / (2.0 * g)))
    }

    /// `g(cos theta) theta'^2 + V(cos theta)`.
    pub fn energy(&self, theta: f64, theta_dot: f64) -> Result<f64> {
        let z = theta.cos();
        Ok(g_rational(z, &self.params)? * theta_dot * theta_dot
            + v_rational(z, self.pot.routh, self.pot.lambda, &self.params)?)
    }
}

pub fn rolling_derivative(
    theta: f64,
    theta_dot: f64,
    routh: f64,
    lambda: f64,
    p: &TopParameters,
) -> Result<(f64, f64)> {
    RollingSystem::new(routh, lambda, p)?.derivative(theta, theta_dot)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RollingOrbit {
    /// Times at which `theta'` changes sign, located on the dense output.
    pub reversals: Vec<f64>,
    /// Largest `|E~(t) - E~(0)| / |E~(0)|` over accepted steps.
    pub max_energy_drift: f64,
    pub final_theta: f64,
    pub final_theta_dot: f64,
}

impl RollingOrbit {
    /// Mean time between every second reversal.
    pub fn mean_period(&self) -> Option<f64> {
        let r = &self.reversals;
        if r.len() < 3 {
            return None;
        }
        let full = (r.len() - 1) / 2 * 2;
        Some((r[full] - r[0]) / (full / 2) as f64)
    }
}

/// Integrates the rolling equation from `(theta0, theta_dot0)` over `[0, t_end]`.
pub fn integrate_rolling(
    theta0: f64,
    theta_dot0: f64,
    routh: f64,
    lambda: f64,
    p: &TopParameters,
    t_end: f64,
    tol: &Tolerances,
) -> Result<RollingOrbit> {
    let sys = RollingSystem::new(routh, lambda, p)?;
    let e0 = sys.energy(theta0, theta_dot0)?;
    let mut reversals = Vec::new();
    let mut drift = 0.0f64;
    let mut last_sign = sign(theta_dot0);
    let mut energy_err = None;
    let mut last = [theta0, theta_dot0];

    let result = ode::integrate(
        |_, y: &[f64; 2]| sys.derivative(y[0], y[1]).map(|(a, b)| [a, b]),
        0.0,
        [theta0, theta_dot0],
        t_end,
        tol,
        |step| {
            let y = step.end();
            last = y;
            match sys.energy(y[0], y[1]) {
                Ok(e) => drift = drift.max((e - e0).abs() / e0.abs()),
                Err(err) => {
                    energy_err = Some(err);
                    return ControlFlow::Break(());
                }
            }
            let s = sign(y[1]);
            if s != 0.0 {
                if last_sign != 0.0 && s != last_sign {
                    reversals.push(locate_zero(|t| step.eval(t)[1], step.t0, step.t1()));
                }
                last_sign = s;
            }
            ControlFlow::Continue(())
        },
    );
    if let Err((_, _, e)) = result {
        return Err(e);
    }
    if let Some(e) = energy_err {
        return Err(e);
    }
    Ok(RollingOrbit { reversals, max_energy_drift: drift, final_theta: last[0], final_theta_dot: last[1] })
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

/// Bisection for a sign change of `f` on `[a, b]`.
pub(crate) fn locate_zero<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    let mut fa = f(a);
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == (fa > 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}
