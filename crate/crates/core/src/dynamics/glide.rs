use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GlideState, TopParameters};

/// Smallest `sin(theta)` the Euler-angle equations are evaluated at.
pub const MIN_SIN_THETA: f64 = 1e-8;

/// Viscous gliding friction `F = -mu g_n v_A` with constant `mu`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrictionModel {
    mu: f64,
}

impl FrictionModel {
    pub fn new(mu: f64) -> Result<Self> {
        if mu >= 0.0 && mu.is_finite() {
            Ok(Self { mu })
        } else {
            Err(Error::InvalidParameter { name: "mu", value: mu, reason: "must be finite and non-negative" })
        }
    }

    pub fn frictionless() -> Self {
        Self { mu: 0.0 }
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }
}

/// Normal reaction from the contact constraint `z . (a + s) = 0`.
pub fn normal_force(s: &GlideState, p: &TopParameters, f: &FrictionModel) -> Result<f64> {
    let (m, r, a) = (p.m(), p.radius(), p.alpha());
    let (i1, i3) = (p.i1(), p.i3());
    let (sin, cos) = s.theta.sin_cos();
    let s2 = sin * sin;
    let num = m * p.g() * i1
        + m * r
            * a
            * (cos * (i1 * s.phi_dot * s.phi_dot * s2 + i1 * s.theta_dot * s.theta_dot)
                - i3 * s.phi_dot * s.omega3 * s2);
    let den = i1 + m * r * r * a * a * s2 - m * r * r * a * sin * (1.0 - a * cos) * f.mu() * s.nu_x;
    if !(den > 0.0) {
        return Err(Error::NonPositiveDenominator(den));
    }
    let g_n = num / den;
    if g_n < 0.0 {
        return Err(Error::NegativeNormalForce(g_n));
    }
    Ok(g_n)
}

/// Right-hand side of the reduced rolling-and-gliding equations, returned
/// in state order `(theta', theta'', phi'', omega3', nu_x', nu_y')`.
pub fn glide_derivative(s: &GlideState, p: &TopParameters, f: &FrictionModel) -> Result<[f64; 6]> {
    let (sin, cos) = s.theta.sin_cos();
    if sin < MIN_SIN_THETA {
        return Err(Error::SinThetaUnderflow(sin));
    }
    let g_n = normal_force(s, p, f)?;
    let (m, r, a, mu) = (p.m(), p.radius(), p.alpha(), f.mu());
    let (i1, i3) = (p.i1(), p.i3());
    let GlideState { theta_dot: td, phi_dot: pd, omega3: w3, nu_x: nx, nu_y: ny, .. } = *s;
    let lever = 1.0 - a * cos;
    let u = a - cos;
    let mr2 = m * r * r;

    let theta_dd = sin / i1 * (i1 * pd * pd * cos - i3 * w3 * pd - r * a * g_n) + r * mu * g_n * nx / i1 * lever;
    let phi_dd = (i3 * td * w3 - 2.0 * i1 * td * pd * cos - mu * g_n * ny * r * u) / (i1 * sin);
    let omega3_d = -mu * g_n * ny * r * sin / i3;
    let nu_x_d = r * sin / i1
        * (pd * w3 * (i3 * lever - i1) + g_n * r * a * lever - i1 * a * (td * td + pd * pd * sin * sin))
        - mu * g_n * nx / (m * i1) * (i1 + mr2 * lever * lever)
        + pd * ny;
    let nu_y_d = -mu * g_n * ny / (m * i1 * i3) * (i1 * i3 + mr2 * i3 * u * u + mr2 * i1 * sin * sin)
        + w3 * td * r / i1 * (i3 * u + i1 * cos)
        - pd * nx;

    Ok([td, theta_dd, phi_dd, omega3_d, nu_x_d, nu_y_d])
}
