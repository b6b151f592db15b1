//! Effective potential of the main equation `E~ = g(z) z'^2/(1-z^2) + V(z)`
//! and the location of its minimum.
//!
//! In the rational regime `V = mgR(1 - alpha z) + (az + b)^2 / (C (1 - z^2)) + const`
//! with `C = 2 I3 R^2 gamma^2 kappa`. Up to the factor `C` this is
//! `f(z) = -beta z + (az + b)^2 / (1 - z^2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{boundary_values, d_general, TopParameters};
use crate::poly::{count_roots, RealPolynomial};

/// Relative tolerance for recognising the branches `a = +-b`.
pub const DEGENERATE_REL_TOL: f64 = 1e-12;

const BOUNDARY_GAP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PotentialParams {
    pub a: f64,
    pub b: f64,
    pub beta: f64,
    pub lambda: f64,
    #[serde(rename = "D")]
    pub routh: f64,
}

impl PotentialParams {
    /// `2 a b`, `a^2 + b^2` and the other coefficients of `p(z)`, ascending.
    pub fn p_coefficients(&self) -> [f64; 5] {
        let (a, b, beta) = (self.a, self.b, self.beta);
        [2.0 * a * b - beta, 2.0 * (a * a + b * b), 2.0 * a * b + 2.0 * beta, 0.0, -beta]
    }

    /// `p(z) = 2 (az + b)(bz + a) - beta (1 - z^2)^2`, evaluated in factored form.
    pub fn p_eval(&self, z: f64) -> f64 {
        let w = 1.0 - z * z;
        2.0 * (self.a * z + self.b) * (self.b * z + self.a) - self.beta * w * w
    }

    /// `f(z) = -beta z + (az + b)^2 / (1 - z^2)`.
    pub fn f_eval(&self, z: f64) -> f64 {
        let n = self.a * z + self.b;
        -self.beta * z + n * n / (1.0 - z * z)
    }

    fn near(x: f64, y: f64) -> bool {
        (x - y).abs() <= DEGENERATE_REL_TOL * (x.abs() + y.abs())
    }

    /// `a = -b`, the upright boundary `D = D0`.
    pub fn is_upright_branch(&self) -> bool {
        Self::near(self.a, -self.b)
    }

    /// `a = b`, the inverted boundary `D = D1`.
    pub fn is_inverted_branch(&self) -> bool {
        Self::near(self.a, self.b)
    }
}

/// `C = 2 I3 R^2 gamma^2 kappa`, so that `V = mgR + f(z) / C + const`.
pub fn potential_scale(p: &TopParameters) -> f64 {
    2.0 * p.i3() * p.radius().powi(2) * p.gamma().powi(2) * p.kappa()
}

pub fn ab_beta(routh: f64, lambda: f64, p: &TopParameters) -> Result<PotentialParams> {
    p.require_rational()?;
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let (alpha, gamma, r) = (p.alpha(), p.gamma(), p.radius());
    let rdk = r * routh * p.kappa().sqrt();
    Ok(PotentialParams {
        a: -(1.0 - gamma) * lambda - rdk,
        b: alpha * lambda + alpha * rdk,
        beta: 2.0 * p.m() * p.g() * r.powi(3) * alpha * p.i3() * gamma * gamma * p.kappa(),
        lambda,
        routh,
    })
}

fn check_open(z: f64) -> Result<()> {
    if z.abs() >= 1.0 || z.is_nan() {
        Err(Error::PoleAtBoundary(z))
    } else {
        Ok(())
    }
}

/// Rational form of the effective potential.
pub fn v_rational(z: f64, routh: f64, lambda: f64, p: &TopParameters) -> Result<f64> {
    p.require_rational()?;
    check_open(z)?;
    let (alpha, gamma, r) = (p.alpha(), p.gamma(), p.radius());
    let kappa = p.kappa();
    let rdk = r * routh * kappa.sqrt();
    let n = lambda * (alpha - (1.0 - gamma) * z) + rdk * (alpha - z);
    Ok(p.energy_scale() * (1.0 - alpha * z)
        + n * n / (potential_scale(p) * (1.0 - z * z))
        + (rdk * rdk - (1.0 - gamma) * lambda * lambda) / (2.0 * r * r * p.i1() * kappa))
}

/// `dV/dz = p(z) / (C (1 - z^2)^2)` in the rational regime.
pub fn v_rational_dz(z: f64, pp: &PotentialParams, p: &TopParameters) -> Result<f64> {
    check_open(z)?;
    let w = 1.0 - z * z;
    Ok(pp.p_eval(z) / (potential_scale(p) * w * w))
}

/// General algebraic form of the effective potential.
pub fn v_algebraic(z: f64, routh: f64, lambda: f64, p: &TopParameters) -> Result<f64> {
    check_open(z)?;
    let (alpha, r) = (p.alpha(), p.radius());
    let n = lambda * d_general(z, p).sqrt() + r * routh * (alpha - z);
    Ok(p.energy_scale() * (1.0 - alpha * z)
        + n * n / (2.0 * p.i3() * r * r * p.gamma().powi(2) * (1.0 - z * z))
        + (r * r * routh * routh - p.sigma() * lambda * lambda) / (2.0 * r * r * p.i1()))
}

/// Kinetic coefficient `g(z)` of the main equation, general form.
pub fn g_coefficient(z: f64, p: &TopParameters) -> f64 {
    let u = p.alpha() - z;
    0.5 * p.i3() * (p.sigma() * (u * u + 1.0 - z * z) + p.gamma())
}

/// Affine form of `g(z)` valid in the rational regime.
pub fn g_rational(z: f64, p: &TopParameters) -> Result<f64> {
    p.require_rational()?;
    let (alpha, c) = (p.alpha(), 1.0 - p.gamma());
    Ok(0.5 * p.i3() * (alpha * alpha + c * c - 2.0 * alpha * c * z) / p.kappa())
}

/// `dg/dz`, constant in the rational regime.
pub fn g_rational_slope(p: &TopParameters) -> Result<f64> {
    p.require_rational()?;
    Ok(-p.i3() * p.alpha() * (1.0 - p.gamma()) / p.kappa())
}

/// `q(z) = 2ab z^3 + 3(a^2 + b^2) z^2 + 6ab z + a^2 + b^2`, whose positivity on
/// `(-1, 1)` is the convexity of `f`.
pub fn convexity_polynomial(pp: &PotentialParams) -> RealPolynomial {
    let (a, b) = (pp.a, pp.b);
    let s = a * a + b * b;
    RealPolynomial::new(vec![s, 6.0 * a * b, 3.0 * s, 2.0 * a * b])
}

/// Certifies convexity of the rational potential on `(-1, 1)`.
///
/// Generic case: no root of `q` in `(-1, 1]` and `q(0) > 0`. When `ab = 0`
/// or `a = +-b` the Sturm chain degenerates and the sign is read directly
/// from `q = 2ab(z + 1)^3 + (a - b)^2 (3z^2 + 1) = 2ab(z - 1)^3 + (a + b)^2 (3z^2 + 1)`.
pub fn convexity_witness(routh: f64, lambda: f64, p: &TopParameters) -> Result<bool> {
    let pp = ab_beta(routh, lambda, p)?;
    let (a, b) = (pp.a, pp.b);
    let ab = a * b;
    let s = a * a + b * b;
    if s == 0.0 {
        return Ok(true);
    }
    if ab.abs() <= DEGENERATE_REL_TOL * s {
        // q = (a^2 + b^2)(3z^2 + 1) up to a negligible cubic term.
        return Ok(true);
    }
    if pp.is_inverted_branch() || pp.is_upright_branch() {
        // q vanishes at one endpoint here, so the chain is not informative
        // there; sample the open interval instead.
        let grid = 2001;
        let q = convexity_polynomial(&pp);
        return Ok((1..grid).all(|i| {
            let z = -1.0 + 2.0 * i as f64 / grid as f64;
            q.eval(z) > -1e-12 * s
        }));
    }
    let q = convexity_polynomial(&pp);
    match count_roots(&q, -1.0, 1.0) {
        Ok(n) => Ok(n == 0 && q.eval(0.0) > 0.0),
        Err(_) => Ok(false),
    }
}

pub fn p_polynomial(routh: f64, lambda: f64, p: &TopParameters) -> Result<RealPolynomial> {
    Ok(RealPolynomial::new(ab_beta(routh, lambda, p)?.p_coefficients().to_vec()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimumLocation {
    pub z: f64,
    /// True when the minimum sits on `z = +-1`, where `V` has no finite value
    /// to evaluate.
    pub at_boundary: bool,
}

/// Location of the minimum of `V` over `[-1, 1]`.
pub fn find_minimum(routh: f64, lambda: f64, p: &TopParameters) -> Result<MinimumLocation> {
    let pp = ab_beta(routh, lambda, p)?;
    minimum_of(&pp)
}

pub fn minimum_of(pp: &PotentialParams) -> Result<MinimumLocation> {
    if pp.is_upright_branch() {
        return Ok(MinimumLocation { z: 1.0, at_boundary: true });
    }
    if pp.is_inverted_branch() {
        // f'(z) = 2a^2 / (1 - z)^2 - beta vanishes at 1 - |a| sqrt(2 / beta).
        let z = 1.0 - pp.a.abs() * (2.0 / pp.beta).sqrt();
        return Ok(if z <= -1.0 {
            MinimumLocation { z: -1.0, at_boundary: true }
        } else {
            MinimumLocation { z, at_boundary: false }
        });
    }
    let mut lo = -1.0 + BOUNDARY_GAP;
    let mut hi = 1.0 - BOUNDARY_GAP;
    // p(-1) = -2(a - b)^2 and p(1) = 2(a + b)^2; the interior points can
    // round to the wrong sign when the boundary values are tiny.
    if !(pp.p_eval(-1.0) < 0.0 && pp.p_eval(1.0) > 0.0) {
        return Err(Error::NoSignChange);
    }
    if pp.p_eval(lo) >= 0.0 {
        return Ok(MinimumLocation { z: lo, at_boundary: false });
    }
    if pp.p_eval(hi) <= 0.0 {
        return Ok(MinimumLocation { z: hi, at_boundary: false });
    }
    while hi - lo > 1e-15 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pp.p_eval(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(MinimumLocation { z: 0.5 * (lo + hi), at_boundary: false })
}

/// Smallest positive root of `A d^2 + B d - C = 0` with `B >= 0`, `C > 0`,
/// or infinity when there is none.
fn positive_root(a: f64, b: f64, c: f64) -> f64 {
    let disc = b * b + 4.0 * a * c;
    if disc < 0.0 {
        return f64::INFINITY;
    }
    let den = b + disc.sqrt();
    if a < 0.0 && den <= 0.0 {
        return f64::INFINITY;
    }
    2.0 * c / den
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name: "epsilon", value: epsilon, reason: "must lie in (0, 1)" })
    }
}

/// Bound on `R(1 + alpha) sqrt(kappa) (D - D1)` keeping the minimum within
/// `epsilon` of `z = -1`.
pub fn delta_minus(epsilon: f64, lambda: f64, p: &TopParameters) -> Result<f64> {
    check_epsilon(epsilon)?;
    let pp = ab_beta(0.0, lambda, p)?;
    let (alpha, gamma) = (p.alpha(), p.gamma());
    let rhs = (alpha * gamma * lambda).powi(2) - 0.5 * pp.beta * (2.0 - epsilon).powi(2) * (1.0 + alpha).powi(2);
    if !(rhs > 0.0) {
        return Err(Error::NonPositiveRhs(rhs));
    }
    let quad = alpha + (1.0 - epsilon) * (1.0 + alpha).powi(2) / (epsilon * epsilon);
    let lin = alpha * (1.0 - alpha) * gamma * lambda;
    Ok(positive_root(quad, lin, rhs))
}

/// Bound on `R(1 - alpha) sqrt(kappa) (D0 - D)` keeping the minimum within
/// `epsilon` of `z = 1`.
pub fn delta_plus(epsilon: f64, lambda: f64, p: &TopParameters) -> Result<f64> {
    check_epsilon(epsilon)?;
    let pp = ab_beta(0.0, lambda, p)?;
    let (alpha, gamma) = (p.alpha(), p.gamma());
    let rhs = (alpha * gamma * lambda).powi(2) + 0.5 * pp.beta * (2.0 - epsilon).powi(2) * (1.0 - alpha).powi(2);
    let quad = (1.0 - epsilon) * (1.0 - alpha).powi(2) / (epsilon * epsilon) - alpha;
    let lin = alpha * gamma * lambda * (1.0 + alpha);
    let d1 = gamma * (1.0 + alpha) * lambda;
    Ok(d1.min(positive_root(quad, lin, rhs)))
}

/// Routh offset `delta / (R (1 + alpha) sqrt(kappa))` above `D1`.
pub fn routh_offset_inverted(delta: f64, p: &TopParameters) -> f64 {
    delta / (p.radius() * (1.0 + p.alpha()) * p.kappa().sqrt())
}

/// Routh offset `delta / (R (1 - alpha) sqrt(kappa))` below `D0`.
pub fn routh_offset_upright(delta: f64, p: &TopParameters) -> f64 {
    delta / (p.radius() * (1.0 - p.alpha()) * p.kappa().sqrt())
}

/// `(D, z_min)` on `n` evenly spaced Routh values from `D0` to `D1`.
pub fn minimum_path(lambda: f64, p: &TopParameters, n: usize) -> Result<Vec<(f64, f64)>> {
    if n < 2 {
        return Err(Error::InvalidParameter { name: "n", value: n as f64, reason: "needs at least two points" });
    }
    let bv = boundary_values(lambda, p)?;
    (0..n)
        .map(|i| {
            let d = if i == n - 1 { bv.d1 } else { bv.d0 + (bv.d1 - bv.d0) * i as f64 / (n - 1) as f64 };
            find_minimum(d, lambda, p).map(|m| (d, m.z))
        })
        .collect()
}
