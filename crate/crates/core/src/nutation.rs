//! Nutation of `theta` inside the effective potential well: turning points,
//! the period integral, its elliptic form and the uniform bounds.
//!
//! On a band `[z1, z2]` of the main equation,
//! `(1 - z^2)(E~ - V(z)) = mgR alpha (z1 - z)(z2 - z)(z3 - z)` with a third root
//! `z3 < -1`, and the period is `T = 2 int sqrt(g) dz / sqrt((1 - z^2)(E~ - V))`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::elliptic::elliptic_k;
use crate::error::{Error, Result};
use crate::model::TopParameters;
use crate::potential::{ab_beta, g_rational, minimum_of, potential_scale, v_rational, PotentialParams};
use crate::quadrature::GaussLegendre;

/// Published constant of the uniform period bound.
pub const T_UPP_FACTOR: f64 = 21.95;
/// Largest `epsilon` for which the uniform bound holds.
pub const EPSILON_LIMIT: f64 = 0.9;
/// Largest `|w|` for which the uniform bound holds.
pub const W_LIMIT: f64 = 0.9999;
/// Period ratio above which the inversion is slow compared to nutation.
pub const OSCILLATION_RATIO: f64 = 10.0;

const QUADRATURE_ORDER: usize = 64;
const QUADRATURE_TOL: f64 = 1e-10;
const QUADRATURE_DOUBLINGS: u32 = 12;
const BOUNDARY_GAP: f64 = 1e-12;

/// `(epsilon, w) = (2 beta / b^2, a / b)`.
pub fn epsilon_w(routh: f64, lambda: f64, p: &TopParameters) -> Result<(f64, f64)> {
    eps_w_of(&ab_beta(routh, lambda, p)?)
}

fn eps_w_of(pp: &PotentialParams) -> Result<(f64, f64)> {
    if pp.b == 0.0 {
        return Err(Error::DegenerateB);
    }
    Ok((2.0 * pp.beta / (pp.b * pp.b), pp.a / pp.b))
}

fn v_of(z: f64, pp: &PotentialParams, p: &TopParameters) -> Result<f64> {
    v_rational(z, pp.routh, pp.lambda, p)
}

fn bisect<F: Fn(f64) -> Result<f64>>(f: F, mut lo: f64, mut hi: f64) -> Result<f64> {
    let f_lo = f(lo)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    let lo_positive = f_lo > 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm > 0.0) == lo_positive {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Interior minimum of `V`, required for a bounded band.
fn interior_minimum(pp: &PotentialParams) -> Result<f64> {
    let m = minimum_of(pp)?;
    if m.at_boundary {
        return Err(Error::PoleAtBoundary(m.z));
    }
    Ok(m.z)
}

/// Turning points `z1 <= z2` with `V(z1) = V(z2) = E~`.
pub fn turning_points(e_tilde: f64, routh: f64, lambda: f64, p: &TopParameters) -> Result<(f64, f64)> {
    let pp = ab_beta(routh, lambda, p)?;
    turning_points_of(e_tilde, &pp, p)
}

fn turning_points_of(e_tilde: f64, pp: &PotentialParams, p: &TopParameters) -> Result<(f64, f64)> {
    let zmin = interior_minimum(pp)?;
    let vmin = v_of(zmin, pp, p)?;
    if e_tilde < vmin {
        return Err(Error::BelowMinimum { energy: e_tilde, minimum: vmin });
    }
    if e_tilde == vmin {
        return Ok((zmin, zmin));
    }
    let excess = |z: f64| v_of(z, pp, p).map(|v| v - e_tilde);
    let (lo, hi) = (-1.0 + BOUNDARY_GAP, 1.0 - BOUNDARY_GAP);
    if !(excess(lo)? > 0.0 && excess(hi)? > 0.0) {
        return Err(Error::NoSignChange);
    }
    Ok((bisect(excess, lo, zmin)?, bisect(excess, zmin, hi)?))
}

/// Roots `(z2, z3)` of the quadratic left after dividing out `z - z1`.
pub fn companion_roots(z1: f64, pp: &PotentialParams) -> Result<(f64, f64)> {
    let (b_coef, c) = companion_coefficients(z1, pp)?;
    let disc = b_coef * b_coef - 4.0 * c;
    if disc < 0.0 {
        return Err(Error::ComplexRoots(disc));
    }
    // B >= 0, so the larger-magnitude root comes without cancellation.
    let q = -0.5 * (b_coef + disc.sqrt());
    let other = c / q;
    Ok((q.max(other), q.min(other)))
}

/// `(B, c)` of `z^2 + B z + c`.
fn companion_coefficients(z1: f64, pp: &PotentialParams) -> Result<(f64, f64)> {
    if !(z1 > -1.0 && z1 < 1.0) {
        return Err(Error::PoleAtBoundary(z1));
    }
    let den = pp.beta * (1.0 - z1 * z1);
    if den == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let (a, b) = (pp.a, pp.b);
    let s = a * a + b * b;
    Ok(((s + 2.0 * a * b * z1) / den, -1.0 + (s * z1 + 2.0 * a * b) / den))
}

/// `k^2 = (z2 - z1) / (z2 - z3)`.
pub fn k_squared(z1: f64, pp: &PotentialParams) -> Result<f64> {
    let (z2, z3) = companion_roots(z1, pp)?;
    Ok((z2 - z1) / (z2 - z3))
}

/// The functions `h1`, `h2`, `h3` of the expansions of `k^2` and
/// `1 / sqrt(z2 - z3)` in `epsilon`.
pub fn h_functions(z1: f64, w: f64, epsilon: f64) -> Result<(f64, f64, f64)> {
    let den = 1.0 + w * w + 2.0 * w * z1;
    if den == 0.0 {
        return Err(Error::DegenerateDenominator);
    }
    let s = 1.0 - z1 * z1;
    let mix = (1.0 + w * w) * z1 + 2.0 * w;
    let den2 = den * den;
    let h1 = -(1.0 + z1 * w) * (w + z1) * s / den2;
    let h2 = s * mix / (2.0 * den2);
    let inner = 1.0 + s * s / den2 * epsilon * epsilon - 2.0 * s * mix / den2 * epsilon;
    if !(inner > 0.0) {
        return Err(Error::ComplexRoots(inner));
    }
    Ok((h1, h2, inner.powf(-0.25)))
}

/// `k^2` in terms of `(z1, w, epsilon)`.
pub fn k_squared_scaled(z1: f64, w: f64, epsilon: f64) -> Result<f64> {
    let (_, _, h3) = h_functions(z1, w, epsilon)?;
    let den = 1.0 + w * w + 2.0 * w * z1;
    Ok(0.5 - 0.5 * (1.0 + z1 * (1.0 - z1 * z1) * epsilon / den) * h3 * h3)
}

/// Secant slope `(V(z) - V(zt)) / (z - zt)` from the factored difference,
/// free of cancellation as `z -> zt`.
fn secant_slope(zt: f64, z: f64, pp: &PotentialParams, p: &TopParameters) -> f64 {
    let (a, b) = (pp.a, pp.b);
    let st = 1.0 - zt * zt;
    let nt = a * zt + b;
    let c2 = -nt * nt - st * a * a;
    let c1 = -2.0 * a * b * st;
    let g = c2 * z + c2 * zt + c1;
    -p.energy_scale() * p.alpha() - g / (potential_scale(p) * st * (1.0 - z * z))
}

fn gauss() -> GaussLegendre {
    GaussLegendre::new(QUADRATURE_ORDER)
}

/// Band endpoints and the spurious root for one energy level.
#[derive(Debug, Clone, Copy)]
struct Band {
    z1: f64,
    z2: f64,
    zmin: f64,
    z3: f64,
}

fn band(e_tilde: f64, pp: &PotentialParams, p: &TopParameters) -> Result<Band> {
    let (z1, z2) = turning_points_of(e_tilde, pp, p)?;
    let zmin = interior_minimum(pp)?;
    let (_, z3) = companion_roots(z1, pp)?;
    Ok(Band { z1, z2, zmin, z3 })
}

/// Period of the `theta` oscillation at modified energy `E~`.
///
/// The integral is split at the band midpoint. Each half is written
/// relative to its own turning point, where `E~ - V` is the product of the
/// distance to that point and the secant slope of `V`; with
/// `z = mid + h sin(u)` the integrand is then smooth at both ends.
pub fn period_exact(e_tilde: f64, routh: f64, lambda: f64, p: &TopParameters) -> Result<f64> {
    let pp = ab_beta(routh, lambda, p)?;
    let bd = band(e_tilde, &pp, p)?;
    period_exact_of(&bd, &pp, p)
}

fn period_exact_of(bd: &Band, pp: &PotentialParams, p: &TopParameters) -> Result<f64> {
    let h = 0.5 * (bd.z2 - bd.z1);
    if h <= 0.0 {
        return small_oscillation_period(bd.zmin, pp, p);
    }
    let mid = 0.5 * (bd.z1 + bd.z2);
    let gl = gauss();
    let left = gl.integrate_adaptive(
        |u: f64| {
            let s = u.sin();
            let z = mid + h * s;
            let slope = -secant_slope(bd.z1, z, pp, p);
            let g = g_rational(z, p).unwrap_or(f64::NAN);
            (g * h * (1.0 - s) / ((1.0 - z * z) * slope)).sqrt()
        },
        -0.5 * PI,
        0.0,
        QUADRATURE_TOL,
        QUADRATURE_DOUBLINGS,
    )?;
    let right = gl.integrate_adaptive(
        |u: f64| {
            let s = u.sin();
            let z = mid + h * s;
            let slope = secant_slope(bd.z2, z, pp, p);
            let g = g_rational(z, p).unwrap_or(f64::NAN);
            (g * h * (1.0 + s) / ((1.0 - z * z) * slope)).sqrt()
        },
        0.0,
        0.5 * PI,
        QUADRATURE_TOL,
        QUADRATURE_DOUBLINGS,
    )?;
    Ok(2.0 * (left + right))
}

/// `2 pi sqrt(g(z_min)) / (sqrt(mgR alpha) sqrt(z_min - z3))`, the limit of
/// the period as the band shrinks to the minimum.
fn small_oscillation_period(zmin: f64, pp: &PotentialParams, p: &TopParameters) -> Result<f64> {
    let (_, z3) = companion_roots(zmin, pp)?;
    let g = g_rational(zmin, p)?;
    Ok(2.0 * PI * g.sqrt() / ((p.energy_scale() * p.alpha()).sqrt() * (zmin - z3).sqrt()))
}

/// Periods from the elliptic form with `g` frozen at `z2`, the band
/// midpoint and `z1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticPeriods {
    pub low: f64,
    pub mid: f64,
    pub high: f64,
    pub k2: f64,
    #[serde(rename = "K")]
    pub k: f64,
}

pub fn period_elliptic(e_tilde: f64, routh: f64, lambda: f64, p: &TopParameters) -> Result<EllipticPeriods> {
    let pp = ab_beta(routh, lambda, p)?;
    let bd = band(e_tilde, &pp, p)?;
    period_elliptic_of(&bd, p)
}

fn period_elliptic_of(bd: &Band, p: &TopParameters) -> Result<EllipticPeriods> {
    let (z2, z3) = (bd.z2, bd.z3);
    let k2 = ((z2 - bd.z1) / (z2 - z3)).max(0.0);
    let k = elliptic_k(k2)?;
    let lead = 4.0 * k / ((p.energy_scale() * p.alpha()).sqrt() * (z2 - z3).sqrt());
    Ok(EllipticPeriods {
        low: lead * g_rational(z2, p)?.sqrt(),
        mid: lead * g_rational(0.5 * (bd.z1 + z2), p)?.sqrt(),
        high: lead * g_rational(bd.z1, p)?.sqrt(),
        k2,
        k,
    })
}

/// `R I3 gamma (alpha + 1 - gamma)`, the common factor of both bounds.
fn bound_factor(p: &TopParameters) -> f64 {
    p.radius() * p.i3() * p.gamma() * (p.alpha() + 1.0 - p.gamma())
}

fn positive_b(pp: &PotentialParams) -> Result<f64> {
    if pp.b > 0.0 {
        Ok(pp.b)
    } else {
        Err(Error::DegenerateB)
    }
}

/// Bound on the leading factor of the period, `2 pi R I3 gamma (alpha + 1 - gamma) / b`.
pub fn t_max(routh: f64, lambda: f64, p: &TopParameters) -> Result<f64> {
    let pp = ab_beta(routh, lambda, p)?;
    Ok(2.0 * PI * bound_factor(p) / positive_b(&pp)?)
}

/// Uniform period bound `21.95 R I3 gamma (alpha + 1 - gamma) / b`, valid for
/// `epsilon < 0.9` and `|w| <= 0.9999`.
pub fn t_upp(routh: f64, lambda: f64, p: &TopParameters) -> Result<f64> {
    let pp = ab_beta(routh, lambda, p)?;
    t_upp_of(&pp, p)
}

fn t_upp_of(pp: &PotentialParams, p: &TopParameters) -> Result<f64> {
    let b = positive_b(pp)?;
    let (eps, w) = eps_w_of(pp)?;
    if !(eps < EPSILON_LIMIT) {
        return Err(Error::EpsilonTooLarge(eps));
    }
    if !(w.abs() <= W_LIMIT) {
        return Err(Error::WOutOfRange(w));
    }
    Ok(T_UPP_FACTOR * bound_factor(p) / b)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillationVerdict {
    /// `T_inv / T_upp`.
    pub ratio: f64,
    /// `ratio > 10`.
    pub oscillatory: bool,
}

pub fn oscillation_condition(t_inv: f64, routh: f64, lambda: f64, p: &TopParameters) -> Result<OscillationVerdict> {
    let ratio = t_inv / t_upp(routh, lambda, p)?;
    Ok(OscillationVerdict { ratio, oscillatory: ratio > OSCILLATION_RATIO })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeriodReport {
    pub z1: f64,
    pub z2: f64,
    pub z3: f64,
    pub k2: f64,
    #[serde(rename = "K")]
    pub k: f64,
    #[serde(rename = "T_exact")]
    pub t_exact: f64,
    #[serde(rename = "T_elliptic_low")]
    pub t_elliptic_low: f64,
    #[serde(rename = "T_elliptic_mid")]
    pub t_elliptic_mid: f64,
    #[serde(rename = "T_elliptic_high")]
    pub t_elliptic_high: f64,
    #[serde(rename = "T_max")]
    pub t_max: f64,
    /// Absent outside the domain of the uniform bound.
    #[serde(rename = "T_upp")]
    pub t_upp: Option<f64>,
    pub epsilon: f64,
    pub w: f64,
}

/// Full period analysis of one band.
pub fn period_report(e_tilde: f64, routh: f64, lambda: f64, p: &TopParameters) -> Result<PeriodReport> {
    let pp = ab_beta(routh, lambda, p)?;
    let bd = band(e_tilde, &pp, p)?;
    let ell = period_elliptic_of(&bd, p)?;
    let (epsilon, w) = eps_w_of(&pp)?;
    let t_upp = match t_upp_of(&pp, p) {
        Ok(t) => Some(t),
        Err(Error::EpsilonTooLarge(_) | Error::WOutOfRange(_)) => None,
        Err(e) => return Err(e),
    };
    Ok(PeriodReport {
        z1: bd.z1,
        z2: bd.z2,
        z3: bd.z3,
        k2: ell.k2,
        k: ell.k,
        t_exact: period_exact_of(&bd, &pp, p)?,
        t_elliptic_low: ell.low,
        t_elliptic_mid: ell.mid,
        t_elliptic_high: ell.high,
        t_max: 2.0 * PI * bound_factor(p) / positive_b(&pp)?,
        t_upp,
        epsilon,
        w,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::presets::rational_top;
    use crate::model::{boundary_values, lambda_threshold};
    use crate::potential::find_minimum;
    use proptest::prelude::*;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    struct Case {
        p: TopParameters,
        lambda: f64,
        d: f64,
        pp: PotentialParams,
        vmin: f64,
    }

    fn case(t: f64, k: f64) -> Case {
        let p = rational_top();
        let lambda = k * lambda_threshold(&p).unwrap();
        let bv = boundary_values(lambda, &p).unwrap();
        let d = bv.d0 + t * (bv.d1 - bv.d0);
        let pp = ab_beta(d, lambda, &p).unwrap();
        let m = find_minimum(d, lambda, &p).unwrap();
        let vmin = if m.at_boundary { f64::NAN } else { v_rational(m.z, d, lambda, &p).unwrap() };
        Case { p, lambda, d, pp, vmin }
    }

    /// `(2 / sqrt(mgR alpha)) int sqrt(g) / sqrt((z - z1)(z2 - z)(z - z3))`
    /// with the same sine substitution.
    fn factored_period(z1: f64, z2: f64, z3: f64, p: &TopParameters) -> f64 {
        let (mid, h) = (0.5 * (z1 + z2), 0.5 * (z2 - z1));
        let gl = GaussLegendre::new(64);
        let i = gl
            .integrate_adaptive(
                |u: f64| {
                    let z = mid + h * u.sin();
                    (g_rational(z, p).unwrap() / (z - z3)).sqrt()
                },
                -0.5 * PI,
                0.5 * PI,
                1e-13,
                12,
            )
            .unwrap();
        2.0 * i / (p.energy_scale() * p.alpha()).sqrt()
    }

    #[test]
    fn epsilon_w_at_boundaries() {
        let c = case(0.0, 2.0);
        let (_, w0) = epsilon_w(c.d, c.lambda, &c.p).unwrap();
        assert!((w0 + 1.0).abs() < 1e-13);
        let c = case(1.0, 2.0);
        let (_, w1) = epsilon_w(c.d, c.lambda, &c.p).unwrap();
        assert!((w1 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn epsilon_below_quarter_for_double_threshold() {
        for i in 1..100 {
            let c = case(i as f64 / 100.0, 2.0);
            let (eps, _) = epsilon_w(c.d, c.lambda, &c.p).unwrap();
            assert!(eps < 0.25);
        }
    }

    #[test]
    fn degenerate_band() {
        let c = case(0.5, 2.0);
        let (z1, z2) = turning_points(c.vmin, c.d, c.lambda, &c.p).unwrap();
        assert_eq!(z1, z2);
        assert!(k_squared(z1, &c.pp).unwrap().abs() < 1e-12);
        let ell = period_elliptic(c.vmin, c.d, c.lambda, &c.p).unwrap();
        assert_eq!(ell.k, PI / 2.0);
        assert_eq!(ell.low, ell.high);
        let (_, z3) = companion_roots(z1, &c.pp).unwrap();
        let expected = 2.0 * PI * g_rational(z1, &c.p).unwrap().sqrt()
            / ((c.p.energy_scale() * c.p.alpha()).sqrt() * (z1 - z3).sqrt());
        assert!(rel(ell.mid, expected) < 1e-12);
        assert!(turning_points(c.vmin * (1.0 - 1e-9), c.d, c.lambda, &c.p).is_err());
    }

    #[test]
    fn narrow_band_residuals() {
        let c = case(0.5, 2.0);
        let e = c.vmin * (1.0 + 1e-6);
        let zmin = find_minimum(c.d, c.lambda, &c.p).unwrap().z;
        let (z1, z2) = turning_points(e, c.d, c.lambda, &c.p).unwrap();
        assert!(z1 < zmin && zmin < z2);
        for z in [z1, z2] {
            assert!((v_rational(z, c.d, c.lambda, &c.p).unwrap() - e).abs() < 1e-11 * e.abs());
        }
    }

    #[test]
    fn band_matches_grid_scan() {
        let c = case(0.5, 2.0);
        let e = c.vmin + 0.01 * c.p.energy_scale();
        let (z1, z2) = turning_points(e, c.d, c.lambda, &c.p).unwrap();
        let n = 1_000_000;
        let inside: Vec<f64> = (1..n)
            .map(|i| -1.0 + 2.0 * i as f64 / n as f64)
            .filter(|&z| v_rational(z, c.d, c.lambda, &c.p).unwrap() <= e)
            .collect();
        let step = 2.0 / n as f64;
        assert!((inside[0] - z1).abs() <= step);
        assert!((inside[inside.len() - 1] - z2).abs() <= step);
    }

    #[test]
    fn companion_consistency() {
        let c = case(0.4, 2.0);
        let e = c.vmin + 0.02 * c.p.energy_scale();
        let (z1, z2) = turning_points(e, c.d, c.lambda, &c.p).unwrap();
        let (r2, r3) = companion_roots(z1, &c.pp).unwrap();
        assert!(rel(r2, z2) < 1e-9);
        assert!(r3 < -1.0);
        let v1 = v_rational(z1, c.d, c.lambda, &c.p).unwrap();
        assert!(rel(v_rational(r2, c.d, c.lambda, &c.p).unwrap(), v1) < 1e-9);
        let (a, b, beta) = (c.pp.a, c.pp.b, c.pp.beta);
        let den = beta * (1.0 - z1 * z1);
        assert!(rel(r2 * r3, -1.0 + ((a * a + b * b) * z1 + 2.0 * a * b) / den) < 1e-12);
        assert!(rel(r2 + r3, -(a * a + b * b + 2.0 * a * b * z1) / den) < 1e-12);
    }

    #[test]
    fn k_squared_closed_form_and_leading_order() {
        let c = case(0.3, 2.0);
        let e = c.vmin + 0.05 * c.p.energy_scale();
        let (z1, _) = turning_points(e, c.d, c.lambda, &c.p).unwrap();
        let (a, b, beta) = (c.pp.a, c.pp.b, c.pp.beta);
        let den = beta * (1.0 - z1 * z1);
        let bq = (a * a + b * b + 2.0 * a * b * z1) / den;
        let cq = -1.0 + ((a * a + b * b) * z1 + 2.0 * a * b) / den;
        let closed = 0.5 - 0.5 * (z1 + 0.5 * bq) / (0.25 * bq * bq - cq).sqrt();
        let k2 = k_squared(z1, &c.pp).unwrap();
        assert!((k2 - closed).abs() < 1e-12);
        let (eps, w) = eps_w_of(&c.pp).unwrap();
        assert!((k_squared_scaled(z1, w, eps).unwrap() - k2).abs() < 1e-12);

        for &(z1, w) in &[(-0.5, 0.2), (0.3, -0.6), (-0.9, 0.9)] {
            let eps = 1e-4;
            let (h1, _, _) = h_functions(z1, w, eps).unwrap();
            let k2 = k_squared_scaled(z1, w, eps).unwrap();
            assert!((k2 / eps - h1).abs() < 1e-2, "z1 {z1}, w {w}");
        }
    }

    #[test]
    fn h_function_landmarks() {
        let top = 2.0 / (3.0 * 3f64.sqrt());
        let (h1, _, _) = h_functions(-1.0 / 3f64.sqrt(), 0.0, 0.1).unwrap();
        assert!((h1 - top).abs() < 1e-15);
        let (h1, _, _) = h_functions(1.0 / 3f64.sqrt(), 0.0, 0.1).unwrap();
        assert!((h1 + top).abs() < 1e-15);
        for w in [-0.9, 0.0, 0.5] {
            assert_eq!(h_functions(1.0, w, 0.3).unwrap().1, 0.0);
            assert_eq!(h_functions(-1.0, w, 0.3).unwrap().1, 0.0);
        }
        assert_eq!(h_functions(-1.0, 1.0, 0.1), Err(Error::DegenerateDenominator));
    }

    #[test]
    fn t_max_published_bounds() {
        let p = rational_top();
        let lambda = 2.0 * lambda_threshold(&p).unwrap();
        let factor = bound_factor(&p);
        assert!(rel(factor, 2.1816e-8) < 1e-3, "factor {factor}");
        let bv = boundary_values(lambda, &p).unwrap();
        let lo = t_max(bv.d0, lambda, &p).unwrap();
        let hi = t_max(bv.d1, lambda, &p).unwrap();
        assert!(rel(lo, 0.0497) < 0.01 && rel(hi, 0.0923) < 0.01, "{lo} {hi}");
        let t2 = t_max(bv.d0 * 0.5, lambda, &p).unwrap();
        let bv4 = boundary_values(2.0 * lambda, &p).unwrap();
        let t4 = t_max(bv4.d0 * 0.5, 2.0 * lambda, &p).unwrap();
        assert!(rel(t2 / t4, 2.0) < 1e-12);
    }

    #[test]
    fn t_upp_ratio_and_gates() {
        let c = case(0.5, 2.0);
        let ratio = t_upp(c.d, c.lambda, &c.p).unwrap() / t_max(c.d, c.lambda, &c.p).unwrap();
        assert!(rel(ratio, 21.95 / (2.0 * PI)) < 1e-14);
        assert!((ratio - 3.49).abs() < 0.01);
        // lambda barely above threshold gives epsilon close to 1.
        let c = case(0.5, 1.0);
        let (eps, _) = epsilon_w(c.d, c.lambda, &c.p).unwrap();
        if eps >= 0.9 {
            assert!(matches!(t_upp(c.d, c.lambda, &c.p), Err(Error::EpsilonTooLarge(_))));
        }
        let c = case(0.0, 2.0);
        assert!(matches!(t_upp(c.d, c.lambda, &c.p), Err(Error::WOutOfRange(_))));
    }

    #[test]
    fn oscillation_verdicts() {
        let c = case(0.5, 2.0);
        let v = oscillation_condition(0.0, c.d, c.lambda, &c.p).unwrap();
        assert_eq!(v, OscillationVerdict { ratio: 0.0, oscillatory: false });
        let v = oscillation_condition(4.5, c.d, c.lambda, &c.p).unwrap();
        assert!(v.oscillatory);
        let c2 = case(0.5, 4.0);
        let v2 = oscillation_condition(4.5, c2.d, c2.lambda, &c2.p).unwrap();
        assert!(rel(v2.ratio / v.ratio, 2.0) < 1e-12);
    }

    #[test]
    fn small_oscillation_limit_is_approached() {
        let c = case(0.5, 2.0);
        let mut prev = f64::NAN;
        let mut diffs = Vec::new();
        for k in 2..8 {
            let e = c.vmin + c.p.energy_scale() * 10f64.powi(-k);
            let t = period_exact(e, c.d, c.lambda, &c.p).unwrap();
            if prev.is_finite() {
                diffs.push((t - prev).abs());
            }
            prev = t;
        }
        assert!(diffs.windows(2).all(|w| w[1] < w[0]));
        let limit = period_exact(c.vmin, c.d, c.lambda, &c.p).unwrap();
        assert!(rel(prev, limit) < 1e-5, "{prev} vs {limit}");
    }

    #[test]
    fn small_epsilon_law() {
        let p = rational_top();
        let lt = lambda_threshold(&p).unwrap();
        let mut errs = Vec::new();
        for k in [4.0, 16.0, 64.0] {
            let lambda = k * lt;
            let bv = boundary_values(lambda, &p).unwrap();
            let d = 0.5 * (bv.d0 + bv.d1);
            let pp = ab_beta(d, lambda, &p).unwrap();
            let (eps, w) = eps_w_of(&pp).unwrap();
            let zmin = minimum_of(&pp).unwrap().z;
            let e = v_rational(zmin, d, lambda, &p).unwrap() + 1e-6 * p.energy_scale();
            let (z1, z2) = turning_points(e, d, lambda, &p).unwrap();
            let t = period_exact(e, d, lambda, &p).unwrap();
            let g = g_rational(0.5 * (z1 + z2), &p).unwrap();
            let lead = 2.0 * PI * g.sqrt() / (p.energy_scale() * p.alpha()).sqrt()
                * ((1.0 - z1 * z1) / (1.0 + w * w + 2.0 * w * z1)).sqrt()
                * (0.5 * eps).sqrt();
            errs.push(((t / lead) - 1.0).abs() / eps);
        }
        assert!(errs.iter().all(|e| *e < 1.0), "{errs:?}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn factorization_and_bound_chain(t in 0.02f64..0.98, k in 1.2f64..8.0, frac in 1e-4f64..0.3) {
            let c = case(t, k);
            let e = c.vmin + frac * c.p.energy_scale();
            let Ok((z1, z2)) = turning_points(e, c.d, c.lambda, &c.p) else { return Ok(()); };
            let (r2, z3) = companion_roots(z1, &c.pp).unwrap();
            prop_assert!(rel(r2, z2) < 1e-9);
            let scale = c.p.energy_scale() * c.p.alpha();
            for i in 0..1000 {
                let z = -0.999 + 1.998 * i as f64 / 999.0;
                let lhs = (1.0 - z * z) * (e - v_rational(z, c.d, c.lambda, &c.p).unwrap());
                let rhs = scale * (z1 - z) * (z2 - z) * (z3 - z);
                let local = scale * ((z1 - z).abs() + 1.0) * ((z2 - z).abs() + 1.0) * (z3 - z).abs();
                prop_assert!((lhs - rhs).abs() < 1e-9 * local.max(lhs.abs()));
            }
            let rep = period_report(e, c.d, c.lambda, &c.p).unwrap();
            let factored = factored_period(z1, z2, z3, &c.p);
            prop_assert!(rel(rep.t_exact, factored) < 1e-10, "{} vs {}", rep.t_exact, factored);
            prop_assert!(rep.t_elliptic_low <= rep.t_exact && rep.t_exact <= rep.t_elliptic_high);
            if let Some(tu) = rep.t_upp {
                prop_assert!(rep.t_elliptic_high <= tu);
            }
            let (_, _, h3) = h_functions(z1, rep.w, rep.epsilon).unwrap();
            let den = 1.0 + rep.w * rep.w + 2.0 * rep.w * z1;
            let inv = (rep.epsilon / 2.0).sqrt() * ((1.0 - z1 * z1) / den).sqrt() * h3;
            prop_assert!(rel(inv, 1.0 / (z2 - z3).sqrt()) < 1e-10);
        }
    }
}
