//! Physical parameters, the reduced state, and the integrals and
//! quasi-integrals of the rolling and gliding top.
//!
//! Conventions: `z = cos(theta)`, the body frame is `(1, 2, 3)` with `3`
//! along the symmetry axis, and the Jellett value is taken positive.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::vec3::{self, Vec3};

/// Gravitational acceleration used when a configuration does not set one.
pub const STANDARD_GRAVITY: f64 = 9.81;

/// Relative tolerance on `sigma (gamma + alpha^2 - 1) = 1 - gamma`.
pub const RATIONAL_REGIME_TOL: f64 = 1e-12;

/// Mass, geometry and inertia of an axisymmetric top with a shifted centre
/// of mass. The ratios `gamma = I1/I3` and `sigma = m R^2 / I3` are derived
/// at construction and cannot be set on their own.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TopParameters {
    m: f64,
    r: f64,
    alpha: f64,
    i1: f64,
    i3: f64,
    g: f64,
    gamma: f64,
    sigma: f64,
}

fn require(name: &'static str, value: f64, ok: bool, reason: &'static str) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}

impl TopParameters {
    pub fn new(m: f64, r: f64, alpha: f64, i1: f64, i3: f64, g: f64) -> Result<Self> {
        require("m", m, m > 0.0, "must be positive")?;
        require("R", r, r > 0.0, "must be positive")?;
        require("alpha", alpha, alpha > 0.0 && alpha < 1.0, "must lie in (0, 1)")?;
        require("I1", i1, i1 > 0.0, "must be positive")?;
        require("I3", i3, i3 > 0.0, "must be positive")?;
        require("g", g, g > 0.0, "must be positive")?;
        Ok(Self { m, r, alpha, i1, i3, g, gamma: i1 / i3, sigma: m * r * r / i3 })
    }

    /// Parameters whose transverse inertia is chosen so the effective
    /// potential is rational in `cos(theta)`.
    pub fn rational(m: f64, r: f64, alpha: f64, i3: f64, g: f64) -> Result<Self> {
        require("m", m, m > 0.0, "must be positive")?;
        require("R", r, r > 0.0, "must be positive")?;
        require("alpha", alpha, alpha > 0.0 && alpha < 1.0, "must lie in (0, 1)")?;
        require("I3", i3, i3 > 0.0, "must be positive")?;
        Self::new(m, r, alpha, derive_rational_inertia(i3, m, r, alpha), i3, g)
    }

    pub fn m(&self) -> f64 {
        self.m
    }
    pub fn radius(&self) -> f64 {
        self.r
    }
    pub fn alpha(&self) -> f64 {
        self.alpha
    }
    pub fn i1(&self) -> f64 {
        self.i1
    }
    pub fn i3(&self) -> f64 {
        self.i3
    }
    pub fn g(&self) -> f64 {
        self.g
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// `gamma + alpha^2 - 1`, positive in the rational regime.
    pub fn kappa(&self) -> f64 {
        self.gamma + self.alpha * self.alpha - 1.0
    }

    /// `m g R`, the natural energy scale.
    pub fn energy_scale(&self) -> f64 {
        self.m * self.g * self.r
    }

    pub fn in_inversion_regime(&self) -> bool {
        1.0 - self.alpha < self.gamma && self.gamma < 1.0 + self.alpha
    }

    pub fn in_rational_regime(&self) -> bool {
        let gap = 1.0 - self.gamma;
        1.0 - self.alpha * self.alpha < self.gamma
            && self.gamma < 1.0
            && (self.sigma * self.kappa() - gap).abs() <= RATIONAL_REGIME_TOL * gap
    }

    pub(crate) fn require_rational(&self) -> Result<()> {
        if self.in_rational_regime() {
            Ok(())
        } else {
            Err(Error::RegimeViolation)
        }
    }
}

/// Reduced dynamical state of the gliding top.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlideState {
    pub theta: f64,
    pub theta_dot: f64,
    pub phi_dot: f64,
    pub omega3: f64,
    pub nu_x: f64,
    pub nu_y: f64,
}

impl GlideState {
    /// State spinning at `omega3` with inclination `theta`, all other rates zero.
    pub fn spinning(theta: f64, omega3: f64) -> Self {
        Self { theta, theta_dot: 0.0, phi_dot: 0.0, omega3, nu_x: 0.0, nu_y: 0.0 }
    }

    pub fn to_array(&self) -> [f64; 6] {
        [self.theta, self.theta_dot, self.phi_dot, self.omega3, self.nu_x, self.nu_y]
    }

    pub fn from_array(y: [f64; 6]) -> Self {
        Self { theta: y[0], theta_dot: y[1], phi_dot: y[2], omega3: y[3], nu_x: y[4], nu_y: y[5] }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("theta", self.theta),
            ("theta_dot", self.theta_dot),
            ("phi_dot", self.phi_dot),
            ("omega3", self.omega3),
            ("nu_x", self.nu_x),
            ("nu_y", self.nu_y),
        ] {
            require(name, v, true, "must be finite")?;
        }
        require("theta", self.theta, self.theta > 0.0 && self.theta < std::f64::consts::PI, "must lie in (0, pi)")
    }

    /// Angular velocity in the `(1, 2, 3)` frame.
    pub fn angular_velocity(&self) -> Vec3 {
        [-self.phi_dot * self.theta.sin(), self.theta_dot, self.omega3]
    }

    /// Gliding velocity of the contact point in the `(1, 2, 3)` frame.
    pub fn gliding_velocity(&self) -> Vec3 {
        let (s, c) = self.theta.sin_cos();
        [self.nu_x * c, self.nu_y, self.nu_x * s]
    }
}

/// Integrals and quasi-integrals evaluated at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralSnapshot {
    pub lambda: f64,
    #[serde(rename = "D")]
    pub routh: f64,
    #[serde(rename = "E_tilde")]
    pub modified_energy: f64,
    #[serde(rename = "E_total")]
    pub total_energy: f64,
    pub g_n: f64,
}

/// Boundary values of `(D, E~)` at the upright and inverted spinning states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryValues {
    #[serde(rename = "D0")]
    pub d0: f64,
    #[serde(rename = "E_tilde_0")]
    pub e0: f64,
    #[serde(rename = "D1")]
    pub d1: f64,
    #[serde(rename = "E_tilde_1")]
    pub e1: f64,
}

/// `I1 = (I3^2 + m R^2 I3 (1 - alpha^2)) / (I3 + m R^2)`, the transverse
/// inertia that makes `d(z)` a perfect square.
pub fn derive_rational_inertia(i3: f64, m: f64, r: f64, alpha: f64) -> f64 {
    let mr2 = m * r * r;
    (i3 * i3 + mr2 * i3 * (1.0 - alpha * alpha)) / (i3 + mr2)
}

/// Jellett value above which only the inverted spin is stable.
pub fn lambda_threshold(p: &TopParameters) -> Result<f64> {
    if !p.in_inversion_regime() {
        return Err(Error::ThresholdUndefined);
    }
    let a = p.alpha;
    Ok((p.m * p.g * p.r.powi(3) * p.i3 * a).sqrt() * (1.0 + a).powi(2) / (1.0 + a - p.gamma).sqrt())
}

/// Jellett's integral `lambda = -L . a`.
pub fn jellett(s: &GlideState, p: &TopParameters) -> f64 {
    let (sin, cos) = s.theta.sin_cos();
    p.r * p.i1 * s.phi_dot * sin * sin - p.r * p.i3 * s.omega3 * (p.alpha - cos)
}

/// `d(z) = gamma + sigma (alpha - z)^2 + sigma gamma (1 - z^2)`.
pub fn d_general(z: f64, p: &TopParameters) -> f64 {
    let u = p.alpha - z;
    p.gamma + p.sigma * u * u + p.sigma * p.gamma * (1.0 - z * z)
}

/// Routh function `D = I3 omega3 sqrt(d(cos theta))`.
pub fn routh(s: &GlideState, p: &TopParameters) -> f64 {
    p.i3 * s.omega3 * d_general(s.theta.cos(), p).sqrt()
}

/// Energy with the gliding velocity removed.
pub fn modified_energy(s: &GlideState, p: &TopParameters) -> f64 {
    let (sin, cos) = s.theta.sin_cos();
    let s2 = sin * sin;
    let u = p.alpha - cos;
    let td2 = s.theta_dot * s.theta_dot;
    let pd2s2 = s.phi_dot * s.phi_dot * s2;
    0.5 * (p.i1 * pd2s2 + p.i1 * td2 + p.i3 * s.omega3 * s.omega3)
        + p.m * p.g * p.r * (1.0 - p.alpha * cos)
        + 0.5
            * p.m
            * p.r
            * p.r
            * (u * u * (td2 + pd2s2) + s2 * (td2 + s.omega3 * s.omega3 + 2.0 * s.omega3 * s.phi_dot * u))
}

/// Vector `a` from the centre of mass to the contact point, `(1, 2, 3)` frame.
pub(crate) fn contact_arm(theta: f64, p: &TopParameters) -> Vec3 {
    let (s, c) = theta.sin_cos();
    [p.r * s, 0.0, p.r * (p.alpha - c)]
}

/// Total mechanical energy, including the translational part carried by the
/// gliding velocity.
pub fn total_energy(s: &GlideState, p: &TopParameters) -> f64 {
    let omega = s.angular_velocity();
    let a = contact_arm(s.theta, p);
    let v_cm = vec3::sub(s.gliding_velocity(), vec3::cross(omega, a));
    let l = [p.i1 * omega[0], p.i1 * omega[1], p.i3 * omega[2]];
    0.5 * p.m * vec3::dot(v_cm, v_cm) + 0.5 * vec3::dot(omega, l) + p.m * p.g * p.r * (1.0 - p.alpha * s.theta.cos())
}

/// `(D0, E~0, D1, E~1)` for a given positive Jellett value.
pub fn boundary_values(lambda: f64, p: &TopParameters) -> Result<BoundaryValues> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositiveLambda(lambda));
    }
    let a = p.alpha;
    let (r, i3) = (p.r, p.i3);
    let mgr = p.energy_scale();
    Ok(BoundaryValues {
        d0: lambda * d_general(1.0, p).sqrt() / (r * (1.0 - a)),
        d1: -lambda * d_general(-1.0, p).sqrt() / (r * (1.0 + a)),
        e0: lambda * lambda / (2.0 * r * r * i3 * (1.0 - a).powi(2)) + mgr * (1.0 - a),
        e1: lambda * lambda / (2.0 * r * r * i3 * (1.0 + a).powi(2)) + mgr * (1.0 + a),
    })
}

/// Parameter sets used throughout the examples and verification suite.
pub mod presets {
    use super::{TopParameters, STANDARD_GRAVITY};

    /// 20 g top of radius 2 cm, `alpha = 0.3`, solid-sphere `I3` and rational `I1`.
    pub fn rational_top() -> TopParameters {
        let (m, r) = (0.02, 0.02);
        TopParameters::rational(m, r, 0.3, 0.4 * m * r * r, STANDARD_GRAVITY).expect("preset parameters are valid")
    }

    /// 15 g top of radius 2.5 cm, `alpha = 0.2`, `I1 = I3` (algebraic potential).
    pub fn algebraic_top() -> TopParameters {
        let (m, r) = (0.015, 0.025);
        let i = 0.4 * m * r * r;
        TopParameters::new(m, r, 0.2, i, i, STANDARD_GRAVITY).expect("preset parameters are valid")
    }
}

#[cfg(test)]
mod tests {
    use super::presets::{algebraic_top, rational_top};
    use super::*;
    use std::f64::consts::PI;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
    }

    #[test]
    fn rational_inertia_reproduces_published_gamma() {
        let p = rational_top();
        let mr2 = p.m() * p.radius().powi(2);
        assert!(rel(p.i1(), 131.0 / 350.0 * mr2) < 1e-14);
        assert!(rel(p.gamma(), 131.0 / 140.0) < 1e-14);
        assert!(p.in_rational_regime());
        assert!(p.in_inversion_regime());
    }

    #[test]
    fn rational_inertia_degenerates_to_i3_without_offset() {
        let i1 = derive_rational_inertia(1.0, 1.0, 1.0, 0.0);
        assert_eq!(i1, 1.0);
    }

    #[test]
    fn rational_inertia_gamma_in_open_interval() {
        let (m, r, a) = (0.015, 0.025, 0.2);
        let i3 = 0.4 * m * r * r;
        let gamma = derive_rational_inertia(i3, m, r, a) / i3;
        assert!(gamma > 1.0 - a * a && gamma < 1.0, "gamma = {gamma}");
    }

    #[test]
    fn algebraic_top_is_not_rational() {
        let p = algebraic_top();
        assert_eq!(p.gamma(), 1.0);
        assert!(!p.in_rational_regime());
        assert!(p.in_inversion_regime());
    }

    #[test]
    fn invalid_parameters_rejected() {
        assert!(TopParameters::new(0.0, 1.0, 0.3, 1.0, 1.0, 9.81).is_err());
        assert!(TopParameters::new(1.0, 1.0, 1.0, 1.0, 1.0, 9.81).is_err());
        assert!(TopParameters::new(1.0, 1.0, 0.3, f64::NAN, 1.0, 9.81).is_err());
        assert!(TopParameters::rational(1.0, 1.0, 0.3, -1.0, 9.81).is_err());
    }

    #[test]
    fn threshold_matches_published_value() {
        let lt = lambda_threshold(&rational_top()).unwrap();
        assert!(rel(lt, 3.44e-6) < 5e-3, "lambda_thres = {lt}");
    }

    #[test]
    fn threshold_scales_with_sqrt_mass() {
        let p = rational_top();
        let q = TopParameters::new(2.0 * p.m(), p.radius(), p.alpha(), p.i1(), p.i3(), p.g()).unwrap();
        let ratio = lambda_threshold(&q).unwrap() / lambda_threshold(&p).unwrap();
        assert!(rel(ratio, 2f64.sqrt()) < 1e-14);
    }

    #[test]
    fn threshold_undefined_outside_inversion_regime() {
        let p = TopParameters::new(1.0, 1.0, 0.2, 0.5, 1.0, 9.81).unwrap();
        assert_eq!(lambda_threshold(&p), Err(Error::ThresholdUndefined));
    }

    #[test]
    fn algebraic_top_initial_spin_exceeds_threshold() {
        let p = algebraic_top();
        let lt = lambda_threshold(&p).unwrap();
        assert!(lt.is_finite() && lt > 0.0);
        let lambda = jellett(&GlideState::spinning(0.1, 100.0), &p);
        assert!(lambda > lt);
    }

    #[test]
    fn threshold_increases_with_alpha() {
        let (m, r) = (0.02, 0.02);
        let i3 = 0.4 * m * r * r;
        let i1 = 0.98 * i3;
        let mut prev = 0.0;
        for k in 1..100 {
            let alpha = 0.03 + 0.0097 * k as f64;
            let p = TopParameters::new(m, r, alpha, i1, i3, 9.81).unwrap();
            let lt = lambda_threshold(&p).unwrap();
            assert!(lt > prev, "not increasing at alpha = {alpha}");
            prev = lt;
        }
    }

    #[test]
    fn jellett_initial_spin() {
        let p = rational_top();
        let lambda = jellett(&GlideState::spinning(0.1, 155.0), &p);
        assert!(rel(lambda, 6.88e-6) < 5e-3, "lambda = {lambda}");
        let tiny = GlideState::spinning(1e-9, 155.0);
        let l0 = p.i3() * 155.0;
        assert!(rel(jellett(&tiny, &p), l0 * p.radius() * (1.0 - p.alpha())) < 1e-12);
        let side = GlideState { theta: PI / 2.0, phi_dot: 10.0, ..GlideState::spinning(PI / 2.0, 0.0) };
        assert!(rel(jellett(&side, &p), 10.0 * p.radius() * p.i1()) < 1e-15);
    }

    #[test]
    fn d_general_forms() {
        let p = rational_top();
        let expected = p.gamma() + p.sigma() * (1.0 - p.alpha()).powi(2);
        assert!(rel(d_general(1.0, &p), expected) < 1e-15);
        let square = |z: f64| (p.alpha() - (1.0 - p.gamma()) * z).powi(2) / p.kappa();
        for z in [-1.0, -0.3, 0.0, 0.5, 1.0] {
            assert!(rel(d_general(z, &p), square(z)) < 1e-12, "z = {z}");
        }
        let at_zero = p.gamma() + p.sigma() * p.alpha().powi(2) + p.sigma() * p.gamma();
        assert!(rel(d_general(0.0, &p), at_zero) < 1e-15);
    }

    #[test]
    fn perfect_square_on_grid() {
        let p = rational_top();
        let k = p.kappa().sqrt();
        for i in 0..1000 {
            let z = -1.0 + 2.0 * i as f64 / 999.0;
            let lhs = d_general(z, &p).sqrt();
            let rhs = (p.alpha() - (1.0 - p.gamma()) * z).abs() / k;
            assert!(rel(lhs, rhs) < 1e-12);
        }
    }

    #[test]
    fn routh_limits() {
        let p = rational_top();
        assert_eq!(routh(&GlideState::spinning(0.7, 0.0), &p), 0.0);
        let tiny = GlideState::spinning(1e-9, 155.0);
        let d0 = p.i3() * 155.0 * d_general(1.0, &p).sqrt();
        assert!(rel(routh(&tiny, &p), d0) < 1e-12);
    }

    #[test]
    fn routh_of_initial_spin_near_upright_boundary() {
        let p = rational_top();
        let s = GlideState::spinning(0.1, 155.0);
        let bv = boundary_values(jellett(&s, &p), &p).unwrap();
        let d = routh(&s, &p);
        assert!(d > 0.0 && rel(d, bv.d0) < 0.02, "D = {d}, D0 = {}", bv.d0);
    }

    #[test]
    fn modified_energy_static_values() {
        let p = rational_top();
        let mgr = p.energy_scale();
        assert!(rel(modified_energy(&GlideState::spinning(PI / 2.0, 0.0), &p), mgr) < 1e-15);
        let e = modified_energy(&GlideState::spinning(1e-9, 0.0), &p);
        assert!(rel(e, mgr * (1.0 - p.alpha())) < 1e-15);
    }

    #[test]
    fn modified_energy_pure_spin_assembly() {
        let p = rational_top();
        let (theta, w) = (0.1f64, 155.0);
        let sigma = p.m() * p.radius().powi(2) / p.i3();
        let expected = 0.5 * p.i3() * w * w * (1.0 + sigma * theta.sin().powi(2))
            + p.energy_scale() * (1.0 - p.alpha() * theta.cos());
        let got = modified_energy(&GlideState::spinning(theta, w), &p);
        assert!(rel(got, expected) < 1e-14);
    }

    #[test]
    fn total_energy_without_gliding_equals_modified() {
        let p = algebraic_top();
        let s = GlideState { theta: 1.1, theta_dot: -3.0, phi_dot: 7.5, omega3: 42.0, nu_x: 0.0, nu_y: 0.0 };
        assert!(rel(total_energy(&s, &p), modified_energy(&s, &p)) < 1e-13);
        let inverted = GlideState::spinning(PI, 0.0);
        assert!(rel(total_energy(&inverted, &p), p.energy_scale() * (1.0 + p.alpha())) < 1e-15);
    }

    #[test]
    fn boundary_values_published_d1() {
        let p = rational_top();
        let lambda = 2.0 * lambda_threshold(&p).unwrap();
        let bv = boundary_values(lambda, &p).unwrap();
        assert!(rel(bv.d1, -6.0e-4) < 0.02, "D1 = {}", bv.d1);
        assert!(bv.e0 > bv.e1);
        assert_eq!(boundary_values(-1.0, &p), Err(Error::NonPositiveLambda(-1.0)));
    }

    #[test]
    fn boundary_values_symmetric_for_small_offset() {
        let p = TopParameters::new(0.02, 0.02, 1e-9, 3.0e-6, 3.2e-6, 9.81).unwrap();
        let bv = boundary_values(1e-5, &p).unwrap();
        assert!(rel(-bv.d1, bv.d0) < 1e-8);
    }
}
