//! Dynamics and effective-potential analysis of the inverting tippe top.
//!
//! [`dynamics`] integrates the rolling-and-gliding equations and monitors
//! the integrals defined in [`model`]. [`potential`] and [`nutation`] study
//! the one-dimensional main equation `E~ = g(z) theta'^2 + V(z, D, lambda)`
//! in the rational parameter regime.

// `!(x > 0.0)` is used deliberately so that NaN is rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dynamics;
pub mod elliptic;
pub mod error;
pub mod model;
pub mod nutation;
pub mod ode;
pub mod poly;
pub mod potential;
pub mod quadrature;
mod vec3;

pub use dynamics::{FrictionModel, InversionReport, Trajectory};
pub use error::{Error, Result};
pub use model::{BoundaryValues, GlideState, IntegralSnapshot, TopParameters};
pub use nutation::PeriodReport;
pub use poly::RealPolynomial;
pub use potential::PotentialParams;
