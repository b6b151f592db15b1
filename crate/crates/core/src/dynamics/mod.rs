//! Gliding and rolling dynamics.

pub mod diagnostics;
pub mod glide;
pub mod rolling;
pub mod trajectory;

pub use diagnostics::{conservation_report, detect_inversion, ConservationReport, InversionReport};
pub use glide::{glide_derivative, normal_force, FrictionModel};
pub use rolling::{integrate_rolling, rolling_derivative, RollingOrbit, RollingSystem};
pub use trajectory::{integrate, snapshot, IntegrationSettings, Sample, Termination, Trajectory, TrajectoryMeta};
