use std::path::Path;

use serde::Serialize;
use tippe_core::dynamics::{conservation_report, detect_inversion, integrate, ConservationReport, Termination};
use tippe_core::{InversionReport, Trajectory};

use crate::config::{self, RunConfig};
use crate::error::CliError;
use crate::output::{output_path, write_json, CsvWriter};

pub const CSV_HEADER: [&str; 12] =
    ["t", "theta", "theta_dot", "phi_dot", "omega3", "nu_x", "nu_y", "g_n", "lambda", "D", "E_tilde", "E_total"];

#[derive(Debug, Serialize)]
pub struct TerminationRecord {
    pub completed: bool,
    pub t: Option<f64>,
    pub reason: Option<String>,
}

#[derive(Debug, Serialize)]
pub struct StepCounts {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

#[derive(Debug, Serialize)]
pub struct Sidecar<'a> {
    pub config: &'a RunConfig,
    pub termination: TerminationRecord,
    pub steps: StepCounts,
    pub samples: usize,
    pub inversion: InversionReport,
    pub conservation: ConservationReport,
}

/// Integrates the configured run. Only invalid inputs are errors; an
/// abnormal stop is reported in the returned trajectory.
pub fn simulate(cfg: &RunConfig) -> Result<Trajectory, CliError> {
    let inputs = cfg.validate()?;
    integrate(&inputs.initial, &inputs.params, &inputs.friction, &inputs.settings)
        .map_err(|e| CliError::Config(format!("initial state rejected: {e}")))
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), CliError> {
    let mut w = CsvWriter::create(path, &CSV_HEADER)?;
    for s in traj.samples() {
        let st = &s.state;
        let d = &s.diag;
        w.numbers(&[
            s.t,
            st.theta,
            st.theta_dot,
            st.phi_dot,
            st.omega3,
            st.nu_x,
            st.nu_y,
            d.g_n,
            d.lambda,
            d.routh,
            d.modified_energy,
            d.total_energy,
        ])?;
    }
    w.finish()
}

pub fn sidecar<'a>(cfg: &'a RunConfig, traj: &Trajectory) -> Sidecar<'a> {
    let meta = traj.meta();
    let termination = match meta.termination {
        Termination::Completed => TerminationRecord { completed: true, t: None, reason: None },
        Termination::Aborted { t, error } => {
            TerminationRecord { completed: false, t: Some(t), reason: Some(error.to_string()) }
        }
    };
    Sidecar {
        config: cfg,
        termination,
        steps: StepCounts {
            accepted: meta.accepted_steps,
            rejected: meta.rejected_steps,
            evaluations: meta.evaluations,
        },
        samples: traj.samples().len(),
        inversion: detect_inversion(traj),
        conservation: conservation_report(traj),
    }
}

pub fn run(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let cfg: RunConfig = config::load(config_path)?;
    let traj = simulate(&cfg)?;
    write_trajectory_csv(&output_path(out_dir, &cfg.output, ".csv")?, &traj)?;
    let side = sidecar(&cfg, &traj);
    write_json(&output_path(out_dir, &cfg.output, ".json")?, &side)?;
    match side.termination.reason {
        Some(reason) => {
            Err(CliError::Integration(format!("stopped at t = {}: {reason}", side.termination.t.unwrap_or(f64::NAN))))
        }
        None => Ok(()),
    }
}
