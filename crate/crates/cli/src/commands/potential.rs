use std::path::Path;

use serde::Serialize;
use tippe_core::model::{boundary_values, lambda_threshold};
use tippe_core::potential::{delta_minus, delta_plus, minimum_path, v_rational};
use tippe_core::{Error, TopParameters};

use crate::config::{self, AnalysisConfig};
use crate::error::CliError;
use crate::output::{fmt_num, output_path, write_json, CsvWriter};

#[derive(Debug, Clone, Serialize)]
pub struct PotentialSummary {
    pub lambda: f64,
    pub lambda_threshold: f64,
    #[serde(rename = "D0")]
    pub d0: f64,
    #[serde(rename = "D1")]
    pub d1: f64,
    #[serde(rename = "E_tilde_0")]
    pub e0: f64,
    #[serde(rename = "E_tilde_1")]
    pub e1: f64,
    pub epsilon: f64,
    pub delta_minus: Option<f64>,
    pub delta_minus_error: Option<String>,
    pub delta_plus: Option<f64>,
    pub delta_plus_error: Option<String>,
}

#[derive(Debug, Serialize)]
struct PotentialOutput<'a> {
    config: &'a AnalysisConfig,
    summary: PotentialSummary,
}

pub(crate) fn regime_error(e: Error) -> CliError {
    match e {
        Error::RegimeViolation | Error::ThresholdUndefined | Error::NonPositiveLambda(_) => {
            CliError::Regime(e.to_string())
        }
        other => CliError::Config(other.to_string()),
    }
}

pub(crate) fn require_rational(p: &TopParameters) -> Result<(), CliError> {
    if p.in_rational_regime() {
        Ok(())
    } else {
        Err(CliError::Regime(format!("gamma = {} does not satisfy the rational-regime condition", p.gamma())))
    }
}

fn split(r: tippe_core::Result<f64>) -> (Option<f64>, Option<String>) {
    match r {
        Ok(v) => (Some(v), None),
        Err(e) => (None, Some(e.to_string())),
    }
}

pub fn summary(p: &TopParameters, lambda: f64, epsilon: f64) -> Result<PotentialSummary, CliError> {
    require_rational(p)?;
    let thres = lambda_threshold(p).map_err(regime_error)?;
    let bv = boundary_values(lambda, p).map_err(regime_error)?;
    let (delta_minus, delta_minus_error) = split(delta_minus(epsilon, lambda, p));
    let (delta_plus, delta_plus_error) = split(delta_plus(epsilon, lambda, p));
    Ok(PotentialSummary {
        lambda,
        lambda_threshold: thres,
        d0: bv.d0,
        d1: bv.d1,
        e0: bv.e0,
        e1: bv.e1,
        epsilon,
        delta_minus,
        delta_minus_error,
        delta_plus,
        delta_plus_error,
    })
}

/// Routh values of the potential scans.
pub fn scan_values(cfg: &AnalysisConfig, d0: f64, d1: f64) -> Vec<f64> {
    match &cfg.scan_d {
        Some(v) => v.clone(),
        None => (0..5).map(|i| d1 + (d0 - d1) * i as f64 / 4.0).collect(),
    }
}

/// `z` values from -1 to 1 inclusive. Poles are written as `inf`.
pub fn scan_row(z: f64, d: f64, lambda: f64, p: &TopParameters) -> Result<f64, CliError> {
    match v_rational(z, d, lambda, p) {
        Ok(v) => Ok(v),
        Err(Error::PoleAtBoundary(_)) => Ok(f64::INFINITY),
        Err(e) => Err(regime_error(e)),
    }
}

pub fn run(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let cfg: AnalysisConfig = config::load(config_path)?;
    let (p, lambda) = cfg.validate()?;
    let summary = summary(&p, lambda, cfg.epsilon)?;

    let mut scan = CsvWriter::create(&output_path(out_dir, &cfg.output, "_scan.csv")?, &["D", "z", "V"])?;
    for d in scan_values(&cfg, summary.d0, summary.d1) {
        for i in 0..cfg.z_grid {
            let z = -1.0 + 2.0 * i as f64 / (cfg.z_grid - 1) as f64;
            scan.numbers(&[d, z, scan_row(z, d, lambda, &p)?])?;
        }
    }
    scan.finish()?;

    let path = minimum_path(lambda, &p, cfg.d_grid).map_err(regime_error)?;
    let mut w = CsvWriter::create(&output_path(out_dir, &cfg.output, "_path.csv")?, &["D", "z_min"])?;
    for (d, z) in path {
        w.row(&[fmt_num(d), fmt_num(z)])?;
    }
    w.finish()?;

    write_json(&output_path(out_dir, &cfg.output, ".json")?, &PotentialOutput { config: &cfg, summary })
}
