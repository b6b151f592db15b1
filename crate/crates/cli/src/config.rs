//! JSON run and analysis configurations. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use tippe_core::dynamics::IntegrationSettings;
use tippe_core::model::{jellett, STANDARD_GRAVITY};
use tippe_core::{FrictionModel, GlideState, TopParameters};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub m: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub alpha: f64,
    #[serde(rename = "I3")]
    pub i3: f64,
    #[serde(default = "standard_gravity")]
    pub g: f64,
    #[serde(rename = "I1", default)]
    pub i1: Option<f64>,
    /// Derive `I1` from the rational-regime condition.
    #[serde(default)]
    pub rational: bool,
}

fn standard_gravity() -> f64 {
    STANDARD_GRAVITY
}

impl ParamsConfig {
    pub fn build(&self) -> Result<TopParameters, CliError> {
        let built = match (self.i1, self.rational) {
            (Some(i1), false) => TopParameters::new(self.m, self.r, self.alpha, i1, self.i3, self.g),
            (None, true) => TopParameters::rational(self.m, self.r, self.alpha, self.i3, self.g),
            _ => return Err(CliError::Config("params: give exactly one of \"I1\" or \"rational\": true".into())),
        };
        built.map_err(|e| CliError::Config(format!("params: {e}")))
    }
}

/// Initial state; rates default to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    pub theta: f64,
    #[serde(default)]
    pub theta_dot: f64,
    #[serde(default)]
    pub phi_dot: f64,
    pub omega3: f64,
    #[serde(default)]
    pub nu_x: f64,
    #[serde(default)]
    pub nu_y: f64,
}

impl InitialConfig {
    pub fn state(&self) -> Result<GlideState, CliError> {
        let s = GlideState {
            theta: self.theta,
            theta_dot: self.theta_dot,
            phi_dot: self.phi_dot,
            omega3: self.omega3,
            nu_x: self.nu_x,
            nu_y: self.nu_y,
        };
        s.validate().map_err(|e| CliError::Config(format!("initial: {e}")))?;
        Ok(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: ParamsConfig,
    pub mu: f64,
    pub initial: InitialConfig,
    pub t_end: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
    #[serde(default = "default_atol")]
    pub atol: f64,
    pub sample_dt: f64,
    /// File stem of the outputs, relative to the output directory.
    #[serde(default = "default_simulate_stem")]
    pub output: String,
}

fn default_rtol() -> f64 {
    1e-10
}

fn default_atol() -> f64 {
    1e-12
}

fn default_simulate_stem() -> String {
    "trajectory".into()
}

/// Validated inputs of a simulation.
#[derive(Debug, Clone, Copy)]
pub struct RunInputs {
    pub params: TopParameters,
    pub friction: FrictionModel,
    pub initial: GlideState,
    pub settings: IntegrationSettings,
}

impl RunConfig {
    pub fn validate(&self) -> Result<RunInputs, CliError> {
        let params = self.params.build()?;
        let friction = FrictionModel::new(self.mu).map_err(|e| CliError::Config(format!("mu: {e}")))?;
        let initial = self.initial.state()?;
        let settings =
            IntegrationSettings { t_end: self.t_end, rtol: self.rtol, atol: self.atol, sample_dt: self.sample_dt };
        settings.validate().map_err(|e| CliError::Config(e.to_string()))?;
        check_stem(&self.output)?;
        Ok(RunInputs { params, friction, initial, settings })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    pub params: ParamsConfig,
    /// Jellett value. Exactly one of `lambda`, `lambda_over_threshold` and
    /// `initial` must be set.
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub lambda_over_threshold: Option<f64>,
    #[serde(default)]
    pub initial: Option<InitialConfig>,
    /// Width of the containment intervals at the poles.
    pub epsilon: f64,
    /// Number of Routh values for the minimum path and the period scan.
    pub d_grid: usize,
    /// Number of `z` values in each potential scan.
    pub z_grid: usize,
    /// Routh values of the potential scans; evenly spaced over `[D1, D0]`
    /// when absent.
    #[serde(default)]
    pub scan_d: Option<Vec<f64>>,
    /// Offsets of `E~` above the potential minimum, in units of `m g R`.
    pub energy_offsets: Vec<f64>,
    #[serde(default = "default_analysis_stem")]
    pub output: String,
}

fn default_analysis_stem() -> String {
    "analysis".into()
}

impl AnalysisConfig {
    /// Validated parameters and the Jellett value.
    pub fn validate(&self) -> Result<(TopParameters, f64), CliError> {
        let p = self.params.build()?;
        check_stem(&self.output)?;
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(CliError::Config(format!("epsilon = {} must lie in (0, 1)", self.epsilon)));
        }
        if self.d_grid < 2 || self.z_grid < 2 {
            return Err(CliError::Config("d_grid and z_grid need at least two points".into()));
        }
        if let Some(bad) = self.energy_offsets.iter().find(|e| !(e.is_finite() && **e >= 0.0)) {
            return Err(CliError::Config(format!("energy offset {bad} must be finite and non-negative")));
        }
        if let Some(bad) = self.scan_d.iter().flatten().find(|d| !d.is_finite()) {
            return Err(CliError::Config(format!("scan_d value {bad} is not finite")));
        }
        let lambda = match (self.lambda, self.lambda_over_threshold, self.initial) {
            (Some(l), None, None) => l,
            (None, Some(k), None) => {
                let thres = tippe_core::model::lambda_threshold(&p).map_err(|e| CliError::Regime(e.to_string()))?;
                k * thres
            }
            (None, None, Some(init)) => jellett(&init.state()?, &p),
            _ => {
                return Err(CliError::Config(
                    "give exactly one of \"lambda\", \"lambda_over_threshold\" or \"initial\"".into(),
                ))
            }
        };
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(CliError::Config(format!("lambda = {lambda} must be positive and finite")));
        }
        Ok((p, lambda))
    }
}

fn check_stem(stem: &str) -> Result<(), CliError> {
    if stem.is_empty() || stem.contains(['/', '\\']) || stem == "." || stem == ".." {
        return Err(CliError::Config(format!("output stem {stem:?} must be a plain file name")));
    }
    Ok(())
}

pub fn load<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    parse(&text).map_err(|e| match e {
        CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const RUN: &str = include_str!("../configs/rational_run.json");
    const ANALYSIS: &str = include_str!("../configs/rational_analysis.json");

    #[test]
    fn shipped_configs_parse() {
        let run: RunConfig = parse(RUN).unwrap();
        let inputs = run.validate().unwrap();
        assert!(inputs.params.in_rational_regime());
        let an: AnalysisConfig = parse(ANALYSIS).unwrap();
        let (p, lambda) = an.validate().unwrap();
        let thres = tippe_core::model::lambda_threshold(&p).unwrap();
        assert!((lambda / thres - 2.0).abs() < 1e-15);
    }

    #[test]
    fn unknown_key_rejected() {
        let text = RUN.replacen("\"mu\"", "\"friction\": 1, \"mu\"", 1);
        assert!(matches!(parse::<RunConfig>(&text), Err(CliError::Config(_))));
    }

    #[test]
    fn inertia_choice_must_be_unique() {
        let mut run: RunConfig = parse(RUN).unwrap();
        run.params.i1 = Some(1e-6);
        assert!(matches!(run.validate(), Err(CliError::Config(_))));
        run.params.rational = false;
        run.params.i1 = None;
        assert!(matches!(run.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn zero_duration_rejected() {
        let mut run: RunConfig = parse(RUN).unwrap();
        run.t_end = 0.0;
        assert!(matches!(run.validate(), Err(CliError::Config(_))));
        run.t_end = f64::NAN;
        assert!(matches!(run.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn lambda_sources_exclusive() {
        let mut an: AnalysisConfig = parse(ANALYSIS).unwrap();
        an.lambda = Some(1e-5);
        assert!(matches!(an.validate(), Err(CliError::Config(_))));
        an.lambda_over_threshold = None;
        assert_eq!(an.validate().unwrap().1, 1e-5);
    }

    #[test]
    fn stem_must_be_plain() {
        let mut run: RunConfig = parse(RUN).unwrap();
        run.output = "../escape".into();
        assert!(run.validate().is_err());
    }

    #[test]
    fn gravity_defaults() {
        let run: RunConfig = parse(RUN).unwrap();
        assert_eq!(run.params.g, 9.81);
    }
}
