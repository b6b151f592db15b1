use std::path::Path;

use serde::Serialize;
use tippe_core::model::boundary_values;
use tippe_core::nutation::{period_report, t_upp};
use tippe_core::potential::{find_minimum, v_rational};
use tippe_core::{Error, PeriodReport, TopParameters};

use crate::commands::potential::{regime_error, require_rational};
use crate::config::{self, AnalysisConfig};
use crate::error::CliError;
use crate::output::{fmt_num, output_path, write_json, CsvWriter};

/// `ok`: every quantity defined. `epsilon_too_large` and `w_out_of_range`:
/// outside the domain of the uniform bound, `T_upp` absent. `error`: the
/// band itself could not be analysed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    EpsilonTooLarge,
    WOutOfRange,
    Error,
}

impl RowStatus {
    fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::EpsilonTooLarge => "epsilon_too_large",
            RowStatus::WOutOfRange => "w_out_of_range",
            RowStatus::Error => "error",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodRow {
    #[serde(rename = "D")]
    pub d: f64,
    pub energy_offset: f64,
    #[serde(rename = "E_tilde")]
    pub e_tilde: Option<f64>,
    pub status: RowStatus,
    pub error: Option<String>,
    pub report: Option<PeriodReport>,
}

#[derive(Debug, Serialize)]
struct PeriodOutput<'a> {
    config: &'a AnalysisConfig,
    lambda: f64,
    rows: &'a [PeriodRow],
    bound_violations: usize,
}

/// Interior Routh values `D1 + (D0 - D1) i / (n + 1)`, `i = 1..=n`.
pub fn interior_grid(d0: f64, d1: f64, n: usize) -> Vec<f64> {
    (1..=n).map(|i| d1 + (d0 - d1) * i as f64 / (n + 1) as f64).collect()
}

pub fn row(d: f64, offset: f64, lambda: f64, p: &TopParameters) -> PeriodRow {
    let failed = |e_tilde, e: Error| PeriodRow {
        d,
        energy_offset: offset,
        e_tilde,
        status: RowStatus::Error,
        error: Some(e.to_string()),
        report: None,
    };
    let m = match find_minimum(d, lambda, p) {
        Ok(m) if !m.at_boundary => m,
        Ok(m) => return failed(None, Error::PoleAtBoundary(m.z)),
        Err(e) => return failed(None, e),
    };
    let e_tilde = match v_rational(m.z, d, lambda, p) {
        Ok(v) => v + offset * p.energy_scale(),
        Err(e) => return failed(None, e),
    };
    let report = match period_report(e_tilde, d, lambda, p) {
        Ok(r) => r,
        Err(e) => return failed(Some(e_tilde), e),
    };
    let status = match t_upp(d, lambda, p) {
        Ok(_) => RowStatus::Ok,
        Err(Error::EpsilonTooLarge(_)) => RowStatus::EpsilonTooLarge,
        Err(Error::WOutOfRange(_)) => RowStatus::WOutOfRange,
        Err(_) => RowStatus::Error,
    };
    PeriodRow { d, energy_offset: offset, e_tilde: Some(e_tilde), status, error: None, report: Some(report) }
}

/// Rows on unmarked entries with `T_exact > T_upp`.
pub fn bound_violations(rows: &[PeriodRow]) -> usize {
    rows.iter()
        .filter(|r| r.status == RowStatus::Ok)
        .filter_map(|r| r.report.as_ref())
        .filter(|r| r.t_upp.is_some_and(|tu| r.t_exact > tu))
        .count()
}

pub fn rows(cfg: &AnalysisConfig, p: &TopParameters, lambda: f64) -> Result<Vec<PeriodRow>, CliError> {
    require_rational(p)?;
    let bv = boundary_values(lambda, p).map_err(regime_error)?;
    let mut out = Vec::new();
    for d in interior_grid(bv.d0, bv.d1, cfg.d_grid) {
        for &offset in &cfg.energy_offsets {
            out.push(row(d, offset, lambda, p));
        }
    }
    Ok(out)
}

const HEADER: [&str; 18] = [
    "D",
    "energy_offset",
    "E_tilde",
    "status",
    "z1",
    "z2",
    "z3",
    "k2",
    "K",
    "T_exact",
    "T_elliptic_low",
    "T_elliptic_mid",
    "T_elliptic_high",
    "T_max",
    "T_upp",
    "epsilon",
    "w",
    "error",
];

fn opt(x: Option<f64>) -> String {
    x.map(fmt_num).unwrap_or_default()
}

pub fn run(config_path: &Path, out_dir: &Path) -> Result<(), CliError> {
    let cfg: AnalysisConfig = config::load(config_path)?;
    let (p, lambda) = cfg.validate()?;
    let rows = rows(&cfg, &p, lambda)?;

    let mut w = CsvWriter::create(&output_path(out_dir, &cfg.output, "_period.csv")?, &HEADER)?;
    for r in &rows {
        let mut fields = vec![fmt_num(r.d), fmt_num(r.energy_offset), opt(r.e_tilde), r.status.as_str().into()];
        match &r.report {
            Some(rep) => fields.extend(
                [
                    rep.z1,
                    rep.z2,
                    rep.z3,
                    rep.k2,
                    rep.k,
                    rep.t_exact,
                    rep.t_elliptic_low,
                    rep.t_elliptic_mid,
                    rep.t_elliptic_high,
                    rep.t_max,
                ]
                .map(fmt_num)
                .into_iter()
                .chain([opt(rep.t_upp), fmt_num(rep.epsilon), fmt_num(rep.w)]),
            ),
            None => fields.extend(std::iter::repeat_n(String::new(), 13)),
        }
        // Messages may contain commas.
        fields.push(r.error.as_ref().map(|e| format!("\"{e}\"")).unwrap_or_default());
        w.row(&fields)?;
    }
    w.finish()?;

    let violations = bound_violations(&rows);
    write_json(
        &output_path(out_dir, &cfg.output, "_period.json")?,
        &PeriodOutput { config: &cfg, lambda, rows: &rows, bound_violations: violations },
    )?;
    if violations > 0 {
        return Err(CliError::Verification(format!("{violations} rows with T_exact > T_upp")));
    }
    Ok(())
}
