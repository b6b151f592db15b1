//! Invariant suite and acceptance criteria behind `tippe verify`.

pub mod criteria;
pub mod invariants;
pub mod oracle;

use std::sync::OnceLock;

use rayon::prelude::*;
use tippe_core::Trajectory;

use crate::commands::simulate::simulate;
use crate::config::{self, RunConfig};
use crate::error::CliError;

pub const RATIONAL_RUN: &str = include_str!("../../configs/rational_run.json");
pub const ALGEBRAIC_RUN: &str = include_str!("../../configs/algebraic_run.json");
pub const RATIONAL_ANALYSIS: &str = include_str!("../../configs/rational_analysis.json");

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub id: String,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    pub fn new(id: impl Into<String>, title: &'static str, passed: bool, detail: String) -> Self {
        Self { id: id.into(), title, passed, detail }
    }

    pub fn line(&self) -> String {
        format!("{} {:<14} {:<40} {}", if self.passed { "PASS" } else { "FAIL" }, self.id, self.title, self.detail)
    }
}

/// Shared inputs, computed at most once per suite run.
pub struct Context {
    pub seed: u64,
    rational: OnceLock<Result<Trajectory, String>>,
    algebraic: OnceLock<Result<Trajectory, String>>,
}

impl Context {
    pub fn new(seed: u64) -> Self {
        Self { seed, rational: OnceLock::new(), algebraic: OnceLock::new() }
    }

    fn run(text: &str) -> Result<Trajectory, String> {
        let cfg: RunConfig = config::parse(text).map_err(|e| e.to_string())?;
        simulate(&cfg).map_err(|e| e.to_string())
    }

    /// Inverting run of the rational top.
    pub fn rational_run(&self) -> Result<&Trajectory, String> {
        self.rational.get_or_init(|| Self::run(RATIONAL_RUN)).as_ref().map_err(Clone::clone)
    }

    pub fn algebraic_run(&self) -> Result<&Trajectory, String> {
        self.algebraic.get_or_init(|| Self::run(ALGEBRAIC_RUN)).as_ref().map_err(Clone::clone)
    }
}

pub const CRITERIA: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// Runs the acceptance criteria in order.
pub fn acceptance(ctx: &Context) -> Vec<CheckResult> {
    CRITERIA.par_iter().map(|&n| criteria::criterion(n, ctx)).collect()
}

pub fn suite(ctx: &Context) -> Vec<CheckResult> {
    let (mut inv, acc) = rayon::join(|| invariants::all(ctx), || acceptance(ctx));
    inv.extend(acc);
    inv
}

/// Runs everything on a pool of `jobs` threads, prints the table and fails
/// when any check fails.
pub fn run(seed: u64, jobs: Option<usize>) -> Result<(), CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    let ctx = Context::new(seed);
    let results = pool.install(|| suite(&ctx));
    for r in &results {
        println!("{}", r.line());
    }
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.id.as_str()).collect();
    println!("{} checks, {} failed", results.len(), failed.len());
    if failed.is_empty() {
        Ok(())
    } else {
        Err(CliError::Verification(failed.join(", ")))
    }
}
