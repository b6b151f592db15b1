//! Deterministic number formatting and file writers.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::CliError;

/// Shortest decimal that parses back to the same `f64`. Plain notation for
/// moderate magnitudes, scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    let a = x.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub struct CsvWriter {
    out: BufWriter<File>,
}

impl CsvWriter {
    pub fn create(path: &Path, header: &[&str]) -> Result<Self, CliError> {
        let mut out = BufWriter::new(File::create(path)?);
        writeln!(out, "{}", header.join(","))?;
        Ok(Self { out })
    }

    pub fn row(&mut self, fields: &[String]) -> Result<(), CliError> {
        writeln!(self.out, "{}", fields.join(","))?;
        Ok(())
    }

    pub fn numbers(&mut self, values: &[f64]) -> Result<(), CliError> {
        let fields: Vec<String> = values.iter().map(|&v| fmt_num(v)).collect();
        self.row(&fields)
    }

    pub fn finish(mut self) -> Result<(), CliError> {
        self.out.flush()?;
        Ok(())
    }
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.into()))?;
    text.push('\n');
    fs::write(path, text)?;
    Ok(())
}

/// `dir/<stem><suffix>`, creating `dir` when needed.
pub fn output_path(dir: &Path, stem: &str, suffix: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)?;
    Ok(dir.join(format!("{stem}{suffix}")))
}
