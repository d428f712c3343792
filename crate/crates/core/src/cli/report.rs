use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::ScenarioConfig;
use crate::oracles::{ClosedFormFamily, PerturbationReport};
use crate::solver::{CurvePoint, Direction};

/// Check classes run by `verify`, each with its own exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckKind {
    Comonotone,
    SelfConsistency,
    FirstOrderCondition,
    Perturbation,
    CurveFile,
    Oracle,
}

impl CheckKind {
    pub fn exit_code(self) -> u8 {
        match self {
            CheckKind::Comonotone => 10,
            CheckKind::SelfConsistency => 11,
            CheckKind::FirstOrderCondition => 12,
            CheckKind::Perturbation => 13,
            CheckKind::CurveFile => 14,
            CheckKind::Oracle => 15,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub kind: CheckKind,
    pub name: String,
    pub passed: bool,
    /// The measured quantity; compared against `tolerance`.
    pub value: f64,
    pub tolerance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(kind: CheckKind, name: &str, value: f64, tolerance: f64) -> Self {
        Self {
            kind,
            name: name.to_string(),
            passed: value <= tolerance,
            value,
            tolerance,
            detail: None,
        }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = Some(detail.into());
        self
    }
}

/// Solver against closed form on a shared grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleDelta {
    pub family: ClosedFormFamily,
    pub m_oracle: f64,
    pub deductible_oracle: f64,
    pub m_delta: f64,
    pub deductible_delta: f64,
    pub max_curve_delta: f64,
    pub curve_points: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub scenario: ScenarioConfig,
    pub m0: f64,
    pub m_star: f64,
    pub deductible: f64,
    pub iterations: usize,
    pub direction: Direction,
    pub fixed_point_residual: f64,
    pub quadrature_error: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_foc_residual: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleDelta>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub perturbation: Option<PerturbationReport>,
    pub checks: Vec<Check>,
    pub passed: bool,
    /// Only recorded with `--timing`, which makes the report run-dependent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time_seconds: Option<f64>,
}

impl RunReport {
    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ArtifactError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: String, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: String, source: serde_json::Error },
    #[error("{path}: line {line}: {message}")]
    Malformed { path: String, line: u64, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> ArtifactError + '_ {
    move |source| ArtifactError::Csv {
        path: path.display().to_string(),
        source,
    }
}

/// 17 significant digits, enough to round-trip every `f64`.
pub fn fmt_real(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), ArtifactError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|source| ArtifactError::Json {
        path: path.display().to_string(),
        source,
    })?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

pub fn write_table(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<(), ArtifactError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(header).map_err(csv_err(path))?;
    for row in rows {
        w.write_record(row.into_iter().map(fmt_real)).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

pub fn write_curve(path: &Path, points: &[CurvePoint]) -> Result<(), ArtifactError> {
    write_table(
        path,
        &["x", "indemnity", "retained"],
        points.iter().map(|p| vec![p.x, p.indemnity, p.retained]),
    )
}

pub fn read_curve(path: &Path) -> Result<Vec<CurvePoint>, ArtifactError> {
    let mut r = csv::Reader::from_path(path).map_err(csv_err(path))?;
    let mut out = Vec::new();
    for record in r.records() {
        let record = record.map_err(csv_err(path))?;
        let line = record.position().map_or(0, |p| p.line());
        let field = |i: usize| -> Result<f64, ArtifactError> {
            record
                .get(i)
                .ok_or_else(|| ArtifactError::Malformed {
                    path: path.display().to_string(),
                    line,
                    message: format!("missing column {i}"),
                })?
                .trim()
                .parse::<f64>()
                .map_err(|e| ArtifactError::Malformed {
                    path: path.display().to_string(),
                    line,
                    message: e.to_string(),
                })
        };
        out.push(CurvePoint {
            x: field(0)?,
            indemnity: field(1)?,
            retained: field(2)?,
        });
    }
    Ok(out)
}
