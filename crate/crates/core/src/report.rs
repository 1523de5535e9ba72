//! Report and grid serialization.
//!
//! The JSON report has sorted keys and shortest round-trip float formatting,
//! so an identical report always yields identical bytes.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::DatasetSummary;
use crate::stats::Grid;
use crate::steps::{MetricRecord, StepConfig};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("malformed report: {0}")]
    Malformed(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("unknown format {0:?}")]
    UnknownFormat(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> ReportError + '_ {
    move |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub tool_version: String,
    pub config: StepConfig,
    pub dataset_summaries: BTreeMap<String, DatasetSummary>,
    pub records: Vec<MetricRecord>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Csv,
}

impl FromStr for ReportFormat {
    type Err = ReportError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "json" => Ok(Self::Json),
            "csv" => Ok(Self::Csv),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridFormat {
    Csv,
    Pgm,
}

impl FromStr for GridFormat {
    type Err = ReportError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "pgm" => Ok(Self::Pgm),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

pub fn report_to_json(report: &ValidationReport) -> Result<String, ReportError> {
    // Going through Value sorts every object's keys.
    let value = serde_json::to_value(report)?;
    let mut out = serde_json::to_string_pretty(&value)?;
    out.push('\n');
    Ok(out)
}

pub fn report_from_json(text: &str) -> Result<ValidationReport, ReportError> {
    Ok(serde_json::from_str(text)?)
}

fn fmt_f64(v: f64) -> String {
    serde_json::Number::from_f64(v)
        .map(|n| n.to_string())
        .unwrap_or_else(|| v.to_string())
}

const CSV_HEADER: [&str; 12] = [
    "step",
    "statistic",
    "activity_type",
    "mode",
    "hour_bin_start_s",
    "hour_bin_end_s",
    "value",
    "status",
    "reason",
    "n_model",
    "n_validation",
    "diagnostics",
];

pub fn report_to_csv(report: &ValidationReport) -> Result<String, ReportError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in &report.records {
        let status = serde_json::to_value(r.status)?;
        let diagnostics = if r.diagnostics.is_empty() {
            String::new()
        } else {
            serde_json::to_string(&r.diagnostics)?
        };
        w.write_record([
            r.step.to_string(),
            r.statistic.token().to_string(),
            r.activity_type.clone().unwrap_or_default(),
            r.mode.clone().unwrap_or_default(),
            r.hour_bin.map(|b| b.start_s().to_string()).unwrap_or_default(),
            r.hour_bin.map(|b| b.end_s().to_string()).unwrap_or_default(),
            r.value.map(fmt_f64).unwrap_or_default(),
            status.as_str().unwrap_or_default().to_string(),
            r.reason.clone().unwrap_or_default(),
            r.n_model.to_string(),
            r.n_validation.to_string(),
            diagnostics,
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| ReportError::Io {
        path: "<memory>".into(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn write_report(report: &ValidationReport, path: &Path, format: ReportFormat) -> Result<(), ReportError> {
    let text = match format {
        ReportFormat::Json => report_to_json(report)?,
        ReportFormat::Csv => report_to_csv(report)?,
    };
    fs::write(path, text).map_err(io_err(path))
}

pub fn read_report(path: &Path) -> Result<ValidationReport, ReportError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    report_from_json(&text)
}

/// `rows` lines of `cols` comma-separated values, row 0 at the minimal y.
pub fn grid_to_csv(grid: &Grid) -> String {
    let mut out = String::new();
    for i in 0..grid.rows() {
        let line: Vec<String> = grid.row(i).iter().map(|&v| fmt_f64(v)).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Plain-text P2 graymap, values rescaled linearly so the grid minimum maps
/// to 0 and the maximum to 255. A constant grid is all zeros.
pub fn grid_to_pgm(grid: &Grid) -> String {
    let values = grid.values();
    let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo;
    let level = |v: f64| -> u8 {
        if span > 0.0 {
            ((v - lo) / span * 255.0).round().clamp(0.0, 255.0) as u8
        } else {
            0
        }
    };
    let mut out = format!("P2\n{} {}\n255\n", grid.cols(), grid.rows());
    for i in 0..grid.rows() {
        let line: Vec<String> = grid.row(i).iter().map(|&v| level(v).to_string()).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn write_grid(grid: &Grid, path: &Path, format: GridFormat) -> Result<(), ReportError> {
    let text = match format {
        GridFormat::Csv => grid_to_csv(grid),
        GridFormat::Pgm => grid_to_pgm(grid),
    };
    fs::write(path, text).map_err(io_err(path))
}
