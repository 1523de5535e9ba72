//! The six validation steps and their assembly into a report.
//!
//! A-steps compare activities (time, space, structure), B-steps compare
//! trips (time, space, mode structure). Each step maps the two datasets
//! through the kernels in [`crate::stats`] and [`crate::od`] and yields
//! [`MetricRecord`]s.

mod activities;
mod trips;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use activities::{step_a1, step_a2, step_a3, ActivityGrids, StepA2Output};
pub use trips::{step_b1, step_b2, step_b3};

use crate::od::{ODMatrix, OdError};
use crate::report::ValidationReport;
use crate::schedule::{DiaryDataset, DAY_SECONDS};
use crate::stats::StatsError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StepError {
    #[error("datasets share no {0}")]
    NoCommonVocabulary(&'static str),
    #[error("both datasets must carry activity locations")]
    MissingLocations,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Od(#[from] OdError),
    #[error(transparent)]
    Stats(#[from] StatsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Step {
    A1,
    A2,
    A3,
    B1,
    B2,
    B3,
}

impl Step {
    pub const ALL: [Step; 6] = [Step::A1, Step::A2, Step::A3, Step::B1, Step::B2, Step::B3];

    /// Statistic used for step-level skipped or failed records.
    fn primary_statistic(self) -> Statistic {
        match self {
            Step::A1 => Statistic::KsStart,
            Step::A2 => Statistic::EcdfRmse,
            Step::A3 => Statistic::Chi2Count,
            Step::B1 => Statistic::Chi2ModeHour,
            Step::B2 => Statistic::DOd,
            Step::B3 => Statistic::Chi2ModeTarget,
        }
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    KsStart,
    KsDuration,
    EcdfRmse,
    Chi2Count,
    Chi2Ngram,
    Chi2ModeHour,
    KsTravelTime,
    DOd,
    Chi2ModeTarget,
}

impl Statistic {
    pub fn token(self) -> &'static str {
        match self {
            Statistic::KsStart => "ks_start",
            Statistic::KsDuration => "ks_duration",
            Statistic::EcdfRmse => "ecdf_rmse",
            Statistic::Chi2Count => "chi2_count",
            Statistic::Chi2Ngram => "chi2_ngram",
            Statistic::Chi2ModeHour => "chi2_mode_hour",
            Statistic::KsTravelTime => "ks_travel_time",
            Statistic::DOd => "d_od",
            Statistic::Chi2ModeTarget => "chi2_mode_target",
        }
    }

    /// Distances bounded by one, as opposed to unbounded chi-square values.
    pub fn is_unit_bounded(self) -> bool {
        matches!(
            self,
            Statistic::KsStart | Statistic::KsDuration | Statistic::KsTravelTime | Statistic::EcdfRmse | Statistic::DOd
        )
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Skipped,
    Failed,
}

/// Half-open departure-time interval `[start_s, end_s)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct HourBin(pub u32, pub u32);

impl HourBin {
    pub fn start_s(&self) -> u32 {
        self.0
    }

    pub fn end_s(&self) -> u32 {
        self.1
    }

    pub fn contains(&self, t: u32) -> bool {
        self.0 <= t && t < self.1
    }

    pub fn hourly() -> Vec<HourBin> {
        (0..24).map(|h| HourBin(h * 3600, (h + 1) * 3600)).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricRecord {
    pub step: Step,
    pub statistic: Statistic,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub activity_type: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hour_bin: Option<HourBin>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub value: Option<f64>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub n_model: usize,
    pub n_validation: usize,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub diagnostics: BTreeMap<String, serde_json::Value>,
}

impl MetricRecord {
    pub fn ok(step: Step, statistic: Statistic, value: f64, n_model: usize, n_validation: usize) -> Self {
        Self {
            step,
            statistic,
            activity_type: None,
            mode: None,
            hour_bin: None,
            value: Some(value),
            status: Status::Ok,
            reason: None,
            n_model,
            n_validation,
            diagnostics: BTreeMap::new(),
        }
    }

    pub fn skipped(step: Step, statistic: Statistic, reason: impl Into<String>) -> Self {
        Self {
            value: None,
            status: Status::Skipped,
            reason: Some(reason.into()),
            ..Self::ok(step, statistic, 0.0, 0, 0)
        }
    }

    pub fn failed(step: Step, statistic: Statistic, reason: impl Into<String>) -> Self {
        Self {
            status: Status::Failed,
            ..Self::skipped(step, statistic, reason)
        }
    }

    pub fn for_activity(mut self, activity_type: impl Into<String>) -> Self {
        self.activity_type = Some(activity_type.into());
        self
    }

    pub fn for_mode(mut self, mode: impl Into<String>) -> Self {
        self.mode = Some(mode.into());
        self
    }

    pub fn for_hour_bin(mut self, bin: HourBin) -> Self {
        self.hour_bin = Some(bin);
        self
    }

    pub fn with_counts(mut self, n_model: usize, n_validation: usize) -> Self {
        self.n_model = n_model;
        self.n_validation = n_validation;
        self
    }

    pub fn with_diagnostic(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.diagnostics.insert(key.to_string(), value.into());
        self
    }

    fn sort_key(&self) -> (Step, &'static str, Option<&str>, Option<&str>, Option<HourBin>) {
        (
            self.step,
            self.statistic.token(),
            self.activity_type.as_deref(),
            self.mode.as_deref(),
            self.hour_bin,
        )
    }
}

/// Sorts by step, statistic token, then context.
pub fn sort_records(records: &mut [MetricRecord]) {
    records.sort_by(|a, b| a.sort_key().cmp(&b.sort_key()));
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct StepConfig {
    pub grid_rows: usize,
    pub grid_cols: usize,
    pub ngram_k: usize,
    pub ngram_p: f64,
    pub hour_bins: Vec<HourBin>,
    pub min_samples: usize,
}

impl Default for StepConfig {
    fn default() -> Self {
        Self {
            grid_rows: 32,
            grid_cols: 32,
            ngram_k: 11,
            ngram_p: 0.9,
            hour_bins: HourBin::hourly(),
            min_samples: 5,
        }
    }
}

impl StepConfig {
    pub fn validate(&self) -> Result<(), StepError> {
        let bad = |msg: &str| Err(StepError::InvalidConfig(msg.to_string()));
        if self.grid_rows == 0 || self.grid_cols == 0 {
            return bad("grid_rows and grid_cols must be at least 1");
        }
        if self.ngram_k == 0 {
            return bad("ngram_k must be at least 1");
        }
        if !(self.ngram_p > 0.0 && self.ngram_p <= 1.0) {
            return bad("ngram_p must lie in (0, 1]");
        }
        if self.hour_bins.iter().any(|b| b.0 >= b.1 || b.1 > DAY_SECONDS) {
            return bad("each hour bin needs start_s < end_s <= 86400");
        }
        let mut bins = self.hour_bins.clone();
        bins.sort();
        if bins.windows(2).any(|w| w[1].0 < w[0].1) {
            return bad("hour bins must be disjoint");
        }
        Ok(())
    }
}

pub(crate) fn shared<T: Ord + Clone>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> Vec<T> {
    a.intersection(b).cloned().collect()
}

pub(crate) fn names<'a, T: fmt::Display + 'a>(items: impl Iterator<Item = &'a T>) -> Vec<String> {
    items.map(|t| t.to_string()).collect()
}

/// Everything produced by a full validation run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub report: ValidationReport,
    /// Per-activity ECDF and heat-map grids from the spatial step.
    pub grids: Vec<ActivityGrids>,
}

fn step_failure(step: Step, err: StepError) -> Vec<MetricRecord> {
    vec![MetricRecord::failed(step, step.primary_statistic(), err.to_string())]
}

fn collect(step: Step, result: Result<Vec<MetricRecord>, StepError>) -> Vec<MetricRecord> {
    result.unwrap_or_else(|e| step_failure(step, e))
}

/// Runs every applicable step. A2 needs locations on both sides and B2
/// needs both matrices; otherwise the step is recorded as skipped. Errors
/// inside a step become failed records and never abort the run.
pub fn run_all(
    model: &DiaryDataset,
    validation: &DiaryDataset,
    model_od: Option<&ODMatrix>,
    validation_od: Option<&ODMatrix>,
    cfg: &StepConfig,
) -> Result<RunOutput, StepError> {
    cfg.validate()?;

    let (mut a1, mut a2, mut a3, mut b1, mut b2, mut b3) = Default::default();
    std::thread::scope(|s| {
        s.spawn(|| a1 = collect(Step::A1, step_a1(model, validation, cfg)));
        s.spawn(|| {
            a2 = if !(model.has_locations() && validation.has_locations()) {
                (
                    vec![MetricRecord::skipped(
                        Step::A2,
                        Statistic::EcdfRmse,
                        "datasets lack activity locations",
                    )],
                    Vec::new(),
                )
            } else {
                match step_a2(model, validation, cfg) {
                    Ok(out) => (out.records, out.grids),
                    Err(e) => (step_failure(Step::A2, e), Vec::new()),
                }
            }
        });
        s.spawn(|| a3 = collect(Step::A3, step_a3(model, validation, cfg)));
        s.spawn(|| b1 = collect(Step::B1, step_b1(model, validation, cfg)));
        s.spawn(|| {
            b2 = match (model_od, validation_od) {
                (Some(m), Some(v)) => collect(Step::B2, step_b2(m, v).map(|r| vec![r])),
                _ => vec![MetricRecord::skipped(
                    Step::B2,
                    Statistic::DOd,
                    "O-D matrices not supplied",
                )],
            }
        });
        s.spawn(|| b3 = collect(Step::B3, step_b3(model, validation, cfg)));
    });

    let (a2_records, grids): (Vec<MetricRecord>, Vec<ActivityGrids>) = a2;
    let mut records: Vec<MetricRecord> = [a1, a2_records, a3, b1, b2, b3].concat();
    sort_records(&mut records);

    let dataset_summaries = BTreeMap::from([
        ("model".to_string(), model.summary()),
        ("validation".to_string(), validation.summary()),
    ]);
    Ok(RunOutput {
        report: ValidationReport {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            config: cfg.clone(),
            dataset_summaries,
            records,
        },
        grids,
    })
}
