use crate::od::{od_distance, od_normalize, od_project, ODMatrix};
use crate::schedule::{ActivityType, DiaryDataset, Mode};
use crate::stats::{ks_statistic, scaled_chi_square, CountVector, Sample1D};

use super::{shared, HourBin, MetricRecord, Statistic, Step, StepConfig, StepError};

fn mode_chi2(step: Step, statistic: Statistic, model: Vec<&Mode>, validation: Vec<&Mode>) -> MetricRecord {
    let (n_m, n_v) = (model.len(), validation.len());
    match scaled_chi_square(&CountVector::tally(model), &CountVector::tally(validation)) {
        Ok(c) => MetricRecord::ok(step, statistic, c.chi2, n_m, n_v)
            .with_diagnostic("dropped_model_mass", c.dropped_model_mass),
        Err(e) => MetricRecord::failed(step, statistic, e.to_string()).with_counts(n_m, n_v),
    }
}

fn modes_in_bin(ds: &DiaryDataset, bin: HourBin) -> Vec<&Mode> {
    ds.trips()
        .filter(|t| bin.contains(t.depart_s()))
        .map(|t| t.mode())
        .collect()
}

fn arriving_modes<'a>(ds: &'a DiaryDataset, t: &ActivityType) -> Vec<&'a Mode> {
    ds.schedules()
        .iter()
        .flat_map(|s| s.arrivals())
        .filter(|(_, a)| a.activity_type() == t)
        .map(|(trip, _)| trip.mode())
        .collect()
}

/// Mode-share chi-square per departure-time bin and travel-time KS per
/// shared mode.
pub fn step_b1(
    model: &DiaryDataset,
    validation: &DiaryDataset,
    cfg: &StepConfig,
) -> Result<Vec<MetricRecord>, StepError> {
    let modes = shared(model.mode_vocab(), validation.mode_vocab());
    if modes.is_empty() {
        return Err(StepError::NoCommonVocabulary("modes"));
    }
    let mut records = Vec::with_capacity(cfg.hour_bins.len() + modes.len());
    for &bin in &cfg.hour_bins {
        let (m, v) = (modes_in_bin(model, bin), modes_in_bin(validation, bin));
        let record = if m.len() < cfg.min_samples || v.len() < cfg.min_samples {
            MetricRecord::skipped(
                Step::B1,
                Statistic::Chi2ModeHour,
                format!(
                    "fewer than {} trips in bin (model {}, validation {})",
                    cfg.min_samples,
                    m.len(),
                    v.len()
                ),
            )
            .with_counts(m.len(), v.len())
        } else {
            mode_chi2(Step::B1, Statistic::Chi2ModeHour, m, v)
        };
        records.push(record.for_hour_bin(bin));
    }

    for mode in &modes {
        let times = |ds: &DiaryDataset| {
            ds.trips()
                .filter(|t| t.mode() == mode)
                .map(|t| f64::from(t.travel_time_s()))
                .collect::<Vec<_>>()
        };
        let (m, v) = (times(model), times(validation));
        let (n_m, n_v) = (m.len(), v.len());
        let record = match (Sample1D::new(m), Sample1D::new(v)) {
            (Ok(m), Ok(v)) => MetricRecord::ok(Step::B1, Statistic::KsTravelTime, ks_statistic(&m, &v), n_m, n_v),
            (Err(e), _) | (_, Err(e)) => {
                MetricRecord::failed(Step::B1, Statistic::KsTravelTime, e.to_string()).with_counts(n_m, n_v)
            }
        };
        records.push(record.for_mode(mode.as_str()));
    }
    Ok(records)
}

/// O-D distance after projecting the model onto the validation zones.
pub fn step_b2(model_od: &ODMatrix, validation_od: &ODMatrix) -> Result<MetricRecord, StepError> {
    let projected = od_project(model_od, validation_od.zones())?;
    let m = od_normalize(&projected)?;
    let v = od_normalize(validation_od)?;
    let d = od_distance(&m, &v)?;
    let support = m
        .shares()
        .iter()
        .zip(v.shares())
        .filter(|(a, b)| **a > 0.0 || **b > 0.0)
        .count();
    Ok(MetricRecord::ok(
        Step::B2,
        Statistic::DOd,
        d,
        model_od.total().round() as usize,
        validation_od.total().round() as usize,
    )
    .with_diagnostic("support_cells", support)
    .with_diagnostic("projected_zones", validation_od.zones().len()))
}

/// Mode-share chi-square per destination activity type.
pub fn step_b3(
    model: &DiaryDataset,
    validation: &DiaryDataset,
    _cfg: &StepConfig,
) -> Result<Vec<MetricRecord>, StepError> {
    let types = shared(model.activity_vocab(), validation.activity_vocab());
    if types.is_empty() {
        return Err(StepError::NoCommonVocabulary("activity types"));
    }
    if shared(model.mode_vocab(), validation.mode_vocab()).is_empty() {
        return Err(StepError::NoCommonVocabulary("modes"));
    }
    let mut records = Vec::with_capacity(types.len());
    for t in &types {
        let (m, v) = (arriving_modes(model, t), arriving_modes(validation, t));
        let record = if v.is_empty() {
            MetricRecord::skipped(Step::B3, Statistic::Chi2ModeTarget, "no arriving trips in validation")
                .with_counts(m.len(), 0)
        } else if m.is_empty() {
            MetricRecord::skipped(Step::B3, Statistic::Chi2ModeTarget, "no arriving trips in model")
                .with_counts(0, v.len())
        } else {
            mode_chi2(Step::B3, Statistic::Chi2ModeTarget, m, v)
        };
        records.push(record.for_activity(t.as_str()));
    }
    Ok(records)
}
