use crate::schedule::{activity_sequence, ActivityType, DiaryDataset, Point};
use crate::stats::{
    ecdf_grid, ecdf_rmse, kde_grid, ks_statistic, ngram_profile, profile_chi_square, scaled_chi_square, Bounds,
    CountVector, DensityGrid, EcdfGrid, Sample1D,
};

use super::{names, shared, MetricRecord, Statistic, Step, StepConfig, StepError};

fn shared_types(model: &DiaryDataset, validation: &DiaryDataset) -> Result<Vec<ActivityType>, StepError> {
    let types = shared(model.activity_vocab(), validation.activity_vocab());
    if types.is_empty() {
        return Err(StepError::NoCommonVocabulary("activity types"));
    }
    Ok(types)
}

fn times_of(ds: &DiaryDataset, t: &ActivityType, pick: impl Fn(u32, u32) -> u32) -> Vec<f64> {
    ds.activities()
        .filter(|a| a.activity_type() == t)
        .map(|a| f64::from(pick(a.start_s(), a.duration_s())))
        .collect()
}

fn ks_record(step: Step, statistic: Statistic, model: Vec<f64>, validation: Vec<f64>) -> MetricRecord {
    let (n_m, n_v) = (model.len(), validation.len());
    match (Sample1D::new(model), Sample1D::new(validation)) {
        (Ok(m), Ok(v)) => MetricRecord::ok(step, statistic, ks_statistic(&m, &v), n_m, n_v),
        (Err(e), _) | (_, Err(e)) => MetricRecord::failed(step, statistic, e.to_string()).with_counts(n_m, n_v),
    }
}

/// Start-time and duration KS distance for every shared activity type.
pub fn step_a1(
    model: &DiaryDataset,
    validation: &DiaryDataset,
    _cfg: &StepConfig,
) -> Result<Vec<MetricRecord>, StepError> {
    let types = shared_types(model, validation)?;
    let model_only = names(model.activity_vocab().difference(validation.activity_vocab()));
    let validation_only = names(validation.activity_vocab().difference(model.activity_vocab()));

    let mut records = Vec::with_capacity(types.len() * 2);
    for t in &types {
        let starts = ks_record(
            Step::A1,
            Statistic::KsStart,
            times_of(model, t, |s, _| s),
            times_of(validation, t, |s, _| s),
        );
        let durations = ks_record(
            Step::A1,
            Statistic::KsDuration,
            times_of(model, t, |_, d| d),
            times_of(validation, t, |_, d| d),
        );
        for mut r in [starts, durations] {
            r = r.for_activity(t.as_str());
            if !model_only.is_empty() {
                r = r.with_diagnostic("model_only_types", model_only.clone());
            }
            if !validation_only.is_empty() {
                r = r.with_diagnostic("validation_only_types", validation_only.clone());
            }
            records.push(r);
        }
    }
    Ok(records)
}

/// ECDF and density grids for one activity type.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivityGrids {
    pub activity_type: String,
    pub model: EcdfGrid,
    pub validation: EcdfGrid,
    /// Validation-side heat map; absent when the points do not support an
    /// automatic bandwidth.
    pub density: Option<DensityGrid>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepA2Output {
    pub records: Vec<MetricRecord>,
    pub grids: Vec<ActivityGrids>,
}

fn locations_of(ds: &DiaryDataset, t: &ActivityType) -> Vec<Point> {
    ds.activities()
        .filter(|a| a.activity_type() == t)
        .filter_map(|a| a.location())
        .collect()
}

/// Union bounding box; a zero-width axis is widened by half a meter either
/// side so a lattice still exists.
fn union_bounds(a: &[Point], b: &[Point]) -> Result<Bounds, StepError> {
    let mut x = (f64::INFINITY, f64::NEG_INFINITY);
    let mut y = (f64::INFINITY, f64::NEG_INFINITY);
    for p in a.iter().chain(b) {
        x = (x.0.min(p.x), x.1.max(p.x));
        y = (y.0.min(p.y), y.1.max(p.y));
    }
    if x.0 == x.1 {
        x = (x.0 - 0.5, x.1 + 0.5);
    }
    if y.0 == y.1 {
        y = (y.0 - 0.5, y.1 + 0.5);
    }
    Ok(Bounds::new(x.0, x.1, y.0, y.1)?)
}

/// Spatial ECDF distance per shared activity type, with grids retained for
/// emission and a validation-side KDE heat map.
pub fn step_a2(model: &DiaryDataset, validation: &DiaryDataset, cfg: &StepConfig) -> Result<StepA2Output, StepError> {
    if !(model.has_locations() && validation.has_locations()) {
        return Err(StepError::MissingLocations);
    }
    let types = shared_types(model, validation)?;
    let (rows, cols) = (cfg.grid_rows, cfg.grid_cols);
    let mut records = Vec::new();
    let mut grids = Vec::new();
    for t in &types {
        let mp = locations_of(model, t);
        let vp = locations_of(validation, t);
        let computed = union_bounds(&mp, &vp).and_then(|bounds| {
            let em = ecdf_grid(&mp, rows, cols, bounds)?;
            let ev = ecdf_grid(&vp, rows, cols, bounds)?;
            let d = ecdf_rmse(&em, &ev)?;
            Ok((bounds, em, ev, d))
        });
        match computed {
            Ok((bounds, em, ev, d)) => {
                let mut record =
                    MetricRecord::ok(Step::A2, Statistic::EcdfRmse, d, mp.len(), vp.len()).for_activity(t.as_str());
                let density = match kde_grid(&vp, rows, cols, bounds, None) {
                    Ok(g) => Some(g),
                    Err(e) => {
                        record = record.with_diagnostic("heat_map", format!("not computed: {e}"));
                        None
                    }
                };
                records.push(record);
                grids.push(ActivityGrids {
                    activity_type: t.to_string(),
                    model: em,
                    validation: ev,
                    density,
                });
            }
            Err(e) => records.push(
                MetricRecord::failed(Step::A2, Statistic::EcdfRmse, e.to_string())
                    .for_activity(t.as_str())
                    .with_counts(mp.len(), vp.len()),
            ),
        }
    }
    Ok(StepA2Output { records, grids })
}

fn occurrences(ds: &DiaryDataset, t: &ActivityType) -> CountVector<u32> {
    CountVector::tally(
        ds.schedules()
            .iter()
            .map(|s| s.activities().iter().filter(|a| a.activity_type() == t).count() as u32),
    )
}

/// Per-type activity-count chi-square plus the n-gram profile chi-square.
pub fn step_a3(
    model: &DiaryDataset,
    validation: &DiaryDataset,
    cfg: &StepConfig,
) -> Result<Vec<MetricRecord>, StepError> {
    let types = shared_types(model, validation)?;
    let (n_m, n_v) = (model.schedules().len(), validation.schedules().len());
    let mut records = Vec::with_capacity(types.len() + 1);
    for t in &types {
        let record = match scaled_chi_square(&occurrences(model, t), &occurrences(validation, t)) {
            Ok(c) => MetricRecord::ok(Step::A3, Statistic::Chi2Count, c.chi2, n_m, n_v)
                .with_diagnostic("dropped_model_mass", c.dropped_model_mass),
            Err(e) => MetricRecord::failed(Step::A3, Statistic::Chi2Count, e.to_string()).with_counts(n_m, n_v),
        };
        records.push(record.for_activity(t.as_str()));
    }

    let sequences = |ds: &DiaryDataset| ds.schedules().iter().map(activity_sequence).collect::<Vec<_>>();
    let compared = ngram_profile(&sequences(model), cfg.ngram_k, cfg.ngram_p).and_then(|pm| {
        let pv = ngram_profile(&sequences(validation), cfg.ngram_k, cfg.ngram_p)?;
        profile_chi_square(&pm, &pv)
    });
    records.push(match compared {
        Ok(c) => MetricRecord::ok(Step::A3, Statistic::Chi2Ngram, c.chi2, n_m, n_v)
            .with_diagnostic("matched", c.matched)
            .with_diagnostic("model_only", c.model_only)
            .with_diagnostic("validation_only", c.validation_only),
        Err(e) => MetricRecord::failed(Step::A3, Statistic::Chi2Ngram, e.to_string()).with_counts(n_m, n_v),
    });
    Ok(records)
}
