use std::collections::{BTreeMap, BTreeSet};

use super::StatsError;

/// Nonnegative frequencies over unique category labels.
#[derive(Debug, Clone, PartialEq)]
pub struct CountVector<L> {
    labels: Vec<L>,
    counts: Vec<f64>,
}

impl<L: Ord + Clone> CountVector<L> {
    pub fn new(labels: Vec<L>, counts: Vec<f64>) -> Result<Self, StatsError> {
        if labels.len() != counts.len() {
            return Err(StatsError::InvalidCounts(format!(
                "{} labels but {} counts",
                labels.len(),
                counts.len()
            )));
        }
        if counts.iter().any(|c| !c.is_finite() || *c < 0.0) {
            return Err(StatsError::InvalidCounts(
                "counts must be finite and nonnegative".into(),
            ));
        }
        let unique: BTreeSet<&L> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(StatsError::InvalidCounts("duplicate label".into()));
        }
        Ok(Self { labels, counts })
    }

    /// Frequency of each distinct item, labels in ascending order.
    pub fn tally<I: IntoIterator<Item = L>>(items: I) -> Self {
        let mut map: BTreeMap<L, f64> = BTreeMap::new();
        for item in items {
            *map.entry(item).or_insert(0.0) += 1.0;
        }
        let (labels, counts) = map.into_iter().unzip();
        Self { labels, counts }
    }

    pub fn labels(&self) -> &[L] {
        &self.labels
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&L, f64)> {
        self.labels.iter().zip(self.counts.iter().copied())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquare {
    pub chi2: f64,
    /// Fraction of the model total on labels with no validation count.
    pub dropped_model_mass: f64,
}

/// Pearson chi-square of model frequencies against validation frequencies
/// rescaled to the model total.
///
/// Only labels with a positive validation count take part. Model mass on
/// any other label is excluded from the statistic and reported as
/// `dropped_model_mass`.
pub fn scaled_chi_square<L: Ord + Clone>(
    model: &CountVector<L>,
    validation: &CountVector<L>,
) -> Result<ChiSquare, StatsError> {
    let validation_total = validation.total();
    if validation_total <= 0.0 {
        return Err(StatsError::DegenerateValidation);
    }
    let model_total = model.total();
    if model_total <= 0.0 {
        return Err(StatsError::DegenerateModel);
    }
    let kept: BTreeMap<&L, f64> = validation.iter().filter(|(_, c)| *c > 0.0).collect();
    let model_by_label: BTreeMap<&L, f64> = model.iter().collect();

    let kept_model_total: f64 = kept.keys().map(|l| model_by_label.get(l).copied().unwrap_or(0.0)).sum();
    if kept_model_total <= 0.0 {
        return Err(StatsError::DisjointSupport);
    }
    let dropped: f64 = model
        .iter()
        .filter(|(l, _)| !kept.contains_key(l))
        .map(|(_, c)| c)
        .sum();

    let chi2 = kept
        .iter()
        .map(|(label, &f_v)| {
            let f_m = model_by_label.get(label).copied().unwrap_or(0.0);
            // multiply before dividing so integer counts with equal
            // proportions reproduce f_m exactly
            let s_v = f_v * kept_model_total / validation_total;
            let d = f_m - s_v;
            d * d / s_v
        })
        .sum();

    Ok(ChiSquare {
        chi2,
        dropped_model_mass: dropped / model_total,
    })
}
