use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use super::{scaled_chi_square, CountVector, StatsError};
use crate::schedule::ActivityType;

pub type NGram = Vec<ActivityType>;

/// Frequency-ranked n-grams of sentinel-wrapped activity sequences.
///
/// Entries are sorted by count descending, ties broken by
/// lexicographic order of the type names (a prefix sorts first), then
/// truncated to the longest head whose count sum stays within
/// `retained_fraction * total_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramProfile {
    k: usize,
    retained_fraction: f64,
    entries: Vec<(NGram, u64)>,
    total_count: u64,
}

fn check_params(k: usize, p: f64) -> Result<(), StatsError> {
    if k == 0 {
        return Err(StatsError::InvalidParameter("k must be at least 1".into()));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(StatsError::InvalidParameter("P must lie in (0, 1]".into()));
    }
    Ok(())
}

fn rank(a: &(NGram, u64), b: &(NGram, u64)) -> Ordering {
    b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0))
}

impl NGramProfile {
    /// Builds a profile from already-pooled counts.
    pub fn from_counts(k: usize, p: f64, counts: BTreeMap<NGram, u64>) -> Result<Self, StatsError> {
        check_params(k, p)?;
        if counts.keys().any(|g| g.is_empty() || g.len() > k) {
            return Err(StatsError::InvalidParameter("n-gram length outside 1..=k".into()));
        }
        if counts.values().any(|&c| c == 0) {
            return Err(StatsError::InvalidParameter("n-gram counts must be positive".into()));
        }
        Ok(Self::ranked(k, p, counts.into_iter().collect()))
    }

    fn ranked(k: usize, p: f64, mut entries: Vec<(NGram, u64)>) -> Self {
        entries.sort_by(rank);
        let total_count: u64 = entries.iter().map(|e| e.1).sum();
        let budget = p * total_count as f64;
        let mut retained = 0u64;
        let keep = entries
            .iter()
            .take_while(|e| {
                retained += e.1;
                retained as f64 <= budget
            })
            .count();
        entries.truncate(keep);
        Self {
            k,
            retained_fraction: p,
            entries,
            total_count,
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn retained_fraction(&self) -> f64 {
        self.retained_fraction
    }

    pub fn entries(&self) -> &[(NGram, u64)] {
        &self.entries
    }

    /// Sum over all n-grams before truncation.
    pub fn total_count(&self) -> u64 {
        self.total_count
    }

    pub fn retained_count(&self) -> u64 {
        self.entries.iter().map(|e| e.1).sum()
    }
}

/// Counts every n-gram of length `1..=k` over all sequences, each wrapped
/// in boundary sentinels, and truncates the ranked list by `p`.
pub fn ngram_profile<S: AsRef<[ActivityType]>>(sequences: &[S], k: usize, p: f64) -> Result<NGramProfile, StatsError> {
    check_params(k, p)?;
    if sequences.is_empty() || sequences.iter().any(|s| s.as_ref().is_empty()) {
        return Err(StatsError::EmptyInput);
    }
    let wrapped: Vec<Vec<ActivityType>> = sequences
        .iter()
        .map(|s| {
            let mut w = Vec::with_capacity(s.as_ref().len() + 2);
            w.push(ActivityType::sentinel());
            w.extend_from_slice(s.as_ref());
            w.push(ActivityType::sentinel());
            w
        })
        .collect();

    let mut counts: HashMap<&[ActivityType], u64> = HashMap::new();
    for seq in &wrapped {
        for n in 1..=k.min(seq.len()) {
            for gram in seq.windows(n) {
                *counts.entry(gram).or_insert(0) += 1;
            }
        }
    }
    let entries = counts.into_iter().map(|(g, c)| (g.to_vec(), c)).collect();
    Ok(NGramProfile::ranked(k, p, entries))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileComparison {
    pub chi2: f64,
    pub matched: usize,
    pub model_only: usize,
    pub validation_only: usize,
}

/// Scaled chi-square over the n-grams retained in both profiles.
pub fn profile_chi_square(model: &NGramProfile, validation: &NGramProfile) -> Result<ProfileComparison, StatsError> {
    if model.k != validation.k || model.retained_fraction != validation.retained_fraction {
        return Err(StatsError::ProfileMismatch);
    }
    let model_map: BTreeMap<&NGram, u64> = model.entries.iter().map(|(g, c)| (g, *c)).collect();
    let validation_map: BTreeMap<&NGram, u64> = validation.entries.iter().map(|(g, c)| (g, *c)).collect();
    let shared: Vec<&NGram> = model_map
        .keys()
        .filter(|g| validation_map.contains_key(*g))
        .copied()
        .collect();
    if shared.is_empty() {
        return Err(StatsError::NoOverlap);
    }
    let to_counts = |map: &BTreeMap<&NGram, u64>| {
        CountVector::new(
            shared.iter().map(|g| (*g).clone()).collect(),
            shared.iter().map(|g| map[g] as f64).collect(),
        )
    };
    let result = scaled_chi_square(&to_counts(&model_map)?, &to_counts(&validation_map)?)?;
    Ok(ProfileComparison {
        chi2: result.chi2,
        matched: shared.len(),
        model_only: model_map.len() - shared.len(),
        validation_only: validation_map.len() - shared.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq(names: &[&str]) -> Vec<ActivityType> {
        names
            .iter()
            .map(|n| {
                if *n == "none" {
                    ActivityType::sentinel()
                } else {
                    ActivityType::new(*n).unwrap()
                }
            })
            .collect()
    }

    fn sample_sequence() -> Vec<Vec<ActivityType>> {
        vec![seq(&["sleep", "work", "leisure", "sleep"])]
    }

    #[test]
    fn bigrams_of_wrapped_sequence() {
        let profile = ngram_profile(&sample_sequence(), 2, 1.0).unwrap();
        let mut bigrams: Vec<NGram> = profile
            .entries()
            .iter()
            .filter(|(g, _)| g.len() == 2)
            .map(|(g, _)| g.clone())
            .collect();
        bigrams.sort();
        let mut expected = vec![
            seq(&["none", "sleep"]),
            seq(&["sleep", "work"]),
            seq(&["work", "leisure"]),
            seq(&["leisure", "sleep"]),
            seq(&["sleep", "none"]),
        ];
        expected.sort();
        assert_eq!(bigrams, expected);
    }

    #[test]
    fn unigram_counts_include_sentinels() {
        let profile = ngram_profile(&sample_sequence(), 1, 1.0).unwrap();
        let got: Vec<(String, u64)> = profile.entries().iter().map(|(g, c)| (g[0].to_string(), *c)).collect();
        // count descending, then lexicographic
        let want = [("none", 2), ("sleep", 2), ("leisure", 1), ("work", 1)];
        let want: Vec<(String, u64)> = want.iter().map(|(n, c)| (n.to_string(), *c)).collect();
        assert_eq!(got, want);
        assert_eq!(profile.total_count(), 6);
    }

    #[test]
    fn full_retention_when_p_is_one() {
        let profile = ngram_profile(&sample_sequence(), 6, 1.0).unwrap();
        assert_eq!(profile.retained_count(), profile.total_count());
    }

    #[test]
    fn prefix_sorts_before_extension() {
        let mut counts = BTreeMap::new();
        counts.insert(seq(&["a", "b"]), 3);
        counts.insert(seq(&["a"]), 3);
        counts.insert(seq(&["b"]), 5);
        let p = NGramProfile::from_counts(2, 1.0, counts).unwrap();
        let order: Vec<NGram> = p.entries().iter().map(|e| e.0.clone()).collect();
        assert_eq!(order, vec![seq(&["b"]), seq(&["a"]), seq(&["a", "b"])]);
    }

    #[test]
    fn truncation_rule() {
        let mut counts = BTreeMap::new();
        counts.insert(seq(&["a"]), 5);
        counts.insert(seq(&["b"]), 3);
        counts.insert(seq(&["c"]), 2);
        // budget 0.8*10 = 8: a (5), b (8) fit, c would make 10
        let p = NGramProfile::from_counts(1, 0.8, counts.clone()).unwrap();
        assert_eq!(p.entries().len(), 2);
        // budget 4: nothing fits
        let p = NGramProfile::from_counts(1, 0.4, counts).unwrap();
        assert!(p.entries().is_empty());
        assert_eq!(p.total_count(), 10);
    }

    #[test]
    fn invalid_inputs() {
        let empty: Vec<Vec<ActivityType>> = vec![];
        assert_eq!(ngram_profile(&empty, 2, 1.0), Err(StatsError::EmptyInput));
        assert_eq!(
            ngram_profile(&[Vec::<ActivityType>::new()], 2, 1.0),
            Err(StatsError::EmptyInput)
        );
        assert!(matches!(
            ngram_profile(&sample_sequence(), 0, 1.0),
            Err(StatsError::InvalidParameter(_))
        ));
        assert!(matches!(
            ngram_profile(&sample_sequence(), 2, 0.0),
            Err(StatsError::InvalidParameter(_))
        ));
        assert!(matches!(
            ngram_profile(&sample_sequence(), 2, 1.5),
            Err(StatsError::InvalidParameter(_))
        ));
    }

    #[test]
    fn profile_against_itself() {
        let p = ngram_profile(&sample_sequence(), 3, 0.9).unwrap();
        let r = profile_chi_square(&p, &p).unwrap();
        assert_eq!(r.chi2, 0.0);
        assert_eq!((r.model_only, r.validation_only), (0, 0));
        assert_eq!(r.matched, p.entries().len());
    }

    #[test]
    fn reduces_to_scaled_chi_square() {
        let m = NGramProfile::from_counts(1, 1.0, BTreeMap::from([(seq(&["a"]), 10), (seq(&["b"]), 10)])).unwrap();
        let v = NGramProfile::from_counts(1, 1.0, BTreeMap::from([(seq(&["a"]), 1), (seq(&["b"]), 3)])).unwrap();
        let r = profile_chi_square(&m, &v).unwrap();
        assert!((r.chi2 - 20.0 / 3.0).abs() < 1e-9);
        assert_eq!(r.matched, 2);
    }

    #[test]
    fn unmatched_grams_are_counted_and_ignored() {
        let m = NGramProfile::from_counts(1, 1.0, BTreeMap::from([(seq(&["a"]), 10), (seq(&["c"]), 99)])).unwrap();
        let v = NGramProfile::from_counts(1, 1.0, BTreeMap::from([(seq(&["a"]), 1), (seq(&["b"]), 3)])).unwrap();
        let r = profile_chi_square(&m, &v).unwrap();
        assert_eq!(r.chi2, 0.0);
        assert_eq!((r.matched, r.model_only, r.validation_only), (1, 1, 1));
    }

    #[test]
    fn disjoint_and_mismatched_profiles() {
        let m = NGramProfile::from_counts(1, 1.0, BTreeMap::from([(seq(&["a"]), 1)])).unwrap();
        let v = NGramProfile::from_counts(1, 1.0, BTreeMap::from([(seq(&["b"]), 1)])).unwrap();
        assert_eq!(profile_chi_square(&m, &v), Err(StatsError::NoOverlap));
        let w = NGramProfile::from_counts(2, 1.0, BTreeMap::from([(seq(&["a"]), 1)])).unwrap();
        assert_eq!(profile_chi_square(&m, &w), Err(StatsError::ProfileMismatch));
    }

    fn sequences() -> impl Strategy<Value = Vec<Vec<ActivityType>>> {
        let name = prop::sample::select(vec!["sleep", "work", "shop", "leisure"]);
        prop::collection::vec(
            prop::collection::vec(name.prop_map(|n| ActivityType::new(n).unwrap()), 1..8),
            1..20,
        )
    }

    proptest! {
        #[test]
        fn sorted_and_truncated(seqs in sequences(), k in 1usize..6, p in 0.05f64..=1.0) {
            let prof = ngram_profile(&seqs, k, p).unwrap();
            for w in prof.entries().windows(2) {
                prop_assert!(rank(&w[0], &w[1]) == Ordering::Less);
            }
            prop_assert!(prof.entries().iter().all(|(g, c)| (1..=k).contains(&g.len()) && *c > 0));
            let budget = p * prof.total_count() as f64;
            prop_assert!(prof.retained_count() as f64 <= budget);

            // the next n-gram would have broken the budget
            let full = ngram_profile(&seqs, k, 1.0).unwrap();
            prop_assert_eq!(full.total_count(), prof.total_count());
            if let Some(next) = full.entries().get(prof.entries().len()) {
                prop_assert!((prof.retained_count() + next.1) as f64 > budget);
            }
            prop_assert_eq!(&full.entries()[..prof.entries().len()], prof.entries());
        }
    }
}
