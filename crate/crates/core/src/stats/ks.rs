use super::StatsError;

/// A non-empty sample of finite reals, stored sorted.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample1D {
    sorted: Vec<f64>,
}

impl Sample1D {
    pub fn new(mut values: Vec<f64>) -> Result<Self, StatsError> {
        if values.is_empty() {
            return Err(StatsError::EmptySample);
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(StatsError::NonFiniteValue);
        }
        values.sort_by(f64::total_cmp);
        Ok(Self { sorted: values })
    }

    pub fn len(&self) -> usize {
        self.sorted.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted.is_empty()
    }

    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted
    }
}

impl TryFrom<Vec<f64>> for Sample1D {
    type Error = StatsError;
    fn try_from(values: Vec<f64>) -> Result<Self, Self::Error> {
        Self::new(values)
    }
}

/// Two-sample Kolmogorov-Smirnov distance `sup_x |F_a(x) - F_b(x)|`.
///
/// Both ECDFs are step functions, so the supremum is attained either at a
/// pooled sample point or immediately to its left. The merge below visits
/// every distinct pooled value once and checks both sides of the step.
pub fn ks_statistic(model: &Sample1D, validation: &Sample1D) -> f64 {
    let a = &model.sorted;
    let b = &validation.sorted;
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0usize, 0usize);
    let mut sup = 0.0f64;
    while i < a.len() || j < b.len() {
        let v = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) => x.min(y),
            (Some(&x), None) => x,
            (None, Some(&y)) => y,
            (None, None) => unreachable!(),
        };
        // left limit at v
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(v: &[f64]) -> Sample1D {
        Sample1D::new(v.to_vec()).unwrap()
    }

    /// Independent evaluation: the sup over every pooled point, its left
    /// limit, and a dense grid spanning the pooled range.
    fn brute_force(a: &[f64], b: &[f64]) -> f64 {
        let ecdf = |xs: &[f64], x: f64, strict: bool| {
            let c = xs.iter().filter(|&&v| if strict { v < x } else { v <= x }).count();
            c as f64 / xs.len() as f64
        };
        let mut pts: Vec<f64> = a.iter().chain(b).copied().collect();
        let lo = pts.iter().copied().fold(f64::INFINITY, f64::min) - 1.0;
        let hi = pts.iter().copied().fold(f64::NEG_INFINITY, f64::max) + 1.0;
        pts.extend((0..=1000).map(|k| lo + (hi - lo) * k as f64 / 1000.0));
        pts.iter()
            .flat_map(|&x| {
                [
                    (ecdf(a, x, false) - ecdf(b, x, false)).abs(),
                    (ecdf(a, x, true) - ecdf(b, x, true)).abs(),
                ]
            })
            .fold(0.0, f64::max)
    }

    #[test]
    fn identical_samples() {
        assert_eq!(ks_statistic(&s(&[1.0, 2.0, 3.0]), &s(&[1.0, 2.0, 3.0])), 0.0);
    }

    #[test]
    fn disjoint_supports() {
        assert_eq!(ks_statistic(&s(&[0.0, 1.0]), &s(&[10.0, 11.0])), 1.0);
    }

    #[test]
    fn partial_overlap_matches_oracle() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [3.0, 4.0, 5.0, 6.0];
        assert_eq!(brute_force(&a, &b), 0.5);
        assert_eq!(ks_statistic(&s(&a), &s(&b)), 0.5);
    }

    #[test]
    fn ties_across_samples() {
        let a = [1.0, 1.0, 1.0, 2.0];
        let b = [1.0, 2.0, 2.0, 2.0];
        assert_eq!(ks_statistic(&s(&a), &s(&b)), brute_force(&a, &b));
        assert_eq!(ks_statistic(&s(&a), &s(&b)), 0.5);
    }

    #[test]
    fn empty_and_non_finite_rejected() {
        assert_eq!(Sample1D::new(vec![]), Err(StatsError::EmptySample));
        assert_eq!(Sample1D::new(vec![1.0, f64::NAN]), Err(StatsError::NonFiniteValue));
    }

    proptest! {
        #[test]
        fn self_distance_is_zero(v in prop::collection::vec(-1e6f64..1e6, 1..100)) {
            let x = s(&v);
            prop_assert_eq!(ks_statistic(&x, &x), 0.0);
        }

        #[test]
        fn symmetric_and_matches_oracle(
            a in prop::collection::vec((-20i32..20).prop_map(f64::from), 1..60),
            b in prop::collection::vec((-20i32..20).prop_map(f64::from), 1..60),
        ) {
            let d = ks_statistic(&s(&a), &s(&b));
            prop_assert_eq!(d, ks_statistic(&s(&b), &s(&a)));
            prop_assert_eq!(d, brute_force(&a, &b));
            prop_assert!((0.0..=1.0).contains(&d));
        }
    }
}
