//! Synthetic diary generator with controlled perturbations.
//!
//! A first-order chain over activity types picks each day's sequence. Start
//! times are truncated normals per type (sorted afterwards), durations and
//! travel times are log-normal, locations come from per-type Gaussian
//! mixtures, and the arriving mode depends on the destination type.
//!
//! Every schedule draws each aspect from its own ChaCha stream keyed by
//! `(seed, person index, aspect)`, so a perturbation of one aspect leaves the
//! draws of the others untouched and parallel generation is reproducible.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::od::{nearest_zone, ODMatrix, OdError, Zone};
use crate::schedule::{
    build_dataset, ActivityInstance, ActivitySchedule, ActivityType, DiaryDataset, Mode, Point, ScheduleError, Trip,
    DAY_SECONDS,
};
use crate::stats::Bounds;

/// Upper bound on activities per generated schedule.
pub const MAX_ACTIVITIES: usize = 11;

const WEIGHT_TOL: f64 = 1e-9;
const REJECTION_TRIES: usize = 100;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid generator spec: {0}")]
    InvalidSpec(String),
    #[error("unknown perturbation {0:?} (expected shift_start, relocate, swap_modes or reorder)")]
    UnknownKind(String),
    #[error("invalid magnitude {magnitude} for {kind}")]
    InvalidMagnitude { kind: &'static str, magnitude: f64 },
    #[error("dataset has no activity locations")]
    MissingLocations,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error(transparent)]
    Od(#[from] OdError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Transition {
    /// Probability that the schedule ends after this activity.
    pub end: f64,
    pub next: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Chain {
    pub initial: BTreeMap<String, f64>,
    pub transitions: BTreeMap<String, Transition>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalTime {
    pub mean_s: f64,
    pub sd_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LogNormalTime {
    pub log_mean: f64,
    pub log_sd: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureComponent {
    pub weight: f64,
    pub center: Point,
    pub sd_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub seed: u64,
    pub population: usize,
    pub chain: Chain,
    pub start_time_dist: BTreeMap<String, NormalTime>,
    pub duration_dist: BTreeMap<String, LogNormalTime>,
    /// Arriving-mode distribution keyed by destination type.
    pub mode_choice: BTreeMap<String, BTreeMap<String, f64>>,
    /// Absent means the generated diaries carry no locations.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub location_mixture: Option<BTreeMap<String, Vec<MixtureComponent>>>,
    pub travel_time_dist: BTreeMap<String, LogNormalTime>,
}

fn map<V: Clone>(entries: &[(&str, V)]) -> BTreeMap<String, V> {
    entries.iter().map(|(k, v)| (k.to_string(), v.clone())).collect()
}

fn hours(h: f64) -> f64 {
    h * 3600.0
}

impl GeneratorSpec {
    /// A small urban weekday model with five activity types and three modes.
    pub fn example() -> Self {
        let tr = |end: f64, next: &[(&str, f64)]| Transition { end, next: map(next) };
        let normal = |h: f64, sd_h: f64| NormalTime {
            mean_s: hours(h),
            sd_s: hours(sd_h),
        };
        let lognormal = |median_s: f64, log_sd: f64| LogNormalTime {
            log_mean: median_s.ln(),
            log_sd,
        };
        let comp = |weight: f64, x: f64, y: f64, sd_m: f64| MixtureComponent {
            weight,
            center: Point::new(x, y),
            sd_m,
        };
        let modes = |car: f64, pt: f64, walk: f64| map(&[("car", car), ("public_transport", pt), ("walk", walk)]);
        Self {
            seed: 1,
            population: 1000,
            chain: Chain {
                initial: map(&[("sleep", 1.0)]),
                transitions: map(&[
                    (
                        "sleep",
                        tr(
                            0.3,
                            &[("work", 0.4), ("school", 0.12), ("shop", 0.1), ("leisure", 0.08)],
                        ),
                    ),
                    (
                        "work",
                        tr(
                            0.02,
                            &[("sleep", 0.6), ("shop", 0.2), ("leisure", 0.15), ("work", 0.03)],
                        ),
                    ),
                    ("school", tr(0.02, &[("sleep", 0.7), ("leisure", 0.2), ("shop", 0.08)])),
                    (
                        "shop",
                        tr(0.05, &[("sleep", 0.6), ("leisure", 0.2), ("work", 0.1), ("shop", 0.05)]),
                    ),
                    ("leisure", tr(0.05, &[("sleep", 0.7), ("shop", 0.2), ("leisure", 0.05)])),
                ]),
            },
            start_time_dist: map(&[
                ("sleep", normal(2.0, 2.0)),
                ("work", normal(8.0, 1.0)),
                ("school", normal(8.0, 0.5)),
                ("shop", normal(16.0, 2.0)),
                ("leisure", normal(18.0, 2.0)),
            ]),
            duration_dist: map(&[
                ("sleep", lognormal(hours(8.0), 0.2)),
                ("work", lognormal(hours(8.0), 0.2)),
                ("school", lognormal(hours(6.0), 0.2)),
                ("shop", lognormal(2700.0, 0.4)),
                ("leisure", lognormal(5400.0, 0.5)),
            ]),
            mode_choice: map(&[
                ("sleep", modes(0.5, 0.35, 0.15)),
                ("work", modes(0.6, 0.35, 0.05)),
                ("school", modes(0.15, 0.6, 0.25)),
                ("shop", modes(0.45, 0.2, 0.35)),
                ("leisure", modes(0.4, 0.4, 0.2)),
            ]),
            location_mixture: Some(map(&[
                (
                    "sleep",
                    vec![comp(0.5, -4000.0, -2000.0, 2500.0), comp(0.5, 5000.0, 3000.0, 3000.0)],
                ),
                (
                    "work",
                    vec![comp(0.7, 0.0, 0.0, 1500.0), comp(0.3, 6000.0, -4000.0, 2000.0)],
                ),
                ("school", vec![comp(1.0, 2000.0, 2000.0, 2000.0)]),
                (
                    "shop",
                    vec![comp(0.6, 1000.0, -1000.0, 2500.0), comp(0.4, -5000.0, 4000.0, 2000.0)],
                ),
                ("leisure", vec![comp(1.0, 0.0, 3000.0, 4000.0)]),
            ])),
            travel_time_dist: map(&[
                ("car", lognormal(1200.0, 0.5)),
                ("public_transport", lognormal(2100.0, 0.4)),
                ("walk", lognormal(720.0, 0.5)),
            ]),
        }
    }

    /// Every activity type the chain can emit.
    pub fn activity_types(&self) -> BTreeSet<String> {
        let mut types: BTreeSet<String> = self.chain.initial.keys().cloned().collect();
        for t in self.chain.transitions.values() {
            types.extend(t.next.keys().cloned());
        }
        types
    }

    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |msg: String| Err(SynthError::InvalidSpec(msg));
        if self.population == 0 {
            return bad("population must be at least 1".into());
        }
        check_distribution("chain.initial", self.chain.initial.values().copied())?;
        let types = self.activity_types();
        let mut modes = BTreeSet::new();
        for t in &types {
            ActivityType::new(t).map_err(|e| SynthError::InvalidSpec(format!("activity type {t:?}: {e}")))?;
            let Some(row) = self.chain.transitions.get(t) else {
                return bad(format!("no transition row for {t:?}"));
            };
            check_distribution(
                &format!("chain.transitions.{t}"),
                std::iter::once(row.end).chain(row.next.values().copied()),
            )?;
            match self.start_time_dist.get(t) {
                Some(d) if d.mean_s.is_finite() && d.sd_s.is_finite() && d.sd_s > 0.0 => {}
                Some(_) => return bad(format!("start_time_dist.{t} needs finite mean and positive sd")),
                None => return bad(format!("no start_time_dist for {t:?}")),
            }
            match self.duration_dist.get(t) {
                Some(d) if valid_lognormal(d) => {}
                Some(_) => return bad(format!("duration_dist.{t} needs finite log_mean and positive log_sd")),
                None => return bad(format!("no duration_dist for {t:?}")),
            }
            let Some(choice) = self.mode_choice.get(t) else {
                return bad(format!("no mode_choice for {t:?}"));
            };
            check_distribution(&format!("mode_choice.{t}"), choice.values().copied())?;
            modes.extend(choice.keys().cloned());
            if let Some(mix) = &self.location_mixture {
                let Some(components) = mix.get(t) else {
                    return bad(format!("no location_mixture for {t:?}"));
                };
                check_distribution(&format!("location_mixture.{t}"), components.iter().map(|c| c.weight))?;
                if components
                    .iter()
                    .any(|c| !c.center.is_finite() || !c.sd_m.is_finite() || c.sd_m <= 0.0)
                {
                    return bad(format!("location_mixture.{t} needs finite centers and positive sd_m"));
                }
            }
        }
        for m in &modes {
            Mode::new(m).map_err(|e| SynthError::InvalidSpec(format!("mode {m:?}: {e}")))?;
            match self.travel_time_dist.get(m) {
                Some(d) if valid_lognormal(d) => {}
                Some(_) => {
                    return bad(format!(
                        "travel_time_dist.{m} needs finite log_mean and positive log_sd"
                    ))
                }
                None => return bad(format!("no travel_time_dist for {m:?}")),
            }
        }
        Ok(())
    }
}

fn valid_lognormal(d: &LogNormalTime) -> bool {
    d.log_mean.is_finite() && d.log_sd.is_finite() && d.log_sd > 0.0
}

fn check_distribution(name: &str, weights: impl Iterator<Item = f64>) -> Result<(), SynthError> {
    let mut sum = 0.0;
    let mut n = 0;
    for w in weights {
        if !w.is_finite() || w < 0.0 {
            return Err(SynthError::InvalidSpec(format!(
                "{name}: weights must be finite and nonnegative"
            )));
        }
        sum += w;
        n += 1;
    }
    if n == 0 || (sum - 1.0).abs() > WEIGHT_TOL {
        return Err(SynthError::InvalidSpec(format!(
            "{name}: weights sum to {sum}, expected 1"
        )));
    }
    Ok(())
}

/// Independent random streams within one schedule.
#[derive(Clone, Copy)]
enum Aspect {
    Chain = 0,
    Start = 1,
    Duration = 2,
    Location = 3,
    Mode = 4,
    Travel = 5,
}

fn stream(seed: u64, person: usize, aspect: Aspect) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(person as u64 * 8 + aspect as u64);
    rng
}

/// Draws a key from a weight map by inverse CDF in key order.
fn categorical<'a, R: Rng>(rng: &mut R, weights: impl Iterator<Item = (&'a String, f64)>) -> Option<&'a String> {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last = None;
    for (k, w) in weights {
        if w <= 0.0 {
            continue;
        }
        acc += w;
        last = Some(k);
        if u < acc {
            return last;
        }
    }
    last
}

fn truncated_start<R: Rng>(rng: &mut R, d: NormalTime) -> u32 {
    let normal = Normal::new(d.mean_s, d.sd_s).expect("validated sd");
    let hi = f64::from(DAY_SECONDS - 1);
    let mut x = d.mean_s;
    for _ in 0..REJECTION_TRIES {
        x = normal.sample(rng);
        if (0.0..=hi).contains(&x) {
            break;
        }
    }
    x.round().clamp(0.0, hi) as u32
}

fn lognormal_secs<R: Rng>(rng: &mut R, d: LogNormalTime, min: f64) -> u32 {
    let v = LogNormal::new(d.log_mean, d.log_sd).expect("validated sd").sample(rng);
    v.round().clamp(min, f64::from(u32::MAX)) as u32
}

fn generate_one(spec: &GeneratorSpec, person: usize) -> Result<ActivitySchedule, SynthError> {
    let mut rng = stream(spec.seed, person, Aspect::Chain);
    let first = categorical(&mut rng, spec.chain.initial.iter().map(|(k, &w)| (k, w))).expect("validated initial");
    let mut types = vec![first.clone()];
    while types.len() < MAX_ACTIVITIES {
        let row = &spec.chain.transitions[types.last().unwrap()];
        let end = String::new();
        let options = std::iter::once((&end, row.end)).chain(row.next.iter().map(|(k, &w)| (k, w)));
        match categorical(&mut rng, options) {
            Some(next) if !next.is_empty() => types.push(next.clone()),
            _ => break,
        }
    }

    let mut rng = stream(spec.seed, person, Aspect::Start);
    let mut starts: Vec<u32> = types
        .iter()
        .map(|t| truncated_start(&mut rng, spec.start_time_dist[t]))
        .collect();
    starts.sort_unstable();

    let mut rng = stream(spec.seed, person, Aspect::Duration);
    let durations: Vec<u32> = types
        .iter()
        .map(|t| lognormal_secs(&mut rng, spec.duration_dist[t], 1.0))
        .collect();

    let mut rng = stream(spec.seed, person, Aspect::Location);
    let locations: Vec<Option<Point>> = types
        .iter()
        .map(|t| {
            let mix = spec.location_mixture.as_ref()?;
            let components = &mix[t];
            let u: f64 = rng.random();
            let mut acc = 0.0;
            let c = components
                .iter()
                .find(|c| {
                    acc += c.weight;
                    u < acc
                })
                .unwrap_or_else(|| components.last().expect("validated mixture"));
            let n = Normal::new(0.0, c.sd_m).expect("validated sd");
            Some(Point::new(
                c.center.x + n.sample(&mut rng),
                c.center.y + n.sample(&mut rng),
            ))
        })
        .collect();

    let mut mode_rng = stream(spec.seed, person, Aspect::Mode);
    let mut travel_rng = stream(spec.seed, person, Aspect::Travel);
    let mut trips = Vec::with_capacity(types.len() - 1);
    for k in 1..types.len() {
        let mode = categorical(&mut mode_rng, spec.mode_choice[&types[k]].iter().map(|(m, &w)| (m, w)))
            .expect("validated mode choice");
        let travel = lognormal_secs(&mut travel_rng, spec.travel_time_dist[mode], 0.0);
        let prev_end = u64::from(starts[k - 1]) + u64::from(durations[k - 1]);
        let depart = prev_end.min(u64::from(DAY_SECONDS - 1)) as u32;
        trips.push(Trip::new(Mode::new(mode)?, travel, depart)?);
    }

    let activities = types
        .iter()
        .zip(starts)
        .zip(durations)
        .zip(locations)
        .map(|(((t, s), d), loc)| ActivityInstance::new(ActivityType::new(t)?, s, d, loc))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ActivitySchedule::new(format!("p{person}"), activities, trips)?)
}

/// Generates `spec.population` schedules. The result depends only on the
/// spec, not on thread count.
pub fn generate(spec: &GeneratorSpec) -> Result<DiaryDataset, SynthError> {
    spec.validate()?;
    let schedules = (0..spec.population)
        .into_par_iter()
        .map(|i| generate_one(spec, i))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(build_dataset(schedules)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PerturbKind {
    ShiftStart,
    Relocate,
    SwapModes,
    Reorder,
}

impl PerturbKind {
    pub fn token(self) -> &'static str {
        match self {
            Self::ShiftStart => "shift_start",
            Self::Relocate => "relocate",
            Self::SwapModes => "swap_modes",
            Self::Reorder => "reorder",
        }
    }
}

impl FromStr for PerturbKind {
    type Err = SynthError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "shift_start" => Ok(Self::ShiftStart),
            "relocate" => Ok(Self::Relocate),
            "swap_modes" => Ok(Self::SwapModes),
            "reorder" => Ok(Self::Reorder),
            other => Err(SynthError::UnknownKind(other.to_string())),
        }
    }
}

/// Returns a copy of `spec` with one aspect perturbed.
///
/// * `shift_start`: add `magnitude` seconds to every start-time mean.
/// * `relocate`: move every mixture center `magnitude` metres along x.
/// * `swap_modes`: blend each mode distribution with its mirror over the
///   sorted mode names, weight `magnitude` in [0, 1].
/// * `reorder`: blend each next-type distribution toward uniform over all
///   types, weight `magnitude` in [0, 1], keeping the end probability.
pub fn perturb(spec: &GeneratorSpec, kind: PerturbKind, magnitude: f64) -> Result<GeneratorSpec, SynthError> {
    let invalid = || SynthError::InvalidMagnitude {
        kind: kind.token(),
        magnitude,
    };
    if !magnitude.is_finite() {
        return Err(invalid());
    }
    if matches!(kind, PerturbKind::SwapModes | PerturbKind::Reorder) && !(0.0..=1.0).contains(&magnitude) {
        return Err(invalid());
    }
    let mut out = spec.clone();
    if magnitude == 0.0 {
        return Ok(out);
    }
    match kind {
        PerturbKind::ShiftStart => {
            for d in out.start_time_dist.values_mut() {
                d.mean_s += magnitude;
            }
        }
        PerturbKind::Relocate => {
            for c in out.location_mixture.iter_mut().flat_map(|m| m.values_mut()).flatten() {
                c.center.x += magnitude;
            }
        }
        PerturbKind::SwapModes => {
            for choice in out.mode_choice.values_mut() {
                let original: Vec<f64> = choice.values().copied().collect();
                let n = original.len();
                for (k, p) in choice.values_mut().enumerate() {
                    *p = (1.0 - magnitude) * original[k] + magnitude * original[n - 1 - k];
                }
            }
        }
        PerturbKind::Reorder => {
            let types = spec.activity_types();
            let share = 1.0 / types.len() as f64;
            for row in out.chain.transitions.values_mut() {
                let go = 1.0 - row.end;
                for t in &types {
                    let p = row.next.get(t).copied().unwrap_or(0.0);
                    row.next
                        .insert(t.clone(), (1.0 - magnitude) * p + magnitude * go * share);
                }
            }
        }
    }
    Ok(out)
}

/// `nx * ny` zones at the cell centers of a regular grid over `bounds`,
/// ids `z{row}_{col}` with row 0 at the minimal y.
pub fn zone_grid(bounds: &Bounds, nx: usize, ny: usize) -> Vec<Zone> {
    let dx = (bounds.x_max - bounds.x_min) / nx as f64;
    let dy = (bounds.y_max - bounds.y_min) / ny as f64;
    (0..ny)
        .flat_map(|r| {
            (0..nx).map(move |c| {
                Zone::new(
                    format!("z{r}_{c}"),
                    bounds.x_min + (c as f64 + 0.5) * dx,
                    bounds.y_min + (r as f64 + 0.5) * dy,
                )
            })
        })
        .collect()
}

/// Trip matrix from consecutive activity locations snapped to the nearest
/// zone.
pub fn derive_od(dataset: &DiaryDataset, zones: &[Zone]) -> Result<ODMatrix, SynthError> {
    if !dataset.has_locations() {
        return Err(SynthError::MissingLocations);
    }
    if zones.is_empty() {
        return Err(OdError::EmptyTargetZones.into());
    }
    let n = zones.len();
    let mut counts = vec![0.0; n * n];
    for s in dataset.schedules() {
        let snapped: Vec<usize> = s
            .activities()
            .iter()
            .map(|a| nearest_zone(zones, &a.location().expect("dataset has locations")))
            .collect();
        for w in snapped.windows(2) {
            counts[w[0] * n + w[1]] += 1.0;
        }
    }
    Ok(ODMatrix::new(zones.to_vec(), counts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::write_diary;

    fn small() -> GeneratorSpec {
        GeneratorSpec {
            population: 200,
            ..GeneratorSpec::example()
        }
    }

    fn bytes(ds: &DiaryDataset) -> Vec<u8> {
        let mut out = Vec::new();
        write_diary(ds, &mut out).unwrap();
        out
    }

    #[test]
    fn example_is_valid_and_round_trips_json() {
        let spec = GeneratorSpec::example();
        spec.validate().unwrap();
        let text = serde_json::to_string(&spec).unwrap();
        assert_eq!(serde_json::from_str::<GeneratorSpec>(&text).unwrap(), spec);
    }

    #[test]
    fn generation_is_deterministic() {
        let a = generate(&small()).unwrap();
        let b = generate(&small()).unwrap();
        assert_eq!(bytes(&a), bytes(&b));
        let other = generate(&GeneratorSpec { seed: 2, ..small() }).unwrap();
        assert_ne!(bytes(&a), bytes(&other));
    }

    #[test]
    fn thread_count_does_not_matter() {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let serial = pool.install(|| generate(&small()).unwrap());
        assert_eq!(bytes(&serial), bytes(&generate(&small()).unwrap()));
    }

    #[test]
    fn schedules_are_well_formed() {
        let ds = generate(&small()).unwrap();
        assert_eq!(ds.schedules().len(), 200);
        assert!(ds.has_locations());
        for s in ds.schedules() {
            assert!((1..=MAX_ACTIVITIES).contains(&s.activities().len()));
            assert_eq!(s.activities()[0].activity_type().as_str(), "sleep");
            for (k, t) in s.trips().iter().enumerate() {
                let a = &s.activities()[k];
                let end = (a.start_s() + a.duration_s()).min(DAY_SECONDS - 1);
                assert_eq!(t.depart_s(), end);
            }
        }
        assert_eq!(ds.schedules()[3].person_id(), "p3");
    }

    #[test]
    fn no_locations_without_mixture() {
        let spec = GeneratorSpec {
            location_mixture: None,
            ..small()
        };
        assert!(!generate(&spec).unwrap().has_locations());
    }

    #[test]
    fn zero_magnitude_is_identity() {
        let spec = small();
        for kind in [
            PerturbKind::ShiftStart,
            PerturbKind::Relocate,
            PerturbKind::SwapModes,
            PerturbKind::Reorder,
        ] {
            assert_eq!(perturb(&spec, kind, 0.0).unwrap(), spec);
        }
    }

    #[test]
    fn perturbations_touch_one_aspect() {
        let spec = small();
        let base = generate(&spec).unwrap();
        let shifted = generate(&perturb(&spec, PerturbKind::ShiftStart, 600.0).unwrap()).unwrap();
        let moved = generate(&perturb(&spec, PerturbKind::Relocate, 500.0).unwrap()).unwrap();
        for ((b, s), m) in base.schedules().iter().zip(shifted.schedules()).zip(moved.schedules()) {
            assert_eq!(b.activities().len(), s.activities().len());
            for ((x, y), z) in b.activities().iter().zip(s.activities()).zip(m.activities()) {
                assert_eq!(x.activity_type(), y.activity_type());
                assert_eq!(x.location(), y.location());
                assert_eq!(x.duration_s(), y.duration_s());
                assert_eq!(x.start_s(), z.start_s());
                let (p, q) = (x.location().unwrap(), z.location().unwrap());
                assert!((q.x - p.x - 500.0).abs() < 1e-6 && q.y == p.y);
            }
            let bm: Vec<_> = b.trips().iter().map(|t| t.mode()).collect();
            let sm: Vec<_> = s.trips().iter().map(|t| t.mode()).collect();
            assert_eq!(bm, sm);
        }
    }

    #[test]
    fn swap_and_reorder_stay_normalized() {
        let spec = small();
        let swapped = perturb(&spec, PerturbKind::SwapModes, 1.0).unwrap();
        swapped.validate().unwrap();
        assert_eq!(swapped.mode_choice["work"]["walk"], 0.6);
        assert_eq!(swapped.mode_choice["work"]["car"], 0.05);
        let reordered = perturb(&spec, PerturbKind::Reorder, 0.5).unwrap();
        reordered.validate().unwrap();
        assert_eq!(reordered.chain.transitions["sleep"].end, 0.3);
        assert!(perturb(&spec, PerturbKind::SwapModes, 1.5).is_err());
        assert!(perturb(&spec, PerturbKind::ShiftStart, f64::NAN).is_err());
        assert!(matches!(
            "jitter".parse::<PerturbKind>(),
            Err(SynthError::UnknownKind(_))
        ));
    }

    #[test]
    fn invalid_specs() {
        let mut s = small();
        s.chain.transitions.get_mut("work").unwrap().end = 0.5;
        assert!(matches!(s.validate(), Err(SynthError::InvalidSpec(_))));
        let mut s = small();
        s.start_time_dist.remove("shop");
        assert!(s.validate().is_err());
        let mut s = small();
        s.duration_dist.get_mut("work").unwrap().log_sd = 0.0;
        assert!(s.validate().is_err());
        let mut s = small();
        s.travel_time_dist.remove("walk");
        assert!(s.validate().is_err());
        let mut s = small();
        s.population = 0;
        assert!(s.validate().is_err());
        let mut s = small();
        s.chain.initial = map(&[("none", 1.0)]);
        assert!(s.validate().is_err());
    }

    #[test]
    fn od_from_locations() {
        let ds = generate(&small()).unwrap();
        let b = Bounds::new(-12_000.0, 12_000.0, -12_000.0, 12_000.0).unwrap();
        let zones = zone_grid(&b, 4, 3);
        assert_eq!(zones.len(), 12);
        assert_eq!(zones[0].coord, Point::new(-9000.0, -8000.0));
        assert_eq!(zones[5].id, "z1_1");
        let od = derive_od(&ds, &zones).unwrap();
        assert_eq!(od.total() as usize, ds.trip_count());
        let bare = generate(&GeneratorSpec {
            location_mixture: None,
            ..small()
        })
        .unwrap();
        assert!(matches!(derive_od(&bare, &zones), Err(SynthError::MissingLocations)));
    }
}
