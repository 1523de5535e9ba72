//! Origin-destination matrices: projection onto a common zone set,
//! normalization to unit mass, and the RMSE distance over the union of
//! nonzero cells.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::schedule::Point;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdError {
    #[error("target zone set is empty")]
    EmptyTargetZones,
    #[error("duplicate zone id {0:?}")]
    DuplicateZone(String),
    #[error("zone {0:?} has non-finite coordinates")]
    NonFiniteCoordinate(String),
    #[error("count matrix has {len} entries, expected {expected}")]
    ShapeMismatch { len: usize, expected: usize },
    #[error("negative trip count")]
    NegativeCount,
    #[error("non-finite trip count")]
    NonFiniteCount,
    #[error("matrix has no trips")]
    ZeroMatrix,
    #[error("matrices are indexed by different zones")]
    ZoneMismatch,
    #[error("no cell is nonzero in either matrix")]
    EmptySupport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Zone {
    pub id: String,
    pub coord: Point,
}

impl Zone {
    pub fn new(id: impl Into<String>, x: f64, y: f64) -> Self {
        Self {
            id: id.into(),
            coord: Point::new(x, y),
        }
    }
}

fn check_zones(zones: &[Zone]) -> Result<(), OdError> {
    let mut seen = BTreeSet::new();
    for z in zones {
        if !z.coord.is_finite() {
            return Err(OdError::NonFiniteCoordinate(z.id.clone()));
        }
        if !seen.insert(z.id.as_str()) {
            return Err(OdError::DuplicateZone(z.id.clone()));
        }
    }
    Ok(())
}

/// Index of the zone nearest to `p` by squared Euclidean distance; ties go
/// to the lexicographically smallest id. `zones` must be non-empty.
pub(crate) fn nearest_zone(zones: &[Zone], p: &Point) -> usize {
    let mut best = 0;
    let mut best_d = zones[0].coord.dist_sq(p);
    for (k, z) in zones.iter().enumerate().skip(1) {
        let d = z.coord.dist_sq(p);
        if d < best_d || (d == best_d && z.id < zones[best].id) {
            best = k;
            best_d = d;
        }
    }
    best
}

/// Square trip-count matrix; `count(i, j)` is trips from zone `i` to zone `j`.
#[derive(Debug, Clone, PartialEq)]
pub struct ODMatrix {
    zones: Vec<Zone>,
    counts: Vec<f64>,
}

impl ODMatrix {
    /// `counts` is row-major, `zones.len()` squared entries.
    pub fn new(zones: Vec<Zone>, counts: Vec<f64>) -> Result<Self, OdError> {
        check_zones(&zones)?;
        let expected = zones.len() * zones.len();
        if counts.len() != expected {
            return Err(OdError::ShapeMismatch {
                len: counts.len(),
                expected,
            });
        }
        if counts.iter().any(|c| !c.is_finite()) {
            return Err(OdError::NonFiniteCount);
        }
        if counts.iter().any(|&c| c < 0.0) {
            return Err(OdError::NegativeCount);
        }
        if !counts.iter().any(|&c| c > 0.0) {
            return Err(OdError::ZeroMatrix);
        }
        Ok(Self { zones, counts })
    }

    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    pub fn count(&self, origin: usize, dest: usize) -> f64 {
        self.counts[origin * self.zones.len() + dest]
    }

    pub fn total(&self) -> f64 {
        self.counts.iter().sum()
    }
}

/// Shares summing to one over the same zone index as the source matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedOD {
    zones: Vec<Zone>,
    shares: Vec<f64>,
}

impl NormalizedOD {
    pub fn zones(&self) -> &[Zone] {
        &self.zones
    }

    pub fn shares(&self) -> &[f64] {
        &self.shares
    }

    pub fn share(&self, origin: usize, dest: usize) -> f64 {
        self.shares[origin * self.zones.len() + dest]
    }
}

/// Re-indexes `model` by `target_zones`, replacing every model zone with its
/// nearest target zone and summing the flows that collapse together.
pub fn od_project(model: &ODMatrix, target_zones: &[Zone]) -> Result<ODMatrix, OdError> {
    if target_zones.is_empty() {
        return Err(OdError::EmptyTargetZones);
    }
    check_zones(target_zones)?;
    let map: Vec<usize> = model
        .zones
        .iter()
        .map(|z| nearest_zone(target_zones, &z.coord))
        .collect();
    let n = model.zones.len();
    let t = target_zones.len();
    let mut counts = vec![0.0; t * t];
    for (i, &ti) in map.iter().enumerate() {
        for (j, &tj) in map.iter().enumerate() {
            let c = model.counts[i * n + j];
            if c != 0.0 {
                counts[ti * t + tj] += c;
            }
        }
    }
    ODMatrix::new(target_zones.to_vec(), counts)
}

pub fn od_normalize(m: &ODMatrix) -> Result<NormalizedOD, OdError> {
    let total = m.total();
    if total.is_nan() || total <= 0.0 {
        return Err(OdError::ZeroMatrix);
    }
    Ok(NormalizedOD {
        zones: m.zones.clone(),
        shares: m.counts.iter().map(|c| c / total).collect(),
    })
}

/// RMSE of shares over the cells nonzero in at least one matrix.
pub fn od_distance(model: &NormalizedOD, validation: &NormalizedOD) -> Result<f64, OdError> {
    let same_index = model.zones.len() == validation.zones.len()
        && model.zones.iter().zip(&validation.zones).all(|(a, b)| a.id == b.id);
    if !same_index {
        return Err(OdError::ZoneMismatch);
    }
    let (sum_sq, support) = model
        .shares
        .iter()
        .zip(&validation.shares)
        .filter(|(m, v)| **m > 0.0 || **v > 0.0)
        .fold((0.0, 0usize), |(s, n), (m, v)| (s + (m - v) * (m - v), n + 1));
    if support == 0 {
        return Err(OdError::EmptySupport);
    }
    Ok((sum_sq / support as f64).sqrt())
}
