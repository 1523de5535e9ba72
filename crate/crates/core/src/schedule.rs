//! In-memory representation of single-workday activity schedules.
//!
//! Times are integer seconds since local midnight. Coordinates are planar
//! projected meters. Every constructor validates its invariants, so a value
//! of any of these types is structurally sound once built.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seconds in the single modeled day.
pub const DAY_SECONDS: u32 = 86_400;

const SENTINEL_NAME: &str = "none";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScheduleError {
    #[error("invalid token {0:?}: must be non-empty and contain no whitespace or comma")]
    InvalidToken(String),
    #[error("activity type `none` is reserved for n-gram boundary sentinels")]
    ReservedName,
    #[error("start time {0} s outside [0, 86400)")]
    StartOutOfRange(u32),
    #[error("departure time {0} s outside [0, 86400)")]
    DepartOutOfRange(u32),
    #[error("activity duration must be at least 1 s")]
    ZeroDuration,
    #[error("location has non-finite coordinates")]
    NonFiniteLocation,
    #[error("schedule has no activities")]
    EmptySchedule,
    #[error("schedule has {activities} activities but {trips} trips (expected activities - 1)")]
    TripCountMismatch { activities: usize, trips: usize },
    #[error("activity {index} starts before its predecessor")]
    DecreasingStart { index: usize },
    #[error("dataset contains no schedules")]
    EmptyDataset,
    #[error("some but not all activities carry a location")]
    MixedLocationPresence,
}

fn check_token(name: &str) -> Result<(), ScheduleError> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == ',') {
        return Err(ScheduleError::InvalidToken(name.to_string()));
    }
    Ok(())
}

/// Activity type token such as `sleep` or `work`.
///
/// The token `none` cannot be constructed through [`ActivityType::new`]; it
/// exists only as the boundary sentinel returned by [`ActivityType::sentinel`].
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ActivityType(String);

impl ActivityType {
    pub fn new(name: impl Into<String>) -> Result<Self, ScheduleError> {
        let name = name.into();
        check_token(&name)?;
        if name == SENTINEL_NAME {
            return Err(ScheduleError::ReservedName);
        }
        Ok(Self(name))
    }

    pub fn sentinel() -> Self {
        Self(SENTINEL_NAME.to_string())
    }

    pub fn is_sentinel(&self) -> bool {
        self.0 == SENTINEL_NAME
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ActivityType {
    type Error = ScheduleError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<ActivityType> for String {
    fn from(value: ActivityType) -> Self {
        value.0
    }
}

impl fmt::Display for ActivityType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Main transport mode of a trip, e.g. `car` or `public_transport`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Mode(String);

impl Mode {
    pub fn new(name: impl Into<String>) -> Result<Self, ScheduleError> {
        let name = name.into();
        check_token(&name)?;
        Ok(Self(name))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Mode {
    type Error = ScheduleError;
    fn try_from(value: String) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Mode> for String {
    fn from(value: Mode) -> Self {
        value.0
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Planar coordinate pair in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    pub fn dist_sq(&self, other: &Point) -> f64 {
        let dx = self.x - other.x;
        let dy = self.y - other.y;
        dx * dx + dy * dy
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ActivityInstance {
    activity_type: ActivityType,
    start_s: u32,
    duration_s: u32,
    location: Option<Point>,
}

impl ActivityInstance {
    /// The duration may run past midnight; the start may not.
    pub fn new(
        activity_type: ActivityType,
        start_s: u32,
        duration_s: u32,
        location: Option<Point>,
    ) -> Result<Self, ScheduleError> {
        if start_s >= DAY_SECONDS {
            return Err(ScheduleError::StartOutOfRange(start_s));
        }
        if duration_s == 0 {
            return Err(ScheduleError::ZeroDuration);
        }
        if let Some(p) = location {
            if !p.is_finite() {
                return Err(ScheduleError::NonFiniteLocation);
            }
        }
        Ok(Self {
            activity_type,
            start_s,
            duration_s,
            location,
        })
    }

    pub fn activity_type(&self) -> &ActivityType {
        &self.activity_type
    }

    pub fn start_s(&self) -> u32 {
        self.start_s
    }

    pub fn duration_s(&self) -> u32 {
        self.duration_s
    }

    pub fn location(&self) -> Option<Point> {
        self.location
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trip {
    mode: Mode,
    travel_time_s: u32,
    depart_s: u32,
}

impl Trip {
    pub fn new(mode: Mode, travel_time_s: u32, depart_s: u32) -> Result<Self, ScheduleError> {
        if depart_s >= DAY_SECONDS {
            return Err(ScheduleError::DepartOutOfRange(depart_s));
        }
        Ok(Self {
            mode,
            travel_time_s,
            depart_s,
        })
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn travel_time_s(&self) -> u32 {
        self.travel_time_s
    }

    pub fn depart_s(&self) -> u32 {
        self.depart_s
    }
}

/// One agent-day. Trip `k` connects activity `k` to activity `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ActivitySchedule {
    person_id: String,
    activities: Vec<ActivityInstance>,
    trips: Vec<Trip>,
}

impl ActivitySchedule {
    pub fn new(
        person_id: impl Into<String>,
        activities: Vec<ActivityInstance>,
        trips: Vec<Trip>,
    ) -> Result<Self, ScheduleError> {
        if activities.is_empty() {
            return Err(ScheduleError::EmptySchedule);
        }
        if trips.len() + 1 != activities.len() {
            return Err(ScheduleError::TripCountMismatch {
                activities: activities.len(),
                trips: trips.len(),
            });
        }
        if let Some(index) = activities.windows(2).position(|w| w[1].start_s < w[0].start_s) {
            return Err(ScheduleError::DecreasingStart { index: index + 1 });
        }
        Ok(Self {
            person_id: person_id.into(),
            activities,
            trips,
        })
    }

    pub fn person_id(&self) -> &str {
        &self.person_id
    }

    pub fn activities(&self) -> &[ActivityInstance] {
        &self.activities
    }

    pub fn trips(&self) -> &[Trip] {
        &self.trips
    }

    /// Trips paired with the activity each one arrives at.
    pub fn arrivals(&self) -> impl Iterator<Item = (&Trip, &ActivityInstance)> {
        self.trips.iter().zip(self.activities.iter().skip(1))
    }
}

/// Ordered activity types of a schedule, without boundary sentinels.
pub fn activity_sequence(schedule: &ActivitySchedule) -> Vec<ActivityType> {
    schedule.activities.iter().map(|a| a.activity_type.clone()).collect()
}

/// An immutable bag of schedules with the vocabularies occurring in it.
#[derive(Debug, Clone, PartialEq)]
pub struct DiaryDataset {
    schedules: Vec<ActivitySchedule>,
    activity_vocab: BTreeSet<ActivityType>,
    mode_vocab: BTreeSet<Mode>,
    has_locations: bool,
}

pub fn build_dataset(schedules: Vec<ActivitySchedule>) -> Result<DiaryDataset, ScheduleError> {
    if schedules.is_empty() {
        return Err(ScheduleError::EmptyDataset);
    }
    let mut activity_vocab = BTreeSet::new();
    let mut mode_vocab = BTreeSet::new();
    let mut located = 0usize;
    let mut total = 0usize;
    for schedule in &schedules {
        for activity in &schedule.activities {
            activity_vocab.insert(activity.activity_type.clone());
            total += 1;
            if activity.location.is_some() {
                located += 1;
            }
        }
        for trip in &schedule.trips {
            mode_vocab.insert(trip.mode.clone());
        }
    }
    if located != 0 && located != total {
        return Err(ScheduleError::MixedLocationPresence);
    }
    Ok(DiaryDataset {
        schedules,
        activity_vocab,
        mode_vocab,
        has_locations: located == total,
    })
}

impl DiaryDataset {
    pub fn schedules(&self) -> &[ActivitySchedule] {
        &self.schedules
    }

    pub fn activity_vocab(&self) -> &BTreeSet<ActivityType> {
        &self.activity_vocab
    }

    pub fn mode_vocab(&self) -> &BTreeSet<Mode> {
        &self.mode_vocab
    }

    pub fn has_locations(&self) -> bool {
        self.has_locations
    }

    pub fn activity_count(&self) -> usize {
        self.schedules.iter().map(|s| s.activities.len()).sum()
    }

    pub fn trip_count(&self) -> usize {
        self.schedules.iter().map(|s| s.trips.len()).sum()
    }

    pub fn activities(&self) -> impl Iterator<Item = &ActivityInstance> {
        self.schedules.iter().flat_map(|s| s.activities.iter())
    }

    pub fn trips(&self) -> impl Iterator<Item = &Trip> {
        self.schedules.iter().flat_map(|s| s.trips.iter())
    }

    pub fn summary(&self) -> DatasetSummary {
        DatasetSummary {
            schedules: self.schedules.len(),
            activities: self.activity_count(),
            trips: self.trip_count(),
            activity_types: self.activity_vocab.iter().map(|t| t.to_string()).collect(),
            modes: self.mode_vocab.iter().map(|m| m.to_string()).collect(),
            has_locations: self.has_locations,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSummary {
    pub schedules: usize,
    pub activities: usize,
    pub trips: usize,
    pub activity_types: Vec<String>,
    pub modes: Vec<String>,
    pub has_locations: bool,
}
