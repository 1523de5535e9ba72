//! Readers and writers for the diary, zone, and O-D trip CSV files and the
//! step configuration JSON.
//!
//! Diary rows: `person_id,seq,activity_type,start_s,duration_s,x,y,arr_mode,arr_trip_duration_s,arr_depart_s`.
//! `seq` runs contiguously from 0 per person. The `arr_*` columns describe
//! the trip arriving at the row's activity and are empty exactly on seq 0.
//! `x,y` are empty throughout a file or filled throughout. Unknown columns
//! are ignored.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::od::{ODMatrix, OdError, Zone};
use crate::schedule::{
    build_dataset, ActivityInstance, ActivitySchedule, ActivityType, DiaryDataset, Mode, Point, ScheduleError, Trip,
    DAY_SECONDS,
};
use crate::steps::StepConfig;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceLocation {
    pub file: PathBuf,
    pub line: u64,
}

impl fmt::Display for SourceLocation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.file.display(), self.line)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot open {path}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{loc}: {reason}")]
    Parse { loc: SourceLocation, reason: String },
    #[error("{loc}: {reason}")]
    InvariantViolation { loc: SourceLocation, reason: String },
    #[error("{loc}: location presence differs from earlier rows (all rows need x,y or none)")]
    MixedLocationPresence { loc: SourceLocation },
    #[error("{loc}: unknown zone {zone:?}")]
    UnknownZone { loc: SourceLocation, zone: String },
    #[error("{loc}: negative trip count")]
    NegativeCount { loc: SourceLocation },
    #[error("{}: trip matrix has no trips", .file.display())]
    ZeroMatrix { file: PathBuf },
    #[error("{}: {reason}", .path.display())]
    Config { path: PathBuf, reason: String },
}

fn open(path: &Path) -> Result<BufReader<File>, IngestError> {
    File::open(path).map(BufReader::new).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Header-indexed view over a CSV reader that tracks source lines.
struct Table<R: Read> {
    file: PathBuf,
    reader: csv::Reader<R>,
    columns: Vec<usize>,
}

impl<R: Read> Table<R> {
    fn new(reader: R, file: &Path, required: &[&str]) -> Result<Self, IngestError> {
        let mut reader = csv::ReaderBuilder::new().has_headers(true).from_reader(reader);
        let loc = SourceLocation {
            file: file.to_path_buf(),
            line: 1,
        };
        let headers = reader.headers().map_err(|e| IngestError::Parse {
            loc: loc.clone(),
            reason: e.to_string(),
        })?;
        let mut columns = Vec::with_capacity(required.len());
        for name in required {
            match headers.iter().position(|h| h.trim() == *name) {
                Some(k) => columns.push(k),
                None => {
                    return Err(IngestError::Parse {
                        loc,
                        reason: format!("missing required column {name:?}"),
                    })
                }
            }
        }
        Ok(Self {
            file: file.to_path_buf(),
            reader,
            columns,
        })
    }

    fn loc(&self, line: u64) -> SourceLocation {
        SourceLocation {
            file: self.file.clone(),
            line,
        }
    }

    /// Calls `f` with the line number and the required fields of each row.
    fn for_each_row(
        &mut self,
        mut f: impl FnMut(SourceLocation, Vec<&str>) -> Result<(), IngestError>,
    ) -> Result<(), IngestError> {
        let mut record = csv::StringRecord::new();
        loop {
            let more = self.reader.read_record(&mut record).map_err(|e| {
                let line = e.position().map_or(0, |p| p.line());
                IngestError::Parse {
                    loc: self.loc(line),
                    reason: e.to_string(),
                }
            })?;
            if !more {
                return Ok(());
            }
            let line = record.position().map_or(0, |p| p.line());
            let fields = self
                .columns
                .iter()
                .map(|&k| record.get(k).map(str::trim).unwrap_or(""))
                .collect();
            f(self.loc(line), fields)?;
        }
    }
}

fn parse_err(loc: &SourceLocation, reason: impl Into<String>) -> IngestError {
    IngestError::Parse {
        loc: loc.clone(),
        reason: reason.into(),
    }
}

fn parse_num<T: std::str::FromStr>(loc: &SourceLocation, column: &str, raw: &str) -> Result<T, IngestError> {
    raw.parse()
        .map_err(|_| parse_err(loc, format!("column {column}: cannot parse {raw:?}")))
}

fn parse_time(loc: &SourceLocation, column: &str, raw: &str) -> Result<u32, IngestError> {
    let t: u32 = parse_num(loc, column, raw)?;
    if t >= DAY_SECONDS {
        return Err(parse_err(loc, format!("column {column}: {t} outside [0, 86400)")));
    }
    Ok(t)
}

fn parse_coord(loc: &SourceLocation, column: &str, raw: &str) -> Result<f64, IngestError> {
    let v: f64 = parse_num(loc, column, raw)?;
    if !v.is_finite() {
        return Err(parse_err(loc, format!("column {column}: non-finite value")));
    }
    Ok(v)
}

const DIARY_COLUMNS: [&str; 10] = [
    "person_id",
    "seq",
    "activity_type",
    "start_s",
    "duration_s",
    "x",
    "y",
    "arr_mode",
    "arr_trip_duration_s",
    "arr_depart_s",
];

struct DiaryRow {
    loc: SourceLocation,
    seq: u32,
    activity: ActivityInstance,
    arrival: Option<Trip>,
}

fn parse_diary_row(loc: SourceLocation, f: &[&str]) -> Result<DiaryRow, IngestError> {
    let schedule_err = |e: ScheduleError| IngestError::InvariantViolation {
        loc: loc.clone(),
        reason: e.to_string(),
    };
    let seq: u32 = parse_num(&loc, "seq", f[1])?;
    let activity_type = ActivityType::new(f[2]).map_err(|e| parse_err(&loc, format!("column activity_type: {e}")))?;
    let start_s = parse_time(&loc, "start_s", f[3])?;
    let duration_s: u32 = parse_num(&loc, "duration_s", f[4])?;
    let location = match (f[5].is_empty(), f[6].is_empty()) {
        (true, true) => None,
        (false, false) => Some(Point::new(parse_coord(&loc, "x", f[5])?, parse_coord(&loc, "y", f[6])?)),
        _ => return Err(parse_err(&loc, "x and y must both be present or both empty")),
    };
    let activity = ActivityInstance::new(activity_type, start_s, duration_s, location).map_err(schedule_err)?;

    let arr_empty = f[7..10].iter().all(|s| s.is_empty());
    let arr_full = f[7..10].iter().all(|s| !s.is_empty());
    let arrival = match (seq == 0, arr_empty, arr_full) {
        (true, true, _) => None,
        (true, false, _) => return Err(parse_err(&loc, "arr_* columns must be empty when seq is 0")),
        (false, _, true) => {
            let mode = Mode::new(f[7]).map_err(|e| parse_err(&loc, format!("column arr_mode: {e}")))?;
            let travel: u32 = parse_num(&loc, "arr_trip_duration_s", f[8])?;
            let depart = parse_time(&loc, "arr_depart_s", f[9])?;
            Some(Trip::new(mode, travel, depart).map_err(schedule_err)?)
        }
        (false, _, false) => return Err(parse_err(&loc, "arr_* columns are required when seq > 0")),
    };
    Ok(DiaryRow {
        loc,
        seq,
        activity,
        arrival,
    })
}

pub fn parse_diary(path: &Path) -> Result<DiaryDataset, IngestError> {
    parse_diary_from(open(path)?, path)
}

/// Parses diary CSV from any reader; `file` labels error locations.
pub fn parse_diary_from<R: Read>(reader: R, file: &Path) -> Result<DiaryDataset, IngestError> {
    let mut table = Table::new(reader, file, &DIARY_COLUMNS)?;
    let mut groups: Vec<(String, Vec<DiaryRow>)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut located: Option<bool> = None;

    table.for_each_row(|loc, f| {
        if f[0].is_empty() {
            return Err(parse_err(&loc, "empty person_id"));
        }
        let row = parse_diary_row(loc, &f)?;
        let has = row.activity.location().is_some();
        if *located.get_or_insert(has) != has {
            return Err(IngestError::MixedLocationPresence { loc: row.loc });
        }
        let slot = *index.entry(f[0].to_string()).or_insert_with(|| {
            groups.push((f[0].to_string(), Vec::new()));
            groups.len() - 1
        });
        groups[slot].1.push(row);
        Ok(())
    })?;

    if groups.is_empty() {
        return Err(parse_err(&table.loc(1), "diary contains no rows"));
    }
    let mut schedules = Vec::with_capacity(groups.len());
    for (person, mut rows) in groups {
        rows.sort_by_key(|r| r.seq);
        for (k, r) in rows.iter().enumerate() {
            if r.seq as usize != k {
                let reason = if k > 0 && rows[k - 1].seq == r.seq {
                    format!("duplicate seq {} for person {person:?}", r.seq)
                } else {
                    format!(
                        "non-contiguous sequence for person {person:?}: expected seq {k}, found {}",
                        r.seq
                    )
                };
                return Err(parse_err(&r.loc, reason));
            }
        }
        let locs: Vec<SourceLocation> = rows.iter().map(|r| r.loc.clone()).collect();
        let mut activities = Vec::with_capacity(rows.len());
        let mut trips = Vec::with_capacity(rows.len().saturating_sub(1));
        for r in rows {
            activities.push(r.activity);
            trips.extend(r.arrival);
        }
        let schedule = ActivitySchedule::new(person, activities, trips).map_err(|e| {
            let line = match &e {
                ScheduleError::DecreasingStart { index } => locs[*index].clone(),
                _ => locs[0].clone(),
            };
            IngestError::InvariantViolation {
                loc: line,
                reason: e.to_string(),
            }
        })?;
        schedules.push(schedule);
    }
    build_dataset(schedules).map_err(|e| IngestError::InvariantViolation {
        loc: table.loc(1),
        reason: e.to_string(),
    })
}

fn fmt_coord(v: f64) -> String {
    format!("{v}")
}

/// Writes a dataset in the diary format; [`parse_diary`] reads it back
/// unchanged.
pub fn write_diary<W: Write>(dataset: &DiaryDataset, out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(DIARY_COLUMNS)?;
    for s in dataset.schedules() {
        for (k, a) in s.activities().iter().enumerate() {
            let (x, y) = a
                .location()
                .map(|p| (fmt_coord(p.x), fmt_coord(p.y)))
                .unwrap_or_default();
            let (mode, travel, depart) = match k.checked_sub(1).map(|t| &s.trips()[t]) {
                Some(t) => (
                    t.mode().to_string(),
                    t.travel_time_s().to_string(),
                    t.depart_s().to_string(),
                ),
                None => Default::default(),
            };
            w.write_record([
                s.person_id().to_string(),
                k.to_string(),
                a.activity_type().to_string(),
                a.start_s().to_string(),
                a.duration_s().to_string(),
                x,
                y,
                mode,
                travel,
                depart,
            ])?;
        }
    }
    w.flush()
}

pub fn parse_zones(path: &Path) -> Result<Vec<Zone>, IngestError> {
    parse_zones_from(open(path)?, path)
}

pub fn parse_zones_from<R: Read>(reader: R, file: &Path) -> Result<Vec<Zone>, IngestError> {
    let mut table = Table::new(reader, file, &["zone_id", "x", "y"])?;
    let mut zones = Vec::new();
    let mut seen: HashMap<String, u64> = HashMap::new();
    table.for_each_row(|loc, f| {
        if f[0].is_empty() {
            return Err(parse_err(&loc, "empty zone_id"));
        }
        if let Some(first) = seen.insert(f[0].to_string(), loc.line) {
            return Err(parse_err(
                &loc,
                format!("duplicate zone {:?} (first on line {first})", f[0]),
            ));
        }
        zones.push(Zone::new(
            f[0],
            parse_coord(&loc, "x", f[1])?,
            parse_coord(&loc, "y", f[2])?,
        ));
        Ok(())
    })?;
    if zones.is_empty() {
        return Err(parse_err(&table.loc(1), "zone file contains no zones"));
    }
    Ok(zones)
}

pub fn parse_od(trips_path: &Path, zones_path: &Path) -> Result<ODMatrix, IngestError> {
    let zones = parse_zones(zones_path)?;
    parse_od_from(open(trips_path)?, trips_path, zones)
}

/// Assembles long-form `origin_id,dest_id,count` rows over `zones`;
/// duplicate pairs are summed and absent pairs are zero.
pub fn parse_od_from<R: Read>(reader: R, file: &Path, zones: Vec<Zone>) -> Result<ODMatrix, IngestError> {
    let mut table = Table::new(reader, file, &["origin_id", "dest_id", "count"])?;
    let index: HashMap<&str, usize> = zones.iter().enumerate().map(|(k, z)| (z.id.as_str(), k)).collect();
    let n = zones.len();
    let mut counts = vec![0.0f64; n * n];
    table.for_each_row(|loc, f| {
        let lookup = |id: &str| {
            index.get(id).copied().ok_or_else(|| IngestError::UnknownZone {
                loc: loc.clone(),
                zone: id.to_string(),
            })
        };
        let (o, d) = (lookup(f[0])?, lookup(f[1])?);
        let c: f64 = parse_num(&loc, "count", f[2])?;
        if c.is_nan() || c.is_infinite() {
            return Err(parse_err(&loc, "column count: non-finite value"));
        }
        if c < 0.0 {
            return Err(IngestError::NegativeCount { loc });
        }
        counts[o * n + d] += c;
        Ok(())
    })?;
    ODMatrix::new(zones, counts).map_err(|e| match e {
        OdError::ZeroMatrix => IngestError::ZeroMatrix {
            file: file.to_path_buf(),
        },
        other => parse_err(&table.loc(1), other.to_string()),
    })
}

pub fn write_zones<W: Write>(zones: &[Zone], out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["zone_id", "x", "y"])?;
    for z in zones {
        w.write_record([z.id.clone(), fmt_coord(z.coord.x), fmt_coord(z.coord.y)])?;
    }
    w.flush()
}

/// Writes the nonzero cells in row-major order.
pub fn write_od<W: Write>(matrix: &ODMatrix, out: W) -> io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(["origin_id", "dest_id", "count"])?;
    let zones = matrix.zones();
    for (i, o) in zones.iter().enumerate() {
        for (j, d) in zones.iter().enumerate() {
            let c = matrix.count(i, j);
            if c > 0.0 {
                w.write_record([o.id.as_str(), d.id.as_str(), &format!("{c}")])?;
            }
        }
    }
    w.flush()
}

/// Reads a step configuration; absent fields take their defaults.
pub fn load_config(path: &Path) -> Result<StepConfig, IngestError> {
    let config: StepConfig = serde_json::from_reader(open(path)?).map_err(|e| IngestError::Config {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    config.validate().map_err(|e| IngestError::Config {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })?;
    Ok(config)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str =
        "person_id,seq,activity_type,start_s,duration_s,x,y,arr_mode,arr_trip_duration_s,arr_depart_s\n";

    fn diary(body: &str) -> Result<DiaryDataset, IngestError> {
        parse_diary_from(format!("{HEADER}{body}").as_bytes(), Path::new("d.csv"))
    }

    fn line_of(err: &IngestError) -> u64 {
        match err {
            IngestError::Parse { loc, .. }
            | IngestError::InvariantViolation { loc, .. }
            | IngestError::MixedLocationPresence { loc }
            | IngestError::UnknownZone { loc, .. }
            | IngestError::NegativeCount { loc } => {
                assert_eq!(loc.file, Path::new("d.csv"));
                loc.line
            }
            other => panic!("no location on {other:?}"),
        }
    }

    #[test]
    fn groups_rows_into_schedules() {
        let ds = diary(
            "p1,0,sleep,0,25000,,,,,\n\
             p1,1,work,27000,28000,,,car,1200,25800\n\
             p1,2,sleep,60000,30000,,,car,1300,55000\n",
        )
        .unwrap();
        assert_eq!(ds.schedules().len(), 1);
        assert_eq!(ds.activity_count(), 3);
        assert_eq!(ds.trip_count(), 2);
        assert_eq!(ds.schedules()[0].trips()[1].travel_time_s(), 1300);
    }

    #[test]
    fn rows_may_arrive_out_of_order() {
        let ds = diary(
            "p1,1,work,27000,28000,1,2,car,1200,25800\n\
             p2,0,sleep,0,10,3,4,,,\n\
             p1,0,sleep,0,25000,5,6,,,\n",
        )
        .unwrap();
        let ids: Vec<_> = ds.schedules().iter().map(|s| s.person_id()).collect();
        assert_eq!(ids, ["p1", "p2"]);
        assert_eq!(ds.schedules()[0].activities()[0].activity_type().as_str(), "sleep");
        assert!(ds.has_locations());
    }

    #[test]
    fn start_out_of_range() {
        let err = diary("p1,0,sleep,90000,10,,,,,\n").unwrap_err();
        assert!(matches!(err, IngestError::Parse { .. }));
        assert_eq!(line_of(&err), 2);
    }

    #[test]
    fn sequence_gap() {
        let err = diary("p1,0,sleep,0,10,,,,,\np1,2,work,20,10,,,car,5,10\n").unwrap_err();
        assert!(matches!(err, IngestError::Parse { .. }), "{err}");
        assert_eq!(line_of(&err), 3);
        let dup = diary("p1,0,sleep,0,10,,,,,\np1,0,work,20,10,,,,,\n").unwrap_err();
        assert!(dup.to_string().contains("duplicate seq"));
    }

    #[test]
    fn decreasing_start_points_at_row() {
        let err = diary("p1,0,sleep,100,10,,,,,\np1,1,work,20,10,,,car,5,10\n").unwrap_err();
        assert!(matches!(err, IngestError::InvariantViolation { .. }));
        assert_eq!(line_of(&err), 3);
    }

    #[test]
    fn mixed_locations() {
        let err = diary("p1,0,sleep,0,10,1,1,,,\np2,0,sleep,0,10,,,,,\n").unwrap_err();
        assert!(matches!(err, IngestError::MixedLocationPresence { .. }));
        assert_eq!(line_of(&err), 3);
        let half = diary("p1,0,sleep,0,10,1,,,,\n").unwrap_err();
        assert!(matches!(half, IngestError::Parse { .. }));
    }

    #[test]
    fn arrival_columns_rules() {
        assert!(diary("p1,0,sleep,0,10,,,car,5,0\n").is_err());
        assert!(diary("p1,0,sleep,0,10,,,,,\np1,1,work,20,10,,,,,\n").is_err());
        assert!(diary("p1,0,sleep,0,10,,,,,\np1,1,work,20,10,,,car,5,\n").is_err());
    }

    #[test]
    fn malformed_values() {
        for body in [
            "p1,0,sleep,abc,10,,,,,\n",
            "p1,0,sl eep,0,10,,,,,\n",
            "p1,0,none,0,10,,,,,\n",
            "p1,x,sleep,0,10,,,,,\n",
            ",0,sleep,0,10,,,,,\n",
            "p1,0,sleep,0,10,inf,1,,,\n",
        ] {
            let err = diary(body).unwrap_err();
            assert_eq!(line_of(&err), 2, "{body}");
        }
        let zero = diary("p1,0,sleep,0,0,,,,,\n").unwrap_err();
        assert!(matches!(zero, IngestError::InvariantViolation { .. }));
        assert!(diary("").is_err());
        let missing = parse_diary_from("person_id,seq\np,0\n".as_bytes(), Path::new("d.csv")).unwrap_err();
        assert_eq!(line_of(&missing), 1);
    }

    #[test]
    fn unknown_columns_are_ignored() {
        let text = "age,person_id,seq,activity_type,start_s,duration_s,x,y,arr_mode,arr_trip_duration_s,arr_depart_s\n\
                    44,p1,0,sleep,0,10,,,,,\n";
        let ds = parse_diary_from(text.as_bytes(), Path::new("d.csv")).unwrap();
        assert_eq!(ds.activity_count(), 1);
    }

    #[test]
    fn diary_round_trip() {
        let text = format!(
            "{HEADER}p1,0,sleep,0,25000,0.5,-3,,,\n\
             p1,1,work,27000,28000,1000.25,2,car,1200,25800\n\
             p2,0,sleep,100,86400,7,8,,,\n"
        );
        let ds = parse_diary_from(text.as_bytes(), Path::new("d.csv")).unwrap();
        let mut out = Vec::new();
        write_diary(&ds, &mut out).unwrap();
        assert_eq!(String::from_utf8(out.clone()).unwrap(), text);
        let back = parse_diary_from(out.as_slice(), Path::new("d.csv")).unwrap();
        assert_eq!(back, ds);
    }

    fn zones() -> Vec<Zone> {
        vec![Zone::new("a", 0.0, 0.0), Zone::new("b", 1.0, 0.0)]
    }

    fn od(body: &str) -> Result<ODMatrix, IngestError> {
        parse_od_from(
            format!("origin_id,dest_id,count\n{body}").as_bytes(),
            Path::new("d.csv"),
            zones(),
        )
    }

    #[test]
    fn od_assembly() {
        assert_eq!(od("a,b,1\nb,a,3\n").unwrap().counts(), [0.0, 1.0, 3.0, 0.0]);
        assert_eq!(od("a,b,1\na,b,2\n").unwrap().counts(), [0.0, 3.0, 0.0, 0.0]);
    }

    #[test]
    fn od_errors() {
        let unknown = od("a,c,1\n").unwrap_err();
        assert!(matches!(unknown, IngestError::UnknownZone { ref zone, .. } if zone == "c"));
        assert_eq!(line_of(&unknown), 2);
        let neg = od("a,b,1\na,b,-1\n").unwrap_err();
        assert!(matches!(neg, IngestError::NegativeCount { .. }));
        assert_eq!(line_of(&neg), 3);
        assert!(matches!(od("a,b,0\n").unwrap_err(), IngestError::ZeroMatrix { .. }));
        assert!(matches!(od("a,b,NaN\n").unwrap_err(), IngestError::Parse { .. }));
    }

    #[test]
    fn zone_file() {
        let z = parse_zones_from("zone_id,x,y\na,0,0\nb,1.5,2\n".as_bytes(), Path::new("d.csv")).unwrap();
        assert_eq!(z[1], Zone::new("b", 1.5, 2.0));
        let dup = parse_zones_from("zone_id,x,y\na,0,0\na,1,1\n".as_bytes(), Path::new("d.csv")).unwrap_err();
        assert_eq!(line_of(&dup), 3);
        let mut out = Vec::new();
        write_zones(&z, &mut out).unwrap();
        assert_eq!(String::from_utf8(out).unwrap(), "zone_id,x,y\na,0,0\nb,1.5,2\n");
    }

    #[test]
    fn od_write_round_trip() {
        let m = od("b,a,3\na,b,1.5\n").unwrap();
        let mut out = Vec::new();
        write_od(&m, &mut out).unwrap();
        assert_eq!(
            String::from_utf8(out.clone()).unwrap(),
            "origin_id,dest_id,count\na,b,1.5\nb,a,3\n"
        );
        let back = parse_od_from(out.as_slice(), Path::new("d.csv"), zones()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn config_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("cfg.json");
        std::fs::write(&p, r#"{"grid_rows": 18, "grid_cols": 31}"#).unwrap();
        let cfg = load_config(&p).unwrap();
        assert_eq!((cfg.grid_rows, cfg.grid_cols, cfg.ngram_k), (18, 31, 11));
        std::fs::write(&p, r#"{"ngram_p": 2.0}"#).unwrap();
        assert!(matches!(load_config(&p), Err(IngestError::Config { .. })));
        std::fs::write(&p, r#"{"grid_rowz": 1}"#).unwrap();
        assert!(matches!(load_config(&p), Err(IngestError::Config { .. })));
    }
}
