//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when the report contains failed records,
//! 2 on usage errors or any fatal input problem.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use crate::ingest::{load_config, parse_diary, parse_od, parse_zones, write_diary, write_od, write_zones};
use crate::od::{od_project, ODMatrix, Zone};
use crate::report::{report_to_csv, report_to_json, write_grid, GridFormat, ReportFormat};
use crate::stats::{Bounds, Grid};
use crate::steps::{run_all, Status, StepConfig};
use crate::synthgen::{derive_od, generate, perturb, zone_grid, GeneratorSpec, PerturbKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED_RECORDS: i32 = 1;
pub const EXIT_FATAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "schedval",
    version,
    about = "Validate synthetic activity schedules against observed diaries"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compare a model diary against a validation diary.
    Validate(ValidateArgs),
    /// Write a synthetic diary, optionally perturbed, and its O-D matrix.
    Generate(GenerateArgs),
    /// Print a summary of a diary file as JSON.
    Inspect { diary: PathBuf },
}

#[derive(Debug, Args)]
struct ValidateArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    validation: PathBuf,
    /// Model O-D trips (`origin_id,dest_id,count`).
    #[arg(long, requires = "od_validation")]
    od_model: Option<PathBuf>,
    /// Validation O-D trips.
    #[arg(long, requires = "od_model")]
    od_validation: Option<PathBuf>,
    /// Zone file shared by both trip files unless overridden.
    #[arg(long)]
    zones: Option<PathBuf>,
    #[arg(long)]
    od_model_zones: Option<PathBuf>,
    #[arg(long)]
    od_validation_zones: Option<PathBuf>,
    /// Project both matrices onto these zones before comparing.
    #[arg(long)]
    target_zones: Option<PathBuf>,
    /// Step configuration JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report destination; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "json", value_parser = parse_report_format)]
    report_format: ReportFormat,
    /// Write ECDF and heat-map grids (CSV and PGM) into this directory.
    #[arg(long)]
    emit_grids: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    /// Generator spec JSON; the built-in example when absent.
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Diary destination.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    population: Option<usize>,
    #[arg(long, value_parser = parse_kind, requires = "magnitude")]
    perturb: Option<PerturbKind>,
    #[arg(long, requires = "perturb", allow_negative_numbers = true)]
    magnitude: Option<f64>,
    /// Zones for the O-D matrix.
    #[arg(long, conflicts_with = "zone_grid")]
    zones: Option<PathBuf>,
    /// Regular `NXxNY` zone grid over the generated locations.
    #[arg(long, value_parser = parse_grid_dims)]
    zone_grid: Option<(usize, usize)>,
    /// O-D trips destination; needs --zones or --zone-grid.
    #[arg(long)]
    od_out: Option<PathBuf>,
    /// Where to write the zones used for --od-out.
    #[arg(long, requires = "od_out")]
    zones_out: Option<PathBuf>,
    /// Write the effective (perturbed) spec here.
    #[arg(long)]
    dump_spec: Option<PathBuf>,
}

fn parse_report_format(s: &str) -> Result<ReportFormat, String> {
    s.parse().map_err(|e: crate::report::ReportError| e.to_string())
}

fn parse_kind(s: &str) -> Result<PerturbKind, String> {
    s.parse().map_err(|e: crate::synthgen::SynthError| e.to_string())
}

fn parse_grid_dims(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s.split_once('x').ok_or("expected NXxNY, e.g. 8x8")?;
    let nx: usize = a.parse().map_err(|_| format!("bad NX {a:?}"))?;
    let ny: usize = b.parse().map_err(|_| format!("bad NY {b:?}"))?;
    if nx == 0 || ny == 0 {
        return Err("grid dimensions must be positive".into());
    }
    Ok((nx, ny))
}

/// Parses `args` (including the program name) and runs the command.
pub fn cli_main<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_FATAL } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Validate(a) => validate(a),
        Command::Generate(a) => generate_cmd(a).map(|()| EXIT_OK),
        Command::Inspect { diary } => inspect(&diary).map(|()| EXIT_OK),
    };
    result.unwrap_or_else(|e| {
        eprintln!("error: {e:#}");
        EXIT_FATAL
    })
}

fn load_od(trips: &Path, zones: Option<&PathBuf>, which: &str) -> Result<ODMatrix> {
    let Some(zones) = zones else {
        bail!("--od-{which} needs --od-{which}-zones or --zones");
    };
    Ok(parse_od(trips, zones)?)
}

fn validate(a: ValidateArgs) -> Result<i32> {
    let cfg = match &a.config {
        Some(p) => load_config(p)?,
        None => StepConfig::default(),
    };
    let model = parse_diary(&a.model)?;
    let validation = parse_diary(&a.validation)?;
    let od = match (&a.od_model, &a.od_validation) {
        (Some(m), Some(v)) => {
            let mut m = load_od(m, a.od_model_zones.as_ref().or(a.zones.as_ref()), "model")?;
            let mut v = load_od(v, a.od_validation_zones.as_ref().or(a.zones.as_ref()), "validation")?;
            if let Some(t) = &a.target_zones {
                let target = parse_zones(t)?;
                m = od_project(&m, &target).context("projecting model O-D")?;
                v = od_project(&v, &target).context("projecting validation O-D")?;
            }
            Some((m, v))
        }
        _ => None,
    };
    let out = run_all(
        &model,
        &validation,
        od.as_ref().map(|o| &o.0),
        od.as_ref().map(|o| &o.1),
        &cfg,
    )?;

    let text = match a.report_format {
        ReportFormat::Json => report_to_json(&out.report)?,
        ReportFormat::Csv => report_to_csv(&out.report)?,
    };
    match &a.out {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }

    if let Some(dir) = &a.emit_grids {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
        for g in &out.grids {
            emit(dir, &format!("{}_model_ecdf", g.activity_type), g.model.grid())?;
            emit(
                dir,
                &format!("{}_validation_ecdf", g.activity_type),
                g.validation.grid(),
            )?;
            if let Some(d) = &g.density {
                emit(dir, &format!("{}_validation_kde", g.activity_type), d.grid())?;
            }
        }
    }

    let failed = out.report.records.iter().any(|r| r.status == Status::Failed);
    Ok(if failed { EXIT_FAILED_RECORDS } else { EXIT_OK })
}

fn emit(dir: &Path, stem: &str, grid: &Grid) -> Result<()> {
    write_grid(grid, &dir.join(format!("{stem}.csv")), GridFormat::Csv)?;
    write_grid(grid, &dir.join(format!("{stem}.pgm")), GridFormat::Pgm)?;
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("creating {}", path.display()))?,
    ))
}

fn generate_cmd(a: GenerateArgs) -> Result<()> {
    let mut spec = match &a.spec {
        Some(p) => {
            let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => GeneratorSpec::example(),
    };
    if let Some(seed) = a.seed {
        spec.seed = seed;
    }
    if let Some(n) = a.population {
        spec.population = n;
    }
    if let (Some(kind), Some(m)) = (a.perturb, a.magnitude) {
        spec = perturb(&spec, kind, m)?;
    }
    if let Some(p) = &a.dump_spec {
        fs::write(p, serde_json::to_string_pretty(&spec)? + "\n")?;
    }
    let dataset = generate(&spec)?;
    write_diary(&dataset, create(&a.out)?).with_context(|| format!("writing {}", a.out.display()))?;

    if let Some(od_out) = &a.od_out {
        let zones: Vec<Zone> = match (&a.zones, a.zone_grid) {
            (Some(p), _) => parse_zones(p)?,
            (None, Some((nx, ny))) => {
                let points: Vec<_> = dataset.activities().filter_map(|a| a.location()).collect();
                let bounds = Bounds::enclosing(&points).context("zone grid needs located activities")?;
                zone_grid(&bounds, nx, ny)
            }
            (None, None) => bail!("--od-out needs --zones or --zone-grid"),
        };
        let od = derive_od(&dataset, &zones)?;
        write_od(&od, create(od_out)?)?;
        if let Some(p) = &a.zones_out {
            write_zones(&zones, create(p)?)?;
        }
    }
    Ok(())
}

fn inspect(path: &Path) -> Result<()> {
    let dataset = parse_diary(path)?;
    let value = serde_json::to_value(dataset.summary())?;
    println!("{}", serde_json::to_string_pretty(&value)?);
    Ok(())
}
