//! `trihelm`: lattice Green's functions and half-plane Dirichlet solutions
//! from the command line.
//!
//! Exit codes: 0 success, 1 internal error, 2 invalid input, 3 range or
//! radius error, 4 verification failure, 5 I/O or file format error.

mod config;
mod verify;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use trihelm::experiment::{
    run_scenario, CacheStatus, ExportFormat, Incident, Scenario, ScenarioOutput, TableCache,
    TWO_SLIT_OPENINGS,
};
use trihelm::{
    extrapolate_absorption, green_quadrature_converged, BoundaryData, Band, GreenTable,
    LatticePoint, RecursionSettings, Window,
};

use crate::config::{parse_list, FileConfig, Resolved, SpectralArgs, WindowConfig};

#[derive(Parser, Debug)]
#[command(name = "trihelm", version, about = "Discrete Helmholtz Green's functions on the triangular lattice")]
struct Cli {
    /// TOML file with defaults; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Table cache directory (default: $TRIHELM_CACHE_DIR, then the user cache).
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,

    /// Repeat for more log output.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate G at one lattice point.
    Green {
        #[command(flatten)]
        spectral: SpectralArgs,
        /// Point as X1,X2.
        #[arg(long, value_parser = parse_point, allow_hyphen_values = true)]
        at: LatticePoint,
        #[arg(long, value_enum, default_value_t = Method::Recursion)]
        method: Method,
    },
    /// Build or inspect cached tables.
    Table {
        #[command(subcommand)]
        action: TableAction,
    },
    /// Solve the half-plane problem for a boundary file and export the field.
    Solve {
        #[command(flatten)]
        spectral: SpectralArgs,
        /// Boundary data as JSON `[{"y1": .., "re": .., "im": ..}, ..]`.
        #[arg(long)]
        boundary: PathBuf,
        /// X1_MIN,X1_MAX,X2_MAX.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<WindowConfig>,
        /// Output field file.
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        format: Option<Format>,
        /// Also write the verification report as JSON.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Built-in scenarios.
    Demo {
        #[command(subcommand)]
        scenario: DemoScenario,
    },
    /// Run the invariant suite and print a pass/fail table.
    Verify {
        /// Skip the long-range decay diagnostic.
        #[arg(long)]
        quick: bool,
    },
}

#[derive(Subcommand, Debug)]
enum TableAction {
    /// Build (or load) the table for the given parameters and print its path.
    Build {
        #[command(flatten)]
        spectral: SpectralArgs,
        #[arg(long)]
        radius: Option<usize>,
    },
    /// Print the header and residual of a table file.
    Inspect { path: PathBuf },
}

#[derive(Subcommand, Debug)]
enum DemoScenario {
    /// Two openings at +-10, +-11 with the vertical incident wave, k = sqrt 2.
    TwoSlits {
        #[command(flatten)]
        spectral: SpectralArgs,
        /// X1_MIN,X1_MAX,X2_MAX.
        #[arg(long, allow_hyphen_values = true)]
        window: Option<WindowConfig>,
        /// Opening nodes, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        openings: Option<Vec<i64>>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[arg(long)]
        format: Option<Format>,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Method {
    Recursion,
    Quadrature,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl Format {
    fn export(self) -> ExportFormat {
        match self {
            Format::Csv => ExportFormat::Csv,
            Format::Json => ExportFormat::Json,
        }
    }

    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

fn parse_point(s: &str) -> Result<LatticePoint, String> {
    match parse_list::<i64>(s)?[..] {
        [x1, x2] => Ok(LatticePoint::new(x1, x2)),
        _ => Err(format!("expected X1,X2, got {s:?}")),
    }
}

/// Signals a completed run whose checks failed.
#[derive(Debug)]
struct VerificationFailed(Vec<String>);

impl std::fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "verification failed: {}", self.0.join("; "))
    }
}

impl std::error::Error for VerificationFailed {}

fn exit_code(err: &anyhow::Error) -> u8 {
    use trihelm::Error as E;
    for cause in err.chain() {
        if cause.is::<VerificationFailed>() {
            return 4;
        }
        if let Some(e) = cause.downcast_ref::<E>() {
            return match e {
                E::Range { .. } | E::OutsideHalfPlane(_) | E::Truncation { .. } => 3,
                E::Io { .. } | E::Format { .. } | E::SchemaVersion(_) => 5,
                E::ShellStructure { .. } => 1,
                _ => 2,
            };
        }
        if cause.is::<std::io::Error>() {
            return 5;
        }
        if cause.is::<toml::de::Error>() {
            return 2;
        }
    }
    1
}

fn format_of(flag: Option<Format>, file: &FileConfig) -> Result<Format> {
    if let Some(f) = flag {
        return Ok(f);
    }
    match file.format.as_deref() {
        None | Some("csv") => Ok(Format::Csv),
        Some("json") => Ok(Format::Json),
        Some(other) => Err(trihelm::Error::InvalidArgument(format!("unknown format {other:?}")).into()),
    }
}

fn window_of(flag: Option<WindowConfig>, file: &FileConfig, default: Window) -> Result<Window> {
    match flag.or(file.window) {
        Some(w) => Ok(w.window()?),
        None => Ok(default),
    }
}

fn describe(status: CacheStatus) -> &'static str {
    match status {
        CacheStatus::Hit => "loaded from cache",
        CacheStatus::Built => "built",
        CacheStatus::Rebuilt => "rebuilt (cached copy was unusable)",
    }
}

fn green(file: &FileConfig, cache: &TableCache, spectral: &SpectralArgs, at: LatticePoint, method: Method) -> Result<()> {
    let r = Resolved { file, args: spectral };
    let p = r.spectral()?;
    let schedule = r.schedule()?;
    let (value, note) = match method {
        Method::Recursion => {
            let radius = (at.hex_norm() as usize).max(file.radius.unwrap_or(0));
            let (table, status) = cache.load_or_build(&p, radius, &schedule, &RecursionSettings::default())?;
            let note = format!(
                "recursion, table radius {} ({}), extrapolation error {:.1e}",
                table.radius(),
                describe(status),
                table.provenance().extrapolation_error
            );
            (table.green(at)?, note)
        }
        Method::Quadrature => match p.band() {
            Band::PassBand => {
                let l = extrapolate_absorption(at, &p, &schedule, r.grid(), 1e-6)?;
                let note = format!(
                    "quadrature, grids {:?}, extrapolation error {:.1e}{}",
                    l.grid_sizes,
                    l.error_estimate,
                    if l.flagged { " (flagged)" } else { "" }
                );
                (l.value, note)
            }
            Band::StopBand => {
                let q = green_quadrature_converged(&[at], &p, 0.0, r.grid())?;
                (q.values[0], format!("quadrature, grid {}, last change {:.1e}", q.grid_size, q.change))
            }
        },
    };
    println!("G({}, {}) = {:e} {:+e}i", at.x1, at.x2, value.re, value.im);
    println!("{note}");
    Ok(())
}

fn table_build(file: &FileConfig, cache: &TableCache, spectral: &SpectralArgs, radius: Option<usize>) -> Result<()> {
    let r = Resolved { file, args: spectral };
    let p = r.spectral()?;
    let schedule = r.schedule()?;
    let radius = radius.or(file.radius).unwrap_or(16);
    let settings = RecursionSettings::default();
    let (table, status) = cache.load_or_build(&p, radius, &schedule, &settings)?;
    println!("{}", cache.path_for(&p, radius, &schedule, &settings).display());
    eprintln!("{}; residual {:.2e}", describe(status), table.residual_max());
    Ok(())
}

fn table_inspect(path: &Path) -> Result<()> {
    let t = GreenTable::load(path)?;
    let p = t.spectral();
    let prov = t.provenance();
    println!("band            {:?}", p.band());
    println!("k^2             {} {:+}i", p.k2().re, p.k2().im);
    println!("radius          {}", t.radius());
    println!("entries         {}", t.len());
    println!("eps schedule    {:?}", prov.eps_schedule);
    println!("truncation      {:?}", prov.truncation);
    println!("orders          {:?} (start {})", prov.orders, prov.order_start);
    println!("truncation dG   {:.2e}", prov.truncation_change);
    println!("extrapolation   {:.2e}", prov.extrapolation_error);
    println!("residual        {:.2e}", t.residual_max());
    Ok(())
}

fn report_run(out: &ScenarioOutput) -> Result<()> {
    let r = &out.report;
    println!("table           {}", describe(out.cache_status));
    println!("points          {}", r.points);
    println!("boundary dev    {:e}", r.boundary_deviation);
    println!("max residual    {:.2e} (table {:.2e})", r.max_residual, r.table_residual);
    match r.decay {
        Some(d) => println!("decay slope     {:.3} (rms {:.1e}, {} samples)", d.slope, d.rms_residual, d.samples),
        None => println!("decay slope     n/a"),
    }
    let failures = out.failures();
    if failures.is_empty() {
        Ok(())
    } else {
        Err(VerificationFailed(failures).into())
    }
}

fn write_report(out: &ScenarioOutput, path: &Path) -> Result<()> {
    let text = serde_json::to_string_pretty(&out.report).context("serializing report")?;
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn solve(
    file: &FileConfig,
    cache: &TableCache,
    spectral: &SpectralArgs,
    boundary: &Path,
    window: Option<WindowConfig>,
    out: &Path,
    format: Option<Format>,
    report: Option<&Path>,
) -> Result<()> {
    let r = Resolved { file, args: spectral };
    let scenario = Scenario {
        spectral: r.spectral()?,
        boundary: BoundaryData::load(boundary)?,
        window: window_of(window, file, Window::upper(20, 20)?)?,
        incident: None,
        eps_schedule: r.schedule()?,
        recursion: RecursionSettings::default(),
    };
    let output = run_scenario(&scenario, cache)?;
    output.field.write(out, format_of(format, file)?.export())?;
    println!("field           {}", out.display());
    if let Some(path) = report {
        write_report(&output, path)?;
    }
    report_run(&output)
}

fn two_slits(
    file: &FileConfig,
    cache: &TableCache,
    spectral: &SpectralArgs,
    window: Option<WindowConfig>,
    openings: Option<Vec<i64>>,
    out_dir: Option<PathBuf>,
    format: Option<Format>,
) -> Result<()> {
    let mut scenario = Scenario::two_slits();
    let r = Resolved { file, args: spectral };
    if spectral.k.is_some() || spectral.k2.is_some() || file.k.is_some() || file.k2.is_some() {
        scenario.spectral = r.spectral()?;
        if scenario.spectral.k2() != trihelm::Complex64::new(2.0, 0.0) {
            scenario.incident = None;
        }
    }
    scenario.eps_schedule = r.schedule()?;
    scenario.window = window_of(window, file, scenario.window)?;
    let openings = openings.or_else(|| file.openings.clone()).unwrap_or(TWO_SLIT_OPENINGS.to_vec());
    scenario.boundary = BoundaryData::from_openings(&openings)?;
    let format = format_of(format, file)?;
    let dir = out_dir.or_else(|| file.output_dir.clone()).unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;

    let output = run_scenario(&scenario, cache)?;
    let field_path = dir.join(format!("two-slits.{}", format.extension()));
    output.field.write(&field_path, format.export())?;
    write_report(&output, &dir.join("two-slits-report.json"))?;
    println!("field           {}", field_path.display());
    if let Some(inc) = scenario.incident.filter(|i| *i == Incident::VERTICAL) {
        println!("incident        exp(i {:.6} x2) below the boundary row", inc.phase_rate);
    }
    report_run(&output)
}

fn run(cli: Cli) -> Result<()> {
    let file = config::load(cli.config.as_deref())?;
    let cache = match cli.cache_dir {
        Some(dir) => TableCache::new(dir),
        None => TableCache::from_env(),
    };
    log::debug!("table cache at {}", cache.dir().display());
    match cli.command {
        Command::Green { spectral, at, method } => green(&file, &cache, &spectral, at, method),
        Command::Table { action } => match action {
            TableAction::Build { spectral, radius } => table_build(&file, &cache, &spectral, radius),
            TableAction::Inspect { path } => table_inspect(&path),
        },
        Command::Solve {
            spectral,
            boundary,
            window,
            out,
            format,
            report,
        } => solve(&file, &cache, &spectral, &boundary, window, &out, format, report.as_deref()),
        Command::Demo { scenario } => match scenario {
            DemoScenario::TwoSlits {
                spectral,
                window,
                openings,
                out_dir,
                format,
            } => two_slits(&file, &cache, &spectral, window, openings, out_dir, format),
        },
        Command::Verify { quick } => {
            let checks = verify::run(&cache, quick);
            verify::print_table(&checks);
            if verify::failed(&checks) {
                let names = checks
                    .iter()
                    .filter(|c| c.status == verify::Status::Fail)
                    .map(|c| c.name.to_string())
                    .collect();
                return Err(VerificationFailed(names).into());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use trihelm::Error as E;

    #[test]
    fn errors_map_to_exit_codes() {
        let range = E::Range {
            point: LatticePoint::new(9, 9),
            required: 18,
            available: 4,
        };
        assert_eq!(exit_code(&anyhow::Error::from(range).context("evaluating")), 3);
        assert_eq!(exit_code(&E::OutOfBand { k: 4.0 }.into()), 2);
        assert_eq!(exit_code(&VerificationFailed(vec!["x".into()]).into()), 4);
        let io = std::io::Error::new(std::io::ErrorKind::NotFound, "gone");
        assert_eq!(exit_code(&anyhow::Error::from(io).context("reading")), 5);
        assert_eq!(exit_code(&anyhow::anyhow!("other")), 1);
    }
}
