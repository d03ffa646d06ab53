//! Command-line front end.
//!
//! Exit statuses: 0 success, 1 failed check or computation, 2 usage or
//! configuration error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_rhs, check_bounds, euclidean_rate_reference, ricci_bound_asymptote, BoundReport};
use crate::error::{Error, Result};
use crate::format::{h3_table, to_json, trace_table, Table};
use crate::h3::{H3EntropyRecord, H3Params};
use crate::quadrature::QuadratureSpec;
use crate::spectral::fixtures::{self, log_grid, Fixture, TraceSchedule};
use crate::spectral::EntropyTrace;
use crate::verify::{self, VerifyOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Band checks in `h3` apply from `kappa^2 t >= 20`.
const BAND_ONSET: f64 = 20.0;
const BAND_SLACK: f64 = 0.05;
const FAULT_NARROWING: f64 = 0.1;
const DRIFT_DT: f64 = 1e-3;

#[derive(Debug, Parser)]
#[command(name = "heat-entropy", version, about = "Entropy of heat flow on model manifolds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CommandKind {
    H3,
    Evolve,
    Verify,
    Bounds,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Entropy decomposition, rates and envelopes of the hyperbolic heat kernel.
    H3(RunArgs),
    /// Entropy trace and bound reports for a built-in manifold fixture.
    Evolve(RunArgs),
    /// Run the named verification checks and emit a JSON report.
    Verify(RunArgs),
    /// Closed-form bound right-hand sides for a manifold fixture.
    Bounds(RunArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeScale {
    Lin,
    Log,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManifoldChoice {
    Circle,
    Torus,
    Sphere,
    TorusDrift,
}

impl ManifoldChoice {
    pub fn name(self) -> &'static str {
        match self {
            ManifoldChoice::Circle => "circle",
            ManifoldChoice::Torus => "torus",
            ManifoldChoice::Sphere => "sphere",
            ManifoldChoice::TorusDrift => "torus-drift",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Flags shared by every subcommand. The same keys (snake_case) are accepted
/// in a JSON config file; flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub kappa: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_stop: Option<f64>,
    #[arg(long)]
    pub t_count: Option<usize>,
    #[arg(long, value_enum)]
    pub t_scale: Option<TimeScale>,
    #[arg(long, value_enum)]
    pub manifold: Option<ManifoldChoice>,
    #[arg(long, value_enum)]
    pub format: Option<OutputFormat>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run a single verification check group.
    #[arg(long)]
    pub only: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    pub rtol: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub atol: Option<f64>,
    /// JSON file with default values for these flags.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Narrow the eta envelopes by 10% (harness self-test).
    #[arg(long)]
    #[serde(default)]
    pub inject_fault: bool,
}

impl RunArgs {
    /// `self` with unset fields filled from `file`.
    pub fn or(self, file: RunArgs) -> RunArgs {
        RunArgs {
            kappa: self.kappa.or(file.kappa),
            t_start: self.t_start.or(file.t_start),
            t_stop: self.t_stop.or(file.t_stop),
            t_count: self.t_count.or(file.t_count),
            t_scale: self.t_scale.or(file.t_scale),
            manifold: self.manifold.or(file.manifold),
            format: self.format.or(file.format),
            out: self.out.or(file.out),
            only: self.only.or(file.only),
            rtol: self.rtol.or(file.rtol),
            atol: self.atol.or(file.atol),
            config: self.config,
            inject_fault: self.inject_fault || file.inject_fault,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    pub start: f64,
    pub stop: f64,
    pub count: usize,
    pub scale: TimeScale,
}

impl TimeGrid {
    pub fn validate(&self) -> Result<()> {
        let ok = self.start > 0.0
            && self.stop.is_finite()
            && self.count >= 1
            && (self.count == 1 || self.stop > self.start);
        if !ok {
            return Err(Error::InvalidParameter(format!(
                "time grid needs 0 < start < stop and count >= 1, got start {}, stop {}, count {}",
                self.start, self.stop, self.count
            )));
        }
        Ok(())
    }

    pub fn points(&self) -> Vec<f64> {
        match self.scale {
            TimeScale::Log => log_grid(self.start, self.stop, self.count),
            TimeScale::Lin if self.count == 1 => vec![self.start],
            TimeScale::Lin => {
                let step = (self.stop - self.start) / (self.count - 1) as f64;
                (0..self.count)
                    .map(|i| if i + 1 == self.count { self.stop } else { self.start + step * i as f64 })
                    .collect()
            }
        }
    }
}

/// Fully resolved configuration for one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: CommandKind,
    pub kappa: f64,
    pub times: Option<TimeGrid>,
    pub manifold: ManifoldChoice,
    pub format: OutputFormat,
    pub out: Option<PathBuf>,
    pub only: Option<String>,
    pub quadrature: QuadratureSpec,
    pub inject_fault: bool,
}

fn read_config_file(path: &Path) -> Result<RunArgs> {
    let text = fs::read_to_string(path)
        .map_err(|e| Error::InvalidParameter(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::InvalidParameter(format!("bad config {}: {e}", path.display())))
}

impl RunConfig {
    pub fn resolve(command: CommandKind, args: RunArgs) -> Result<RunConfig> {
        let args = match &args.config {
            Some(path) => {
                let file = read_config_file(path)?;
                args.or(file)
            }
            None => args,
        };
        let kappa = args.kappa.unwrap_or(1.0);
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InvalidParameter(format!("kappa must be positive, got {kappa}")));
        }
        let defaults = QuadratureSpec::default();
        let quadrature = QuadratureSpec::new(
            args.rtol.unwrap_or(defaults.relative_tolerance),
            args.atol.unwrap_or(defaults.absolute_tolerance),
        )?;
        let manifold = args.manifold.unwrap_or(ManifoldChoice::Circle);
        let format = args.format.unwrap_or(match command {
            CommandKind::Verify => OutputFormat::Json,
            _ => OutputFormat::Csv,
        });
        if command == CommandKind::Verify && format != OutputFormat::Json {
            return Err(Error::InvalidParameter("verify reports are JSON only".into()));
        }
        if args.only.is_some() && command != CommandKind::Verify {
            return Err(Error::InvalidParameter("--only applies to verify".into()));
        }

        let any_time = args.t_start.is_some()
            || args.t_stop.is_some()
            || args.t_count.is_some()
            || args.t_scale.is_some();
        let times = match command {
            CommandKind::H3 => Some(TimeGrid {
                start: args.t_start.unwrap_or(0.1),
                stop: args.t_stop.unwrap_or(100.0),
                count: args.t_count.unwrap_or(40),
                scale: args.t_scale.unwrap_or(TimeScale::Log),
            }),
            CommandKind::Verify => None,
            _ if manifold == ManifoldChoice::TorusDrift => {
                if args.t_start.is_some() || args.t_scale.is_some() {
                    return Err(Error::InvalidParameter(
                        "torus-drift traces are uniformly stepped; only --t-stop and --t-count apply".into(),
                    ));
                }
                Some(TimeGrid {
                    start: 0.0,
                    stop: args.t_stop.unwrap_or(2.0),
                    count: args.t_count.unwrap_or(40),
                    scale: TimeScale::Lin,
                })
            }
            _ if any_time => {
                let default_stop = if manifold == ManifoldChoice::Sphere { 10.0 } else { 2.0 };
                Some(TimeGrid {
                    start: args.t_start.unwrap_or(0.01),
                    stop: args.t_stop.unwrap_or(default_stop),
                    count: args.t_count.unwrap_or(40),
                    scale: args.t_scale.unwrap_or(TimeScale::Log),
                })
            }
            _ => None,
        };
        if let Some(g) = &times {
            if manifold == ManifoldChoice::TorusDrift && command != CommandKind::H3 {
                if !(g.stop > 0.0 && g.stop.is_finite() && g.count >= 1) {
                    return Err(Error::InvalidParameter("need t-stop > 0 and t-count >= 1".into()));
                }
            } else {
                g.validate()?;
            }
        }
        Ok(RunConfig {
            command,
            kappa,
            times,
            manifold,
            format,
            out: args.out,
            only: args.only,
            quadrature,
            inject_fault: args.inject_fault,
        })
    }
}

/// Parses `argv`, runs the command and returns the exit status.
pub fn main_with_args<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let (kind, args) = match cli.command {
        Command::H3(a) => (CommandKind::H3, a),
        Command::Evolve(a) => (CommandKind::Evolve, a),
        Command::Verify(a) => (CommandKind::Verify, a),
        Command::Bounds(a) => (CommandKind::Bounds, a),
    };
    let config = match RunConfig::resolve(kind, args) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_USAGE;
        }
    };
    match execute(&config) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidParameter(_) => EXIT_USAGE,
                _ => EXIT_FAILURE,
            }
        }
    }
}

/// Output text of a run and whether every check in it passed.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub text: String,
    pub passed: bool,
    pub failures: Vec<String>,
}

pub fn execute(config: &RunConfig) -> Result<i32> {
    let output = produce(config)?;
    match &config.out {
        Some(path) => fs::write(path, &output.text)
            .map_err(|e| Error::InvalidParameter(format!("cannot write {}: {e}", path.display())))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            // a closed pipe is not worth a diagnostic
            let _ = stdout.write_all(output.text.as_bytes());
        }
    }
    if output.passed {
        Ok(EXIT_OK)
    } else {
        eprintln!("failed: {}", output.failures.join(", "));
        Ok(EXIT_FAILURE)
    }
}

pub fn produce(config: &RunConfig) -> Result<RunOutput> {
    match config.command {
        CommandKind::H3 => run_h3(config),
        CommandKind::Evolve => run_evolve(config),
        CommandKind::Verify => run_verify(config),
        CommandKind::Bounds => run_bounds(config),
    }
}

fn render<T: serde::Serialize + ?Sized>(format: OutputFormat, table: &Table, json: &T) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(table.to_csv()),
        OutputFormat::Json => to_json(json),
    }
}

fn run_h3(config: &RunConfig) -> Result<RunOutput> {
    let params = H3Params::new(config.kappa, config.quadrature)?;
    let grid = config.times.expect("h3 always has a grid");
    let k2 = config.kappa * config.kappa;
    let mut records: Vec<H3EntropyRecord> = Vec::with_capacity(grid.count);
    let mut failures = Vec::new();
    for t in grid.points() {
        let mut r = params.record(t)?;
        if config.inject_fault {
            r.eta_envelope = r.eta_envelope.narrowed(FAULT_NARROWING);
            r.eta_prime_envelope = r.eta_prime_envelope.narrowed(FAULT_NARROWING);
        }
        if !r.envelopes_hold() {
            failures.push(format!("envelope at t={t}"));
        }
        if k2 * t >= BAND_ONSET && !r.rate_in_band(BAND_SLACK * k2) {
            failures.push(format!("band at t={t}"));
        }
        records.push(r);
    }
    let table = h3_table(&records);
    Ok(RunOutput {
        text: render(config.format, &table, &table)?,
        passed: failures.is_empty(),
        failures,
    })
}

fn fixture_for(config: &RunConfig) -> Result<Fixture> {
    let fixture = fixtures::by_name(config.manifold.name()).expect("every choice has a fixture")?;
    Ok(match (&config.times, &fixture.schedule) {
        (None, _) => fixture,
        (Some(g), TraceSchedule::Stepped { .. }) => {
            let per_record = g.stop / g.count as f64;
            let record_every = ((per_record / DRIFT_DT).round() as usize).max(2);
            Fixture {
                schedule: TraceSchedule::Stepped {
                    dt: per_record / record_every as f64,
                    record_every,
                    count: g.count,
                },
                ..fixture
            }
        }
        (Some(g), TraceSchedule::Exact(_)) => fixture.with_times(g.points()),
    })
}

#[derive(Serialize)]
struct EvolveJson<'a> {
    manifold: &'a str,
    trace: &'a EntropyTrace,
    bounds: &'a [BoundReport],
}

fn run_evolve(config: &RunConfig) -> Result<RunOutput> {
    let fixture = fixture_for(config)?;
    let trace = fixture.trace()?;
    let reports = check_bounds(&trace, &fixture.field.manifold, &fixture.field)?;
    let failures: Vec<String> = reports
        .iter()
        .filter(|r| !r.all_satisfied())
        .map(|r| format!("bound {}", r.bound_name))
        .collect();
    let table = trace_table(&trace, &reports);
    let json = EvolveJson {
        manifold: fixture.name,
        trace: &trace,
        bounds: &reports,
    };
    Ok(RunOutput {
        text: render(config.format, &table, &json)?,
        passed: failures.is_empty(),
        failures,
    })
}

fn run_bounds(config: &RunConfig) -> Result<RunOutput> {
    let fixture = fixture_for(config)?;
    let times = match &fixture.schedule {
        TraceSchedule::Exact(times) => times.clone(),
        TraceSchedule::Stepped {
            dt,
            record_every,
            count,
        } => (1..=*count).map(|i| (i * record_every) as f64 * dt).collect(),
    };
    let manifold = &fixture.field.manifold;
    let n = manifold.dimension;
    let rhs = bound_rhs(manifold, &fixture.field, &times)?;
    let mut columns = vec!["t".to_string()];
    columns.extend(rhs.iter().map(|(name, _)| name.to_string()));
    if !manifold.is_drifted() {
        columns.push("ricci_asymptote".into());
    }
    columns.push("euclidean".into());
    let mut table = Table::new(&columns);
    for (i, &t) in times.iter().enumerate() {
        let mut row = vec![t];
        row.extend(rhs.iter().map(|(_, v)| v[i]));
        if !manifold.is_drifted() {
            row.push(ricci_bound_asymptote(n, manifold.ricci_lower_bound));
        }
        row.push(euclidean_rate_reference(n, t));
        table.push(row)?;
    }
    Ok(RunOutput {
        text: render(config.format, &table, &table)?,
        passed: true,
        failures: Vec::new(),
    })
}

fn run_verify(config: &RunConfig) -> Result<RunOutput> {
    let options = VerifyOptions {
        quadrature: config.quadrature,
        inject_fault: config.inject_fault,
    };
    let report = verify::run(&options, config.only.as_deref())?;
    Ok(RunOutput {
        text: to_json(&report)?,
        passed: report.all_passed(),
        failures: report.failing().iter().map(|s| s.to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(argv: &[&str]) -> Result<RunConfig> {
        let cli = Cli::try_parse_from(argv).unwrap();
        match cli.command {
            Command::H3(a) => RunConfig::resolve(CommandKind::H3, a),
            Command::Evolve(a) => RunConfig::resolve(CommandKind::Evolve, a),
            Command::Verify(a) => RunConfig::resolve(CommandKind::Verify, a),
            Command::Bounds(a) => RunConfig::resolve(CommandKind::Bounds, a),
        }
    }

    #[test]
    fn h3_defaults() {
        let c = resolve(&["he", "h3"]).unwrap();
        assert_eq!(c.kappa, 1.0);
        let g = c.times.unwrap();
        assert_eq!((g.start, g.stop, g.count, g.scale), (0.1, 100.0, 40, TimeScale::Log));
        assert_eq!(c.format, OutputFormat::Csv);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(resolve(&["he", "h3", "--kappa", "0"]).is_err());
        assert!(resolve(&["he", "h3", "--kappa", "-1"]).is_err());
        assert!(resolve(&["he", "h3", "--t-start", "2", "--t-stop", "1"]).is_err());
        assert!(resolve(&["he", "h3", "--rtol", "0"]).is_err());
        assert!(resolve(&["he", "verify", "--format", "csv"]).is_err());
        assert!(resolve(&["he", "h3", "--only", "moments"]).is_err());
        assert!(resolve(&["he", "evolve", "--manifold", "torus-drift", "--t-start", "0.1"]).is_err());
        assert!(Cli::try_parse_from(["he", "h3", "--manifold", "disc"]).is_err());
    }

    #[test]
    fn linear_grid() {
        let g = TimeGrid {
            start: 1.0,
            stop: 2.0,
            count: 5,
            scale: TimeScale::Lin,
        };
        assert_eq!(g.points(), vec![1.0, 1.25, 1.5, 1.75, 2.0]);
    }

    #[test]
    fn flags_override_config_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        fs::write(&path, r#"{"kappa": 2.0, "t_count": 3, "format": "json"}"#).unwrap();
        let c = resolve(&["he", "h3", "--config", path.to_str().unwrap(), "--kappa", "0.5"]).unwrap();
        assert_eq!(c.kappa, 0.5);
        assert_eq!(c.times.unwrap().count, 3);
        assert_eq!(c.format, OutputFormat::Json);

        fs::write(&path, r#"{"kapa": 2.0}"#).unwrap();
        assert!(resolve(&["he", "h3", "--config", path.to_str().unwrap()]).is_err());
    }

    #[test]
    fn drift_grid_is_stepped() {
        let c = resolve(&["he", "evolve", "--manifold", "torus-drift", "--t-stop", "0.5", "--t-count", "5"]).unwrap();
        let f = fixture_for(&c).unwrap();
        match f.schedule {
            TraceSchedule::Stepped { dt, record_every, count } => {
                assert_eq!(count, 5);
                assert_eq!(record_every, 100);
                assert!((dt * (record_every * count) as f64 - 0.5).abs() < 1e-12);
            }
            _ => panic!("expected stepped schedule"),
        }
    }

    #[test]
    fn bounds_table_columns() {
        let c = resolve(&["he", "bounds", "--manifold", "sphere", "--t-count", "3"]).unwrap();
        let out = produce(&c).unwrap();
        assert!(out.text.starts_with("t,ricci,hamilton,spectral_gap,ricci_asymptote,euclidean\n"));
        assert_eq!(out.text.lines().count(), 4);
        let c = resolve(&["he", "bounds", "--manifold", "torus-drift", "--t-count", "2"]).unwrap();
        let out = produce(&c).unwrap();
        assert!(out.text.starts_with("t,bakry_emery,euclidean\n"));
    }

    #[test]
    fn h3_fault_injection_fails() {
        let c = resolve(&["he", "h3", "--t-start", "50", "--t-stop", "100", "--t-count", "2", "--inject-fault"]).unwrap();
        let out = produce(&c).unwrap();
        assert!(!out.passed);
        assert!(out.failures[0].starts_with("envelope"));
    }
}
