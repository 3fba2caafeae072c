//! The `bregman` command-line tool.
//!
//! Each subcommand parses its problem, calls into `bregman-core`, and writes
//! one JSON document (or CSV for grid probes) to standard output. Errors go
//! to standard error as `{"error": {"kind", "field", "message"}}` with exit
//! code 2 (malformed input), 3 (domain or parameter violation) or 4 (solver
//! did not converge). Tolerances and the output format can also be set in a
//! JSON file named by `BREGMAN_CONFIG`; flags take precedence over it.

pub mod error;
pub mod input;
pub mod output;

use std::io::Write;

use bregman_core::centers::{self, CenterOptions};
use bregman_core::maps::{self, MapKind, MapOptions, MapResult};
use bregman_core::probes::{self, GridSpec};
use bregman_core::proxlab;
use bregman_core::{distance, CompactSet, LegendreFunction};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

pub use error::CliError;
use input::Config;

#[derive(Debug, Parser)]
#[command(
    name = "bregman",
    version,
    about = "Bregman distances, projections, Chebyshev centers and proximal envelopes"
)]
pub struct Cli {
    /// Output format (default json; csv for grid probes, table for selftest).
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Side {
    Left,
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProxOp {
    Env,
    Prox,
    Phi,
    #[value(name = "Q", alias = "q")]
    Q,
    Cheb,
    Thresholds,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ProbeKind {
    Chebyshev,
    Klee,
    Curious,
    Scan,
}

#[derive(Debug, clap::Args)]
struct MapArgs {
    /// Legendre function: energy, entropy, neglog, exp, neglog-conj, or a list like ["energy","entropy"].
    #[arg(long = "fn")]
    function: String,
    /// Compact set as JSON, e.g. {"segment":{"c0":[1,3],"c1":[3,1]}}.
    #[arg(long)]
    set: String,
    /// Query point, e.g. 2,2 or [2,2].
    #[arg(long, allow_hyphen_values = true)]
    point: String,
    #[arg(long, value_enum, default_value = "left")]
    side: Side,
    #[arg(long)]
    tie_tol: Option<f64>,
    #[arg(long)]
    segment_resolution: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Bregman distance D(x, y).
    Distance {
        #[arg(long = "fn")]
        function: String,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
    },
    /// Nearest points of a set (left: argmin D(c, y); right: argmin D(x, c)).
    Project(MapArgs),
    /// Farthest points of a set.
    Farthest(MapArgs),
    /// Chebyshev center and radius with its certificate.
    Center {
        #[arg(long = "fn")]
        function: String,
        #[arg(long)]
        set: String,
        #[arg(long, value_enum, default_value = "left")]
        side: Side,
        #[arg(long)]
        certificate_tol: Option<f64>,
        #[arg(long)]
        max_iter: Option<usize>,
        #[arg(long)]
        tie_tol: Option<f64>,
        #[arg(long)]
        segment_resolution: Option<usize>,
    },
    /// Envelopes, prox/farthest maps and Chebyshev points of a function on the line.
    Proxpoint {
        /// q, step01, or JSON: {"indicator":[a,b]}, {"step":[a,b]}, {"pieces":[...]}.
        #[arg(long)]
        g: String,
        #[arg(long, value_enum)]
        op: ProxOp,
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        mu: Option<f64>,
        /// Evaluation point for env, prox, phi and Q.
        #[arg(long, allow_hyphen_values = true)]
        x: Option<f64>,
    },
    /// Grid scans for multivalued maps.
    Probe {
        #[arg(long, value_enum)]
        kind: ProbeKind,
        #[arg(long = "fn")]
        function: Option<String>,
        #[arg(long)]
        set: Option<String>,
        /// {"lo":[..],"hi":[..],"resolution":[..] or n}.
        #[arg(long)]
        grid: Option<String>,
        #[arg(long)]
        tie_tol: Option<f64>,
        /// Tolerances for the scan probe, e.g. 1e-3,1e-6,1e-9.
        #[arg(long, value_delimiter = ',')]
        tie_tols: Option<Vec<f64>>,
        /// Curve samples for the curious probe.
        #[arg(long)]
        resolution: Option<usize>,
        /// Curve parameter range [0, lambda_max] for the curious probe.
        #[arg(long)]
        lambda_max: Option<f64>,
        /// Worker threads (default: logical cores).
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Runs the acceptance suite and prints a pass/fail table.
    Selftest,
}

/// Resolved options: flag, then config file, then library default.
struct Settings {
    config: Config,
    format: Option<Format>,
}

impl Settings {
    fn map_options(&self, tie_tol: Option<f64>, segment_resolution: Option<usize>) -> MapOptions {
        let d = MapOptions::default();
        MapOptions {
            tie_tol: tie_tol.or(self.config.tie_tol).unwrap_or(d.tie_tol),
            segment_resolution: segment_resolution
                .or(self.config.segment_resolution)
                .unwrap_or(d.segment_resolution),
        }
    }

    fn format(&self) -> Result<Format, CliError> {
        match (self.format, self.config.format.as_deref()) {
            (Some(f), _) => Ok(f),
            (None, None) => Ok(Format::Json),
            (None, Some(s)) => Format::from_str(s, true).map_err(|_| {
                CliError::parse("BREGMAN_CONFIG.format", format!("unknown format {s:?}"))
            }),
        }
    }
}

/// Runs the tool on `args` (including the program name) and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(out, "{e}");
                return 0;
            }
            let msg = e.to_string();
            let first = msg
                .lines()
                .next()
                .unwrap_or("")
                .trim_start_matches("error: ");
            let _ = writeln!(err, "{}", CliError::usage(first).to_json());
            return error::EXIT_PARSE;
        }
    };
    let result = Config::from_env().and_then(|config| {
        let settings = Settings {
            config,
            format: cli.format,
        };
        dispatch(cli.command, &settings)
    });
    match result {
        Ok((text, code)) => {
            let _ = writeln!(out, "{}", text.trim_end());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "{}", e.to_json());
            e.code
        }
    }
}

fn only_json(settings: &Settings) -> Result<(), CliError> {
    match settings.format()? {
        Format::Json => Ok(()),
        other => Err(CliError::parse(
            "--format",
            format!("{other:?} output is not available for this subcommand").to_lowercase(),
        )),
    }
}

fn function_and_set(function: &str, set: &str) -> Result<(LegendreFunction, CompactSet), CliError> {
    let set = input::set("--set", set)?;
    let f = input::function("--fn", function, set.dim())?;
    Ok((f, set))
}

fn map_json(kind: MapKind, side: Side, r: &MapResult) -> Value {
    json!({
        "map": kind.name(),
        "side": if side == Side::Left { "left" } else { "right" },
        "value": output::extended(r.value),
        "attainers": r.attainers,
        "ties": r.is_tie(),
    })
}

fn dispatch(command: Command, settings: &Settings) -> Result<(String, i32), CliError> {
    match command {
        Command::Distance { function, x, y } => {
            only_json(settings)?;
            let x = input::point("--x", &x)?;
            let y = input::point("--y", &y)?;
            let f = input::function("--fn", &function, x.dim())?;
            let d = distance(&f, &x, &y)?;
            Ok((
                output::json(&json!({ "distance": output::extended(d) }))?,
                0,
            ))
        }
        Command::Project(a) => map_command(false, a, settings),
        Command::Farthest(a) => map_command(true, a, settings),
        Command::Center {
            function,
            set,
            side,
            certificate_tol,
            max_iter,
            tie_tol,
            segment_resolution,
        } => {
            only_json(settings)?;
            let (f, set) = function_and_set(&function, &set)?;
            let d = CenterOptions::default();
            let opts = CenterOptions {
                certificate_tol: certificate_tol
                    .or(settings.config.certificate_tol)
                    .unwrap_or(d.certificate_tol),
                max_iter: max_iter.or(settings.config.max_iter).unwrap_or(d.max_iter),
                map: settings.map_options(tie_tol, segment_resolution),
            };
            let r = match side {
                Side::Left => centers::left_center_with(&f, &set, &opts)?,
                Side::Right => centers::right_center_with(&f, &set, &opts)?,
            };
            if !r.trace.converged {
                return Err(CliError::nonconvergence(format!(
                    "certificate residual {:e} exceeds {:e} after {} iterations",
                    r.certificate.residual, opts.certificate_tol, r.trace.iterations
                )));
            }
            let mut doc = serde_json::to_value(&r).map_err(|e| CliError::usage(e.to_string()))?;
            doc["side"] = json!(if side == Side::Left { "left" } else { "right" });
            Ok((output::json(&doc)?, 0))
        }
        Command::Proxpoint {
            g,
            op,
            lambda,
            mu,
            x,
        } => {
            only_json(settings)?;
            prox_command(&g, op, lambda, mu, x)
        }
        Command::Probe {
            kind,
            function,
            set,
            grid,
            tie_tol,
            tie_tols,
            resolution,
            lambda_max,
            jobs,
        } => {
            let jobs = jobs.or(settings.config.jobs);
            let mut builder = rayon::ThreadPoolBuilder::new();
            if let Some(n) = jobs {
                if n == 0 {
                    return Err(CliError::parse("--jobs", "must be at least 1"));
                }
                builder = builder.num_threads(n);
            }
            let pool = builder
                .build()
                .map_err(|e| CliError::usage(format!("cannot start worker pool: {e}")))?;
            let probe = ProbeArgs {
                kind,
                function,
                set,
                grid,
                tie_tol,
                tie_tols,
                resolution,
                lambda_max,
            };
            pool.install(|| probe_command(probe, settings))
        }
        Command::Selftest => {
            let outcomes = bregman_acceptance::run_all();
            let all = outcomes.iter().all(|o| o.passed);
            let code = if all { 0 } else { error::EXIT_SELFTEST_FAILED };
            let text = match settings.format()? {
                Format::Table => outcomes
                    .iter()
                    .map(|o| o.line())
                    .collect::<Vec<_>>()
                    .join("\n"),
                Format::Json => {
                    let rows: Vec<Value> = outcomes
                        .iter()
                        .map(|o| {
                            json!({
                                "criterion": o.id,
                                "name": o.name,
                                "passed": o.passed,
                                "worst": output::extended(o.worst),
                                "tolerance": o.tolerance,
                                "detail": o.detail,
                            })
                        })
                        .collect();
                    output::json(&json!({ "passed": all, "criteria": rows }))?
                }
                Format::Csv => {
                    return Err(CliError::parse(
                        "--format",
                        "csv output is not available for selftest",
                    ))
                }
            };
            Ok((text, code))
        }
    }
}

fn map_command(farthest: bool, a: MapArgs, settings: &Settings) -> Result<(String, i32), CliError> {
    only_json(settings)?;
    let (f, set) = function_and_set(&a.function, &a.set)?;
    let z = input::point("--point", &a.point)?;
    let kind = match (farthest, a.side) {
        (false, Side::Left) => MapKind::LeftNearest,
        (false, Side::Right) => MapKind::RightNearest,
        (true, Side::Left) => MapKind::LeftFarthest,
        (true, Side::Right) => MapKind::RightFarthest,
    };
    let r = maps::evaluate(
        kind,
        &f,
        &set,
        &z,
        &settings.map_options(a.tie_tol, a.segment_resolution),
    )?;
    Ok((output::json(&map_json(kind, a.side, &r))?, 0))
}

fn require(value: Option<f64>, flag: &str, op: &str) -> Result<f64, CliError> {
    value.ok_or_else(|| CliError::parse(flag, format!("required by --op {op}")))
}

fn prox_command(
    g: &str,
    op: ProxOp,
    lambda: Option<f64>,
    mu: Option<f64>,
    x: Option<f64>,
) -> Result<(String, i32), CliError> {
    let g = input::piecewise("--g", g)?;
    let one_d = |r: &MapResult| -> Vec<f64> { r.attainers.iter().map(|v| v[0]).collect() };
    let doc = match op {
        ProxOp::Thresholds => serde_json::to_value(proxlab::thresholds(&g))
            .map_err(|e| CliError::usage(e.to_string()))?,
        ProxOp::Env | ProxOp::Prox => {
            let lambda = require(lambda, "--lambda", "env/prox")?;
            let x = require(x, "--x", "env/prox")?;
            let r = proxlab::prox(&g, lambda, x)?;
            if op == ProxOp::Env {
                json!({ "op": "env", "lambda": lambda, "x": x, "value": r.value })
            } else {
                json!({ "op": "prox", "lambda": lambda, "x": x, "value": r.value, "points": one_d(&r), "ties": r.is_tie() })
            }
        }
        ProxOp::Phi | ProxOp::Q => {
            let mu = require(mu, "--mu", "phi/Q")?;
            let x = require(x, "--x", "phi/Q")?;
            let r = proxlab::farthest_map(&g, mu, x)?;
            if op == ProxOp::Phi {
                json!({ "op": "phi", "mu": mu, "x": x, "value": r.value })
            } else {
                json!({ "op": "Q", "mu": mu, "x": x, "value": r.value, "points": one_d(&r), "ties": r.is_tie() })
            }
        }
        ProxOp::Cheb => {
            let mu = require(mu, "--mu", "cheb")?;
            let p = proxlab::chebyshev_point(&g, mu)?;
            if p.residual > 1e-8 {
                return Err(CliError::nonconvergence(format!(
                    "hull certificate residual {:e} exceeds 1e-8",
                    p.residual
                )));
            }
            let mut doc = serde_json::to_value(&p).map_err(|e| CliError::usage(e.to_string()))?;
            doc["op"] = json!("cheb");
            doc["mu"] = json!(mu);
            doc
        }
    };
    Ok((output::json(&doc)?, 0))
}

struct ProbeArgs {
    kind: ProbeKind,
    function: Option<String>,
    set: Option<String>,
    grid: Option<String>,
    tie_tol: Option<f64>,
    tie_tols: Option<Vec<f64>>,
    resolution: Option<usize>,
    lambda_max: Option<f64>,
}

fn probe_command(p: ProbeArgs, settings: &Settings) -> Result<(String, i32), CliError> {
    let format = settings.format()?;
    if format == Format::Table {
        return Err(CliError::parse(
            "--format",
            "table output is only available for selftest",
        ));
    }
    let opts = settings.map_options(p.tie_tol, None);
    let grid = p
        .grid
        .as_deref()
        .map(|g| input::grid("--grid", g))
        .transpose()?;

    if p.kind == ProbeKind::Curious {
        if format == Format::Csv {
            return Err(CliError::parse(
                "--format",
                "csv output is not available for the curious probe",
            ));
        }
        let grid = match grid {
            Some(g) => g,
            None => GridSpec::cube(0.5, 8.0, 100, 2)?,
        };
        let r = probes::curious_set_probe(
            p.lambda_max.unwrap_or(1.0),
            p.resolution.unwrap_or(10_000),
            &grid,
            opts.tie_tol,
        )?;
        return Ok((output::json(&r)?, 0));
    }

    let function = p
        .function
        .ok_or_else(|| CliError::parse("--fn", "required by this probe"))?;
    let set = p
        .set
        .ok_or_else(|| CliError::parse("--set", "required by this probe"))?;
    let grid = grid.ok_or_else(|| CliError::parse("--grid", "required by this probe"))?;
    let (f, set) = function_and_set(&function, &set)?;

    match p.kind {
        ProbeKind::Chebyshev | ProbeKind::Klee => {
            let kind = if p.kind == ProbeKind::Klee {
                MapKind::LeftFarthest
            } else {
                MapKind::LeftNearest
            };
            if format == Format::Csv {
                let (_, rows, _) = probes::scan_map(kind, &f, &set, &grid, &opts)?;
                return Ok((output::csv(&[(kind.name(), rows)])?, 0));
            }
            let r = if p.kind == ProbeKind::Klee {
                probes::klee_probe(&f, &set, &grid, &opts)?
            } else {
                probes::chebyshev_probe(&f, &set, &grid, &opts)?
            };
            Ok((output::json(&r)?, 0))
        }
        ProbeKind::Scan => {
            let tols = p
                .tie_tols
                .or(p.tie_tol.map(|t| vec![t]))
                .unwrap_or_else(|| vec![1e-3, 1e-6, 1e-9]);
            if format == Format::Csv {
                let opts = MapOptions {
                    tie_tol: *tols.last().expect("at least one tolerance"),
                    ..opts
                };
                let rows = MapKind::ALL
                    .into_iter()
                    .map(|k| {
                        probes::scan_map(k, &f, &set, &grid, &opts)
                            .map(|(_, rows, _)| (k.name(), rows))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                return Ok((output::csv(&rows)?, 0));
            }
            let reports = probes::tie_fraction_decay(&f, &set, &grid, &tols)?;
            let doc = json!({
                "reports": reports,
                "non_increasing": probes::is_non_increasing(&reports),
            });
            Ok((output::json(&doc)?, 0))
        }
        ProbeKind::Curious => unreachable!("handled above"),
    }
}
