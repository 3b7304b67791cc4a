//! Scenario runner for phase-covariant channel sweeps.
//!
//! Subcommands: `figure <id>` reproduces a built-in figure preset, `run`
//! sweeps a scenario config over its time grid, `zeta` sweeps the
//! self-similarity measure over horizons, `action` runs the path optimizer.
//! Exit codes: 0 success, 1 config error, 2 numerical failure.

mod config;
mod figures;
mod sweep;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use phasecov::action::{cauchy_schwarz_bound, optimize_path, ActionParams, ControlPath};
use phasecov::nonmarkov::sss_zeta_seeded;
use phasecov::qsl::{qsl_time_mixed, qsl_time_pure};

use config::{ActionConfig, CliError, CliResult, Scenario, ZetaConfig};
use figures::FigureRequest;
use sweep::{fmt_num, par_map_ordered, Table, Value};

#[derive(Parser)]
#[command(
    name = "phasecov",
    about = "Phase-covariant qubit channels: speed limits, memory measures and figure data as CSV"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output CSV path (defaults to a name derived from the subcommand).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for optimizer restarts.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Override the number of grid points.
    #[arg(long, global = true)]
    points: Option<usize>,

    /// Worker threads for sweeps (default: available parallelism).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    /// Config override `key=value`; repeatable.
    #[arg(long = "override", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    /// Parse and validate only; print the canonical config and write nothing.
    #[arg(long, global = true)]
    dry_run: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce a built-in figure preset (1a..6).
    Figure { id: String },
    /// Run a scenario config: one row per time-grid point.
    Run { config: PathBuf },
    /// Sweep the self-similarity measure over horizons.
    Zeta { config: PathBuf },
    /// Minimize the control action and emit the trace.
    Action { config: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(Some(path)) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Ok(None) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("config error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Numeric(msg)) => {
            eprintln!("numerical error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn default_jobs() -> usize {
    std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
}

fn read_config(path: &PathBuf) -> CliResult<String> {
    std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))
}

fn dispatch(cli: &Cli) -> CliResult<Option<PathBuf>> {
    let jobs = cli.jobs.unwrap_or_else(default_jobs);
    match &cli.command {
        Command::Figure { id } => {
            let request = FigureRequest {
                id: id.clone(),
                seed: cli.seed,
                jobs,
                points: cli.points,
                overrides: cli.overrides.clone(),
            };
            if cli.dry_run {
                figures::validate_figure_id(id)?;
                return Ok(None);
            }
            let table = figures::run_figure(&request)?;
            let path = cli
                .out
                .clone()
                .unwrap_or_else(|| PathBuf::from(format!("figure_{id}.csv")));
            table.write(&path)?;
            Ok(Some(path))
        }
        Command::Run { config } => {
            let mut scenario = Scenario::from_config(&read_config(config)?, &cli.overrides)?;
            if let Some(points) = cli.points {
                scenario.grid.points = points;
                scenario.grid.validate()?;
            }
            scenario.seed = cli.seed;
            if cli.dry_run {
                print!("{}", scenario.to_config_string());
                return Ok(None);
            }
            let jobs = cli.jobs.or(scenario.jobs).unwrap_or_else(default_jobs);
            let table = run_scenario(&scenario, jobs)?;
            let path = cli
                .out
                .clone()
                .or_else(|| scenario.output.clone())
                .unwrap_or_else(|| PathBuf::from("scenario.csv"));
            table.write(&path)?;
            Ok(Some(path))
        }
        Command::Zeta { config } => {
            let mut zeta = ZetaConfig::from_config(&read_config(config)?, &cli.overrides)?;
            if let Some(points) = cli.points {
                zeta.grid.points = points;
                zeta.grid.validate()?;
            }
            zeta.seed = cli.seed;
            if cli.dry_run {
                return Ok(None);
            }
            let jobs = cli.jobs.or(zeta.jobs).unwrap_or_else(default_jobs);
            let table = run_zeta(&zeta, jobs)?;
            let path = cli
                .out
                .clone()
                .or_else(|| zeta.output.clone())
                .unwrap_or_else(|| PathBuf::from("zeta.csv"));
            table.write(&path)?;
            Ok(Some(path))
        }
        Command::Action { config } => {
            let mut action = ActionConfig::from_config(&read_config(config)?, &cli.overrides)?;
            if let Some(points) = cli.points {
                action.segments = points;
            }
            if cli.dry_run {
                return Ok(None);
            }
            let (trace, snapshot) = run_action(&action)?;
            let path = cli
                .out
                .clone()
                .or_else(|| action.output.clone())
                .unwrap_or_else(|| PathBuf::from("action.csv"));
            trace.write(&path)?;
            let snapshot_path = path_sibling(&path, "_path");
            snapshot.write(&snapshot_path)?;
            Ok(Some(path))
        }
    }
}

/// `out.csv` -> `out_path.csv`.
fn path_sibling(path: &std::path::Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("action");
    let ext = path.extension().and_then(|s| s.to_str()).unwrap_or("csv");
    path.with_file_name(format!("{stem}{suffix}.{ext}"))
}

/// One row per time-grid point: state observables plus the speed-limit
/// bound from time 0 to that point (pure or mixed pipeline according to the
/// initial state's purity), and optionally the memory measure over the same
/// horizon.
fn run_scenario(scenario: &Scenario, jobs: usize) -> CliResult<Table> {
    let s0 = scenario.state.build()?;
    let pure_initial = s0.is_pure(1e-9);
    let times = scenario.grid.values();
    let channel = &scenario.channel;
    let seed = scenario.seed;
    let zeta_requested = scenario.zeta;

    let rows = par_map_ordered(times.len(), jobs, |i| -> CliResult<Vec<Value>> {
        let t = times[i];
        let state = channel.evolve(&s0, t)?;
        let tau_qsl = if t > 0.0 {
            if pure_initial {
                qsl_time_pure(channel, &s0, t)?.tau_qsl
            } else {
                qsl_time_mixed(channel, &s0, 0.0, t)?.tau_qsl
            }
        } else {
            0.0
        };
        let mut row = vec![
            Value::Num(t),
            Value::Num(state.p1()),
            Value::Num(state.alpha().norm()),
            Value::Num(state.purity()),
            Value::Num(state.coherence_l1()),
            Value::Num(state.mixedness()),
            Value::Num(state.tradeoff_mcl()),
            Value::Num(tau_qsl),
            Value::Num(if tau_qsl > 0.0 {
                1.0 / tau_qsl
            } else {
                f64::INFINITY
            }),
        ];
        if zeta_requested {
            let zeta = if t > 0.0 {
                sss_zeta_seeded(channel, t, seed)?.zeta
            } else {
                0.0
            };
            row.push(Value::Num(zeta));
        }
        Ok(row)
    });

    let mut header = vec![
        "t",
        "p1",
        "alpha_abs",
        "purity",
        "c_l1",
        "m_l",
        "m_cl",
        "tau_qsl",
        "inv_tau_qsl",
    ];
    if zeta_requested {
        header.push("zeta");
    }
    let mut table = Table::new(&header);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

fn run_zeta(config: &ZetaConfig, jobs: usize) -> CliResult<Table> {
    let horizons = config.grid.values();
    let channel = &config.channel;
    let seed = config.seed;
    let rows = par_map_ordered(horizons.len(), jobs, |i| -> CliResult<Vec<Value>> {
        let horizon = horizons[i];
        let outcome = sss_zeta_seeded(channel, horizon, seed)?;
        Ok(vec![
            Value::Num(horizon),
            Value::Num(outcome.zeta),
            Value::Int(outcome.converged as u64),
        ])
    });
    let mut table = Table::new(&["horizon", "zeta", "converged"]);
    for row in rows {
        table.push(row?);
    }
    Ok(table)
}

/// Returns the monotone action trace and a snapshot of the initial and
/// optimized paths on the time grid.
fn run_action(config: &ActionConfig) -> CliResult<(Table, Table)> {
    let p = ActionParams::new(
        config.theta,
        config.gain,
        config.loss,
        config.tau,
        config.q_f,
    )?;
    let init = ControlPath::linear(config.tau, config.q_f, config.segments)?;
    let report = optimize_path(&p, &init, config.steps, config.rate)?;
    let bound = cauchy_schwarz_bound(&p);
    eprintln!(
        "action: {} -> {} (bound {}), {} iterations",
        fmt_num(report.trace[0]),
        fmt_num(*report.trace.last().expect("nonempty trace")),
        fmt_num(bound),
        report.iterations
    );
    let mut trace = Table::new(&["iteration", "action", "cs_bound"]);
    for (i, &action) in report.trace.iter().enumerate() {
        trace.push(vec![
            Value::Int(i as u64),
            Value::Num(action),
            Value::Num(bound),
        ]);
    }
    let mut snapshot = Table::new(&["t", "q_init", "q_opt"]);
    let grid = report.path.grid();
    for i in 0..grid.len() {
        snapshot.push(vec![
            Value::Num(grid[i]),
            Value::Num(init.values()[i]),
            Value::Num(report.path.values()[i]),
        ]);
    }
    Ok((trace, snapshot))
}
