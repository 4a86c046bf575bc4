//! Command-line driver for the `specfid` library.
//!
//! Exit codes: 0 on success, 1 when a verdict or search result contradicts
//! its expected outcome, 2 on configuration, input or output errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};
use specfid::output::to_json_string_pretty;

pub mod commands;
pub mod config;
pub mod error;

use commands::Outcome;
use config::{parse_bloch, Command, ConfigFile, Family, Flags, Format, GridSpec, RunConfig, StateSource};
pub use error::{CliError, CliResult};

pub const EXIT_OK: i32 = 0;
pub const EXIT_UNEXPECTED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "specfid", version, about = "Weighted spectral fidelities: evaluate, sweep, verify and search")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
    #[command(flatten)]
    shared: Shared,
}

#[derive(Debug, Args)]
struct Shared {
    /// Base seed for all random draws.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Samples per dimension for verification suites.
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Comma-separated dimensions, e.g. 2,3,4.
    #[arg(long, global = true, value_delimiter = ',')]
    dims: Option<Vec<usize>>,
    /// Tolerance override KEY=VALUE; repeatable.
    #[arg(long = "tol-override", global = true, value_name = "KEY=VALUE")]
    tol_override: Vec<String>,
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write to this file instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Omit the timestamp so identical runs are byte-identical.
    #[arg(long, global = true)]
    no_timestamp: bool,
    /// JSON file with any subset of the run configuration; flags win.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Print the resolved configuration and exit without computing.
    #[arg(long, global = true)]
    print_config: bool,
}

#[derive(Debug, Args, Default)]
struct StatesArgs {
    /// Matrix JSON file for rho.
    #[arg(long, conflicts_with = "rho_bloch")]
    rho: Option<PathBuf>,
    /// Qubit rho as a Bloch vector rx,ry,rz.
    #[arg(long, value_parser = parse_bloch, allow_hyphen_values = true)]
    rho_bloch: Option<[f64; 3]>,
    /// Matrix JSON file for sigma.
    #[arg(long, conflicts_with = "sigma_bloch")]
    sigma: Option<PathBuf>,
    /// Qubit sigma as a Bloch vector rx,ry,rz.
    #[arg(long, value_parser = parse_bloch, allow_hyphen_values = true)]
    sigma_bloch: Option<[f64; 3]>,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Evaluate F_t for one pair of states.
    Fidelity {
        #[command(flatten)]
        states: StatesArgs,
        /// Interpolation parameter in [0, 1]; defaults to 0.5.
        #[arg(long)]
        t: Option<f64>,
        /// Also report the Uhlmann and Matsumoto fidelities.
        #[arg(long)]
        all: bool,
        /// Sandwiched Renyi orders to report with --all; repeatable.
        #[arg(long)]
        alpha: Vec<f64>,
    },
    /// Tabulate F_t and its second differences over a grid of t.
    Sweep {
        #[command(flatten)]
        states: StatesArgs,
        /// start:stop:steps, defaults to 0:1:21.
        #[arg(long)]
        t_grid: Option<GridSpec>,
        /// Allow grid points outside [0, 1].
        #[arg(long)]
        extended: bool,
    },
    /// Run property suites and report verdicts.
    Verify {
        /// Property ids to run.
        properties: Vec<String>,
        /// Run every registered property.
        #[arg(long)]
        all: bool,
        /// Parameter for properties that take one.
        #[arg(long)]
        t: Option<f64>,
    },
    /// Search for a pair whose fidelity decreases under a channel.
    DpiSearch {
        #[arg(long)]
        t: Option<f64>,
        /// Trials per dimension; defaults to 10000.
        #[arg(long)]
        trials: Option<usize>,
        #[arg(long, value_enum)]
        family: Option<Family>,
    },
    /// Re-evaluate the built-in qubit counterexample at t = 0.8.
    DpiReplay,
    /// Second Fuchs-van de Graaf inequality on pure states, at a point or over a grid.
    Fvg {
        #[arg(long)]
        t: Option<f64>,
        /// Overlap |<psi|phi>| in (0, 1).
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        t_grid: Option<GridSpec>,
        #[arg(long)]
        c_grid: Option<GridSpec>,
    },
}

fn state(path: Option<PathBuf>, bloch: Option<[f64; 3]>) -> Option<StateSource> {
    path.map(StateSource::Path).or(bloch.map(StateSource::Bloch))
}

fn flags(sub: Sub, shared: &Shared) -> (Command, Flags) {
    let mut f = Flags {
        seed: shared.seed,
        samples: shared.samples,
        dims: shared.dims.clone(),
        tol_overrides: shared.tol_override.clone(),
        format: shared.format,
        output: shared.output.clone(),
        no_timestamp: shared.no_timestamp,
        ..Flags::default()
    };
    let command = match sub {
        Sub::Fidelity { states, t, all, alpha } => {
            f.rho = state(states.rho, states.rho_bloch);
            f.sigma = state(states.sigma, states.sigma_bloch);
            (f.t, f.all, f.alpha) = (t, all, alpha);
            Command::Fidelity
        }
        Sub::Sweep { states, t_grid, extended } => {
            f.rho = state(states.rho, states.rho_bloch);
            f.sigma = state(states.sigma, states.sigma_bloch);
            (f.t_grid, f.extended) = (t_grid, extended);
            Command::Sweep
        }
        Sub::Verify { properties, all, t } => {
            (f.properties, f.all, f.t) = (properties, all, t);
            Command::Verify
        }
        Sub::DpiSearch { t, trials, family } => {
            (f.t, f.trials, f.family) = (t, trials, family);
            Command::DpiSearch
        }
        Sub::DpiReplay => Command::DpiReplay,
        Sub::Fvg { t, c, t_grid, c_grid } => {
            (f.t, f.c, f.t_grid, f.c_grid) = (t, c, t_grid, c_grid);
            Command::Fvg
        }
    };
    (command, f)
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs())
}

fn render(cfg: &RunConfig, out: &Outcome) -> CliResult<String> {
    match cfg.format {
        Format::Json => {
            let mut doc = json!({ "command": cfg.command, "config": cfg, "result": out.result });
            if cfg.timestamp {
                doc["timestamp"] = Value::from(timestamp());
            }
            Ok(to_json_string_pretty(&doc)? + "\n")
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&out.header)?;
            for row in &out.rows {
                w.write_record(row)?;
            }
            let bytes = w.into_inner().map_err(|e| CliError::Config(e.to_string()))?;
            Ok(String::from_utf8(bytes).expect("CSV fields are UTF-8"))
        }
    }
}

fn emit(cfg: &RunConfig, text: &str) -> CliResult<()> {
    match &cfg.output {
        Some(path) => std::fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => std::io::stdout()
            .lock()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(std::path::Path::new("<stdout>"), e)),
    }
}

fn resolve(cli: Cli) -> CliResult<(RunConfig, bool)> {
    let file = cli.shared.config.as_deref().map(ConfigFile::load).transpose()?;
    let print = cli.shared.print_config;
    let (command, f) = flags(cli.command, &cli.shared);
    Ok((RunConfig::resolve(command, f, file)?, print))
}

/// Runs one invocation and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = resolve(cli).and_then(|(cfg, print)| {
        if print {
            emit(&cfg, &(to_json_string_pretty(&cfg)? + "\n"))?;
            return Ok(EXIT_OK);
        }
        let out = commands::execute(&cfg)?;
        emit(&cfg, &render(&cfg, &out)?)?;
        Ok(if out.unexpected { EXIT_UNEXPECTED } else { EXIT_OK })
    });
    result.unwrap_or_else(|e| {
        eprintln!("specfid: {e}");
        EXIT_ERROR
    })
}
