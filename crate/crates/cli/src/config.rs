use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use specfid::verify::{find_property, uniform_grid, DEFAULT_SAMPLES};
use specfid::{ChannelFamily, Tolerances};

use crate::error::{CliError, CliResult};

pub const DEFAULT_SEED: u64 = 42;
pub const DEFAULT_DIMS: [usize; 5] = [2, 3, 4, 5, 6];
pub const DEFAULT_TRIALS: usize = 10_000;
pub const DEFAULT_T: f64 = 0.5;
pub const DEFAULT_GRID: GridSpec = GridSpec { start: 0.0, stop: 1.0, steps: 21 };

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Fidelity,
    Sweep,
    Verify,
    DpiSearch,
    DpiReplay,
    Fvg,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_possible_value().expect("no skipped variants").get_name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    #[default]
    Pinching,
    RandomKraus,
}

impl From<Family> for ChannelFamily {
    fn from(f: Family) -> Self {
        match f {
            Family::Pinching => ChannelFamily::Pinching,
            Family::RandomKraus => ChannelFamily::RandomKraus,
        }
    }
}

/// `start:stop:steps`, inclusive of both ends.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl GridSpec {
    pub fn points(&self) -> CliResult<Vec<f64>> {
        uniform_grid(self.start, self.stop, self.steps).map_err(|e| CliError::Config(e.to_string()))
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, steps] = parts.as_slice() else {
            return Err(format!("expected start:stop:steps, got `{s}`"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number `{x}`: {e}"));
        let steps = steps.trim().parse::<usize>().map_err(|e| format!("bad step count `{steps}`: {e}"))?;
        let grid = GridSpec { start: num(start)?, stop: num(stop)?, steps };
        grid.points().map_err(|e| e.to_string())?;
        Ok(grid)
    }
}

/// A state given as a matrix file or, for qubits, a Bloch vector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateSource {
    Path(PathBuf),
    Bloch([f64; 3]),
}

pub fn parse_bloch(s: &str) -> Result<[f64; 3], String> {
    let parts = s
        .split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|e| format!("bad component `{x}`: {e}")))
        .collect::<Result<Vec<_>, _>>()?;
    <[f64; 3]>::try_from(parts).map_err(|p| format!("expected rx,ry,rz, got {} components", p.len()))
}

/// A fully resolved invocation. Round-trips through JSON; the resolved form
/// of any run can be saved and replayed with `--config`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<StateSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<StateSource>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_grid: Option<GridSpec>,
    #[serde(default)]
    pub extended: bool,
    #[serde(default)]
    pub all: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub alpha: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub properties: Vec<String>,
    pub seed: u64,
    pub dims: Vec<usize>,
    pub samples: usize,
    pub trials: usize,
    pub family: Family,
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default = "yes")]
    pub timestamp: bool,
    #[serde(default, skip_serializing_if = "Tolerances::is_empty")]
    pub tolerances: Tolerances,
}

fn yes() -> bool {
    true
}

/// Contents of a `--config` file: any subset of [`RunConfig`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<Command>,
    pub rho: Option<StateSource>,
    pub sigma: Option<StateSource>,
    pub t: Option<f64>,
    pub t_grid: Option<GridSpec>,
    pub c: Option<f64>,
    pub c_grid: Option<GridSpec>,
    pub extended: Option<bool>,
    pub all: Option<bool>,
    pub alpha: Option<Vec<f64>>,
    pub properties: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub dims: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub trials: Option<usize>,
    pub family: Option<Family>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub timestamp: Option<bool>,
    pub tolerances: Option<Tolerances>,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Flag values as parsed; `None` and empty mean "not given".
#[derive(Clone, Debug, Default)]
pub struct Flags {
    pub rho: Option<StateSource>,
    pub sigma: Option<StateSource>,
    pub t: Option<f64>,
    pub t_grid: Option<GridSpec>,
    pub c: Option<f64>,
    pub c_grid: Option<GridSpec>,
    pub extended: bool,
    pub all: bool,
    pub alpha: Vec<f64>,
    pub properties: Vec<String>,
    pub seed: Option<u64>,
    pub dims: Option<Vec<usize>>,
    pub samples: Option<usize>,
    pub trials: Option<usize>,
    pub family: Option<Family>,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub no_timestamp: bool,
    pub tol_overrides: Vec<String>,
}

fn nonempty<T>(v: Vec<T>) -> Option<Vec<T>> {
    (!v.is_empty()).then_some(v)
}

impl RunConfig {
    /// Flags over file over defaults, then validation.
    pub fn resolve(command: Command, flags: Flags, file: Option<ConfigFile>) -> CliResult<Self> {
        let file = file.unwrap_or_default();
        if let Some(c) = file.command {
            if c != command {
                return Err(CliError::Config(format!("config file is for `{c}`, not `{command}`")));
            }
        }
        let mut tolerances = Tolerances::new();
        for (k, v) in file.tolerances.iter().flat_map(|t| t.iter()) {
            tolerances.set(k, v).map_err(|e| CliError::Config(e.to_string()))?;
        }
        for spec in &flags.tol_overrides {
            tolerances.set_from_str(spec).map_err(|e| CliError::Config(e.to_string()))?;
        }
        let cfg = RunConfig {
            command,
            rho: flags.rho.or(file.rho),
            sigma: flags.sigma.or(file.sigma),
            t: flags.t.or(file.t),
            t_grid: flags.t_grid.or(file.t_grid),
            c: flags.c.or(file.c),
            c_grid: flags.c_grid.or(file.c_grid),
            extended: flags.extended || file.extended.unwrap_or(false),
            all: flags.all || file.all.unwrap_or(false),
            alpha: nonempty(flags.alpha).or(file.alpha).unwrap_or_default(),
            properties: nonempty(flags.properties).or(file.properties).unwrap_or_default(),
            seed: flags.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
            dims: flags.dims.or(file.dims).unwrap_or_else(|| DEFAULT_DIMS.to_vec()),
            samples: flags.samples.or(file.samples).unwrap_or(DEFAULT_SAMPLES),
            trials: flags.trials.or(file.trials).unwrap_or(DEFAULT_TRIALS),
            family: flags.family.or(file.family).unwrap_or_default(),
            format: flags.format.or(file.format).unwrap_or_default(),
            output: flags.output.or(file.output),
            timestamp: !flags.no_timestamp && file.timestamp.unwrap_or(true),
            tolerances,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Rejects invalid combinations before any computation.
    pub fn validate(&self) -> CliResult<()> {
        use Command::*;
        let bad = |msg: String| Err(CliError::Config(msg));
        let cmd = self.command;
        let only = |given: bool, flag: &str, allowed: &[Command]| -> CliResult<()> {
            if given && !allowed.contains(&cmd) {
                return Err(CliError::Config(format!("{flag} is not accepted by `{cmd}`")));
            }
            Ok(())
        };
        only(self.rho.is_some() || self.sigma.is_some(), "a state input", &[Fidelity, Sweep])?;
        only(self.t.is_some(), "--t", &[Fidelity, Verify, DpiSearch, Fvg])?;
        only(self.t_grid.is_some(), "--t-grid", &[Sweep, Fvg])?;
        only(self.c.is_some(), "--c", &[Fvg])?;
        only(self.c_grid.is_some(), "--c-grid", &[Fvg])?;
        only(self.extended, "--extended", &[Sweep])?;
        only(self.all, "--all", &[Fidelity, Verify])?;
        only(!self.alpha.is_empty(), "--alpha", &[Fidelity])?;
        only(!self.properties.is_empty(), "a property list", &[Verify])?;

        if matches!(cmd, Fidelity | Sweep) && (self.rho.is_none() || self.sigma.is_none()) {
            return bad(format!("`{cmd}` needs both --rho and --sigma (a file or --*-bloch)"));
        }
        if let Some(t) = self.t {
            if !(0.0..=1.0).contains(&t) {
                return bad(format!("--t must lie in [0, 1], got {t}"));
            }
            if cmd == DpiSearch && !(t > 0.0 && t < 1.0) {
                return bad(format!("dpi-search needs t in (0, 1), got {t}"));
            }
        }
        if !self.alpha.is_empty() && !self.all {
            return bad("--alpha needs --all".into());
        }
        if let Some(a) = self.alpha.iter().find(|a| !(a.is_finite() && **a > 0.0 && **a != 1.0)) {
            return bad(format!("--alpha must be positive and different from 1, got {a}"));
        }
        if let Some(grid) = &self.t_grid {
            let pts = grid.points()?;
            if !self.extended && pts.iter().any(|t| !(0.0..=1.0).contains(t)) {
                return bad("--t-grid leaves [0, 1]; pass --extended to allow that".into());
            }
        }
        if self.dims.is_empty() || self.dims.iter().any(|&d| d < 2) {
            return bad(format!("--dims must list dimensions of at least 2, got {:?}", self.dims));
        }
        if self.samples == 0 || self.trials == 0 {
            return bad("--samples and --trials must be positive".into());
        }
        match cmd {
            Verify => {
                if self.all == !self.properties.is_empty() {
                    return bad("verify needs either property ids or --all, not both".into());
                }
                for id in &self.properties {
                    find_property(id).map_err(|e| CliError::Config(e.to_string()))?;
                }
            }
            DpiSearch if self.t.is_none() => return bad("dpi-search needs --t".into()),
            Fvg => {
                let point = self.t.is_some() || self.c.is_some();
                let region = self.t_grid.is_some() || self.c_grid.is_some();
                if point == region {
                    return bad("fvg takes either --t with --c, or --t-grid with --c-grid".into());
                }
                if point && (self.t.is_none() || self.c.is_none()) {
                    return bad("fvg needs both --t and --c".into());
                }
                if region && (self.t_grid.is_none() || self.c_grid.is_none()) {
                    return bad("fvg needs both --t-grid and --c-grid".into());
                }
                let cs = match (&self.c, &self.c_grid) {
                    (Some(c), _) => vec![*c],
                    (_, Some(g)) => g.points()?,
                    _ => vec![],
                };
                if let Some(c) = cs.iter().find(|c| !(**c > 0.0 && **c < 1.0)) {
                    return bad(format!("overlap c must lie in (0, 1), got {c}"));
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// `t` for the fidelity command.
    pub fn fidelity_t(&self) -> f64 {
        self.t.unwrap_or(DEFAULT_T)
    }

    pub fn sweep_grid(&self) -> CliResult<Vec<f64>> {
        self.t_grid.unwrap_or(DEFAULT_GRID).points()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags() -> Flags {
        Flags {
            rho: Some(StateSource::Bloch([0.0, 0.0, 1.0])),
            sigma: Some(StateSource::Bloch([1.0, 0.0, 0.0])),
            ..Flags::default()
        }
    }

    #[test]
    fn grid_parsing() {
        let g: GridSpec = "0:1:11".parse().unwrap();
        assert_eq!(g, GridSpec { start: 0.0, stop: 1.0, steps: 11 });
        assert!("0:1".parse::<GridSpec>().is_err());
        assert!("1:0:3".parse::<GridSpec>().is_err());
        assert!("0:1:x".parse::<GridSpec>().is_err());
    }

    #[test]
    fn bloch_parsing() {
        assert_eq!(parse_bloch("0.1, 0.2,0.3").unwrap(), [0.1, 0.2, 0.3]);
        assert!(parse_bloch("1,2").is_err());
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let file = ConfigFile { seed: Some(7), samples: Some(9), t: Some(0.2), ..ConfigFile::default() };
        let mut f = flags();
        f.seed = Some(3);
        let cfg = RunConfig::resolve(Command::Fidelity, f, Some(file)).unwrap();
        assert_eq!((cfg.seed, cfg.samples, cfg.t), (3, 9, Some(0.2)));
        assert_eq!(cfg.dims, DEFAULT_DIMS.to_vec());
    }

    #[test]
    fn rejects_bad_combinations() {
        let mut f = flags();
        f.c = Some(0.5);
        assert!(RunConfig::resolve(Command::Fidelity, f, None).is_err());
        assert!(RunConfig::resolve(Command::Verify, Flags::default(), None).is_err());
        let f = Flags { properties: vec!["nope".into()], ..Flags::default() };
        assert!(RunConfig::resolve(Command::Verify, f, None).is_err());
        let f = Flags { t: Some(0.3), ..Flags::default() };
        assert!(RunConfig::resolve(Command::Fvg, f, None).is_err());
        let f = Flags { tol_overrides: vec!["flip_symmetry=-1".into()], all: true, ..Flags::default() };
        assert!(RunConfig::resolve(Command::Verify, f, None).is_err());
        let file = ConfigFile { command: Some(Command::Sweep), ..ConfigFile::default() };
        assert!(RunConfig::resolve(Command::Fidelity, flags(), Some(file)).is_err());
    }

    #[test]
    fn round_trips_through_json() {
        let f = Flags {
            all: true,
            dims: Some(vec![2, 3]),
            tol_overrides: vec!["flip_symmetry=1e-7".into()],
            t: Some(0.8),
            ..Flags::default()
        };
        let cfg = RunConfig::resolve(Command::Verify, f, None).unwrap();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back, cfg);
        let as_file: ConfigFile = serde_json::from_str(&text).unwrap();
        assert_eq!(RunConfig::resolve(Command::Verify, Flags::default(), Some(as_file)).unwrap(), cfg);
    }
}
