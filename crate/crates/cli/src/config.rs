//! Run configuration: command-line flags merged over an optional key-value file.
//!
//! The file format is one `key = value` pair per line; `#` starts a comment.
//! Keys match the long flag names with `-` or `_` accepted interchangeably:
//!
//! ```text
//! # three polarization detectors
//! states = pol:30deg; pol:0deg; pol:-30deg   # angles need deg or rad
//! eta    = 0.95        # dimensionless, 0 < eta <= 1
//! shots  = 100000      # counts per phase point
//! seed   = 7
//! ```
//!
//! Flags given on the command line win over file values.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use fringecycle::presets::Preset;
use fringecycle::PureQubit;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Classical bound, quantum maximum and noise threshold for one n.
    Bounds,
    /// Multi-start numerical maximisation of the cycle value.
    Optimize,
    /// Evaluate the inequalities on explicit or preset detector states.
    Certify,
    /// Simulated fringe scans and the estimated cycle value.
    Simulate,
    /// Gram realisability of an overlap triple.
    Gram,
    /// Bounds for every n from 3 to n-max.
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Text,
}

#[derive(Debug, Parser)]
#[command(name = "fringecycle", version, about = "Overlap inequalities for multipath interferometers")]
pub struct Args {
    pub command: Command,
    /// Key-value configuration file; flags override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long = "n-max")]
    pub n_max: Option<usize>,
    /// Uniform visibility reduction factor, 0 < eta <= 1.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Counts per phase point.
    #[arg(long)]
    pub shots: Option<u64>,
    #[arg(long)]
    pub restarts: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// One of: theorem1, four-path-polarization, classical-vertex-111, identical-4.
    #[arg(long)]
    pub preset: Option<String>,
    /// Semicolon-separated states: `bloch:x,y,z`, `polar:<theta>,<phi>` or
    /// `pol:<angle>`, angles with a `deg` or `rad` suffix.
    #[arg(long, allow_hyphen_values = true)]
    pub states: Option<String>,
    #[arg(long)]
    pub r12: Option<f64>,
    #[arg(long)]
    pub r23: Option<f64>,
    #[arg(long)]
    pub r13: Option<f64>,
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Also write the raw fringe scans (simulate only).
    #[arg(long)]
    pub scans: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Where detector states came from.
#[derive(Debug, Clone, PartialEq)]
pub enum StateSource {
    Preset(Preset),
    Explicit(Vec<PureQubit>),
}

impl StateSource {
    pub fn states(&self) -> Vec<PureQubit> {
        match self {
            StateSource::Preset(p) => p.detectors(),
            StateSource::Explicit(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n: Option<usize>,
    pub n_max: usize,
    pub eta: f64,
    pub shots: u64,
    pub restarts: usize,
    pub seed: u64,
    pub states: Option<StateSource>,
    pub r12: Option<f64>,
    pub r23: Option<f64>,
    pub r13: Option<f64>,
    pub output: Option<PathBuf>,
    pub scans: Option<PathBuf>,
    pub format: Format,
}

pub const DEFAULT_SHOTS: u64 = 100_000;
pub const DEFAULT_RESTARTS: usize = 50;
pub const DEFAULT_N_MAX: usize = 6;

impl RunConfig {
    /// Merges flags over the config file (if any) and validates the result.
    pub fn from_args(args: Args) -> Result<Self, CliError> {
        let mut args = args;
        if let Some(path) = args.config.take() {
            let text = fs::read_to_string(&path).map_err(|source| CliError::Io { path: path.clone(), source })?;
            apply_file(&mut args, &text, &path)?;
        }

        let states = match (args.preset.as_deref(), args.states.as_deref()) {
            (Some(_), Some(_)) => return Err(usage("give either a preset or explicit states, not both")),
            (Some(name), None) => Some(StateSource::Preset(
                Preset::from_name(name).ok_or_else(|| usage(format!("unknown preset {name:?}")))?,
            )),
            (None, Some(spec)) => Some(StateSource::Explicit(parse_states(spec)?)),
            (None, None) => None,
        };

        let cfg = RunConfig {
            command: args.command,
            n: args.n,
            n_max: args.n_max.unwrap_or(DEFAULT_N_MAX),
            eta: args.eta.unwrap_or(1.0),
            shots: args.shots.unwrap_or(DEFAULT_SHOTS),
            restarts: args.restarts.unwrap_or(DEFAULT_RESTARTS),
            seed: args.seed.unwrap_or(0),
            states,
            r12: args.r12,
            r23: args.r23,
            r13: args.r13,
            output: args.output,
            scans: args.scans,
            format: args.format.unwrap_or_default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(usage(format!("eta must satisfy 0 < eta <= 1, got {}", self.eta)));
        }
        if self.shots == 0 {
            return Err(usage("shots must be positive"));
        }
        if self.restarts == 0 {
            return Err(usage("restarts must be positive"));
        }
        let need_n = |what: &str| -> Result<(), CliError> {
            match self.n {
                Some(n) if n >= 3 => Ok(()),
                Some(n) => Err(usage(format!("{what} needs n >= 3, got {n}"))),
                None => Err(usage(format!("{what} needs --n"))),
            }
        };
        match self.command {
            Command::Bounds => need_n("bounds")?,
            Command::Optimize => need_n("optimize")?,
            Command::Table if self.n_max < 3 => {
                return Err(usage(format!("table needs n-max >= 3, got {}", self.n_max)))
            }
            Command::Certify | Command::Simulate => {
                let states = self.states.as_ref().ok_or_else(|| usage("give --preset or --states"))?;
                let count = states.states().len();
                if count < 3 {
                    return Err(usage(format!("need at least 3 states, got {count}")));
                }
                if let Some(n) = self.n.filter(|&n| n != count) {
                    return Err(usage(format!("n = {n} but {count} states given")));
                }
            }
            Command::Gram => {
                let explicit = self.r12.is_some() || self.r23.is_some() || self.r13.is_some();
                match (&self.states, explicit) {
                    (Some(_), true) => return Err(usage("give overlaps or states, not both")),
                    (Some(s), false) if s.states().len() != 3 => {
                        return Err(usage("gram needs exactly 3 states"))
                    }
                    (None, _) if self.r12.is_none() || self.r23.is_none() => {
                        return Err(usage("gram needs --r12 and --r23, or 3 states"))
                    }
                    _ => {}
                }
                for r in [self.r12, self.r23, self.r13].into_iter().flatten() {
                    if !(0.0..=1.0).contains(&r) {
                        return Err(usage(format!("overlap {r} outside [0, 1]")));
                    }
                }
            }
            Command::Table => {}
        }
        Ok(())
    }
}

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T, CliError> {
    value.parse().map_err(|_| usage(format!("invalid value {value:?} for {key}")))
}

/// Fills every flag left unset on the command line from the file contents.
fn apply_file(args: &mut Args, text: &str, path: &Path) -> Result<(), CliError> {
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{}:{}: expected key = value", path.display(), lineno + 1)))?;
        let key = key.trim().replace('_', "-");
        let value = value.trim();
        match key.as_str() {
            "n" => set(&mut args.n, parse_value(&key, value)?),
            "n-max" => set(&mut args.n_max, parse_value(&key, value)?),
            "eta" => set(&mut args.eta, parse_value(&key, value)?),
            "shots" => set(&mut args.shots, parse_value(&key, value)?),
            "restarts" => set(&mut args.restarts, parse_value(&key, value)?),
            "seed" => set(&mut args.seed, parse_value(&key, value)?),
            "preset" => set(&mut args.preset, value.to_string()),
            "states" => set(&mut args.states, value.to_string()),
            "r12" => set(&mut args.r12, parse_value(&key, value)?),
            "r23" => set(&mut args.r23, parse_value(&key, value)?),
            "r13" => set(&mut args.r13, parse_value(&key, value)?),
            "output" => set(&mut args.output, PathBuf::from(value)),
            "scans" => set(&mut args.scans, PathBuf::from(value)),
            "format" => set(
                &mut args.format,
                Format::from_str(value, true).map_err(|_| usage(format!("invalid format {value:?}")))?,
            ),
            other => {
                return Err(usage(format!("{}:{}: unknown key {other:?}", path.display(), lineno + 1)))
            }
        }
    }
    Ok(())
}

fn set<T>(slot: &mut Option<T>, value: T) {
    if slot.is_none() {
        *slot = Some(value);
    }
}

/// Parses an angle with a mandatory `deg` or `rad` suffix into radians.
pub fn parse_angle(s: &str) -> Result<f64, CliError> {
    let s = s.trim();
    let (number, scale) = if let Some(v) = s.strip_suffix("deg") {
        (v, std::f64::consts::PI / 180.0)
    } else if let Some(v) = s.strip_suffix("rad") {
        (v, 1.0)
    } else {
        return Err(usage(format!("angle {s:?} needs a deg or rad suffix")));
    };
    let x: f64 = number.trim().parse().map_err(|_| usage(format!("invalid angle {s:?}")))?;
    if !x.is_finite() {
        return Err(usage(format!("invalid angle {s:?}")));
    }
    Ok(x * scale)
}

/// Parses one state: `bloch:x,y,z`, `polar:<theta>,<phi>` or `pol:<angle>`.
pub fn parse_state(s: &str) -> Result<PureQubit, CliError> {
    let s = s.trim();
    let (kind, rest) = s
        .split_once(':')
        .ok_or_else(|| usage(format!("state {s:?} should look like bloch:x,y,z, polar:t,p or pol:a")))?;
    let parts: Vec<&str> = rest.split(',').map(str::trim).collect();
    match (kind.trim(), parts.as_slice()) {
        ("bloch", [x, y, z]) => {
            let v = [parse_value("bloch", x)?, parse_value("bloch", y)?, parse_value("bloch", z)?];
            PureQubit::new(v).map_err(|e| usage(format!("state {s:?}: {e}")))
        }
        ("polar", [theta, phi]) => Ok(PureQubit::from_polar(parse_angle(theta)?, parse_angle(phi)?)),
        ("pol", [angle]) => Ok(PureQubit::linear_polarization(parse_angle(angle)?)),
        _ => Err(usage(format!("malformed state {s:?}"))),
    }
}

/// Parses a `;`-separated list of states.
pub fn parse_states(s: &str) -> Result<Vec<PureQubit>, CliError> {
    s.split(';').filter(|p| !p.trim().is_empty()).map(parse_state).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn args(cmd: &[&str]) -> Args {
        Args::try_parse_from(std::iter::once("fringecycle").chain(cmd.iter().copied())).unwrap()
    }

    #[test]
    fn angles_need_units() {
        assert!((parse_angle("90deg").unwrap() - PI / 2.0).abs() < 1e-15);
        assert_eq!(parse_angle("1.5rad").unwrap(), 1.5);
        assert!(parse_angle("90").is_err());
        assert!(parse_angle("xdeg").is_err());
    }

    #[test]
    fn state_forms() {
        let a = parse_state("bloch:0,0,1").unwrap();
        assert_eq!(a, PureQubit::zero());
        let b = parse_state("polar:90deg, 0rad").unwrap();
        assert!((b.bloch()[0] - 1.0).abs() < 1e-15);
        let c = parse_state("pol:45deg").unwrap();
        assert!((c.bloch()[0] - 1.0).abs() < 1e-15);
        assert!(parse_state("bloch:0,0,2").is_err());
        assert!(parse_state("bloch:0,1").is_err());
        assert!(parse_state("spin:up").is_err());
        assert_eq!(parse_states("pol:0deg; pol:30deg;").unwrap().len(), 2);
    }

    #[test]
    fn file_values_fill_unset_flags() {
        let mut a = args(&["bounds", "--n", "5"]);
        apply_file(&mut a, "n = 4\n# comment\neta = 0.9  # trailing\n\nformat = text\n", Path::new("x")).unwrap();
        assert_eq!(a.n, Some(5));
        assert_eq!(a.eta, Some(0.9));
        assert_eq!(a.format, Some(Format::Text));
        assert!(apply_file(&mut a, "colour = red\n", Path::new("x")).is_err());
        assert!(apply_file(&mut a, "n 4\n", Path::new("x")).is_err());
    }

    #[test]
    fn validation() {
        assert!(RunConfig::from_args(args(&["bounds"])).is_err());
        assert!(RunConfig::from_args(args(&["bounds", "--n", "2"])).is_err());
        assert!(RunConfig::from_args(args(&["bounds", "--n", "3", "--eta", "0"])).is_err());
        assert!(RunConfig::from_args(args(&["table", "--n-max", "2"])).is_err());
        assert!(RunConfig::from_args(args(&["certify"])).is_err());
        assert!(RunConfig::from_args(args(&["certify", "--preset", "nope"])).is_err());
        assert!(RunConfig::from_args(args(&["certify", "--preset", "theorem1", "--n", "4"])).is_err());
        assert!(RunConfig::from_args(args(&["gram", "--r12", "0.5"])).is_err());
        assert!(RunConfig::from_args(args(&["gram", "--r12", "0.5", "--r23", "1.5"])).is_err());
        let cfg = RunConfig::from_args(args(&["certify", "--preset", "theorem1"])).unwrap();
        assert_eq!(cfg.states, Some(StateSource::Preset(Preset::OptimalTriple)));
        assert_eq!(cfg.shots, DEFAULT_SHOTS);
    }
}
