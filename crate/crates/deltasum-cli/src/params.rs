//! Run parameters shared by the command line and the JSON config file.

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;

/// Failures before or during a run, each mapped to its own exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("unknown option: {0}")]
    Unknown(String),
    #[error("type mismatch: {0}")]
    Type(String),
    #[error("missing required parameter --{0}")]
    Missing(&'static str),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("runtime cap of {limit} s exceeded after {elapsed:.1} s")]
    Timeout { limit: f64, elapsed: f64 },
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Library(#[from] deltasum::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Timeout { .. } => 2,
            CliError::Unknown(_) => 3,
            CliError::Type(_) => 4,
            CliError::Missing(_) => 5,
            CliError::Invalid(_) => 6,
            CliError::Io(_) | CliError::Library(_) => 7,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Quick,
    Full,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum SourceArg {
    D3,
    Sym2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
#[value(rename_all = "kebab-case")]
pub enum WeightArg {
    Unit,
    Mobius,
    VonMangoldt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WindowArg {
    Sharp,
    Smooth,
}

/// Every tunable of every subcommand. Flags override config-file values.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Params {
    /// JSON file with default values for any of these options
    #[arg(long, global = true)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// range scaling of the verification suites
    #[arg(long, global = true)]
    pub profile: Option<Profile>,
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// output file (stdout when absent)
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// worker threads (also read from DELTASUM_THREADS)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// wall-clock cap in seconds (default 60 quick, 3600 full)
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub time_limit: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// largest modulus of a verification sweep
    #[arg(long, global = true)]
    pub qmax: Option<u64>,
    /// relative tolerance of the identity checks
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub tolerance: Option<f64>,
    /// slack constant of the bound-ratio checks
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub slack: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub q: Option<u64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub a: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub b: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub m1: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub m2: Option<i64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub m: Option<f64>,
    #[arg(long, global = true)]
    pub n3: Option<u64>,
    #[arg(long, global = true)]
    pub n3p: Option<u64>,
    #[arg(long, global = true)]
    pub k: Option<u32>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub theta: Option<f64>,
    /// main size parameter
    #[arg(long = "X", global = true, allow_hyphen_values = true)]
    #[serde(rename = "X")]
    pub x: Option<f64>,
    /// several sizes for a sweep
    #[arg(long = "xs", global = true, value_delimiter = ',')]
    pub xs: Option<Vec<u64>>,
    /// delta-method scale
    #[arg(long = "Q", global = true, allow_hyphen_values = true)]
    #[serde(rename = "Q")]
    pub big_q: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub u: Option<f64>,
    /// the product n²m of the oscillatory integrals
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub n2m: Option<f64>,
    #[arg(long, global = true)]
    pub nmax: Option<u64>,
    #[arg(long, global = true)]
    pub limit: Option<u64>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub ys: Option<Vec<f64>>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub sigma: Option<f64>,
    #[arg(long, global = true)]
    pub source: Option<SourceArg>,
    #[arg(long, global = true)]
    pub weight: Option<WeightArg>,
    #[arg(long, global = true)]
    pub window: Option<WindowArg>,
    /// CSV file with columns X,value
    #[arg(long, global = true)]
    pub series: Option<PathBuf>,
}

macro_rules! overlay {
    ($top:expr, $base:expr, $($f:ident),*) => {
        Params { config: $top.config.clone(), $($f: $top.$f.clone().or($base.$f.clone())),* }
    };
}

impl Params {
    /// Flag values on top of `base`.
    pub fn over(&self, base: &Params) -> Params {
        overlay!(
            self, base, profile, format, out, threads, time_limit, seed, qmax, tolerance, slack, q, a, b, m1, m2, m,
            n3, n3p, k, theta, x, xs, big_q, u, n2m, nmax, limit, ys, sigma, source, weight, window, series
        )
    }

    /// Reads a config file, rejecting unknown keys.
    pub fn from_file(path: &Path) -> CliResult<Params> {
        let text = std::fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| {
            let msg = format!("{}: {e}", path.display());
            match e.classify() {
                serde_json::error::Category::Data if e.to_string().starts_with("unknown field") => CliError::Unknown(msg),
                serde_json::error::Category::Data => CliError::Type(msg),
                _ => CliError::Invalid(msg),
            }
        })
    }

    /// Flags merged over the config file named by `--config`, if any.
    pub fn resolve(flags: &Params) -> CliResult<Params> {
        let merged = match &flags.config {
            Some(path) => flags.over(&Params::from_file(path)?),
            None => flags.clone(),
        };
        merged.validate()?;
        Ok(merged)
    }

    fn validate(&self) -> CliResult<()> {
        let positive = [("tolerance", self.tolerance), ("slack", self.slack), ("time-limit", self.time_limit)];
        for (name, v) in positive {
            if let Some(v) = v {
                if !(v > 0.0) {
                    return Err(CliError::Invalid(format!("--{name} must be positive, got {v}")));
                }
            }
        }
        if self.threads == Some(0) {
            return Err(CliError::Invalid("--threads must be at least 1".into()));
        }
        if matches!(&self.xs, Some(v) if v.is_empty()) || matches!(&self.ys, Some(v) if v.is_empty()) {
            return Err(CliError::Invalid("ranges must be nonempty".into()));
        }
        Ok(())
    }

    pub fn profile(&self) -> Profile {
        self.profile.unwrap_or(Profile::Quick)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or(Format::Json)
    }

    pub fn time_limit(&self) -> f64 {
        self.time_limit.unwrap_or(match self.profile() {
            Profile::Quick => 60.0,
            Profile::Full => 3600.0,
        })
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance.unwrap_or(1e-6)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(20_240_601)
    }

    /// Quick or full value of a sweep range.
    pub fn pick<T>(&self, quick: T, full: T) -> T {
        match self.profile() {
            Profile::Quick => quick,
            Profile::Full => full,
        }
    }
}

/// `Some(v)` or the missing-parameter error for `name`.
pub fn need<T: Clone>(v: &Option<T>, name: &'static str) -> CliResult<T> {
    v.clone().ok_or(CliError::Missing(name))
}

/// A real parameter that must hold a positive integer.
pub fn as_count(v: f64, name: &str) -> CliResult<u64> {
    if v >= 1.0 && v.fract() == 0.0 && v < 9.0e15 {
        Ok(v as u64)
    } else {
        Err(CliError::Invalid(format!("--{name} must be a positive integer here, got {v}")))
    }
}
