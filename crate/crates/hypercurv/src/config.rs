use std::path::Path;

use hypercurv_core::scalar::{Regime, Tolerance};
use serde::Deserialize;

use crate::cli::GlobalArgs;
use crate::error::{CliError, CliResult};
use crate::output::Format;
use crate::schema::{read_json, RegimeName};

pub const SEED_VAR: &str = "HYPERCURV_SEED";

/// Optional defaults file, e.g. `{"seed": 7, "format": "json", "jobs": 4}`.
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub format: Option<Format>,
    #[serde(default)]
    pub regime: Option<RegimeName>,
    #[serde(default)]
    pub jobs: Option<usize>,
    #[serde(default)]
    pub tol_rel: Option<f64>,
    #[serde(default)]
    pub tol_abs: Option<f64>,
    #[serde(default)]
    pub budget: Option<u64>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        read_json(path)
    }
}

/// Flags merged over the environment and the config file.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub format: Format,
    /// `None` lets the command pick its natural regime.
    pub regime: Option<Regime>,
    pub tolerance: Tolerance,
    pub seed: Option<u64>,
    pub jobs: usize,
    pub budget: Option<u64>,
}

impl Settings {
    pub fn resolve(flags: &GlobalArgs, env_seed: Option<&str>, file: &ConfigFile) -> CliResult<Self> {
        let env_seed = match env_seed.map(str::trim) {
            Some(s) if !s.is_empty() => Some(
                s.parse::<u64>().map_err(|_| CliError::usage(format!("{SEED_VAR}={s} is not an unsigned integer")))?,
            ),
            _ => None,
        };
        let regime = if flags.exact {
            Some(Regime::Exact)
        } else if flags.float {
            Some(Regime::Float)
        } else {
            file.regime.map(Regime::from)
        };
        let default = Tolerance::default();
        let tolerance = Tolerance {
            rel: flags.tol_rel.or(file.tol_rel).unwrap_or(default.rel),
            abs: flags.tol_abs.or(file.tol_abs).unwrap_or(default.abs),
        };
        if !(tolerance.rel >= 0.0 && tolerance.abs >= 0.0) {
            return Err(CliError::usage("tolerances must be non-negative"));
        }
        let jobs = flags.jobs.or(file.jobs).unwrap_or(1);
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        Ok(Settings {
            format: flags.format.or(file.format).unwrap_or_default(),
            regime,
            tolerance,
            seed: flags.seed.or(env_seed).or(file.seed),
            jobs,
            budget: file.budget,
        })
    }

    pub fn require_seed(&self) -> CliResult<u64> {
        self.seed.ok_or_else(|| {
            CliError::usage(format!("a seed is required: pass --seed, set {SEED_VAR} or add it to --config"))
        })
    }

    pub fn regime_or(&self, default: Regime) -> Regime {
        self.regime.unwrap_or(default)
    }
}
