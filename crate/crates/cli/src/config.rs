use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::Deserialize;
use uncstates_core::par::Execution;
use uncstates_core::random::DEFAULT_SEED;
use uncstates_core::uncertainty::EQUALITY_TOL;

use crate::args::Format;

pub const CONFIG_ENV: &str = "UNCSTATES_CONFIG";

/// Settings shared by every subcommand, read from TOML.
#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub format: Option<Format>,
    pub parallel: bool,
    /// Trials of the randomized selftest criteria.
    pub trials: usize,
    pub truncation: Truncation,
    pub tolerance: Tolerances,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Truncation {
    /// Levels of single-mode infinite-dimensional representations.
    pub dim: usize,
    pub per_mode: usize,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative bound under which a slack counts as equality; slacks below
    /// `-equality` fail verification.
    pub equality: f64,
    /// Bound on Wronskian drift and `|u|^2 - |v|^2 - 1` in dynamics.
    pub invariant: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: DEFAULT_SEED,
            format: None,
            parallel: true,
            trials: 10_000,
            truncation: Truncation::default(),
            tolerance: Tolerances::default(),
        }
    }
}

impl Default for Truncation {
    fn default() -> Self {
        Truncation { dim: 64, per_mode: 20 }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { equality: EQUALITY_TOL, invariant: 1e-9 }
    }
}

impl RunConfig {
    /// Reads `path`, else `$UNCSTATES_CONFIG`, else the defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let path = path.map(Path::to_path_buf).or_else(|| std::env::var_os(CONFIG_ENV).map(PathBuf::from));
        let cfg = match path {
            Some(p) => {
                let text = std::fs::read_to_string(&p).with_context(|| format!("reading config {}", p.display()))?;
                toml::from_str(&text).with_context(|| format!("parsing config {}", p.display()))?
            }
            None => RunConfig::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("equality", self.tolerance.equality), ("invariant", self.tolerance.invariant)] {
            if !(x.is_finite() && x > 0.0) {
                bail!("tolerance.{name} must be positive, got {x}");
            }
        }
        if self.truncation.dim < 4 || self.truncation.per_mode < 4 {
            bail!("truncations must be at least 4");
        }
        if self.trials == 0 {
            bail!("trials must be at least 1");
        }
        Ok(())
    }

    pub fn exec(&self) -> Execution {
        if self.parallel {
            Execution::Parallel
        } else {
            Execution::Sequential
        }
    }
}
