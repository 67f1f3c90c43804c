//! Run configuration shared by the CLI and the verification suites.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::RefinementPolicy;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    /// Relative change at which sup-norm refinement stops.
    pub norm_rel: f64,
    /// Required seam residual on the welding collocation nodes.
    pub newton: f64,
    /// Step of the complex-linearity difference quotients.
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            norm_rel: 1e-6,
            newton: 1e-8,
            fd_step: 1e-4,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Series truncation `N` of reported differentials.
    #[serde(rename = "N", alias = "truncation")]
    pub truncation: usize,
    pub grid: RefinementPolicy,
    pub tolerances: Tolerances,
    pub out: Option<PathBuf>,
    pub seed: u64,
    /// Maps in the random corpus of the verification suites.
    pub corpus_size: usize,
}

pub const DEFAULT_SEED: u64 = 20_240_229;

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            truncation: 32,
            grid: RefinementPolicy::default(),
            tolerances: Tolerances::default(),
            out: None,
            seed: DEFAULT_SEED,
            corpus_size: 100,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        if self.truncation < 8 {
            return Err(Error::Config(format!("N = {} must be at least 8", self.truncation)));
        }
        let t = &self.tolerances;
        if !(t.norm_rel > 0.0 && t.newton > 0.0 && t.fd_step > 0.0) {
            return Err(Error::Config("all tolerances must be positive".into()));
        }
        if self.corpus_size == 0 {
            return Err(Error::Config("corpus_size must be positive".into()));
        }
        self.policy().validate()
    }

    /// The grid policy with the configured refinement tolerance.
    pub fn policy(&self) -> RefinementPolicy {
        RefinementPolicy {
            rel_tol: self.tolerances.norm_rel,
            ..self.grid
        }
    }

    /// Reads TOML or JSON, chosen by extension (`.json` is JSON, anything
    /// else TOML).
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        let cfg: RunConfig = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
