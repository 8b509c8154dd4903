use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::capacity::SolverControls;
use crate::semigroup::{s_regime_limit, Operator};

use super::{BallLattice, CapacitaryConfig, LabError, MeasureSource, StrichartzConfig, TrialSpec};

/// Settings read from a JSON config file. Every field is optional; command
/// line flags take precedence.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub variant: Option<Operator>,
    pub alpha: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub dim: Option<usize>,
    /// `"L,h,T,M"`.
    pub grid: Option<String>,
    pub measure: Option<MeasureSource>,
    /// Measures swept by `trace`; the verdict is a rank correlation over them.
    pub family: Vec<MeasureSource>,
    pub trials: Option<TrialSpec>,
    pub seed: Option<u64>,
    pub lattice: Option<BallLattice>,
    pub radii: Option<Vec<f64>>,
    /// `(nt, nx)` samples per ball.
    pub samples: Option<(usize, usize)>,
    pub controls: Option<SolverControls<f64>>,
    pub strichartz: Option<StrichartzConfig>,
    pub capacitary: Option<CapacitaryConfig>,
    pub out: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path).map_err(|source| LabError::Io { path: path.into(), source })?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| LabError::Json { path: path.into(), source })?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks the settings that are present against each other.
    pub fn validate(&self) -> Result<(), LabError> {
        if let Some(a) = self.alpha {
            check_alpha(a)?;
        }
        for (name, v) in [("p", self.p), ("q", self.q)] {
            if let Some(v) = v {
                if !(v > 1.0 && v.is_finite()) {
                    return Err(LabError::Config(format!("{name} must lie in (1, ∞), got {v}")));
                }
            }
        }
        if let (Some(Operator::S), Some(alpha), Some(p)) = (self.variant, self.alpha, self.p) {
            check_s_regime(alpha, p, self.dim.unwrap_or(1))?;
        }
        Ok(())
    }
}

pub fn check_alpha(alpha: f64) -> Result<(), LabError> {
    if alpha > 0.0 && alpha <= 1.0 {
        Ok(())
    } else {
        Err(LabError::Config(format!("alpha must lie in (0, 1], got {alpha}")))
    }
}

/// `S` paths need `p < 1 + n/(2α)`.
pub fn check_s_regime(alpha: f64, p: f64, dim: usize) -> Result<(), LabError> {
    let limit = s_regime_limit(alpha, dim);
    if p < limit {
        Ok(())
    } else {
        Err(LabError::Config(format!("variant S needs p < 1 + n/(2α) = {limit}, got p = {p}")))
    }
}

/// The Wolff-integral condition is singular at `p = q`.
pub fn check_wolff_regime(p: f64, q: f64) -> Result<(), LabError> {
    if p > q {
        Ok(())
    } else {
        Err(LabError::Config(format!("the Wolff-integral condition needs p > q, got p = {p}, q = {q}")))
    }
}
