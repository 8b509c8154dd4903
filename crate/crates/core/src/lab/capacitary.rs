//! Weak- and strong-type capacitary inequalities for `S_α` on seeded
//! nonnegative sources.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{SolverControls, SuperlevelProblem};
use crate::kernel::{Kernel, KernelSpec};
use crate::semigroup::{s_regime_limit, Grid, SpaceTimeField};

use super::trials::{random_bump, BumpRanges};
use super::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CapacitaryConfig {
    pub alpha: f64,
    pub p: f64,
    pub seeds: Vec<u64>,
    /// Source grid `[−L, L) × [0, T]` with spacing `h` and `M` steps.
    pub half_width: f64,
    pub h: f64,
    pub horizon: f64,
    pub steps: usize,
    /// Every `coarsen`-th node is a superlevel candidate.
    pub coarsen: usize,
    /// Dyadic levels below the top one.
    pub levels_below: usize,
    pub bumps: usize,
    pub controls: SolverControls<f64>,
}

impl Default for CapacitaryConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            p: 1.5,
            seeds: (0..20).collect(),
            half_width: 2.0,
            h: 0.125,
            horizon: 2.0,
            steps: 16,
            coarsen: 2,
            levels_below: 8,
            bumps: 3,
            controls: SolverControls::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacitaryLevel {
    pub seed: u64,
    pub level: i32,
    pub lambda: f64,
    pub samples: usize,
    pub primal: f64,
    pub dual: f64,
    pub converged: bool,
    /// `λ^p C({S g ≥ λ}) / ‖g‖_p^p` with the primal bound for `C`.
    pub weak_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacitaryTrial {
    pub seed: u64,
    pub g_norm_pow: f64,
    pub max_sg: f64,
    /// `Σ_i 2^{ip} C({S g ≥ 2^i})` over the computed levels (primal bounds).
    pub strong_sum: f64,
    /// Bound on the levels below the computed ones: `C(all) Σ_{i<i_0} 2^{ip}`.
    pub tail_bound: f64,
    pub strong_ratio: f64,
    pub weak_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacitaryReport {
    pub levels: Vec<CapacitaryLevel>,
    pub trials: Vec<CapacitaryTrial>,
    pub weak_max: f64,
    pub strong_min: f64,
    pub strong_max: f64,
}

fn source(cfg: &CapacitaryConfig, seed: u64) -> Result<SpaceTimeField<f64>, LabError> {
    let (l, t) = (cfg.half_width, cfg.horizon);
    let ranges = BumpRanges { t0: (0.25 * t, 0.75 * t), st: (0.1 * t, 0.25 * t), x0: (-0.5 * l, 0.5 * l), sx: (2.0 * cfg.h, 0.25 * l) };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bumps: Vec<_> = (0..cfg.bumps).map(|_| random_bump(&mut rng, &ranges, 1)).collect();
    let grid = Grid::new(1, l, cfg.h)?;
    Ok(SpaceTimeField::from_fn(grid, t, cfg.steps, |t, x| bumps.iter().map(|b| b.eval(t, x)).sum())?)
}

fn trial(cfg: &CapacitaryConfig, kernel: &Kernel<f64>, seed: u64) -> Result<(Vec<CapacitaryLevel>, CapacitaryTrial), LabError> {
    let p = cfg.p;
    let g = source(cfg, seed)?;
    let prob = SuperlevelProblem::new(kernel, &g, cfg.coarsen)?;
    let norm = prob.g_norm_pow(p);
    let max_sg = prob.max_value();
    let top = max_sg.log2().floor() as i32;
    let bottom = top - cfg.levels_below as i32;
    let levels: Vec<CapacitaryLevel> = (bottom..=top)
        .rev()
        .map(|i| {
            let lambda = 2f64.powi(i);
            let s = prob.capacity(lambda, p, &cfg.controls)?;
            let converged = s.estimate.as_ref().is_none_or(|e| e.converged);
            Ok(CapacitaryLevel {
                seed,
                level: i,
                lambda,
                samples: s.samples,
                primal: s.primal(),
                dual: s.dual(),
                converged,
                weak_ratio: lambda.powf(p) * s.primal() / norm,
            })
        })
        .collect::<Result<_, LabError>>()?;
    let strong_sum: f64 = levels.iter().map(|l| l.lambda.powf(p) * l.primal).sum();
    let floor = prob.values.iter().copied().filter(|v| *v > 0.0).fold(f64::INFINITY, f64::min);
    let all = if floor.is_finite() { prob.capacity(floor, p, &cfg.controls)?.primal() } else { 0.0 };
    let tail_bound = all * 2f64.powf(bottom as f64 * p) / (2f64.powf(p) - 1.0);
    let weak_max = levels.iter().map(|l| l.weak_ratio).fold(0.0, f64::max);
    let summary = CapacitaryTrial { seed, g_norm_pow: norm, max_sg, strong_sum, tail_bound, strong_ratio: strong_sum / norm, weak_max };
    Ok((levels, summary))
}

/// Sweeps the dyadic levels `2^i` from the largest below `max S g` down
/// `levels_below` steps, for every seed.
pub fn capacitary_suite(cfg: &CapacitaryConfig) -> Result<CapacitaryReport, LabError> {
    let limit = s_regime_limit(cfg.alpha, 1);
    if !(cfg.p > 1.0 && cfg.p < limit) {
        return Err(LabError::Config(format!("S needs 1 < p < {limit}, got p = {}", cfg.p)));
    }
    let kernel = Kernel::new(&KernelSpec::new(cfg.alpha, 1)?)?;
    let per: Vec<_> = cfg.seeds.par_iter().map(|&s| trial(cfg, &kernel, s)).collect::<Result<_, LabError>>()?;
    let mut levels = Vec::new();
    let mut trials = Vec::new();
    for (l, t) in per {
        levels.extend(l);
        trials.push(t);
    }
    let weak_max = trials.iter().map(|t| t.weak_max).fold(0.0, f64::max);
    let strong_min = trials.iter().map(|t| t.strong_ratio).fold(f64::INFINITY, f64::min);
    let strong_max = trials.iter().map(|t| t.strong_ratio).fold(0.0, f64::max);
    Ok(CapacitaryReport { levels, trials, weak_max, strong_min, strong_max })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_seeds_respect_the_weak_bound() {
        let cfg = CapacitaryConfig { seeds: vec![1, 2], levels_below: 4, ..Default::default() };
        let r = capacitary_suite(&cfg).unwrap();
        assert_eq!(r.trials.len(), 2);
        assert_eq!(r.levels.len(), 10);
        assert!(r.weak_max <= 1.0 + 2.0 * cfg.controls.feas_tol, "{r:?}");
        assert!(r.levels.iter().all(|l| l.dual <= l.primal && l.samples > 0));
        assert!(r.strong_min > 0.0 && r.strong_max.is_finite());
        assert!(capacitary_suite(&CapacitaryConfig { p: 2.0, ..Default::default() }).is_err());
    }
}
