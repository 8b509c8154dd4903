//! `‖S_α g‖_{L^{q̃}} / ‖g‖_{L^p}` over seeded source terms, under grid
//! refinement and parabolic rescaling of the sources.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernel::KernelSpec;
use crate::semigroup::{apply_s, strichartz_exponent, Grid, SpaceTimeField};

use super::trials::{random_bump, Bump, BumpRanges};
use super::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrichartzConfig {
    pub alpha: f64,
    pub p: f64,
    pub dim: usize,
    pub trials: usize,
    pub seed: u64,
    /// Base periodic box `[−L, L)^n`, spacing `h`, time axis `[0, T]` in
    /// `M` steps.
    pub half_width: f64,
    pub h: f64,
    pub horizon: f64,
    pub steps: usize,
    /// Refinement factors: level `k` uses `h/k` and `M·k` steps.
    pub refine: Vec<usize>,
    /// Rescalings `g_λ(t, x) = g(λ^{2α} t, λ x)`.
    pub lambdas: Vec<f64>,
}

impl Default for StrichartzConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            p: 1.5,
            dim: 1,
            trials: 20,
            seed: 0,
            half_width: 16.0,
            h: 1.0 / 32.0,
            horizon: 8.0,
            steps: 256,
            refine: vec![1, 2],
            lambdas: vec![0.5, 1.0, 2.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrichartzRow {
    pub trial: usize,
    pub lambda: f64,
    pub refine: usize,
    pub g_norm: f64,
    pub sg_norm: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StrichartzReport {
    pub q_tilde: f64,
    pub rows: Vec<StrichartzRow>,
    /// `(λ, refine, max ratio over trials)`.
    pub maxima: Vec<(f64, usize, f64)>,
    /// `|max_finest / max_base − 1|` at `λ = 1` (or the first `λ`).
    pub refinement_change: f64,
    /// `max_λ |max_λ / max_1 − 1|` on the finest grid.
    pub rescaling_change: f64,
}

/// Each trial is a sum of two compact bumps in `(0, 1.75) × [−1.5, 1.5]^n`.
fn trial_sources(cfg: &StrichartzConfig) -> Vec<Vec<Bump>> {
    let ranges = BumpRanges { t0: (0.75, 1.25), st: (0.25, 0.5), x0: (-0.5, 0.5), sx: (0.25, 1.0) };
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    (0..cfg.trials).map(|_| (0..2).map(|_| random_bump(&mut rng, &ranges, cfg.dim)).collect()).collect()
}

pub fn strichartz_sweep(cfg: &StrichartzConfig) -> Result<StrichartzReport, LabError> {
    let q_tilde = strichartz_exponent(cfg.alpha, cfg.p, cfg.dim)
        .ok_or_else(|| LabError::Config(format!("q̃ is infinite or undefined: need 1 < p < 1 + n/(2α), got p = {}", cfg.p)))?;
    if cfg.refine.is_empty() || cfg.lambdas.is_empty() {
        return Err(LabError::Config("refine and lambdas must be nonempty".into()));
    }
    let spec = KernelSpec::new(cfg.alpha, cfg.dim)?;
    let sources = trial_sources(cfg);
    let mut jobs = Vec::new();
    for &k in &cfg.refine {
        for &lambda in &cfg.lambdas {
            for trial in 0..cfg.trials {
                jobs.push((k, lambda, trial));
            }
        }
    }
    let rows: Vec<StrichartzRow> = jobs
        .into_par_iter()
        .map(|(k, lambda, trial)| {
            let grid = Grid::new(cfg.dim, cfg.half_width, cfg.h / k as f64)?;
            let bumps: Vec<Bump> = sources[trial].iter().map(|b| b.rescaled(lambda, cfg.alpha)).collect();
            let g = SpaceTimeField::from_fn(grid, cfg.horizon, cfg.steps * k, |t, x| bumps.iter().map(|b| b.eval(t, x)).sum())?;
            let g_norm = g.norm_lp(cfg.p);
            let (sg_norm, ratio) = if g_norm > 0.0 {
                let sg = apply_s(&g, &spec)?.norm_lp(q_tilde);
                (sg, sg / g_norm)
            } else {
                (0.0, 0.0)
            };
            Ok(StrichartzRow { trial, lambda, refine: k, g_norm, sg_norm, ratio })
        })
        .collect::<Result<_, LabError>>()?;

    let max_of = |lambda: f64, k: usize| rows.iter().filter(|r| r.lambda == lambda && r.refine == k).map(|r| r.ratio).fold(0.0, f64::max);
    let mut maxima = Vec::new();
    for &k in &cfg.refine {
        for &lambda in &cfg.lambdas {
            maxima.push((lambda, k, max_of(lambda, k)));
        }
    }
    let unit = cfg.lambdas.iter().copied().find(|l| *l == 1.0).unwrap_or(cfg.lambdas[0]);
    let base = cfg.refine[0];
    let finest = *cfg.refine.last().expect("nonempty");
    let rel = |a: f64, b: f64| if b > 0.0 { (a / b - 1.0).abs() } else { 0.0 };
    let refinement_change = rel(max_of(unit, finest), max_of(unit, base));
    let rescaling_change = cfg.lambdas.iter().map(|&l| rel(max_of(l, finest), max_of(unit, finest))).fold(0.0, f64::max);
    Ok(StrichartzReport { q_tilde, rows, maxima, refinement_change, rescaling_change })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponent_and_rejections() {
        let cfg = StrichartzConfig { trials: 0, ..Default::default() };
        let r = strichartz_sweep(&cfg).unwrap();
        assert_eq!(r.q_tilde, 6.0);
        assert!(r.rows.is_empty());
        assert!(strichartz_sweep(&StrichartzConfig { p: 2.0, ..Default::default() }).is_err());
        assert!(strichartz_sweep(&StrichartzConfig { p: 2.5, ..Default::default() }).is_err());
    }

    #[test]
    fn small_sweep_is_stable() {
        let cfg = StrichartzConfig { trials: 3, half_width: 8.0, h: 1.0 / 16.0, horizon: 6.0, steps: 96, ..Default::default() };
        let r = strichartz_sweep(&cfg).unwrap();
        assert_eq!(r.rows.len(), 18);
        assert!(r.rows.iter().all(|row| row.ratio > 0.0));
        assert!(r.refinement_change < 0.15, "{r:?}");
        assert!(r.rescaling_change < 0.1, "{r:?}");
    }
}
