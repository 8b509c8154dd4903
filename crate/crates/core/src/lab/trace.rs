//! Empirical lower bounds for the trace constant
//! `sup_h ‖T h‖_{L^q(μ)} / ‖h‖_{L^p}` over seeded trial families.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{assemble, CellGrid, CompactSetApprox, Coupling};
use crate::kernel::Kernel;
use crate::measure::DiscreteMeasure;
use crate::semigroup::{conjugate, Operator};

use super::trials::{random_bump, BumpRanges, Wave};
use super::LabError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialKind {
    Bandlimited,
    Bump,
    /// `h = (T*μ)^{p'−1}`.
    Extremal,
}

impl std::fmt::Display for TrialKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::Bandlimited => "bandlimited",
            Self::Bump => "bump",
            Self::Extremal => "extremal",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSpec {
    pub bandlimited: usize,
    pub bumps: usize,
    pub extremal: bool,
    pub seed: u64,
}

impl Default for TrialSpec {
    fn default() -> Self {
        Self { bandlimited: 16, bumps: 32, extremal: true, seed: 0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialRatio {
    pub kind: TrialKind,
    pub index: usize,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TraceReport {
    pub operator: Operator,
    pub p: f64,
    pub q: f64,
    pub grid: CellGrid<f64>,
    pub trials: Vec<TrialRatio>,
    pub max: f64,
    pub mean: f64,
}

/// A cell grid that resolves the earliest atom and reaches well past the
/// support of `μ`, with at most `max_cells` cells. For `S` the time axis
/// ends at the last atom and the cells are split `16 × (max_cells/16)`.
pub fn auto_grid(operator: Operator, mu: &DiscreteMeasure<f64>, alpha: f64, max_cells: usize) -> Result<CellGrid<f64>, LabError> {
    let (t_min, t_max) = mu.time_range().ok_or_else(|| LabError::Config("empty measure has no grid".into()))?;
    let inv = 1.0 / (2.0 * alpha);
    let reach = mu.atoms().map(|a| a.x[0].abs()).fold(0.0, f64::max) + 6.0 * t_max.powf(inv);
    let (steps, nx) = match operator {
        Operator::R => (1, max_cells.max(2)),
        Operator::S => (16, (max_cells / 16).max(2)),
    };
    let h = (t_min.powf(inv) / 4.0).max(2.0 * reach / nx as f64);
    let half_width = (reach / h).ceil() * h;
    Ok(CellGrid::new(half_width, h, t_max, steps)?)
}

fn ratio(a: &Coupling<f64>, weights: &[f64], h: &[f64], p: f64, q: f64) -> f64 {
    let den = a.norm_pow(h, p).powf(1.0 / p);
    if !(den > 0.0) {
        return 0.0;
    }
    let th = a.apply(h);
    let num: f64 = th.iter().zip(weights).map(|(v, w)| w * v.abs().powf(q)).sum();
    num.powf(1.0 / q) / den
}

/// `‖T h‖_{L^q(μ)} / ‖h‖_{L^p}` for every trial, with `h` piecewise
/// constant on `grid` and `T h` evaluated exactly at the atoms. `μ = 0`
/// gives zero ratios.
#[allow(clippy::too_many_arguments)]
pub fn trace_ratio(
    operator: Operator,
    kernel: &Kernel<f64>,
    mu: &DiscreteMeasure<f64>,
    p: f64,
    q: f64,
    grid: &CellGrid<f64>,
    spec: &TrialSpec,
) -> Result<TraceReport, LabError> {
    if !(p > 1.0 && q > 1.0 && p.is_finite() && q.is_finite()) {
        return Err(LabError::Config(format!("exponents must lie in (1, ∞), got p = {p}, q = {q}")));
    }
    let kinds: Vec<(TrialKind, usize)> = (0..spec.bandlimited)
        .map(|i| (TrialKind::Bandlimited, i))
        .chain((0..spec.bumps).map(|i| (TrialKind::Bump, i)))
        .chain(spec.extremal.then_some((TrialKind::Extremal, 0)))
        .collect();
    if kinds.is_empty() {
        return Err(LabError::Config("trial family is empty".into()));
    }
    let report = |trials: Vec<TrialRatio>| {
        let max = trials.iter().map(|t| t.ratio).fold(0.0, f64::max);
        let mean = trials.iter().map(|t| t.ratio).sum::<f64>() / trials.len() as f64;
        TraceReport { operator, p, q, grid: *grid, trials, max, mean }
    };
    if !(mu.total() > 0.0) {
        return Ok(report(kinds.into_iter().map(|(kind, index)| TrialRatio { kind, index, ratio: 0.0 }).collect()));
    }
    let set = CompactSetApprox::custom(mu.atoms().map(|a| (a.t, a.x.to_vec())).collect())?;
    let a = assemble(operator, kernel, &set, grid)?;
    let weights = mu.weights();
    let centres: Vec<(f64, f64)> = (0..a.cols)
        .map(|c| {
            let (t0, t1, x0, x1) = grid.cell(operator, c);
            ((t0 + t1) / 2.0, (x0 + x1) / 2.0)
        })
        .collect();

    let (lo, hi) = mu.atoms().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, u), at| (l.min(at.x[0]), u.max(at.x[0])));
    let pad = 0.1 * (hi - lo) + grid.h;
    let horizon = match operator {
        Operator::R => 1.0,
        Operator::S => grid.horizon,
    };
    let ranges = BumpRanges {
        t0: (0.0, horizon),
        st: (grid.dt().min(horizon) * 2.0, horizon),
        x0: (lo - pad, hi + pad),
        sx: (2.0 * grid.h, grid.half_width / 2.0),
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let waves: Vec<Wave> = (0..spec.bandlimited)
        .map(|_| Wave::random(&mut rng, 6, std::f64::consts::PI / (4.0 * grid.h), std::f64::consts::PI / (4.0 * grid.dt())))
        .collect();
    let bumps: Vec<_> = (0..spec.bumps).map(|_| random_bump(&mut rng, &ranges, 1)).collect();
    let p_dual = conjugate(p);

    let trials = kinds
        .into_par_iter()
        .map(|(kind, index)| {
            let h: Vec<f64> = match kind {
                TrialKind::Bandlimited => centres.iter().map(|(t, x)| waves[index].eval(*t, *x)).collect(),
                TrialKind::Bump => centres
                    .iter()
                    .map(|(t, x)| {
                        let b = &bumps[index];
                        match operator {
                            Operator::R => b.a * b.eval_space(&[*x]),
                            Operator::S => b.eval(*t, &[*x]),
                        }
                    })
                    .collect(),
                TrialKind::Extremal => a.adjoint(weights).into_iter().map(|v| v.max(0.0).powf(p_dual - 1.0)).collect(),
            };
            TrialRatio { kind, index, ratio: ratio(&a, weights, &h, p, q) }
        })
        .collect();
    Ok(report(trials))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;

    fn cauchy() -> Kernel<f64> {
        Kernel::new(&KernelSpec::new(0.5, 1).unwrap()).unwrap()
    }

    #[test]
    fn zero_measure_gives_zero_ratios() {
        let grid = CellGrid::new(2.0, 0.25, 1.0, 4).unwrap();
        let mu = DiscreteMeasure::<f64>::new(1);
        let r = trace_ratio(Operator::R, &cauchy(), &mu, 2.0, 3.0, &grid, &TrialSpec::default()).unwrap();
        assert_eq!(r.trials.len(), 49);
        assert!(r.trials.iter().all(|t| t.ratio == 0.0));
        let none = TrialSpec { bandlimited: 0, bumps: 0, extremal: false, seed: 0 };
        assert!(trace_ratio(Operator::R, &cauchy(), &mu, 2.0, 3.0, &grid, &none).is_err());
    }

    #[test]
    fn extremal_attains_the_dirac_constant() {
        // for one atom the constant is w^{1/q} ‖row‖_{p'} exactly (Hölder)
        let k = cauchy();
        let mu = DiscreteMeasure::dirac(0.5, vec![0.1], 2.0).unwrap();
        let grid = auto_grid(Operator::R, &mu, 0.5, 512).unwrap();
        let (p, q) = (1.5, 3.0);
        let r = trace_ratio(Operator::R, &k, &mu, p, q, &grid, &TrialSpec::default()).unwrap();
        let set = CompactSetApprox::custom(vec![(0.5, vec![0.1])]).unwrap();
        let a = assemble(Operator::R, &k, &set, &grid).unwrap();
        let exact = 2f64.powf(1.0 / q) * a.norm_pow(a.row(0), 3.0).powf(1.0 / 3.0);
        let ext = r.trials.iter().find(|t| t.kind == TrialKind::Extremal).unwrap();
        assert!((ext.ratio - exact).abs() < 1e-12 * exact);
        assert!((r.max - exact).abs() < 1e-12 * exact);
    }

    #[test]
    fn seeded_and_homogeneous() {
        let k = cauchy();
        let mu = DiscreteMeasure::from_atoms(1, [(0.5, vec![0.0], 1.0), (1.0, vec![0.5], 2.0)]).unwrap();
        for op in [Operator::R, Operator::S] {
            let grid = auto_grid(op, &mu, 0.5, 512).unwrap();
            let spec = TrialSpec { bandlimited: 4, bumps: 4, extremal: true, seed: 3 };
            let a = trace_ratio(op, &k, &mu, 1.5, 2.0, &grid, &spec).unwrap();
            assert_eq!(a, trace_ratio(op, &k, &mu, 1.5, 2.0, &grid, &spec).unwrap());
            // ratios scale by c^{1/q}
            let b = trace_ratio(op, &k, &mu.scaled(4.0), 1.5, 2.0, &grid, &spec).unwrap();
            for (x, y) in a.trials.iter().zip(&b.trials) {
                assert!((y.ratio - 2.0 * x.ratio).abs() < 1e-12 * y.ratio, "{op}");
            }
            assert!(a.trials.iter().all(|t| t.ratio > 0.0 && t.ratio <= a.max));
        }
    }
}
