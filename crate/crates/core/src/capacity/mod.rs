//! Discretized `L^p` capacities of `R_α` and `S_α` with certified brackets.
//!
//! A compact set is represented by finitely many samples and the trial
//! functions `h` are piecewise constant on a [`CellGrid`]. The computed
//! number is the capacity of that finite problem; [`solve`] returns a
//! feasible primal `h` and a feasible dual measure, whose objectives bracket
//! it. Capacity solves are one-dimensional in space.

mod coupling;
mod sets;
mod solver;
mod threshold;

pub use coupling::{assemble, CellGrid, Coupling};
pub use sets::{CompactSetApprox, SetTag};
pub use solver::{solve, CapacityEstimate, SolverControls};
pub use threshold::{mass_threshold_capacity, MassThreshold};

use serde::Serialize;
use thiserror::Error;

use crate::geometry::ParabolicBall;
use crate::kernel::{Kernel, KernelError};
use crate::measure::{DiscreteMeasure, MeasureError};
use crate::scalar::Real;
use crate::semigroup::{s_regime_limit, Operator, SemigroupError, SpaceTimeField};

#[derive(Debug, Error)]
pub enum CapacityError {
    #[error("p must lie in (1, ∞), got {0}")]
    Exponent(f64),
    #[error("p = {p} is outside the S range 1 < p < {limit}")]
    SRegime { p: f64, limit: f64 },
    #[error("the sampled set is empty")]
    EmptySet,
    #[error("sample time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("capacity solves are one-dimensional, got dimension {0}")]
    UnsupportedDim(usize),
    #[error("sample {index} does not couple to any grid cell; enlarge the grid")]
    ZeroRow { index: usize },
    #[error("solver produced no feasible bound")]
    Degenerate,
    #[error("lambda must lie in (0, {total}], got {lambda}")]
    Lambda { lambda: f64, total: f64 },
    #[error("grid: {0}")]
    Grid(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
}

pub(crate) fn check_p<T: Real>(operator: Operator, p: T, alpha: T, dim: usize) -> Result<(), CapacityError> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(CapacityError::Exponent(p.as_f64()));
    }
    if operator == Operator::S {
        let limit = s_regime_limit(alpha, dim);
        if !(p < limit) {
            return Err(CapacityError::SRegime { p: p.as_f64(), limit: limit.as_f64() });
        }
    }
    Ok(())
}

/// Assembles the coupling for `set` and solves.
pub fn capacity<T: Real>(
    operator: Operator,
    kernel: &Kernel<T>,
    set: &CompactSetApprox<T>,
    p: T,
    grid: &CellGrid<T>,
    ctl: &SolverControls<T>,
) -> Result<CapacityEstimate<T>, CapacityError> {
    check_p(operator, p, kernel.alpha(), set.dim())?;
    let a = assemble(operator, kernel, set, grid)?;
    solve(&a, p, ctl)
}

/// Grid sized to a ball: for `R` cells of width `r/16` out to `|x0| + 8r`;
/// for `S` cells of width `r/8` out to `|x0| + 4r` and 24 time cells up to
/// the end of the ball's time window.
pub fn ball_grid<T: Real>(operator: Operator, ball: &ParabolicBall<T>) -> CellGrid<T> {
    let (h, reach) = match operator {
        Operator::R => (ball.r / T::lit(16.0), T::lit(8.0)),
        Operator::S => (ball.r / T::lit(8.0), T::lit(4.0)),
    };
    let l = ((ball.x0[0].abs() + reach * ball.r) / h).ceil() * h;
    CellGrid { half_width: l, h, horizon: ball.time_window().1, steps: 24 }
}

/// Capacity of a sampled parabolic ball on its [`ball_grid`].
pub fn ball_capacity<T: Real>(
    operator: Operator,
    kernel: &Kernel<T>,
    ball: &ParabolicBall<T>,
    p: T,
    samples: (usize, usize),
    ctl: &SolverControls<T>,
) -> Result<CapacityEstimate<T>, CapacityError> {
    let set = CompactSetApprox::ball(ball, samples.0, samples.1)?;
    capacity(operator, kernel, &set, p, &ball_grid(operator, ball), ctl)
}

/// The equilibrium measure `μ_K = C^{1/p'} μ` and three expressions that
/// all equal the capacity `C` at the optimum: `μ_K(K)`, `‖T*μ_K‖_{p'}^{p'}`
/// and `∫ T g_0 dμ_K`. Here `μ` is the dual witness, `g_0` the primal witness
/// (at the optimum `g_0 = (T*μ_K)^{p'−1}`) and `C` the geometric midpoint
/// of the bracket.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Equilibrium<T> {
    pub estimate: CapacityEstimate<T>,
    pub capacity: T,
    #[serde(skip)]
    pub mu_k: DiscreteMeasure<T>,
    pub mass: T,
    pub energy: T,
    pub pairing: T,
}

impl<T: Real> Equilibrium<T> {
    /// Largest pairwise relative discrepancy among the three identities.
    pub fn spread(&self) -> T {
        let v = [self.mass, self.energy, self.pairing];
        let hi = v.iter().copied().fold(T::neg_infinity(), T::max);
        let lo = v.iter().copied().fold(T::infinity(), T::min);
        (hi - lo) / hi
    }
}

pub fn equilibrium_measure<T: Real>(
    operator: Operator,
    kernel: &Kernel<T>,
    set: &CompactSetApprox<T>,
    p: T,
    grid: &CellGrid<T>,
    ctl: &SolverControls<T>,
) -> Result<Equilibrium<T>, CapacityError> {
    check_p(operator, p, kernel.alpha(), set.dim())?;
    let a = assemble(operator, kernel, set, grid)?;
    let estimate = solve(&a, p, ctl)?;
    let q = p / (p - T::one());
    let capacity = estimate.midpoint();
    let scale = capacity.powf(T::one() / q);
    let weights: Vec<T> = estimate.witness_mu.iter().map(|w| *w * scale).collect();
    let mass = weights.iter().copied().sum();
    let energy = a.norm_pow(&a.adjoint(&weights), q);
    let pairing = a.apply(&estimate.witness_h).iter().zip(&weights).map(|(g, w)| *g * *w).sum();
    let mu_k = DiscreteMeasure::from_atoms(1, set.points.iter().zip(&weights).map(|((t, x), w)| (*t, x.clone(), *w)))?;
    Ok(Equilibrium { estimate, capacity, mu_k, mass, energy, pairing })
}

/// `S g` sampled on a coarsened node set, ready for superlevel queries.
#[derive(Debug, Clone)]
pub struct SuperlevelProblem<T> {
    pub grid: CellGrid<T>,
    pub candidates: CompactSetApprox<T>,
    /// `S g` at each candidate, computed with the same coupling the
    /// capacity solves use.
    pub values: Vec<T>,
    /// `g` on the trial cells: the mean of its two time nodes.
    pub g_cells: Vec<T>,
    coupling: Coupling<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Superlevel<T> {
    pub lambda: T,
    pub samples: usize,
    /// `None` when the superlevel set is empty (capacity zero).
    pub estimate: Option<CapacityEstimate<T>>,
}

impl<T: Real> Superlevel<T> {
    pub fn primal(&self) -> T {
        self.estimate.as_ref().map_or(T::zero(), |e| e.primal)
    }

    pub fn dual(&self) -> T {
        self.estimate.as_ref().map_or(T::zero(), |e| e.dual)
    }
}

impl<T: Real> SuperlevelProblem<T> {
    /// Every `coarsen`-th node with `t > 0` of the field's grid is a
    /// candidate sample.
    pub fn new(kernel: &Kernel<T>, g: &SpaceTimeField<T>, coarsen: usize) -> Result<Self, CapacityError> {
        if g.grid.dim != 1 {
            return Err(CapacityError::UnsupportedDim(g.grid.dim));
        }
        let grid = CellGrid::new(g.grid.half_width, g.grid.h, g.horizon(), g.steps())?;
        let nx = g.grid.len();
        let step = coarsen.max(1);
        let mut points = Vec::new();
        for m in (step..=g.steps()).step_by(step) {
            for i in (0..nx).step_by(step) {
                points.push((g.times[m], vec![g.grid.coord(i)]));
            }
        }
        let candidates = CompactSetApprox::new(points, SetTag::Superlevel)?;
        let coupling = assemble(Operator::S, kernel, &candidates, &grid)?;
        let mut g_cells = Vec::with_capacity(grid.cells(Operator::S));
        for m in 0..g.steps() {
            let (a, b) = (g.slice(m), g.slice(m + 1));
            g_cells.extend(a.iter().zip(b).map(|(u, v)| (*u + *v) / T::lit(2.0)));
        }
        let values = coupling.apply(&g_cells);
        Ok(Self { grid, candidates, values, g_cells, coupling })
    }

    /// `Σ vol |g|^p` on the trial cells.
    pub fn g_norm_pow(&self, p: T) -> T {
        self.coupling.norm_pow(&self.g_cells, p)
    }

    pub fn max_value(&self) -> T {
        self.values.iter().copied().fold(T::zero(), T::max)
    }

    /// Capacity of `{S g ≥ λ}` among the candidates.
    pub fn capacity(&self, lambda: T, p: T, ctl: &SolverControls<T>) -> Result<Superlevel<T>, CapacityError> {
        let keep: Vec<usize> = (0..self.values.len()).filter(|&j| self.values[j] >= lambda).collect();
        if keep.is_empty() {
            return Ok(Superlevel { lambda, samples: 0, estimate: None });
        }
        let a = self.coupling.select_rows(&keep);
        Ok(Superlevel { lambda, samples: keep.len(), estimate: Some(solve(&a, p, ctl)?) })
    }
}

/// One-shot form of [`SuperlevelProblem::capacity`].
pub fn superlevel_capacity<T: Real>(
    kernel: &Kernel<T>,
    g: &SpaceTimeField<T>,
    lambda: T,
    p: T,
    coarsen: usize,
    ctl: &SolverControls<T>,
) -> Result<Superlevel<T>, CapacityError> {
    check_p(Operator::S, p, kernel.alpha(), 1)?;
    if !(lambda > T::zero()) {
        return Err(CapacityError::Lambda { lambda: lambda.as_f64(), total: f64::INFINITY });
    }
    SuperlevelProblem::new(kernel, g, coarsen)?.capacity(lambda, p, ctl)
}
