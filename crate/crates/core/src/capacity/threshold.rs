use serde::Serialize;

use crate::geometry::ParabolicBall;
use crate::kernel::Kernel;
use crate::measure::DiscreteMeasure;
use crate::potentials::wolff;
use crate::scalar::Real;
use crate::semigroup::Operator;

use super::{capacity, check_p, CapacityError, CellGrid, CompactSetApprox, SetTag, SolverControls};

/// Heuristic bracket for `inf{C(K) : μ(K) ≥ λ}` over a declared family of
/// candidate sets; not a bound on the true infimum over all compacts.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MassThreshold<T> {
    /// Smallest dual bound among the candidates.
    pub lower: T,
    /// Smallest primal bound among the candidates.
    pub upper: T,
    pub candidates: usize,
    /// Description of the candidate attaining `upper`.
    pub best: String,
}

/// Ball of radius `r` whose time window is centred on `(t, x)`.
fn ball_around<T: Real>(t: T, x: &[T], r: T, alpha: T) -> ParabolicBall<T> {
    let h = r.powf(T::lit(2.0) * alpha);
    ParabolicBall::new(t - T::lit(1.5) * h, x.to_vec(), r, alpha)
}

/// Union of small balls around the atoms in `chosen`, plus the atoms
/// themselves so that `μ(K)` counts them.
fn union_of_balls<T: Real>(mu: &DiscreteMeasure<T>, chosen: &[usize], r: T, alpha: T, samples: (usize, usize)) -> Result<CompactSetApprox<T>, CapacityError> {
    let mut parts = Vec::new();
    for &i in chosen {
        let a = mu.atom(i);
        parts.push(CompactSetApprox::new(vec![(a.t, a.x.to_vec())], SetTag::Custom)?);
        if let Ok(b) = CompactSetApprox::ball(&ball_around(a.t, a.x, r, alpha), samples.0, samples.1) {
            parts.push(b);
        }
    }
    CompactSetApprox::union(&parts)
}

/// Enclosing ball of the atoms in `chosen`, sampled, plus the atoms.
fn enclosing_ball<T: Real>(mu: &DiscreteMeasure<T>, chosen: &[usize], alpha: T, samples: (usize, usize)) -> Result<(CompactSetApprox<T>, T), CapacityError> {
    let (mut t0, mut t1, mut x0, mut x1) = (T::infinity(), T::neg_infinity(), T::infinity(), T::neg_infinity());
    for &i in chosen {
        let a = mu.atom(i);
        t0 = t0.min(a.t);
        t1 = t1.max(a.t);
        x0 = x0.min(a.x[0]);
        x1 = x1.max(a.x[0]);
    }
    let pad = T::lit(1.05);
    let r_space = (x1 - x0) / T::lit(2.0) * pad;
    let r_time = ((t1 - t0) * pad).powf(T::one() / (T::lit(2.0) * alpha));
    let r = r_space.max(r_time).max(T::lit(1e-3));
    let ball = ball_around((t0 + t1) / T::lit(2.0), &[(x0 + x1) / T::lit(2.0)], r, alpha);
    let atoms = CompactSetApprox::new(chosen.iter().map(|&i| (mu.atom(i).t, mu.atom(i).x.to_vec())).collect(), SetTag::Custom)?;
    let set = match CompactSetApprox::ball(&ball, samples.0, samples.1) {
        Ok(b) => CompactSetApprox::union(&[atoms, b])?,
        Err(_) => atoms,
    };
    Ok((set, r))
}

/// Smallest prefix of `order` whose weight reaches `lambda`.
fn prefix_reaching<T: Real>(mu: &DiscreteMeasure<T>, order: &[usize], lambda: T) -> Vec<usize> {
    let mut acc = T::zero();
    let mut out = Vec::new();
    for &i in order {
        out.push(i);
        acc += mu.atom(i).w;
        if acc >= lambda * (T::one() - T::round_off()) {
            break;
        }
    }
    out
}

/// Candidates: unions of radius-`r` balls around the heaviest atoms, the
/// same around the atoms of largest base-point Wolff potential, and the
/// enclosing ball of the heaviest atoms, each taking the fewest atoms whose
/// weight reaches `λ`.
#[allow(clippy::too_many_arguments)]
pub fn mass_threshold_capacity<T: Real>(
    operator: Operator,
    kernel: &Kernel<T>,
    mu: &DiscreteMeasure<T>,
    lambda: T,
    p: T,
    radii: &[T],
    grid: &CellGrid<T>,
    ctl: &SolverControls<T>,
) -> Result<MassThreshold<T>, CapacityError> {
    check_p(operator, p, kernel.alpha(), mu.dim())?;
    if !(lambda > T::zero()) || lambda > mu.total() {
        return Err(CapacityError::Lambda { lambda: lambda.as_f64(), total: mu.total().as_f64() });
    }
    let alpha = kernel.alpha();
    let samples = (4, 8);
    let mut heavy: Vec<usize> = (0..mu.len()).collect();
    heavy.sort_by(|&a, &b| mu.atom(b).w.partial_cmp(&mu.atom(a).w).expect("finite weights"));
    let potential: Vec<T> = (0..mu.len())
        .map(|i| wolff(operator, mu, p, T::zero(), mu.atom(i).x, alpha).map_or(T::zero(), |w| w.value))
        .collect();
    let mut by_potential: Vec<usize> = (0..mu.len()).collect();
    by_potential.sort_by(|&a, &b| potential[b].partial_cmp(&potential[a]).expect("finite potentials"));

    let mut family: Vec<(String, CompactSetApprox<T>)> = Vec::new();
    for (label, order) in [("heaviest", &heavy), ("wolff", &by_potential)] {
        let chosen = prefix_reaching(mu, order, lambda);
        for &r in radii {
            family.push((format!("{label} atoms ({}) with balls r={}", chosen.len(), r), union_of_balls(mu, &chosen, r, alpha, samples)?));
        }
    }
    let chosen = prefix_reaching(mu, &heavy, lambda);
    let (set, r) = enclosing_ball(mu, &chosen, alpha, (8, 16))?;
    family.push((format!("enclosing ball r={r} of {} atoms", chosen.len()), set));

    let mut lower = T::infinity();
    let mut upper = T::infinity();
    let mut best = String::new();
    for (label, set) in &family {
        let est = capacity(operator, kernel, set, p, grid, ctl)?;
        lower = lower.min(est.dual);
        if est.primal < upper {
            upper = est.primal;
            best = label.clone();
        }
    }
    Ok(MassThreshold { lower, upper, candidates: family.len(), best })
}
