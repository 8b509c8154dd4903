//! The three regime conditions of the trace inequality, evaluated on a
//! finite declared family of probes.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::capacity::{assemble, solve, CellGrid, CompactSetApprox, SolverControls};
use crate::geometry::{ParabolicBall, Region};
use crate::kernel::Kernel;
use crate::measure::DiscreteMeasure;
use crate::potentials::wolff;
use crate::semigroup::{conjugate, Operator};

use super::LabError;

/// Balls `B_r(t0, x0)` with `r` from `radii`, `x0 ∈ x_step·r·ℤ^n` and
/// `t0 ∈ t_step·r^{2α}·ℕ`, restricted to those that can meet the support of
/// `μ`. For `R` only `t0 = 0` is used: `R_α h(t, ·)` sees `h` at the scale
/// `t^{1/2α}`, the scale of the balls based on the initial slice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BallLattice {
    pub radii: Vec<f64>,
    pub t_step: f64,
    pub x_step: f64,
}

impl BallLattice {
    /// `per_octave` radii per factor of two from `r_min` up to `r_max`.
    pub fn dyadic(r_min: f64, r_max: f64, per_octave: usize) -> Self {
        let k = per_octave.max(1) as f64;
        let count = ((r_max / r_min).log2() * k).floor().max(0.0) as usize;
        let radii = (0..=count).map(|j| r_min * 2f64.powf(j as f64 / k)).collect();
        Self { radii, t_step: 0.25, x_step: 0.25 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BallSup {
    /// `sup μ(B_r)/r^{βq/p}` over the lattice.
    pub value: f64,
    pub r: f64,
    pub t0: f64,
    pub x0: Vec<f64>,
    pub balls: usize,
}

/// `β = n` for `R`, `n + 2α(1 − p)` for `S`.
fn beta(operator: Operator, dim: usize, p: f64, alpha: f64) -> f64 {
    match operator {
        Operator::R => dim as f64,
        Operator::S => dim as f64 + 2.0 * alpha * (1.0 - p),
    }
}

fn axis(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let (a, b) = ((lo / step).ceil() as i64, (hi / step).floor() as i64);
    (a..=b).map(|k| k as f64 * step).collect()
}

/// Best ball at one radius: (value, t0, x0, index set, count).
fn best_at_radius(operator: Operator, mu: &DiscreteMeasure<f64>, r: f64, alpha: f64, exponent: f64, lat: &BallLattice) -> (f64, f64, Vec<f64>, Vec<usize>, usize) {
    let n = mu.dim();
    let h = r.powf(2.0 * alpha);
    let (t_min, t_max) = mu.time_range().expect("nonempty measure");
    let times = match operator {
        Operator::R => vec![0.0],
        Operator::S => axis((t_min - 2.0 * h).max(0.0), t_max - h, lat.t_step * h),
    };
    let mut lo = vec![f64::INFINITY; n];
    let mut hi = vec![f64::NEG_INFINITY; n];
    for a in mu.atoms() {
        for d in 0..n {
            lo[d] = lo[d].min(a.x[d]);
            hi[d] = hi[d].max(a.x[d]);
        }
    }
    let axes: Vec<Vec<f64>> = (0..n).map(|d| axis(lo[d] - r, hi[d] + r, lat.x_step * r)).collect();
    let scale = r.powf(-exponent);
    let mut best = (0.0, 0.0, vec![0.0; n], Vec::new(), 0usize);
    let mut count = 0;
    for &t0 in &times {
        let live: Vec<usize> = (0..mu.len()).filter(|&i| mu.atom(i).t > t0 + h && mu.atom(i).t < t0 + 2.0 * h).collect();
        let total: usize = axes.iter().map(Vec::len).product();
        count += total;
        if live.is_empty() {
            continue;
        }
        for flat in 0..total {
            let mut rem = flat;
            let x0: Vec<f64> = axes
                .iter()
                .rev()
                .map(|ax| {
                    let v = ax[rem % ax.len()];
                    rem /= ax.len();
                    v
                })
                .collect::<Vec<_>>()
                .into_iter()
                .rev()
                .collect();
            let ball = ParabolicBall::new(t0, x0, r, alpha);
            let inside: Vec<usize> = live.iter().copied().filter(|&i| ball.contains(mu.atom(i).t, mu.atom(i).x)).collect();
            let mass: f64 = inside.iter().map(|&i| mu.atom(i).w).sum();
            if mass * scale > best.0 {
                best = (mass * scale, t0, ball.x0, inside, 0);
            }
        }
    }
    best.4 = count;
    best
}

/// Ball condition `sup μ(B)/r^{βq/p}` over the lattice, `β` as for the
/// Wolff potential of `operator`.
pub fn ball_sup(operator: Operator, mu: &DiscreteMeasure<f64>, p: f64, q: f64, alpha: f64, lattice: &BallLattice) -> BallSup {
    if mu.is_empty() {
        return BallSup { value: 0.0, r: f64::NAN, t0: f64::NAN, x0: vec![], balls: 0 };
    }
    let exponent = beta(operator, mu.dim(), p, alpha) * q / p;
    let per: Vec<_> = lattice.radii.par_iter().map(|&r| (r, best_at_radius(operator, mu, r, alpha, exponent, lattice))).collect();
    let balls = per.iter().map(|(_, b)| b.4).sum();
    let mut out = BallSup { value: 0.0, r: f64::NAN, t0: f64::NAN, x0: vec![], balls };
    for (r, (v, t0, x0, _, _)) in per {
        if v > out.value {
            out = BallSup { value: v, r, t0, x0, balls };
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactSup {
    /// `max μ(K)/C(K)` with `C` the geometric midpoint of the bracket.
    pub value: f64,
    /// Same with `C` replaced by its primal (upper) bound.
    pub lower: f64,
    /// Same with `C` replaced by its dual (lower) bound.
    pub upper: f64,
    pub best: String,
    pub candidates: usize,
}

/// `sup μ(K)/C_p(K)` over candidate compacts made of atoms of `μ`: the whole
/// support, the atoms of the best lattice ball at each radius, and single
/// atoms (the heaviest and the `singles` of largest base Wolff potential).
#[allow(clippy::too_many_arguments)]
pub fn compact_sup(
    operator: Operator,
    kernel: &Kernel<f64>,
    mu: &DiscreteMeasure<f64>,
    p: f64,
    lattice: &BallLattice,
    singles: usize,
    grid: &CellGrid<f64>,
    ctl: &SolverControls<f64>,
) -> Result<CompactSup, LabError> {
    let alpha = kernel.alpha();
    let support: Vec<usize> = (0..mu.len()).filter(|&i| mu.atom(i).w > 0.0).collect();
    if support.is_empty() {
        return Ok(CompactSup { value: 0.0, lower: 0.0, upper: 0.0, best: String::new(), candidates: 0 });
    }
    let mut family: Vec<(String, Vec<usize>)> = vec![("support".into(), support.clone())];
    let exponent = beta(operator, mu.dim(), p, alpha);
    let balls: Vec<_> = lattice.radii.par_iter().map(|&r| (r, best_at_radius(operator, mu, r, alpha, exponent, lattice))).collect();
    for (r, (v, t0, x0, idx, _)) in balls {
        if v > 0.0 {
            family.push((format!("ball r={r} t0={t0} x0={x0:?}"), idx));
        }
    }
    let heaviest = support.iter().copied().fold(support[0], |b, i| if mu.atom(i).w > mu.atom(b).w { i } else { b });
    family.push((format!("atom {heaviest} (heaviest)"), vec![heaviest]));
    let potential: Vec<f64> = support
        .iter()
        .map(|&i| wolff(operator, mu, p, 0.0, mu.atom(i).x, alpha).map_or(0.0, |w| w.value))
        .collect();
    let mut order: Vec<usize> = (0..support.len()).collect();
    order.sort_by(|&a, &b| potential[b].total_cmp(&potential[a]).then(a.cmp(&b)));
    for &k in order.iter().take(singles) {
        family.push((format!("atom {} (wolff)", support[k]), vec![support[k]]));
    }
    let mut seen = std::collections::BTreeSet::new();
    family.retain(|(_, idx)| {
        let mut key = idx.clone();
        key.sort_unstable();
        seen.insert(key)
    });

    let set = CompactSetApprox::custom(support.iter().map(|&i| (mu.atom(i).t, mu.atom(i).x.to_vec())).collect())?;
    let a = assemble(operator, kernel, &set, grid)?;
    let row_of: std::collections::HashMap<usize, usize> = support.iter().enumerate().map(|(r, &i)| (i, r)).collect();
    let results: Vec<_> = family
        .par_iter()
        .map(|(label, idx)| {
            let rows: Vec<usize> = idx.iter().map(|i| row_of[i]).collect();
            let est = solve(&a.select_rows(&rows), p, ctl)?;
            let mass: f64 = idx.iter().map(|&i| mu.atom(i).w).sum();
            Ok((label.clone(), mass / est.midpoint(), mass / est.primal, mass / est.dual))
        })
        .collect::<Result<_, LabError>>()?;
    let mut out = CompactSup { value: 0.0, lower: 0.0, upper: 0.0, best: String::new(), candidates: results.len() };
    for (label, mid, lo, hi) in results {
        if mid > out.value {
            out.value = mid;
            out.best = label;
        }
        out.lower = out.lower.max(lo);
        out.upper = out.upper.max(hi);
    }
    Ok(out)
}

/// `Σ_i w_i P(0, x_i)^{q(p−1)/(p−q)}` with `P` the Wolff potential of
/// `operator` anchored on the initial slice below each atom.
pub fn wolff_integral(operator: Operator, mu: &DiscreteMeasure<f64>, p: f64, q: f64, alpha: f64) -> Result<f64, LabError> {
    if p == q {
        return Err(LabError::Config(format!("the Wolff condition needs p ≠ q, got p = q = {p}")));
    }
    let e = q * (p - 1.0) / (p - q);
    let terms: Vec<f64> = (0..mu.len())
        .into_par_iter()
        .map(|i| {
            let a = mu.atom(i);
            let w = wolff(operator, mu, p, 0.0, a.x, alpha)?;
            Ok(if a.w > 0.0 { a.w * w.value.powf(e) } else { 0.0 })
        })
        .collect::<Result<_, LabError>>()?;
    Ok(terms.into_iter().sum())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionValues {
    pub ball_sup: BallSup,
    /// Computed when a cell grid is supplied.
    pub compact_sup: Option<CompactSup>,
    /// Computed for `p > q`.
    pub wolff_integral: Option<f64>,
    /// `p'`, reported for the homogeneity exponents.
    pub p_dual: f64,
}

/// All conditions that make sense for `(p, q)`.
#[allow(clippy::too_many_arguments)]
pub fn condition_values(
    operator: Operator,
    kernel: &Kernel<f64>,
    mu: &DiscreteMeasure<f64>,
    p: f64,
    q: f64,
    lattice: &BallLattice,
    compact: Option<(&CellGrid<f64>, &SolverControls<f64>)>,
) -> Result<ConditionValues, LabError> {
    let alpha = kernel.alpha();
    let ball_sup = ball_sup(operator, mu, p, q, alpha, lattice);
    let compact_sup = match compact {
        Some((grid, ctl)) => Some(compact_sup(operator, kernel, mu, p, lattice, 8, grid, ctl)?),
        None => None,
    };
    let wolff_integral = if p > q { Some(wolff_integral(operator, mu, p, q, alpha)?) } else { None };
    Ok(ConditionValues { ball_sup, compact_sup, wolff_integral, p_dual: conjugate(p) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;
    use crate::potentials::wolff_r;

    #[test]
    fn dirac_ball_sup_and_wolff_integral() {
        let alpha = 0.5;
        let mu = DiscreteMeasure::dirac(1.0, vec![0.0], 2.0).unwrap();
        let lat = BallLattice::dyadic(0.25, 4.0, 4);
        let (p, q) = (2.0, 3.0);
        let b = ball_sup(Operator::R, &mu, p, q, alpha, &lat);
        // smallest lattice radius with a ball around t = 1 is r = 2^{-3/4} (r > t/2 is needed)
        let r = 2f64.powf(-0.75);
        assert!((b.r - r).abs() < 1e-12, "{b:?}");
        assert!((b.value - 2.0 * r.powf(-1.5)).abs() < 1e-12);
        // w · P(0, x)^{q(p−1)/(p−q)} with P from the exact sweep
        let (p, q) = (3.0, 2.0);
        let pw = wolff_r(&mu, p, 0.0, &[0.0], alpha, None).unwrap().value;
        let e = q * (p - 1.0) / (p - q);
        let wi = wolff_integral(Operator::R, &mu, p, q, alpha).unwrap();
        assert!((wi - 2.0 * pw.powf(e)).abs() < 1e-12 * wi);
        assert!(wolff_integral(Operator::R, &mu, 2.0, 2.0, alpha).is_err());
    }

    #[test]
    fn homogeneity() {
        let alpha = 0.5;
        let mu = DiscreteMeasure::from_atoms(1, [(0.5, vec![0.0], 1.0), (0.8, vec![0.3], 0.5), (2.0, vec![-1.0], 2.0)]).unwrap();
        let lat = BallLattice::dyadic(0.125, 2.0, 2);
        let c = 3.0;
        let (p, q) = (3.0, 1.5);
        let a = ball_sup(Operator::R, &mu, p, q, alpha, &lat).value;
        let b = ball_sup(Operator::R, &mu.scaled(c), p, q, alpha, &lat).value;
        assert!((b - c * a).abs() < 1e-12 * b);
        let e = 1.0 + (conjugate(p) - 1.0) * q * (p - 1.0) / (p - q);
        let a = wolff_integral(Operator::R, &mu, p, q, alpha).unwrap();
        let b = wolff_integral(Operator::R, &mu.scaled(c), p, q, alpha).unwrap();
        assert!((b - c.powf(e) * a).abs() < 1e-10 * b);
    }

    #[test]
    fn compact_sup_of_a_dirac_is_its_trace_constant() {
        // C({z}) = ‖row‖_{p'}^{−p}, so μ(K)/C(K) = w ‖row‖_{p'}^p
        let k = Kernel::new(&KernelSpec::new(0.5, 1).unwrap()).unwrap();
        let mu = DiscreteMeasure::dirac(0.5, vec![0.0], 1.5).unwrap();
        let grid = super::super::auto_grid(Operator::R, &mu, 0.5, 512).unwrap();
        let lat = BallLattice::dyadic(0.25, 1.0, 2);
        let ctl = SolverControls::default();
        let cs = compact_sup(Operator::R, &k, &mu, 2.0, &lat, 4, &grid, &ctl).unwrap();
        assert_eq!(cs.candidates, 1);
        let set = CompactSetApprox::custom(vec![(0.5, vec![0.0])]).unwrap();
        let a = assemble(Operator::R, &k, &set, &grid).unwrap();
        let exact = 1.5 * a.norm_pow(a.row(0), 2.0);
        assert!((cs.value - exact).abs() < 1e-8 * exact, "{} {exact}", cs.value);
        assert!(cs.lower <= cs.value && cs.value <= cs.upper);
    }
}
