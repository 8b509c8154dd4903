use rayon::prelude::*;
use serde::Serialize;

use crate::kernel::Kernel;
use crate::measure::DiscreteMeasure;
use crate::scalar::Real;
use crate::semigroup::Grid;
use crate::semigroup::{adjoint_r_grid, conjugate, s_regime_limit, Operator};
use crate::special;

use super::{check_exponent, wolff_r, wolff_s, PotentialError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DualityRatio<T> {
    /// `‖T*μ‖_{p'}^{p'}` on the grid.
    pub lhs: T,
    /// `Σ_i w_i P μ(0, x_i)`.
    pub rhs: T,
    pub ratio: T,
    /// Estimated `L^{p'}` mass of `T*μ` outside the grid.
    pub tail: T,
}

/// Compares `‖R*μ‖_{p'}^{p'}` with `∫ P^R μ dμ`.
///
/// The potential in the right side is evaluated at the base point `(0, x_i)`
/// below each atom: a ball `B_r(t_i, x_i)` lies strictly after `t_i`, so the
/// potential at the atom itself never sees that atom. The left side is a
/// trapezoid sum on `grid`; its far field is estimated from the kernel's
/// power-law tail and must stay below `tol · lhs`.
///
/// For `S` the adjoint of any atom has infinite `L^{p'}` norm in the regime
/// where the `S` potential is defined, and an error is returned.
pub fn wolff_duality_ratio<T: Real>(
    operator: Operator,
    mu: &DiscreteMeasure<T>,
    p: T,
    kernel: &Kernel<T>,
    grid: Grid<T>,
    tol: T,
) -> Result<DualityRatio<T>, PotentialError> {
    check_exponent(p)?;
    let alpha = kernel.alpha();
    let n = mu.dim();
    if operator == Operator::S {
        let limit = s_regime_limit(alpha, n);
        if !(p < limit) {
            return Err(PotentialError::SRegime { p: p.as_f64(), limit: limit.as_f64() });
        }
        // exercise the potential side so argument errors surface first
        wolff_s(mu, p, T::zero(), &vec![T::zero(); n], alpha)?;
        return Err(PotentialError::SingularDualNorm { p_dual: conjugate(p).as_f64() });
    }
    if kernel.dim() != n || grid.dim != n {
        return Err(PotentialError::DimensionMismatch { expected: n, got: if kernel.dim() != n { kernel.dim() } else { grid.dim } });
    }
    if mu.is_empty() || mu.total() == T::zero() {
        return Ok(DualityRatio { lhs: T::zero(), rhs: T::zero(), ratio: T::one(), tail: T::zero() });
    }
    let q = conjugate(p);
    let field = adjoint_r_grid(mu, grid, kernel);
    let lhs = field.values.iter().map(|v| v.abs().powf(q)).sum::<T>() * grid.cell_volume();

    let reach = mu.atoms().map(|a| a.x.iter().map(|v| *v * *v).sum::<T>().sqrt()).fold(T::zero(), T::max);
    let gap = grid.half_width - reach;
    if !(gap > T::zero()) {
        return Err(PotentialError::GridCoverage { tail: f64::INFINITY, tol: tol.as_f64() });
    }
    let nf = T::from_usize_lossy(n);
    let decay = (nf + T::lit(2.0) * alpha) * q;
    let c: T = kernel.tail_coefficient() * mu.atoms().map(|a| a.w * a.t).sum::<T>();
    let power_tail = special::unit_sphere_area::<T>(n)
        * c.powf(q)
        * (grid.half_width / gap).powi(n as i32 - 1)
        * gap.powf(nf - decay)
        / (decay - nf);
    // Gaussian-type kernels have no power tail; use the boundary values.
    let edge = (0..grid.len())
        .filter(|i| grid.multi_index(*i).iter().any(|j| *j == 0))
        .map(|i| field.values[i].abs())
        .fold(T::zero(), T::max);
    let edge_tail = edge.powf(q) * special::unit_sphere_area::<T>(n) * grid.half_width.powi(n as i32);
    let tail = power_tail.max(edge_tail);
    if tail > tol * lhs {
        return Err(PotentialError::GridCoverage { tail: tail.as_f64(), tol: (tol * lhs).as_f64() });
    }

    let base: Vec<usize> = (0..mu.len()).collect();
    let terms: Vec<T> = base
        .par_iter()
        .map(|&i| {
            let a = mu.atom(i);
            wolff_r(mu, p, T::zero(), a.x, alpha, None).map(|w| a.w * w.value)
        })
        .collect::<Result<_, _>>()?;
    let rhs: T = terms.into_iter().sum();
    let ratio = if rhs > T::zero() { lhs / rhs } else { T::infinity() };
    Ok(DualityRatio { lhs, rhs, ratio, tail })
}
