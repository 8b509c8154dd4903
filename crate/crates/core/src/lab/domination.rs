//! Pointwise domination `R_α^* μ ≥ c₀ M_α μ` and the `L^p` norm ratio.

use rayon::prelude::*;
use serde::Serialize;

use crate::kernel::Kernel;
use crate::measure::DiscreteMeasure;
use crate::potentials::maximal_r;
use crate::semigroup::{adjoint_r, Grid, SpatialField};

use super::LabError;

/// `c₀ = 3^{−n/2α} K_1(2^{−1/2α})`. An atom `(s, y)` of `B_r(r^{2α}, x)`
/// has `2r^{2α} < s < 3r^{2α}` and `|y − x| < r`, so by self-similarity and
/// radial monotonicity `K_s(x − y) ≥ c₀ r^{−n}`; summing over the ball gives
/// `R_α^* μ(x) ≥ c₀ M_α μ(x)`.
pub fn domination_constant(kernel: &Kernel<f64>) -> f64 {
    let inv = 1.0 / (2.0 * kernel.alpha());
    3f64.powf(-(kernel.dim() as f64) * inv) * kernel.density(1.0, 2f64.powf(-inv))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Domination {
    pub c0: f64,
    /// `min R_α^* μ / M_α μ` over the points where `M_α μ > 0`.
    pub min_ratio: f64,
    pub argmin: Vec<f64>,
    pub points: usize,
    /// `‖M_α μ‖_p / ‖R_α^* μ‖_p` on the grid.
    pub norm_ratio: f64,
}

/// Checks the domination on every node of `grid` and at the spatial
/// positions of the atoms, and compares the `L^p` norms on the grid.
pub fn maximal_domination(kernel: &Kernel<f64>, mu: &DiscreteMeasure<f64>, grid: Grid<f64>, p: f64) -> Result<Domination, LabError> {
    if grid.dim != mu.dim() || kernel.dim() != mu.dim() {
        return Err(LabError::Config(format!("grid, kernel and measure dimensions differ: {}, {}, {}", grid.dim, kernel.dim(), mu.dim())));
    }
    let alpha = kernel.alpha();
    let mut points: Vec<Vec<f64>> = grid.points().collect();
    let nodes = points.len();
    points.extend(mu.atoms().map(|a| a.x.to_vec()));
    let adj = adjoint_r(mu, &points, kernel);
    let max: Vec<f64> = points.par_iter().map(|x| maximal_r(mu, x, alpha)).collect::<Result<_, _>>()?;
    let mut min_ratio = f64::INFINITY;
    let mut argmin = Vec::new();
    for (i, (a, m)) in adj.iter().zip(&max).enumerate() {
        if *m > 0.0 && a / m < min_ratio {
            min_ratio = a / m;
            argmin = points[i].clone();
        }
    }
    let field = |v: &[f64]| SpatialField::from_values(grid, v[..nodes].to_vec());
    let norm_ratio = field(&max)?.norm_lp(p) / field(&adj)?.norm_lp(p);
    Ok(Domination { c0: domination_constant(kernel), min_ratio, argmin, points: points.len(), norm_ratio })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;

    #[test]
    fn dirac_respects_the_bound() {
        // one atom at s = 3: the worst point is |x| → 1 where M = 1 and
        // R*δ = 3/(10π), above c₀ = 1/(3.75π)
        let k = Kernel::new(&KernelSpec::new(0.5, 1).unwrap()).unwrap();
        let c0 = domination_constant(&k);
        assert!((c0 - 1.0 / (3.0 * std::f64::consts::PI * 1.25)).abs() < 1e-15);
        let mu = DiscreteMeasure::dirac(3.0, vec![0.0], 1.0).unwrap();
        let grid = Grid::new(1, 4.0, 1.0 / 64.0).unwrap();
        let d = maximal_domination(&k, &mu, grid, 2.0).unwrap();
        assert!(d.min_ratio >= c0, "{d:?}");
        assert!((d.min_ratio - 0.3 / std::f64::consts::PI).abs() < 1e-3, "{d:?}");
        assert!(d.norm_ratio > 0.0 && d.norm_ratio <= 1.0 / c0);
    }
}
