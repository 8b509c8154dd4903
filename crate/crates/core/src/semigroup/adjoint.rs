use rayon::prelude::*;

use crate::kernel::Kernel;
use crate::measure::DiscreteMeasure;
use crate::scalar::Real;

use super::field::{Grid, SpaceTimeField, SpatialField};
use super::SemigroupError;

fn dist<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>().sqrt()
}

fn r_star_at<T: Real>(mu: &DiscreteMeasure<T>, x: &[T], kernel: &Kernel<T>) -> T {
    mu.atoms().map(|a| a.w * kernel.density(a.t, dist(x, a.x))).sum()
}

fn s_star_at<T: Real>(mu: &DiscreteMeasure<T>, t: T, x: &[T], kernel: &Kernel<T>) -> T {
    mu.atoms().filter(|a| a.t > t).map(|a| a.w * kernel.density(a.t - t, dist(x, a.x))).sum()
}

/// `R_α^* μ(x) = Σ_i w_i K_{t_i}(x − x_i)` at each point.
pub fn adjoint_r<T: Real>(mu: &DiscreteMeasure<T>, points: &[Vec<T>], kernel: &Kernel<T>) -> Vec<T> {
    points.par_iter().map(|x| r_star_at(mu, x, kernel)).collect()
}

/// `S_α^* μ(t, x) = Σ_{t_i > t} w_i K_{t_i − t}(x − x_i)`; atoms at `t_i = t`
/// contribute nothing.
pub fn adjoint_s<T: Real>(mu: &DiscreteMeasure<T>, queries: &[(T, Vec<T>)], kernel: &Kernel<T>) -> Vec<T> {
    queries.par_iter().map(|(t, x)| s_star_at(mu, *t, x, kernel)).collect()
}

/// [`adjoint_r`] on every grid node.
pub fn adjoint_r_grid<T: Real>(mu: &DiscreteMeasure<T>, grid: Grid<T>, kernel: &Kernel<T>) -> SpatialField<T> {
    let values = (0..grid.len()).into_par_iter().map(|i| r_star_at(mu, &grid.point(i), kernel)).collect();
    SpatialField { grid, values }
}

/// [`adjoint_s`] on every node of `[0, horizon] × grid`.
pub fn adjoint_s_grid<T: Real>(
    mu: &DiscreteMeasure<T>,
    grid: Grid<T>,
    horizon: T,
    steps: usize,
    kernel: &Kernel<T>,
) -> Result<SpaceTimeField<T>, SemigroupError> {
    let times = SpaceTimeField::<T>::time_axis(horizon, steps)?;
    let n = grid.len();
    let values = (0..n * times.len())
        .into_par_iter()
        .map(|k| s_star_at(mu, times[k / n], &grid.point(k % n), kernel))
        .collect();
    Ok(SpaceTimeField { grid, times, values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;
    use crate::semigroup::{apply_r, apply_s};

    fn poisson() -> Kernel<f64> {
        Kernel::new(&KernelSpec::new(0.5, 1).unwrap()).unwrap()
    }

    #[test]
    fn examples() {
        let k = poisson();
        let zero = DiscreteMeasure::new(1);
        assert_eq!(adjoint_r(&zero, &[vec![0.3]], &k), vec![0.0]);
        let d = DiscreteMeasure::dirac(1.0, vec![0.0], 1.0).unwrap();
        assert!((adjoint_r(&d, &[vec![0.0]], &k)[0] - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
        let two = DiscreteMeasure::from_atoms(1, vec![(1.0, [0.0], 1.0), (2.0, [1.0], 1.0)]).unwrap();
        let d2 = DiscreteMeasure::dirac(2.0, vec![1.0], 1.0).unwrap();
        let pts = [vec![0.5], vec![-3.0]];
        let (a, b, c) = (adjoint_r(&two, &pts, &k), adjoint_r(&d, &pts, &k), adjoint_r(&d2, &pts, &k));
        for i in 0..2 {
            assert!((a[i] - b[i] - c[i]).abs() < 1e-15);
        }
        let s = DiscreteMeasure::dirac(2.0, vec![0.0], 1.0).unwrap();
        let v = adjoint_s(&s, &[(1.0, vec![0.0]), (2.0, vec![0.0]), (3.0, vec![0.0])], &k);
        assert!((v[0] - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
        assert_eq!(&v[1..], &[0.0, 0.0]);
    }

    #[test]
    fn pairing_with_r() {
        // Σ w_i (R f)(t_i, x_i) = ⟨f, R* μ⟩ with atoms on grid nodes
        let spec = KernelSpec::new(0.5, 1).unwrap();
        let k = Kernel::new(&spec).unwrap();
        let grid = Grid::<f64>::new(1, 64.0, 1.0 / 8.0).unwrap();
        let f = SpatialField::from_fn(grid, |x| if x[0].abs() < 3.0 { 1.0 + 0.5 * (2.0 * x[0]).sin() } else { 0.0 });
        let mu = DiscreteMeasure::from_atoms(1, vec![(0.5, [0.25], 1.0), (1.0, [-1.0], 2.0), (2.0, [4.0], 0.5)]).unwrap();
        let lhs: f64 = mu
            .atoms()
            .map(|a| a.w * apply_r(&f, a.t, &spec).unwrap().values[grid.nearest(a.x).unwrap()])
            .sum();
        let rstar = adjoint_r_grid(&mu, grid, &k);
        let rhs: f64 = f.values.iter().zip(&rstar.values).map(|(a, b)| a * b).sum::<f64>() * grid.h;
        assert!((lhs - rhs).abs() < 2e-3 * lhs, "{lhs} vs {rhs}");
    }

    #[test]
    fn pairing_with_s() {
        let spec = KernelSpec::new(0.5, 1).unwrap();
        let k = Kernel::new(&spec).unwrap();
        let grid = Grid::<f64>::new(1, 64.0, 1.0 / 8.0).unwrap();
        let steps = 64;
        let g = SpaceTimeField::from_fn(grid, 2.0, steps, |t, x| if x[0].abs() < 2.0 { (1.0 + t) * (1.0 - x[0].abs() / 2.0) } else { 0.0 })
            .unwrap();
        let u = apply_s(&g, &spec).unwrap();
        let atoms: Vec<(f64, [f64; 1], f64)> = vec![(1.0, [0.5], 1.0), (1.5, [-1.0], 2.0), (2.0, [0.0], 0.5)];
        let mu = DiscreteMeasure::from_atoms(1, atoms.clone()).unwrap();
        let dt = g.dt();
        let lhs: f64 = atoms
            .iter()
            .map(|(t, x, w)| w * u.slice((t / dt).round() as usize)[grid.nearest(x).unwrap()])
            .sum();
        let sstar = adjoint_s_grid(&mu, grid, 2.0, steps, &k).unwrap();
        let tw = g.time_weights();
        let mut rhs = 0.0;
        for m in 0..=steps {
            rhs += tw[m] * g.slice(m).iter().zip(sstar.slice(m)).map(|(a, b)| a * b).sum::<f64>() * grid.h;
        }
        // the kernel at small lags is unresolved on the grid; agreement is at quadrature level
        assert!((lhs - rhs).abs() < 2e-2 * lhs, "{lhs} vs {rhs}");
    }
}
