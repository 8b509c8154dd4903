use serde::Serialize;

use crate::scalar::Real;

use super::SemigroupError;

/// Uniform periodic lattice on `[−L, L)^n`: `N = 2L/h` nodes per axis at
/// `x_j = −L + j h`, row-major with the last axis fastest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Grid<T> {
    pub dim: usize,
    pub half_width: T,
    pub h: T,
    pub nodes: usize,
}

impl<T: Real> Grid<T> {
    pub fn new(dim: usize, half_width: T, h: T) -> Result<Self, SemigroupError> {
        let bad = || SemigroupError::BadGrid { half_width: half_width.as_f64(), h: h.as_f64() };
        if !(h > T::zero() && half_width > T::zero()) || dim == 0 {
            return Err(bad());
        }
        let ratio = half_width / h;
        let k = ratio.round();
        if (ratio - k).abs() > T::lit(1e-9) * ratio.max(T::one()) || k < T::one() {
            return Err(bad());
        }
        let nodes = 2 * k.to_usize().ok_or_else(bad)?;
        Ok(Self { dim, half_width, h, nodes })
    }

    pub fn len(&self) -> usize {
        self.nodes.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Cell volume `h^n`.
    pub fn cell_volume(&self) -> T {
        self.h.powi(self.dim as i32)
    }

    pub fn coord(&self, j: usize) -> T {
        -self.half_width + T::from_usize_lossy(j) * self.h
    }

    /// Multi-index of flat index `i`.
    pub fn multi_index(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![0; self.dim];
        for a in (0..self.dim).rev() {
            out[a] = i % self.nodes;
            i /= self.nodes;
        }
        out
    }

    /// Coordinates of flat index `i`.
    pub fn point(&self, i: usize) -> Vec<T> {
        self.multi_index(i).into_iter().map(|j| self.coord(j)).collect()
    }

    pub fn points(&self) -> impl Iterator<Item = Vec<T>> + '_ {
        (0..self.len()).map(move |i| self.point(i))
    }

    /// Flat index of the node nearest to `x`, if `x` lies in the box.
    pub fn nearest(&self, x: &[T]) -> Option<usize> {
        let mut idx = 0usize;
        for v in x {
            let j = ((*v + self.half_width) / self.h).round();
            let j = j.to_usize().filter(|j| *j < self.nodes)?;
            idx = idx * self.nodes + j;
        }
        Some(idx)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialField<T> {
    pub grid: Grid<T>,
    pub values: Vec<T>,
}

impl<T: Real> SpatialField<T> {
    pub fn zeros(grid: Grid<T>) -> Self {
        Self { values: vec![T::zero(); grid.len()], grid }
    }

    pub fn from_values(grid: Grid<T>, values: Vec<T>) -> Result<Self, SemigroupError> {
        if values.len() != grid.len() {
            return Err(SemigroupError::ValueCount { expected: grid.len(), got: values.len() });
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: Grid<T>, f: impl Fn(&[T]) -> T) -> Self {
        let values = grid.points().map(|x| f(&x)).collect();
        Self { grid, values }
    }

    /// Riemann sum `∫ f`.
    pub fn integral(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.grid.cell_volume()
    }

    /// `(Σ |f|^p h^n)^{1/p}`.
    pub fn norm_lp(&self, p: T) -> T {
        (self.values.iter().map(|v| v.abs().powf(p)).sum::<T>() * self.grid.cell_volume()).powf(T::one() / p)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Largest `max_i |x_i|` over nodes with a nonzero value.
    pub fn support_reach(&self) -> T {
        let mut reach = T::zero();
        for (i, v) in self.values.iter().enumerate() {
            if *v != T::zero() {
                for x in self.grid.point(i) {
                    reach = reach.max(x.abs());
                }
            }
        }
        reach
    }
}

/// Values on `times × grid`, `times` uniform from `0` to `T`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField<T> {
    pub grid: Grid<T>,
    pub times: Vec<T>,
    pub values: Vec<T>,
}

impl<T: Real> SpaceTimeField<T> {
    /// Uniform time axis with `steps` intervals on `[0, horizon]`.
    pub fn time_axis(horizon: T, steps: usize) -> Result<Vec<T>, SemigroupError> {
        if !(horizon > T::zero()) || steps == 0 {
            return Err(SemigroupError::BadTimeAxis);
        }
        let dt = horizon / T::from_usize_lossy(steps);
        Ok((0..=steps).map(|m| T::from_usize_lossy(m) * dt).collect())
    }

    pub fn zeros(grid: Grid<T>, horizon: T, steps: usize) -> Result<Self, SemigroupError> {
        let times = Self::time_axis(horizon, steps)?;
        Ok(Self { values: vec![T::zero(); grid.len() * times.len()], grid, times })
    }

    pub fn from_fn(grid: Grid<T>, horizon: T, steps: usize, f: impl Fn(T, &[T]) -> T) -> Result<Self, SemigroupError> {
        let times = Self::time_axis(horizon, steps)?;
        let mut values = Vec::with_capacity(grid.len() * times.len());
        for &t in &times {
            for x in grid.points() {
                values.push(f(t, &x));
            }
        }
        Ok(Self { grid, times, values })
    }

    pub fn from_values(grid: Grid<T>, horizon: T, steps: usize, values: Vec<T>) -> Result<Self, SemigroupError> {
        let times = Self::time_axis(horizon, steps)?;
        if values.len() != grid.len() * times.len() {
            return Err(SemigroupError::ValueCount { expected: grid.len() * times.len(), got: values.len() });
        }
        Ok(Self { grid, times, values })
    }

    pub fn steps(&self) -> usize {
        self.times.len() - 1
    }

    pub fn dt(&self) -> T {
        self.times[1] - self.times[0]
    }

    pub fn horizon(&self) -> T {
        self.times[self.times.len() - 1]
    }

    pub fn slice(&self, m: usize) -> &[T] {
        let n = self.grid.len();
        &self.values[m * n..(m + 1) * n]
    }

    pub fn slice_mut(&mut self, m: usize) -> &mut [T] {
        let n = self.grid.len();
        &mut self.values[m * n..(m + 1) * n]
    }

    pub fn spatial(&self, m: usize) -> SpatialField<T> {
        SpatialField { grid: self.grid, values: self.slice(m).to_vec() }
    }

    /// Trapezoid weights in time.
    pub fn time_weights(&self) -> Vec<T> {
        let dt = self.dt();
        let last = self.steps();
        (0..=last).map(|m| if m == 0 || m == last { dt / T::lit(2.0) } else { dt }).collect()
    }

    /// `(Σ_m ω_m Σ_j |g|^p h^n)^{1/p}` with trapezoid weights `ω_m`.
    pub fn norm_lp(&self, p: T) -> T {
        let vol = self.grid.cell_volume();
        let w = self.time_weights();
        let s: T = (0..self.times.len())
            .map(|m| w[m] * self.slice(m).iter().map(|v| v.abs().powf(p)).sum::<T>())
            .sum();
        (s * vol).powf(T::one() / p)
    }

    pub fn support_reach(&self) -> T {
        (0..self.times.len()).map(|m| self.spatial(m).support_reach()).fold(T::zero(), T::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_layout() {
        let g = Grid::<f64>::new(2, 1.0, 0.25).unwrap();
        assert_eq!(g.nodes, 8);
        assert_eq!(g.len(), 64);
        assert_eq!(g.point(9), vec![-0.75, -0.75]);
        assert_eq!(g.nearest(&[-0.75, -0.75]), Some(9));
        assert!(Grid::<f64>::new(1, 1.0, 0.3).is_err());
    }

    #[test]
    fn norm_examples() {
        let g = Grid::<f64>::new(1, 2.0, 0.5).unwrap();
        let z = SpatialField::zeros(g);
        assert_eq!(z.norm_lp(2.0), 0.0);
        let mut one = SpatialField::zeros(g);
        one.values[3] = 1.0;
        for p in [1.5, 2.0, 3.0] {
            assert!((one.norm_lp(p) - 0.5f64.powf(1.0 / p)).abs() < 1e-15);
        }
        // the k = 0 mode of amplitude a has norm a (2L)^{n/2}; a real cosine mode a/√2 of that
        let ones = SpatialField::from_fn(g, |_| 3.0);
        assert!((ones.norm_lp(2.0) - 3.0 * 4f64.sqrt()).abs() < 1e-14);
        let cos = SpatialField::from_fn(g, |x| 3.0 * (std::f64::consts::PI * x[0]).cos());
        assert!((cos.norm_lp(2.0) - 3.0 * 2.0f64.sqrt()).abs() < 1e-14);
    }
}
