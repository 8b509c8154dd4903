use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::kernel::KernelSpec;
use crate::scalar::Real;

use super::field::{Grid, SpaceTimeField, SpatialField};
use super::SemigroupError;

/// Forward/inverse n-dimensional FFT on a [`Grid`] plus the symbol
/// `|ξ|^{2α}` on its discrete frequencies `ξ = πk/L`.
pub struct Spectral<T: Real> {
    grid: Grid<T>,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    symbol: Vec<T>,
}

impl<T: Real> Spectral<T> {
    pub fn new(grid: Grid<T>, alpha: T) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(grid.nodes);
        let inverse = planner.plan_fft_inverse(grid.nodes);
        let n = grid.nodes;
        let freq = |j: usize| {
            let k = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
            T::PI() * T::lit(k) / grid.half_width
        };
        let symbol = (0..grid.len())
            .map(|i| {
                let xi2: T = grid.multi_index(i).into_iter().map(|j| freq(j) * freq(j)).sum();
                xi2.powf(alpha)
            })
            .collect();
        Self { grid, forward, inverse, symbol }
    }

    pub fn symbol(&self) -> &[T] {
        &self.symbol
    }

    fn transform(&self, data: &mut [Complex<T>], fft: &Arc<dyn Fft<T>>) {
        let n = self.grid.nodes;
        let dim = self.grid.dim;
        let mut line = vec![Complex::new(T::zero(), T::zero()); n];
        for axis in 0..dim {
            let stride = n.pow((dim - 1 - axis) as u32);
            for outer in 0..data.len() / (n * stride) {
                for inner in 0..stride {
                    let base = outer * n * stride + inner;
                    for j in 0..n {
                        line[j] = data[base + j * stride];
                    }
                    fft.process(&mut line);
                    for j in 0..n {
                        data[base + j * stride] = line[j];
                    }
                }
            }
        }
    }

    pub fn forward(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut data: Vec<Complex<T>> = values.iter().map(|v| Complex::new(*v, T::zero())).collect();
        self.transform(&mut data, &self.forward);
        data
    }

    /// Inverse transform, normalized, real part.
    pub fn inverse(&self, mut data: Vec<Complex<T>>) -> Vec<T> {
        self.transform(&mut data, &self.inverse);
        let scale = T::one() / T::from_usize_lossy(self.grid.len());
        data.into_iter().map(|c| c.re * scale).collect()
    }

    /// Multiplies by `m(|ξ|^{2α})` in frequency space.
    pub fn apply_multiplier(&self, values: &[T], m: impl Fn(T) -> T) -> Vec<T> {
        let mut hat = self.forward(values);
        for (c, l) in hat.iter_mut().zip(&self.symbol) {
            *c = *c * m(*l);
        }
        self.inverse(hat)
    }
}

fn guard<T: Real>(reach: T, grid: &Grid<T>) -> Result<(), SemigroupError> {
    let limit = grid.half_width / T::lit(2.0);
    if reach > limit {
        return Err(SemigroupError::Aliasing { reach: reach.as_f64(), limit: limit.as_f64() });
    }
    Ok(())
}

/// `e^{−t(−Δ)^α} f` on the periodic box; `t = 0` returns `f`.
pub fn apply_r_periodic<T: Real>(f: &SpatialField<T>, t: T, spec: &KernelSpec<T>) -> Result<SpatialField<T>, SemigroupError> {
    if t < T::zero() {
        return Err(SemigroupError::NegativeTime(t.as_f64()));
    }
    if f.grid.dim != spec.dim {
        return Err(SemigroupError::Dimension(f.grid.dim, spec.dim));
    }
    if t == T::zero() {
        return Ok(f.clone());
    }
    let sp = Spectral::new(f.grid, spec.alpha);
    Ok(SpatialField { grid: f.grid, values: sp.apply_multiplier(&f.values, |l| (-t * l).exp()) })
}

/// [`apply_r_periodic`] after checking that `f` vanishes outside the inner
/// half-box `|x_i| ≤ L/2`.
pub fn apply_r<T: Real>(f: &SpatialField<T>, t: T, spec: &KernelSpec<T>) -> Result<SpatialField<T>, SemigroupError> {
    guard(f.support_reach(), &f.grid)?;
    apply_r_periodic(f, t, spec)
}

/// Duhamel integral by the trapezoid rule in `s`, exact in space per mode:
/// `Â_m = e^{−Δt λ}(Â_{m−1} + Δt/2 ĝ_{m−1}) + Δt/2 ĝ_m`, `Â_0 = 0`.
pub fn apply_s_periodic<T: Real>(g: &SpaceTimeField<T>, spec: &KernelSpec<T>) -> Result<SpaceTimeField<T>, SemigroupError> {
    if g.grid.dim != spec.dim {
        return Err(SemigroupError::Dimension(g.grid.dim, spec.dim));
    }
    let sp = Spectral::new(g.grid, spec.alpha);
    let dt = g.dt();
    let half = dt / T::lit(2.0);
    let decay: Vec<T> = sp.symbol().iter().map(|l| (-dt * *l).exp()).collect();
    let mut out = SpaceTimeField { grid: g.grid, times: g.times.clone(), values: vec![T::zero(); g.values.len()] };
    let mut acc = vec![Complex::new(T::zero(), T::zero()); g.grid.len()];
    let mut prev = sp.forward(g.slice(0));
    for m in 1..g.times.len() {
        let cur = sp.forward(g.slice(m));
        for i in 0..acc.len() {
            acc[i] = (acc[i] + prev[i] * half) * decay[i] + cur[i] * half;
        }
        out.slice_mut(m).copy_from_slice(&sp.inverse(acc.clone()));
        prev = cur;
    }
    Ok(out)
}

/// [`apply_s_periodic`] with the inner half-box guard on every time slice.
pub fn apply_s<T: Real>(g: &SpaceTimeField<T>, spec: &KernelSpec<T>) -> Result<SpaceTimeField<T>, SemigroupError> {
    guard(g.support_reach(), &g.grid)?;
    apply_s_periodic(g, spec)
}

/// Spectral `(−Δ)^α` on the periodic grid.
pub fn fractional_laplacian<T: Real>(f: &SpatialField<T>, alpha: T) -> SpatialField<T> {
    let sp = Spectral::new(f.grid, alpha);
    SpatialField { grid: f.grid, values: sp.apply_multiplier(&f.values, |l| l) }
}

/// `max |∂_t u + (−Δ)^α u − g|` over interior times for `u = R_α f + S_α g`,
/// with centred time differences, on the periodic grid.
pub fn pde_residual<T: Real>(f: &SpatialField<T>, g: &SpaceTimeField<T>, spec: &KernelSpec<T>) -> Result<T, SemigroupError> {
    if f.grid != g.grid {
        return Err(SemigroupError::Dimension(f.grid.dim, g.grid.dim));
    }
    let mut u = apply_s_periodic(g, spec)?;
    let sp = Spectral::new(f.grid, spec.alpha);
    let f_hat = sp.forward(&f.values);
    for (m, &t) in g.times.iter().enumerate() {
        let hat: Vec<Complex<T>> = f_hat.iter().zip(sp.symbol()).map(|(c, l)| *c * (-t * *l).exp()).collect();
        let free = sp.inverse(hat);
        for (a, b) in u.slice_mut(m).iter_mut().zip(free) {
            *a += b;
        }
    }
    let two_dt = T::lit(2.0) * g.dt();
    let mut worst = T::zero();
    for m in 1..g.steps() {
        let lap = sp.apply_multiplier(u.slice(m), |l| l);
        let (before, after) = (u.slice(m - 1), u.slice(m + 1));
        for i in 0..lap.len() {
            let r = (after[i] - before[i]) / two_dt + lap[i] - g.slice(m)[i];
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::ClosedForm;

    fn spec(alpha: f64, dim: usize) -> KernelSpec<f64> {
        KernelSpec::new(alpha, dim).unwrap()
    }

    #[test]
    fn zero_stays_zero() {
        let g = Grid::<f64>::new(1, 8.0, 0.125).unwrap();
        let z = SpatialField::zeros(g);
        assert!(apply_r(&z, 1.0, &spec(0.5, 1)).unwrap().values.iter().all(|v| *v == 0.0));
        let zt = SpaceTimeField::zeros(g, 1.0, 8).unwrap();
        assert!(apply_s(&zt, &spec(0.5, 1)).unwrap().values.iter().all(|v| *v == 0.0));
        assert_eq!(pde_residual(&z, &zt, &spec(0.5, 1)).unwrap(), 0.0);
    }

    #[test]
    fn delta_gives_poisson_kernel() {
        let g = Grid::<f64>::new(1, 64.0, 1.0 / 16.0).unwrap();
        let mut f = SpatialField::zeros(g);
        let origin = g.nearest(&[0.0]).unwrap();
        f.values[origin] = 16.0;
        let u = apply_r(&f, 1.0, &spec(0.5, 1)).unwrap();
        let exact = ClosedForm::new(0.5, 1).unwrap();
        for x in [0.0, 0.5, 2.0, 10.0] {
            let i = g.nearest(&[x]).unwrap();
            // periodic images add Σ_{k≠0} K(x + 128k) ≈ 2/(π·128·…) ~ 1e-5
            assert!((u.values[i] - exact.density(1.0, x)).abs() < 1e-4, "x={x}: {}", u.values[i]);
        }
    }

    #[test]
    fn mass_is_conserved() {
        let g = Grid::<f64>::new(1, 16.0, 1.0 / 32.0).unwrap();
        let f = SpatialField::from_fn(g, |x| if x[0].abs() <= 1.0 { 1.0 } else { 0.0 });
        let u = apply_r(&f, 1e-3, &spec(1.0, 1)).unwrap();
        assert!((u.integral() - f.integral()).abs() < 1e-6);
        assert!((f.integral() - 2.0).abs() < 1.0 / 32.0 + 1e-12);
    }

    #[test]
    fn guard_rejects_outer_support() {
        let g = Grid::<f64>::new(1, 4.0, 0.25).unwrap();
        let f = SpatialField::from_fn(g, |x| if x[0] > 2.5 { 1.0 } else { 0.0 });
        assert!(matches!(apply_r(&f, 1.0, &spec(0.5, 1)), Err(SemigroupError::Aliasing { .. })));
        assert!(apply_r_periodic(&f, 1.0, &spec(0.5, 1)).is_ok());
    }

    #[test]
    fn duhamel_matches_mode_oracle() {
        // g = cos(kx) constant in time: S g(t) = cos(kx)(1 − e^{−tλ})/λ
        let g = Grid::<f64>::new(1, std::f64::consts::PI, std::f64::consts::PI / 16.0).unwrap();
        let k: f64 = 3.0;
        let alpha = 0.75;
        let lam = k.powf(2.0 * alpha);
        let mut errs = Vec::new();
        for steps in [40, 80] {
            let src = SpaceTimeField::from_fn(g, 2.0, steps, |_, x| (k * x[0]).cos()).unwrap();
            let u = apply_s_periodic(&src, &spec(alpha, 1)).unwrap();
            let mut err: f64 = 0.0;
            for (m, &t) in u.times.iter().enumerate() {
                for (i, x) in g.points().enumerate() {
                    let exact = (k * x[0]).cos() * (1.0 - (-t * lam).exp()) / lam;
                    err = err.max((u.slice(m)[i] - exact).abs());
                }
            }
            errs.push(err);
        }
        assert!(errs[0] < 1e-2);
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 2.0).abs() < 0.2, "order {order}");
    }

    #[test]
    fn residual_is_second_order() {
        let g = Grid::<f64>::new(2, std::f64::consts::PI, std::f64::consts::PI / 8.0).unwrap();
        let f = SpatialField::from_fn(g, |x| (2.0 * x[0]).cos() * x[1].sin());
        let sp = spec(0.6, 2);
        let mut res = Vec::new();
        for steps in [50, 100] {
            let zero = SpaceTimeField::zeros(g, 1.0, steps).unwrap();
            res.push(pde_residual(&f, &zero, &sp).unwrap());
        }
        assert!(res[0] < 5e-3, "{res:?}");
        assert!((res[0] / res[1]).log2() > 1.8, "{res:?}");
        let mut res = Vec::new();
        for steps in [50, 100] {
            let src = SpaceTimeField::from_fn(g, 1.0, steps, |_, x| x[0].cos()).unwrap();
            res.push(pde_residual(&SpatialField::zeros(g), &src, &sp).unwrap());
        }
        assert!((res[0] / res[1]).log2() > 1.8, "{res:?}");
    }

    #[test]
    fn semigroup_and_linearity() {
        let g = Grid::<f64>::new(2, 8.0, 0.5).unwrap();
        let sp = spec(0.4, 2);
        let f = SpatialField::from_fn(g, |x| (-(x[0] * x[0] + 2.0 * x[1] * x[1])).exp());
        let h = SpatialField::from_fn(g, |x| if x[0].abs() + x[1].abs() < 2.0 { 1.0 } else { 0.0 });
        let a = apply_r_periodic(&apply_r_periodic(&f, 0.3, &sp).unwrap(), 0.7, &sp).unwrap();
        let b = apply_r_periodic(&f, 1.0, &sp).unwrap();
        let comb = SpatialField::from_values(g, f.values.iter().zip(&h.values).map(|(x, y)| 2.0 * x - 3.0 * y).collect()).unwrap();
        let lhs = apply_r_periodic(&comb, 0.5, &sp).unwrap();
        let (rf, rh) = (apply_r_periodic(&f, 0.5, &sp).unwrap(), apply_r_periodic(&h, 0.5, &sp).unwrap());
        for i in 0..g.len() {
            assert!((a.values[i] - b.values[i]).abs() < 1e-13);
            assert!((lhs.values[i] - (2.0 * rf.values[i] - 3.0 * rh.values[i])).abs() < 1e-13);
        }
        // contraction
        let u = apply_r(&h, 0.5, &sp).unwrap();
        assert!(u.max() <= h.max() + 1e-9);
        assert!(u.norm_lp(1.0) <= h.norm_lp(1.0) + 1e-9);
    }
}
