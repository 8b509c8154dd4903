//! Sampling from `K_t`, which is the law of a rotation-invariant
//! `2α`-stable vector at time `t`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp1, StandardNormal};
use serde::Serialize;

use crate::scalar::Real;
use crate::special;

use super::{KernelError, KernelSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum StableMethod {
    /// Chambers–Mallows–Stuck; one dimension only.
    ChambersMallowsStuck,
    /// `√A · G` with `A` positive `α`-stable and `G ~ N(0, 2I)`.
    SubGaussian,
}

/// Row-major sample matrix, `dim` coordinates per draw.
#[derive(Debug, Clone)]
pub struct Samples<T> {
    pub dim: usize,
    pub data: Vec<T>,
}

impl<T: Real> Samples<T> {
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn point(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn norms(&self) -> impl Iterator<Item = T> + '_ {
        self.data.chunks(self.dim).map(|p| p.iter().map(|v| *v * *v).sum::<T>().sqrt())
    }
}

/// Positive `α`-stable variable with `E e^{−sA} = e^{−s^α}` (Kanter).
fn positive_stable(alpha: f64, rng: &mut impl Rng) -> f64 {
    let u = rng.random::<f64>() * std::f64::consts::PI;
    let e: f64 = rng.sample(Exp1);
    let a = (alpha * u).sin() / u.sin().powf(1.0 / alpha);
    a * ((1.0 - alpha) * u).sin().powf((1.0 - alpha) / alpha) / e.powf((1.0 - alpha) / alpha)
}

/// Symmetric `β`-stable with characteristic function `e^{−|ξ|^β}`.
fn symmetric_stable(beta: f64, rng: &mut impl Rng) -> f64 {
    let v = (rng.random::<f64>() - 0.5) * std::f64::consts::PI;
    let w: f64 = rng.sample(Exp1);
    if (beta - 1.0).abs() < 1e-15 {
        return v.tan();
    }
    (beta * v).sin() / v.cos().powf(1.0 / beta) * (((1.0 - beta) * v).cos() / w).powf((1.0 - beta) / beta)
}

/// `count` draws from `K_t`, deterministic in `seed`. Requires `0 < α < 1`;
/// the Gaussian endpoint has its own samplers elsewhere.
pub fn sample_stable<T: Real>(
    spec: &KernelSpec<T>,
    t: T,
    count: usize,
    seed: u64,
    method: StableMethod,
) -> Result<Samples<T>, KernelError> {
    if count == 0 {
        return Err(KernelError::EmptySample);
    }
    if !(t > T::zero()) {
        return Err(KernelError::NonPositiveTime(t.as_f64()));
    }
    let alpha = spec.alpha.as_f64();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(KernelError::SamplerAlpha(alpha));
    }
    let dim = spec.dim;
    if method == StableMethod::ChambersMallowsStuck && dim != 1 {
        return Err(KernelError::UnsupportedDim(dim));
    }
    let scale = spec.length_scale(t).as_f64();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut data = Vec::with_capacity(count * dim);
    for _ in 0..count {
        match method {
            StableMethod::ChambersMallowsStuck => {
                data.push(T::lit(symmetric_stable(2.0 * alpha, &mut rng) * scale));
            }
            StableMethod::SubGaussian => {
                let a = positive_stable(alpha, &mut rng).sqrt();
                for _ in 0..dim {
                    let g: f64 = rng.sample(StandardNormal);
                    data.push(T::lit(a * g * std::f64::consts::SQRT_2 * scale));
                }
            }
        }
    }
    Ok(Samples { dim, data })
}

/// Histogram estimate of `K_t(0)`: the fraction of draws in the ball of
/// radius `δ` over its volume, Richardson-extrapolated from `δ` and `2δ`
/// (the bias is even in `δ`, leading term `δ²`).
pub fn density_at_origin_histogram<T: Real>(samples: &Samples<T>, delta: T) -> T {
    let n = samples.dim;
    let vol = |r: T| special::unit_ball_volume::<T>(n) * r.powi(n as i32);
    let total = T::from_usize_lossy(samples.len());
    let (mut c1, mut c2) = (0usize, 0usize);
    let two = delta * T::lit(2.0);
    for r in samples.norms() {
        if r < delta {
            c1 += 1;
        }
        if r < two {
            c2 += 1;
        }
    }
    let d1 = T::from_usize_lossy(c1) / total / vol(delta);
    let d2 = T::from_usize_lossy(c2) / total / vol(two);
    (T::lit(4.0) * d1 - d2) / T::lit(3.0)
}

/// Conditional (Rao–Blackwell) estimate of `K_t(0)`: the mean of the
/// Gaussian density at the origin given the subordinator,
/// `E[(4π A t^{1/α})^{−n/2}]`. Returns `(mean, standard error)`.
pub fn density_at_origin_conditional<T: Real>(
    spec: &KernelSpec<T>,
    t: T,
    count: usize,
    seed: u64,
) -> Result<(T, T), KernelError> {
    let alpha = spec.alpha.as_f64();
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(KernelError::SamplerAlpha(alpha));
    }
    if count < 2 {
        return Err(KernelError::EmptySample);
    }
    let scale2 = spec.length_scale(t).as_f64().powi(2);
    let half_n = spec.dim as f64 / 2.0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut mean, mut m2) = (0.0f64, 0.0f64);
    for k in 0..count {
        let a = positive_stable(alpha, &mut rng);
        let v = (4.0 * std::f64::consts::PI * a * scale2).powf(-half_n);
        let d = v - mean;
        mean += d / (k + 1) as f64;
        m2 += d * (v - mean);
    }
    let var = m2 / (count - 1) as f64;
    Ok((T::lit(mean), T::lit((var / count as f64).sqrt())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::numeric::value_at_origin;

    #[test]
    fn deterministic_in_seed() {
        let s = KernelSpec::<f64>::new(0.6, 2).unwrap();
        let a = sample_stable(&s, 1.0, 100, 7, StableMethod::SubGaussian).unwrap();
        let b = sample_stable(&s, 1.0, 100, 7, StableMethod::SubGaussian).unwrap();
        assert_eq!(a.data, b.data);
        let c = sample_stable(&s, 1.0, 100, 8, StableMethod::SubGaussian).unwrap();
        assert_ne!(a.data, c.data);
    }

    #[test]
    fn cauchy_quartiles() {
        // α = 1/2, n = 1 is Cauchy with scale t: quartiles at ±t.
        let s = KernelSpec::<f64>::new(0.5, 1).unwrap();
        for method in [StableMethod::ChambersMallowsStuck, StableMethod::SubGaussian] {
            let x = sample_stable(&s, 2.0, 40_000, 3, method).unwrap();
            let frac = x.data.iter().filter(|v| v.abs() < 2.0).count() as f64 / 40_000.0;
            assert!((frac - 0.5).abs() < 0.01, "{method:?}: {frac}");
        }
    }

    #[test]
    fn conditional_estimator_hits_origin_value() {
        let s = KernelSpec::<f64>::new(0.75, 1).unwrap();
        let (m, se) = density_at_origin_conditional(&s, 1.0, 200_000, 11).unwrap();
        let exact = value_at_origin(0.75, 1, 1.0);
        assert!((m - exact).abs() < 4.0 * se + 1e-4, "{m} ± {se} vs {exact}");
    }

    #[test]
    fn rejects_bad_requests() {
        let s = KernelSpec::<f64>::new(0.5, 2).unwrap();
        assert!(matches!(
            sample_stable(&s, 1.0, 10, 0, StableMethod::ChambersMallowsStuck),
            Err(KernelError::UnsupportedDim(2))
        ));
        assert!(matches!(sample_stable(&s, 1.0, 0, 0, StableMethod::SubGaussian), Err(KernelError::EmptySample)));
        let g = KernelSpec::<f64>::new(1.0, 1).unwrap();
        assert!(matches!(
            sample_stable(&g, 1.0, 10, 0, StableMethod::SubGaussian),
            Err(KernelError::SamplerAlpha(_))
        ));
    }
}
