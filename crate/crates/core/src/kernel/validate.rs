//! Normalization, self-similarity and envelope checks on the kernel.

use rustfft::num_complex::Complex;
use serde::Serialize;

use crate::quadrature::adaptive;
use crate::scalar::Real;
use crate::special;

use super::{KernelError, KernelSpec, KernelValue};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct MassReport<T> {
    pub mass: T,
    pub defect: T,
    /// Envelope bound on `∫_{|x|>R} K_t`, already included in `mass`.
    pub tail: T,
    /// Quadrature error plus the integrated pointwise kernel error bounds.
    pub error_bound: T,
    pub spatial_cutoff: T,
}

fn point<T: Real>(dim: usize, r: T) -> Vec<T> {
    let mut x = vec![T::zero(); dim];
    x[0] = r;
    x
}

/// Kernel value with an absolute tolerance relative to the envelope, so
/// far-field values keep their relative accuracy.
fn eval_rel<T: Real>(spec: &KernelSpec<T>, t: T, r: T, rel: T) -> Result<KernelValue<T>, KernelError> {
    let x = point(spec.dim, r);
    if spec.has_closed_form() {
        spec.eval_closed_form(t, &x)
    } else {
        spec.eval_numeric_tol(t, &x, spec.envelope(t, r) * rel)
    }
}

/// Envelope tail `∫_{|x|>R} c t |x|^{−n−2α} dx` with `c` fitted to the kernel at `R`.
fn envelope_tail<T: Real>(spec: &KernelSpec<T>, t: T, r: T, k_at_r: T) -> T {
    let nf = T::from_usize_lossy(spec.dim);
    let two_a = T::lit(2.0) * spec.alpha;
    let c = k_at_r * r.powf(nf + two_a) / t;
    c * t * special::unit_sphere_area::<T>(spec.dim) * r.powf(-two_a) / two_a
}

/// `∫_{|x|≤R} K_t` by radial quadrature plus the envelope tail beyond `R`.
///
/// Without an explicit cutoff, `R` grows by decades until the tail is below
/// a tenth of `tol`.
pub fn check_mass<T: Real>(
    spec: &KernelSpec<T>,
    t: T,
    spatial_cutoff: Option<T>,
    tol: T,
) -> Result<MassReport<T>, KernelError> {
    if !(t > T::zero()) {
        return Err(KernelError::NonPositiveTime(t.as_f64()));
    }
    let ell = spec.length_scale(t);
    let rel = tol * T::lit(1e-3);
    let radius = match spatial_cutoff {
        Some(r) => r,
        None => {
            let mut r = ell * T::lit(10.0);
            loop {
                let k = eval_rel(spec, t, r, rel)?.value;
                if envelope_tail(spec, t, r, k) <= tol * T::lit(0.1) || r > ell * T::lit(1e40) {
                    break r;
                }
                r = r * T::lit(10.0);
            }
        }
    };
    let omega = special::unit_sphere_area::<T>(spec.dim);
    let mut pts = vec![T::zero()];
    let mut b = ell * T::lit(1e-4);
    while b < radius {
        pts.push(b);
        b = b * T::lit(10f64.sqrt());
    }
    pts.push(radius);
    let mut failure = None;
    let q = adaptive(
        |r: T| match eval_rel(spec, t, r, rel) {
            Ok(v) => {
                let w = omega * r.powi(spec.dim as i32 - 1);
                Complex::new(v.value * w, v.abs_error_bound * w)
            }
            Err(e) => {
                failure.get_or_insert(e);
                Complex::new(T::zero(), T::zero())
            }
        },
        &pts,
        tol * T::lit(0.1),
        4000,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let k_r = eval_rel(spec, t, radius, rel)?.value;
    let tail = envelope_tail(spec, t, radius, k_r);
    let mass = q.value.re + tail;
    Ok(MassReport {
        mass,
        defect: (mass - T::one()).abs(),
        tail,
        error_bound: q.error + q.value.im,
        spatial_cutoff: radius,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SelfSimilarity<T> {
    pub residual: T,
    /// Sum of the two evaluations' error bounds (the second one rescaled).
    pub bound: T,
}

/// `|K_t(x) − t^{−n/2α} K_1(t^{−1/2α} x)|`, both sides by numeric inversion.
pub fn check_self_similarity<T: Real>(
    spec: &KernelSpec<T>,
    t: T,
    x: &[T],
    tol: T,
) -> Result<SelfSimilarity<T>, KernelError> {
    let ell = spec.length_scale(t);
    let jac = ell.powi(spec.dim as i32);
    let lhs = spec.eval_numeric_tol(t, x, tol)?;
    let y: Vec<T> = x.iter().map(|v| *v / ell).collect();
    let rhs = spec.eval_numeric_tol(T::one(), &y, tol * jac)?;
    Ok(SelfSimilarity {
        residual: (lhs.value - rhs.value / jac).abs(),
        bound: lhs.abs_error_bound + rhs.abs_error_bound / jac,
    })
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EnvelopeScan<T> {
    pub min_ratio: T,
    pub max_ratio: T,
    /// `false` at `α = 1`, where no polynomial lower envelope exists and a
    /// wide band is expected.
    pub envelope_expected: bool,
}

impl<T: Real> EnvelopeScan<T> {
    pub fn spread(&self) -> T {
        self.max_ratio / self.min_ratio
    }
}

/// Extrema of `K_t(x) (t^{1/2α} + |x|)^{n+2α} / t` over `t_grid × radii`.
pub fn envelope_ratio_scan<T: Real>(
    spec: &KernelSpec<T>,
    t_grid: &[T],
    radii: &[T],
) -> Result<EnvelopeScan<T>, KernelError> {
    let mut lo = T::infinity();
    let mut hi = T::zero();
    for &t in t_grid {
        for &r in radii {
            let v = eval_rel(spec, t, r, T::lit(1e-7))?;
            let ratio = v.value / spec.envelope(t, r);
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
    }
    Ok(EnvelopeScan { min_ratio: lo, max_ratio: hi, envelope_expected: spec.alpha < T::one() })
}

/// Logarithmic grid of `count` points on `[a, b]`.
pub fn log_grid<T: Real>(a: T, b: T, count: usize) -> Vec<T> {
    let (la, lb) = (a.ln(), b.ln());
    (0..count)
        .map(|i| (la + (lb - la) * T::from_usize_lossy(i) / T::from_usize_lossy(count.max(2) - 1)).exp())
        .collect()
}
