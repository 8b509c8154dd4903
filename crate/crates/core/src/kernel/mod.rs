//! The fractional heat kernel `K_t^{(α)}`: the fundamental solution of
//! `∂_t + (−Δ)^α` on `ℝ^n`, normalized so that `∫ K_t = 1`.
//!
//! Closed forms exist at `α = 1` (Gauss–Weierstrass) and `α = 1/2` (Poisson);
//! every other index goes through [`numeric`] Fourier inversion. Bulk callers
//! (adjoint operators, capacity assembly) use [`Kernel`], which dispatches to
//! the closed form or to a tabulated radial profile.

mod closed;
pub mod numeric;
mod profile;
pub mod stable;
pub mod validate;

pub use closed::ClosedForm;
pub use profile::RadialProfile;
pub use stable::{sample_stable, Samples, StableMethod};

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("alpha must lie in (0, 1], got {0}")]
    InvalidAlpha(f64),
    #[error("dimension must be 1, 2 or 3, got {0}")]
    UnsupportedDim(usize),
    #[error("time must be positive, got {0}")]
    NonPositiveTime(f64),
    #[error("closed form exists only for alpha in {{1/2, 1}}, got {0}")]
    NoClosedForm(f64),
    #[error("point has {got} coordinates but the kernel lives in dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("quadrature stopped at error bound {achieved:e}, requested {requested:e}")]
    Unconverged { achieved: f64, requested: f64 },
    #[error("stable sampler requires 0 < alpha < 1, got {0}")]
    SamplerAlpha(f64),
    #[error("sample count must be at least 1")]
    EmptySample,
}

/// Evaluation parameters for `K_t^{(α)}` on `ℝ^dim`.
///
/// `freq_cutoff` is the truncation radius of the frequency integral at
/// `t = 1`; for other times the radius scales as `t^{-1/2α}`, and it is
/// doubled further whenever the tail bound exceeds the requested tolerance. `freq_nodes` sets the initial quadrature
/// resolution before adaptive refinement.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelSpec<T> {
    pub alpha: T,
    pub dim: usize,
    pub freq_cutoff: T,
    pub freq_nodes: usize,
    pub tol: T,
}

impl<T: Real> KernelSpec<T> {
    /// Spec with default tolerance (`1e-6` for `n = 1`, `1e-4` otherwise) and
    /// a cutoff whose truncated tail is far below it.
    pub fn new(alpha: T, dim: usize) -> Result<Self, KernelError> {
        if !(alpha > T::zero() && alpha <= T::one()) {
            return Err(KernelError::InvalidAlpha(alpha.as_f64()));
        }
        if !(1..=3).contains(&dim) {
            return Err(KernelError::UnsupportedDim(dim));
        }
        let tol = if dim == 1 { T::lit(1e-6) } else { T::lit(1e-4) };
        let mut spec = Self { alpha, dim, freq_cutoff: T::one(), freq_nodes: 256, tol };
        spec.freq_cutoff = numeric::default_cutoff(&spec);
        Ok(spec)
    }

    /// Sets the tolerance and recomputes the default cutoff for it.
    pub fn with_tol(mut self, tol: T) -> Self {
        self.tol = tol;
        self.freq_cutoff = numeric::default_cutoff(&self);
        self
    }

    pub fn with_freq_nodes(mut self, nodes: usize) -> Self {
        self.freq_nodes = nodes.max(64);
        self
    }

    pub fn with_freq_cutoff(mut self, cutoff: T) -> Self {
        self.freq_cutoff = cutoff;
        self
    }

    /// True when `α` is exactly `1/2` or `1`.
    pub fn has_closed_form(&self) -> bool {
        self.alpha == T::lit(0.5) || self.alpha == T::one()
    }

    /// Parabolic length scale `t^{1/2α}`.
    pub fn length_scale(&self, t: T) -> T {
        t.powf(T::one() / (T::lit(2.0) * self.alpha))
    }

    /// Two-sided envelope `t / (t^{1/2α} + |x|)^{n+2α}`.
    pub fn envelope(&self, t: T, r: T) -> T {
        let two_a = T::lit(2.0) * self.alpha;
        t / (self.length_scale(t) + r).powf(T::from_usize_lossy(self.dim) + two_a)
    }

    pub(crate) fn check_point(&self, t: T, x: &[T]) -> Result<T, KernelError> {
        if !(t > T::zero()) {
            return Err(KernelError::NonPositiveTime(t.as_f64()));
        }
        if x.len() != self.dim {
            return Err(KernelError::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        Ok(x.iter().map(|v| *v * *v).sum::<T>().sqrt())
    }

    /// Closed-form evaluation; only for `α ∈ {1/2, 1}`.
    pub fn eval_closed_form(&self, t: T, x: &[T]) -> Result<KernelValue<T>, KernelError> {
        let r = self.check_point(t, x)?;
        let cf = ClosedForm::new(self.alpha, self.dim)?;
        let value = cf.density(t, r);
        Ok(KernelValue { value, abs_error_bound: value * T::round_off() })
    }

    /// Numerical Fourier inversion at the spec tolerance.
    pub fn eval_numeric(&self, t: T, x: &[T]) -> Result<KernelValue<T>, KernelError> {
        self.eval_numeric_tol(t, x, self.tol)
    }

    /// Numerical Fourier inversion with an explicit absolute tolerance.
    pub fn eval_numeric_tol(&self, t: T, x: &[T], tol: T) -> Result<KernelValue<T>, KernelError> {
        let r = self.check_point(t, x)?;
        let v = numeric::invert(self, t, r, tol);
        if v.abs_error_bound > tol {
            return Err(KernelError::Unconverged {
                achieved: v.abs_error_bound.as_f64(),
                requested: tol.as_f64(),
            });
        }
        Ok(v)
    }

    /// Closed form when available, numeric inversion otherwise.
    pub fn eval(&self, t: T, x: &[T]) -> Result<KernelValue<T>, KernelError> {
        if self.has_closed_form() {
            self.eval_closed_form(t, x)
        } else {
            self.eval_numeric(t, x)
        }
    }
}

/// A kernel value with a bound on its absolute error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelValue<T> {
    pub value: T,
    pub abs_error_bound: T,
}

/// Fast radial evaluation used by the operator and capacity modules.
#[derive(Debug, Clone)]
pub enum Kernel<T: Real> {
    Closed(ClosedForm<T>),
    Tabulated(Arc<RadialProfile<T>>),
}

impl<T: Real> Kernel<T> {
    /// Closed form when available, otherwise a tabulated profile built from
    /// numeric inversion (a one-off cost of a few hundred inversions).
    pub fn new(spec: &KernelSpec<T>) -> Result<Self, KernelError> {
        if spec.has_closed_form() {
            Ok(Kernel::Closed(ClosedForm::new(spec.alpha, spec.dim)?))
        } else {
            Ok(Kernel::Tabulated(Arc::new(RadialProfile::build(spec)?)))
        }
    }

    pub fn alpha(&self) -> T {
        match self {
            Kernel::Closed(c) => c.alpha,
            Kernel::Tabulated(p) => p.alpha(),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Kernel::Closed(c) => c.dim,
            Kernel::Tabulated(p) => p.dim(),
        }
    }

    /// `K_t(x)` for `|x| = r`; zero for `t ≤ 0`.
    pub fn density(&self, t: T, r: T) -> T {
        if !(t > T::zero()) {
            return T::zero();
        }
        match self {
            Kernel::Closed(c) => c.density(t, r),
            Kernel::Tabulated(p) => p.density(t, r),
        }
    }

    /// `K_t(x)` at a point.
    pub fn at(&self, t: T, x: &[T]) -> T {
        let r = x.iter().map(|v| *v * *v).sum::<T>().sqrt();
        self.density(t, r)
    }

    /// One-dimensional survival function `P(X_t > z)`, `z ≥ 0`.
    ///
    /// Only meaningful for `dim == 1`.
    pub fn survival(&self, t: T, z: T) -> T {
        debug_assert_eq!(self.dim(), 1, "survival is defined for the 1-d kernel");
        if !(t > T::zero()) {
            return T::zero();
        }
        match self {
            Kernel::Closed(c) => c.survival(t, z),
            Kernel::Tabulated(p) => p.survival(t, z),
        }
    }

    /// One-dimensional distribution function `∫_{-∞}^z K_t`.
    pub fn cdf(&self, t: T, z: T) -> T {
        if z >= T::zero() {
            T::one() - self.survival(t, z)
        } else {
            self.survival(t, -z)
        }
    }

    /// `∫_a^b K_t` in one dimension, computed from the tail on the side the
    /// interval lies so that far-field masses keep relative accuracy.
    pub fn interval_mass(&self, t: T, a: T, b: T) -> T {
        if !(b > a) {
            return T::zero();
        }
        if !(t > T::zero()) {
            return if a <= T::zero() && T::zero() < b { T::one() } else { T::zero() };
        }
        let m = if a >= T::zero() {
            self.survival(t, a) - self.survival(t, b)
        } else if b <= T::zero() {
            self.survival(t, -b) - self.survival(t, -a)
        } else {
            T::one() - self.survival(t, -a) - self.survival(t, b)
        };
        m.max(T::zero())
    }

    /// `c` in the far-field law `K_t(x) ~ c t |x|^{−n−2α}`.
    pub fn tail_coefficient(&self) -> T {
        profile::tail_coefficient(self.alpha(), self.dim())
    }

    /// Relative accuracy of [`Kernel::density`].
    pub fn rel_error_bound(&self) -> T {
        match self {
            Kernel::Closed(_) => T::round_off(),
            Kernel::Tabulated(p) => p.rel_error_bound(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_validation() {
        assert!(matches!(KernelSpec::<f64>::new(0.0, 1), Err(KernelError::InvalidAlpha(_))));
        assert!(matches!(KernelSpec::<f64>::new(1.2, 1), Err(KernelError::InvalidAlpha(_))));
        assert!(matches!(KernelSpec::<f64>::new(0.5, 4), Err(KernelError::UnsupportedDim(4))));
        let s = KernelSpec::<f64>::new(0.5, 2).unwrap();
        assert_eq!(s.tol, 1e-4);
        assert!(s.has_closed_form());
        assert!(!KernelSpec::<f64>::new(0.3, 1).unwrap().has_closed_form());
    }

    #[test]
    fn closed_form_examples() {
        let s = KernelSpec::<f64>::new(0.5, 1).unwrap();
        let v = s.eval_closed_form(1.0, &[0.0]).unwrap();
        assert!((v.value - std::f64::consts::FRAC_1_PI).abs() < 1e-15);
        let v = s.eval_closed_form(2.0, &[0.0]).unwrap();
        assert!((v.value - 1.0 / (2.0 * std::f64::consts::PI)).abs() < 1e-15);
        let g = KernelSpec::<f64>::new(1.0, 1).unwrap();
        let v = g.eval_closed_form(1.0, &[0.0]).unwrap();
        assert!((v.value - 0.282_094_791_773_878_1).abs() < 1e-15);
        assert!(matches!(
            KernelSpec::<f64>::new(0.7, 1).unwrap().eval_closed_form(1.0, &[0.0]),
            Err(KernelError::NoClosedForm(_))
        ));
        assert!(matches!(s.eval_closed_form(0.0, &[0.0]), Err(KernelError::NonPositiveTime(_))));
        assert!(matches!(
            s.eval_closed_form(1.0, &[0.0, 1.0]),
            Err(KernelError::DimensionMismatch { expected: 1, got: 2 })
        ));
    }

    #[test]
    fn closed_form_in_f32() {
        let s = KernelSpec::<f32>::new(0.5, 1).unwrap();
        let v = s.eval_closed_form(1.0, &[0.0]).unwrap();
        assert!((v.value - std::f32::consts::FRAC_1_PI).abs() < 1e-6);
    }
}
