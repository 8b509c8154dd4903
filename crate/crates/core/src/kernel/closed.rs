use crate::scalar::Real;
use crate::special;

use super::KernelError;

/// Gauss–Weierstrass (`α = 1`) and Poisson (`α = 1/2`) kernels.
#[derive(Debug, Clone, Copy)]
pub struct ClosedForm<T> {
    pub alpha: T,
    pub dim: usize,
    norm: T,
}

impl<T: Real> ClosedForm<T> {
    pub fn new(alpha: T, dim: usize) -> Result<Self, KernelError> {
        let nf = T::from_usize_lossy(dim);
        let norm = if alpha == T::one() {
            (T::lit(4.0) * T::PI()).powf(-nf / T::lit(2.0))
        } else if alpha == T::lit(0.5) {
            let half = (nf + T::one()) / T::lit(2.0);
            T::PI().powf(-half) * special::gamma(half)
        } else {
            return Err(KernelError::NoClosedForm(alpha.as_f64()));
        };
        Ok(Self { alpha, dim, norm })
    }

    fn is_gaussian(&self) -> bool {
        self.alpha == T::one()
    }

    pub fn density(&self, t: T, r: T) -> T {
        let nf = T::from_usize_lossy(self.dim);
        if self.is_gaussian() {
            self.norm * t.powf(-nf / T::lit(2.0)) * (-(r * r) / (T::lit(4.0) * t)).exp()
        } else {
            let half = (nf + T::one()) / T::lit(2.0);
            self.norm * t / (t * t + r * r).powf(half)
        }
    }

    /// 1-d survival function `P(X_t > z)` for `z ≥ 0`.
    pub fn survival(&self, t: T, z: T) -> T {
        if self.is_gaussian() {
            T::lit(0.5) * special::erfc(z / (T::lit(2.0) * t.sqrt()))
        } else if z > T::zero() {
            (t / z).atan() / T::PI()
        } else {
            T::lit(0.5)
        }
    }

    /// 1-d distribution function.
    pub fn cdf(&self, t: T, z: T) -> T {
        let half = T::lit(0.5);
        if self.is_gaussian() {
            half * special::erfc(-z / (T::lit(2.0) * t.sqrt()))
        } else {
            half + (z / t).atan() / T::PI()
        }
    }
}
