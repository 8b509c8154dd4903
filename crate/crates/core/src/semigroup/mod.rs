//! The free-propagation operator `R_α f(t) = e^{−t(−Δ)^α} f`, the Duhamel
//! operator `S_α g(t) = ∫_0^t e^{−(t−s)(−Δ)^α} g(s) ds`, their adjoints on
//! atomic measures, and the norms used by the capacity and trace modules.
//!
//! Grid operators are spectral on the periodic box `[−L, L)^n`. The guarded
//! entry points reject data reaching into the outer quarter of the box, where
//! wrap-around would be visible; the `_periodic` variants skip the guard and
//! treat the box as a torus.

mod adjoint;
mod field;
mod io;
mod spectral;

pub use adjoint::{adjoint_r, adjoint_r_grid, adjoint_s, adjoint_s_grid};
pub use field::{Grid, SpaceTimeField, SpatialField};
pub use io::{read_spacetime_field, read_spatial_field, write_spacetime_field, write_spatial_field, GridMeta};
pub use spectral::{apply_r, apply_r_periodic, apply_s, apply_s_periodic, fractional_laplacian, pde_residual, Spectral};

use serde::Serialize;
use thiserror::Error;

use crate::measure::DiscreteMeasure;
use crate::scalar::Real;

#[derive(Debug, Error)]
pub enum SemigroupError {
    #[error("grid needs h > 0 and L/h a positive integer (L = {half_width}, h = {h})")]
    BadGrid { half_width: f64, h: f64 },
    #[error("time axis needs T > 0 and at least one step")]
    BadTimeAxis,
    #[error("field has {got} values, grid expects {expected}")]
    ValueCount { expected: usize, got: usize },
    #[error("field support reaches |x_i| = {reach} beyond the inner half-box limit {limit}")]
    Aliasing { reach: f64, limit: f64 },
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("exponent {name} = {value} must lie in (1, ∞)")]
    Exponent { name: &'static str, value: f64 },
    #[error("p = {p} violates p < 1 + n/(2α) = {limit}")]
    SRegime { p: f64, limit: f64 },
    #[error("field file: {0}")]
    Format(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which half of the Duhamel solution an operation refers to: the initial
/// data operator `R_α f = e^{−t(−Δ)^α} f` or the source operator `S_α g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, serde::Deserialize)]
pub enum Operator {
    R,
    S,
}

impl std::fmt::Display for Operator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Operator::R => "R",
            Operator::S => "S",
        })
    }
}

impl std::str::FromStr for Operator {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "R" | "r" => Ok(Operator::R),
            "S" | "s" => Ok(Operator::S),
            _ => Err(format!("unknown operator {s:?}, expected R or S")),
        }
    }
}

/// Lebesgue exponents `p, q` and their conjugates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentConfig<T> {
    pub p: T,
    pub q: T,
}

impl<T: Real> ExponentConfig<T> {
    pub fn new(p: T, q: T) -> Result<Self, SemigroupError> {
        for (name, v) in [("p", p), ("q", q)] {
            if !(v > T::one() && v.is_finite()) {
                return Err(SemigroupError::Exponent { name, value: v.as_f64() });
            }
        }
        Ok(Self { p, q })
    }

    pub fn p_dual(&self) -> T {
        conjugate(self.p)
    }

    pub fn q_dual(&self) -> T {
        conjugate(self.q)
    }

    /// Checks `p < 1 + n/(2α)`, required by every `S_α` capacity path.
    pub fn check_s_regime(&self, alpha: T, dim: usize) -> Result<(), SemigroupError> {
        let limit = s_regime_limit(alpha, dim);
        if self.p < limit {
            Ok(())
        } else {
            Err(SemigroupError::SRegime { p: self.p.as_f64(), limit: limit.as_f64() })
        }
    }
}

/// `p' = p/(p−1)`.
pub fn conjugate<T: Real>(p: T) -> T {
    p / (p - T::one())
}

/// `1 + n/(2α)`.
pub fn s_regime_limit<T: Real>(alpha: T, dim: usize) -> T {
    T::one() + T::from_usize_lossy(dim) / (T::lit(2.0) * alpha)
}

/// `q̃ = p(n + 2α)/(n + 2α − 2αp)`, the Strichartz exponent of `S_α` on
/// `L^p`; `None` outside `p < 1 + n/(2α)`.
pub fn strichartz_exponent<T: Real>(alpha: T, p: T, dim: usize) -> Option<T> {
    let nf = T::from_usize_lossy(dim);
    let two_a = T::lit(2.0) * alpha;
    let den = nf + two_a - two_a * p;
    (den > T::zero() && p > T::one()).then(|| p * (nf + two_a) / den)
}

/// `(Σ_i w_i |v_i|^q)^{1/q}`.
pub fn norm_lq_mu<T: Real>(values: &[T], mu: &DiscreteMeasure<T>, q: T) -> T {
    assert_eq!(values.len(), mu.len(), "one value per atom");
    values.iter().zip(mu.weights()).map(|(v, w)| *w * v.abs().powf(q)).sum::<T>().powf(T::one() / q)
}
