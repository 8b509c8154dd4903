//! Hedberg–Wolff potentials and parabolic maximal functions of atomic
//! measures.
//!
//! For an atomic `μ` the ball mass `μ(B_r(t, x))` is piecewise constant in
//! `r`. Every radial integral and supremum here is evaluated exactly by
//! sweeping the radii at which atoms enter or leave the ball.

mod duality;
mod maximal;
mod sweep;
mod wolff;

pub use duality::{wolff_duality_ratio, DualityRatio};
pub use maximal::{maximal_centered, maximal_dyadic, maximal_r, maximal_spacetime};
pub use wolff::{wolff, wolff_batch, wolff_dyadic, wolff_r, wolff_s, DyadicTerm, DyadicWolff, WolffPiece, WolffProfile};

use thiserror::Error;

use crate::geometry::GeometryError;
use crate::measure::DiscreteMeasure;
use crate::scalar::Real;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("p must lie in (1, ∞), got {0}")]
    Exponent(f64),
    #[error("p = {p} is outside the S range 1 < p < {limit}")]
    SRegime { p: f64, limit: f64 },
    #[error("point has {got} coordinates, measure lives in dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("expected {expected} values of g, got {got}")]
    ValueCount { expected: usize, got: usize },
    #[error("g must be nonnegative on every atom")]
    NegativeG,
    #[error("the S adjoint of an atomic measure is not in L^{p_dual}")]
    SingularDualNorm { p_dual: f64 },
    #[error("norm grid misses an estimated {tail} of L^p' mass (allowed {tol})")]
    GridCoverage { tail: f64, tol: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

pub(crate) fn check_exponent<T: Real>(p: T) -> Result<(), PotentialError> {
    if p > T::one() && p.is_finite() {
        Ok(())
    } else {
        Err(PotentialError::Exponent(p.as_f64()))
    }
}

pub(crate) fn check_point<T: Real>(mu: &DiscreteMeasure<T>, x: &[T]) -> Result<(), PotentialError> {
    if x.len() == mu.dim() {
        Ok(())
    } else {
        Err(PotentialError::DimensionMismatch { expected: mu.dim(), got: x.len() })
    }
}
