use std::ops::RangeInclusive;

use rayon::prelude::*;
use serde::Serialize;

use crate::geometry::{containment_interval, cube_containing};
use crate::measure::DiscreteMeasure;
use crate::scalar::Real;
use crate::semigroup::{s_regime_limit, Operator};

use super::sweep::{sweep, Window};
use super::{check_exponent, check_point, PotentialError};

/// A radius interval, the ball mass on it and its share of the potential.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WolffPiece<T> {
    pub lo: T,
    pub hi: T,
    pub mass: T,
    pub value: T,
}

/// `∫_0^ρ (μ(B_r(t, x)) / r^β)^{p'−1} dr/r` with its piecewise breakdown;
/// `β = n` for `R` and `β = n + 2α(1 − p)` for `S`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WolffProfile<T> {
    pub t: T,
    pub x: Vec<T>,
    pub operator: Operator,
    pub p: T,
    pub truncation: Option<T>,
    /// Partition of `(0, ρ)`.
    pub pieces: Vec<WolffPiece<T>>,
    pub value: T,
}

/// `∫_a^b (c r^{−β})^e dr/r`.
fn piece_integral<T: Real>(c: T, a: T, b: T, e: T, beta: T) -> T {
    if !(c > T::zero()) {
        return T::zero();
    }
    let k = beta * e;
    let head = c.powf(e) * a.powf(-k) / k;
    if b.is_infinite() {
        head
    } else {
        // a^{−k} − b^{−k} = −a^{−k} expm1(−k ln(1 + (b − a)/a))
        -head * (-k * ((b - a) / a).ln_1p()).exp_m1()
    }
}

fn radial<T: Real>(
    mu: &DiscreteMeasure<T>,
    p: T,
    t: T,
    x: &[T],
    alpha: T,
    beta: T,
    operator: Operator,
    truncation: Option<T>,
) -> WolffProfile<T> {
    let e = T::one() / (p - T::one());
    let windows: Vec<Window<T>> = mu
        .atoms()
        .filter(|a| a.w > T::zero())
        .filter_map(|a| containment_interval(a.t, a.x, t, x, alpha).map(|(lo, hi)| Window { lo, hi, w: a.w, g: T::zero() }))
        .collect();
    let end = truncation.unwrap_or(T::infinity());
    let pieces: Vec<WolffPiece<T>> = sweep(&windows, T::zero(), end)
        .into_iter()
        .map(|pc| WolffPiece { lo: pc.lo, hi: pc.hi, mass: pc.mass, value: piece_integral(pc.mass, pc.lo, pc.hi, e, beta) })
        .collect();
    let value = pieces.iter().map(|pc| pc.value).sum();
    WolffProfile { t, x: x.to_vec(), operator, p, truncation, pieces, value }
}

/// `P^R μ(t, x) = ∫_0^ρ (μ(B_r(t, x))/r^n)^{p'−1} dr/r`, exact for atomic `μ`.
pub fn wolff_r<T: Real>(
    mu: &DiscreteMeasure<T>,
    p: T,
    t: T,
    x: &[T],
    alpha: T,
    truncation: Option<T>,
) -> Result<WolffProfile<T>, PotentialError> {
    check_exponent(p)?;
    check_point(mu, x)?;
    let beta = T::from_usize_lossy(mu.dim());
    Ok(radial(mu, p, t, x, alpha, beta, Operator::R, truncation))
}

/// `P^S μ(t, x) = ∫_0^∞ (μ(B_r(t, x))/r^{n+2α(1−p)})^{p'−1} dr/r` for
/// `1 < p < 1 + n/(2α)`.
pub fn wolff_s<T: Real>(mu: &DiscreteMeasure<T>, p: T, t: T, x: &[T], alpha: T) -> Result<WolffProfile<T>, PotentialError> {
    check_exponent(p)?;
    check_point(mu, x)?;
    let limit = s_regime_limit(alpha, mu.dim());
    if !(p < limit) {
        return Err(PotentialError::SRegime { p: p.as_f64(), limit: limit.as_f64() });
    }
    let beta = T::from_usize_lossy(mu.dim()) + T::lit(2.0) * alpha * (T::one() - p);
    Ok(radial(mu, p, t, x, alpha, beta, Operator::S, None))
}

/// Dispatches on the operator.
pub fn wolff<T: Real>(
    operator: Operator,
    mu: &DiscreteMeasure<T>,
    p: T,
    t: T,
    x: &[T],
    alpha: T,
) -> Result<WolffProfile<T>, PotentialError> {
    match operator {
        Operator::R => wolff_r(mu, p, t, x, alpha, None),
        Operator::S => wolff_s(mu, p, t, x, alpha),
    }
}

/// Potential values at many points, in input order.
pub fn wolff_batch<T: Real>(
    operator: Operator,
    mu: &DiscreteMeasure<T>,
    p: T,
    points: &[(T, Vec<T>)],
    alpha: T,
) -> Result<Vec<T>, PotentialError> {
    points.par_iter().map(|(t, x)| wolff(operator, mu, p, *t, x, alpha).map(|w| w.value)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DyadicTerm<T> {
    pub m: i32,
    pub mass: T,
    pub value: T,
}

/// Dyadic potential over a finite scale range, with a bound on the scales
/// above the range.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicWolff<T> {
    pub value: T,
    pub terms: Vec<DyadicTerm<T>>,
    /// `Σ_{m > m_max} (‖μ‖/2^{mn})^{p'−1}`, which dominates every omitted
    /// coarse-scale term.
    pub tail_bound: T,
}

/// `Σ_Q (μ(Q)/l^n)^{p'−1} 1_Q(t, x)` over the `shift`-translated `α`-dyadic
/// cubes with `l = 2^m`, `m ∈ scales`. Cubes are half-open (lower-edge
/// rule), so each atom lies in one cube per scale.
pub fn wolff_dyadic<T: Real>(
    mu: &DiscreteMeasure<T>,
    p: T,
    t: T,
    x: &[T],
    alpha: T,
    scales: RangeInclusive<i32>,
    shift: &[T],
) -> Result<DyadicWolff<T>, PotentialError> {
    check_exponent(p)?;
    check_point(mu, x)?;
    let e = T::one() / (p - T::one());
    let n = mu.dim() as i32;
    let mut terms = Vec::new();
    for m in scales.clone() {
        let q = cube_containing(t, x, m, shift, alpha)?;
        let mass: T = mu
            .atoms()
            .filter(|a| a.t >= shift[0])
            .filter(|a| cube_containing(a.t, a.x, m, shift, alpha).is_ok_and(|c| c.k0 == q.k0 && c.k == q.k))
            .map(|a| a.w)
            .sum();
        let value = if mass > T::zero() { (mass / T::lit(2.0).powi(m * n)).powf(e) } else { T::zero() };
        terms.push(DyadicTerm { m, mass, value });
    }
    let value = terms.iter().map(|d| d.value).sum();
    let decay = T::lit(2.0).powf(-T::from_i32(n).unwrap() * e);
    let top = T::from_i32(*scales.end() + 1).unwrap();
    let tail_bound = mu.total().powf(e) * decay.powf(top) / (T::one() - decay);
    Ok(DyadicWolff { value, terms, tail_bound })
}
