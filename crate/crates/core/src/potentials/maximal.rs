use std::ops::RangeInclusive;

use crate::geometry::{containment_interval, cube_containing};
use crate::measure::DiscreteMeasure;
use crate::scalar::Real;

use super::sweep::{sweep, Piece, Window};
use super::{check_point, PotentialError};

fn dist<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>().sqrt()
}

/// `sup_r c r^{−n}` over pieces: the supremum on an open piece is the limit
/// at its left end.
fn sup_left<T: Real>(pieces: &[Piece<T>], n: usize) -> T {
    pieces
        .iter()
        .filter(|pc| pc.count > 0)
        .map(|pc| pc.mass / pc.lo.powi(n as i32))
        .fold(T::zero(), T::max)
}

/// `M_α μ(x) = sup_{r>0} r^{−n} μ(B_r(r^{2α}, x))`.
///
/// `B_r(r^{2α}, x)` has time window `(2r^{2α}, 3r^{2α})`, so an atom `(s, y)`
/// is inside for `r ∈ ((s/3)^{1/2α}, (s/2)^{1/2α}) ∩ (|y − x|, ∞)`.
pub fn maximal_r<T: Real>(mu: &DiscreteMeasure<T>, x: &[T], alpha: T) -> Result<T, PotentialError> {
    check_point(mu, x)?;
    let inv = T::one() / (T::lit(2.0) * alpha);
    let windows: Vec<Window<T>> = mu
        .atoms()
        .filter(|a| a.w > T::zero())
        .map(|a| Window {
            lo: (a.t / T::lit(3.0)).powf(inv).max(dist(a.x, x)),
            hi: (a.t / T::lit(2.0)).powf(inv),
            w: a.w,
            g: T::zero(),
        })
        .collect();
    Ok(sup_left(&sweep(&windows, T::zero(), T::infinity()), mu.dim()))
}

/// `sup_{r>0} r^{−n} μ(B_r(t, x))`.
pub fn maximal_spacetime<T: Real>(mu: &DiscreteMeasure<T>, t: T, x: &[T], alpha: T) -> Result<T, PotentialError> {
    check_point(mu, x)?;
    let windows = ball_windows(mu, None, t, x, alpha);
    Ok(sup_left(&sweep(&windows, T::zero(), T::infinity()), mu.dim()))
}

fn ball_windows<T: Real>(mu: &DiscreteMeasure<T>, g: Option<&[T]>, t: T, x: &[T], alpha: T) -> Vec<Window<T>> {
    mu.atoms()
        .enumerate()
        .filter(|(_, a)| a.w > T::zero())
        .filter_map(|(i, a)| {
            containment_interval(a.t, a.x, t, x, alpha).map(|(lo, hi)| Window {
                lo,
                hi,
                w: a.w,
                g: g.map_or(T::zero(), |g| g[i] * a.w),
            })
        })
        .collect()
}

fn check_g<T: Real>(g: &[T], mu: &DiscreteMeasure<T>) -> Result<(), PotentialError> {
    if g.len() != mu.len() {
        return Err(PotentialError::ValueCount { expected: mu.len(), got: g.len() });
    }
    if g.iter().any(|v| !(*v >= T::zero())) {
        return Err(PotentialError::NegativeG);
    }
    Ok(())
}

/// `sup_r μ(B_r(t, x))^{−1} ∫_{B_r(t, x)} g dμ`, skipping radii whose ball
/// carries no mass; `g` holds one value per atom.
pub fn maximal_centered<T: Real>(g: &[T], mu: &DiscreteMeasure<T>, t: T, x: &[T], alpha: T) -> Result<T, PotentialError> {
    check_point(mu, x)?;
    check_g(g, mu)?;
    let windows = ball_windows(mu, Some(g), t, x, alpha);
    Ok(sweep(&windows, T::zero(), T::infinity())
        .iter()
        .filter(|pc| pc.count > 0 && pc.mass > T::zero())
        .map(|pc| pc.g_mass / pc.mass)
        .fold(T::zero(), T::max))
}

/// Supremum of `μ(Q)^{−1} ∫_Q g dμ` over the dyadic cubes containing
/// `(t, x)` with `μ(Q) > 0`.
pub fn maximal_dyadic<T: Real>(
    g: &[T],
    mu: &DiscreteMeasure<T>,
    t: T,
    x: &[T],
    alpha: T,
    scales: RangeInclusive<i32>,
    shift: &[T],
) -> Result<T, PotentialError> {
    check_point(mu, x)?;
    check_g(g, mu)?;
    let mut best = T::zero();
    for m in scales {
        let q = cube_containing(t, x, m, shift, alpha)?;
        let (mut mass, mut g_mass) = (T::zero(), T::zero());
        for (i, a) in mu.atoms().enumerate() {
            if a.t >= shift[0] && cube_containing(a.t, a.x, m, shift, alpha).is_ok_and(|c| c.k0 == q.k0 && c.k == q.k) {
                mass += a.w;
                g_mass += a.w * g[i];
            }
        }
        if mass > T::zero() {
            best = best.max(g_mass / mass);
        }
    }
    Ok(best)
}
