//! Parabolic balls and `α`-dyadic cubes in `ℝ_+^{1+n}`.

use serde::Serialize;
use thiserror::Error;

use crate::scalar::Real;
use crate::special;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("point time {t} lies before the family shift {shift}")]
    BeforeShift { t: f64, shift: f64 },
    #[error("expected {expected} spatial coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty scale range {lo}..={hi}")]
    EmptyScaleRange { lo: i32, hi: i32 },
}

/// A closed or open region of space-time that can test membership.
pub trait Region<T> {
    fn contains(&self, t: T, x: &[T]) -> bool;
}

fn dist<T: Real>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(a, b)| (*a - *b) * (*a - *b)).sum::<T>().sqrt()
}

/// `B_r(t0, x0) = {(t, x) : r^{2α} < t − t0 < 2r^{2α}, |x − x0| < r}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ParabolicBall<T> {
    pub t0: T,
    pub x0: Vec<T>,
    pub r: T,
    pub alpha: T,
}

impl<T: Real> ParabolicBall<T> {
    pub fn new(t0: T, x0: Vec<T>, r: T, alpha: T) -> Self {
        Self { t0, x0, r, alpha }
    }

    pub fn dim(&self) -> usize {
        self.x0.len()
    }

    /// Open time window `(t0 + r^{2α}, t0 + 2r^{2α})`.
    pub fn time_window(&self) -> (T, T) {
        let h = self.r.powf(T::lit(2.0) * self.alpha);
        (self.t0 + h, self.t0 + T::lit(2.0) * h)
    }

    /// Lebesgue measure `r^{2α} · |B_1| r^n`.
    pub fn volume(&self) -> T {
        let n = self.dim();
        self.r.powf(T::lit(2.0) * self.alpha) * special::unit_ball_volume::<T>(n) * self.r.powi(n as i32)
    }
}

impl<T: Real> Region<T> for ParabolicBall<T> {
    fn contains(&self, t: T, x: &[T]) -> bool {
        let (lo, hi) = self.time_window();
        lo < t && t < hi && dist(x, &self.x0) < self.r
    }
}

/// Radii `r` for which `(s, y) ∈ B_r(t, x)`: the open interval
/// `(max(((s−t)/2)^{1/2α}, |y−x|), (s−t)^{1/2α})`, or `None` when empty.
pub fn containment_interval<T: Real>(s: T, y: &[T], t: T, x: &[T], alpha: T) -> Option<(T, T)> {
    if !(s > t) {
        return None;
    }
    let inv = T::one() / (T::lit(2.0) * alpha);
    let dt = s - t;
    let lo = (dt / T::lit(2.0)).powf(inv).max(dist(y, x));
    let hi = dt.powf(inv);
    (lo < hi).then_some((lo, hi))
}

/// Closed axis-aligned box `[t_lo, t_hi] × Π [x_lo, x_hi]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxRegion<T> {
    pub t: (T, T),
    pub x: Vec<(T, T)>,
}

impl<T: Real> BoxRegion<T> {
    pub fn contains_box(&self, other: &BoxRegion<T>) -> bool {
        self.t.0 <= other.t.0
            && other.t.1 <= self.t.1
            && self.x.iter().zip(&other.x).all(|(a, b)| a.0 <= b.0 && b.1 <= a.1)
    }
}

impl<T: Real> Region<T> for BoxRegion<T> {
    fn contains(&self, t: T, x: &[T]) -> bool {
        self.t.0 <= t && t <= self.t.1 && self.x.iter().zip(x).all(|((lo, hi), v)| *lo <= *v && *v <= *hi)
    }
}

/// `τ + [k0 l^{2α}, (k0+1) l^{2α}] × Π [k_i l, (k_i+1) l]` with `l = 2^m`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DyadicCube<T> {
    pub m: i32,
    pub k0: i64,
    pub k: Vec<i64>,
    /// Shift `τ = (τ_t, τ_x)`, length `1 + n`.
    pub shift: Vec<T>,
    pub alpha: T,
}

impl<T: Real> DyadicCube<T> {
    pub fn side(&self) -> T {
        T::lit(2.0).powi(self.m)
    }

    pub fn time_extent(&self) -> T {
        self.side().powf(T::lit(2.0) * self.alpha)
    }

    pub fn bounds(&self) -> BoxRegion<T> {
        let l = self.side();
        let h = self.time_extent();
        let edge = |origin: T, k: i64, len: T| (origin + T::lit(k as f64) * len, origin + T::lit((k + 1) as f64) * len);
        let x = self.k.iter().enumerate().map(|(i, &k)| edge(self.shift[i + 1], k, l)).collect();
        BoxRegion { t: edge(self.shift[0], self.k0, h), x }
    }

    /// Same centre, spatial side `2l`, time extent `(2l)^{2α}`, clipped at `t = 0`.
    pub fn dilate(&self) -> BoxRegion<T> {
        let b = self.bounds();
        let two = T::lit(2.0);
        let l = self.side();
        let half_t = (two * l).powf(two * self.alpha) / two;
        let tc = (b.t.0 + b.t.1) / two;
        let x = b.x.iter().map(|(lo, hi)| (*lo - l / two, *hi + l / two)).collect();
        BoxRegion { t: ((tc - half_t).max(T::zero()), tc + half_t), x }
    }
}

impl<T: Real> Region<T> for DyadicCube<T> {
    fn contains(&self, t: T, x: &[T]) -> bool {
        self.bounds().contains(t, x)
    }
}

/// The cube of scale `m` in the `τ`-shifted family containing `(t, x)`; on
/// shared faces the cube with the larger index wins (lower-edge rule).
pub fn cube_containing<T: Real>(
    t: T,
    x: &[T],
    m: i32,
    shift: &[T],
    alpha: T,
) -> Result<DyadicCube<T>, GeometryError> {
    if shift.len() != x.len() + 1 {
        return Err(GeometryError::DimensionMismatch { expected: shift.len().saturating_sub(1), got: x.len() });
    }
    if t < shift[0] {
        return Err(GeometryError::BeforeShift { t: t.as_f64(), shift: shift[0].as_f64() });
    }
    let l = T::lit(2.0).powi(m);
    let h = l.powf(T::lit(2.0) * alpha);
    let idx = |v: T| v.floor().to_i64().unwrap_or(i64::MAX);
    Ok(DyadicCube {
        m,
        k0: idx((t - shift[0]) / h),
        k: x.iter().enumerate().map(|(i, v)| idx((*v - shift[i + 1]) / l)).collect(),
        shift: shift.to_vec(),
        alpha,
    })
}

/// One cube per scale in `scales`, finest first.
pub fn cubes_containing<T: Real>(
    t: T,
    x: &[T],
    scales: std::ops::RangeInclusive<i32>,
    shift: &[T],
    alpha: T,
) -> Result<Vec<DyadicCube<T>>, GeometryError> {
    if scales.is_empty() {
        return Err(GeometryError::EmptyScaleRange { lo: *scales.start(), hi: *scales.end() });
    }
    scales.map(|m| cube_containing(t, x, m, shift, alpha)).collect()
}

/// Default scale range `m ∈ [−20, 20]`.
pub const DEFAULT_SCALES: std::ops::RangeInclusive<i32> = -20..=20;

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn ball_examples() {
        let b = ParabolicBall::<f64>::new(0.0, vec![0.0], 1.0, 0.5);
        assert!(b.contains(1.5, &[0.0]));
        assert!(!b.contains(1.0, &[0.0]));
        assert!(!b.contains(2.0, &[0.0]));
        assert!(!b.contains(1.5, &[1.0]));
        assert!((b.volume() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn interval_examples() {
        assert_eq!(containment_interval(1.0, &[0.0], 0.0, &[0.0], 0.5), Some((0.5, 1.0)));
        assert_eq!(containment_interval(1.0, &[0.0], 1.0, &[0.0], 0.5), None);
        let (lo, hi) = containment_interval::<f64>(1.0, &[0.9], 0.0, &[0.0], 0.5).unwrap();
        assert!((lo - 0.9).abs() < 1e-15 && hi == 1.0);
        assert_eq!(containment_interval(1.0, &[1.5], 0.0, &[0.0], 0.5), None);
    }

    #[test]
    fn cube_examples() {
        let shift = [0.0, 0.0];
        let c = cube_containing(0.3, &[0.7], 0, &shift, 0.5).unwrap();
        assert_eq!((c.k0, c.k.clone()), (0, vec![0]));
        assert!(c.contains(1.0, &[1.0]));
        let c = cube_containing(0.3, &[0.7], -1, &shift, 0.5).unwrap();
        assert_eq!((c.k0, c.k.clone()), (0, vec![1]));
        let c = cube_containing(0.3, &[0.5], -1, &shift, 0.5).unwrap();
        assert_eq!(c.k, vec![1]);
        assert!(matches!(cube_containing(-0.1, &[0.5], 0, &shift, 0.5), Err(GeometryError::BeforeShift { .. })));
    }

    #[test]
    fn dilation_example() {
        let c = cube_containing(0.5, &[0.5], 0, &[0.0, 0.0], 0.5).unwrap();
        let d = c.dilate();
        assert_eq!(d.t, (0.0, 1.5));
        assert_eq!(d.x, vec![(-0.5, 1.5)]);
        let c = cube_containing(5.5, &[0.5], 0, &[0.0, 0.0], 0.5).unwrap();
        assert_eq!(c.dilate().t, (4.5, 6.5));
    }

    fn alpha_strategy() -> impl Strategy<Value = f64> {
        prop_oneof![Just(0.25), Just(0.5), Just(0.75), Just(1.0), 0.05f64..1.0]
    }

    proptest! {
        #[test]
        fn interval_matches_membership(
            alpha in alpha_strategy(),
            s in 0.0f64..4.0, y in -2.0f64..2.0,
            t in 0.0f64..4.0, x in -2.0f64..2.0,
            r in 0.001f64..3.0,
        ) {
            let ball = ParabolicBall::new(t, vec![x], r, alpha);
            let inside = ball.contains(s, &[y]);
            let by_interval = containment_interval(s, &[y], t, &[x], alpha)
                .is_some_and(|(lo, hi)| lo < r && r < hi);
            // Exact ties at the interval ends are resolved identically only up
            // to rounding; skip radii within rounding of an endpoint.
            if let Some((lo, hi)) = containment_interval(s, &[y], t, &[x], alpha) {
                prop_assume!((r - lo).abs() > 1e-12 && (r - hi).abs() > 1e-12);
            }
            prop_assert_eq!(inside, by_interval);
        }

        #[test]
        fn dilation_contains_cube(alpha in alpha_strategy(), t in 0.0f64..8.0, x in -4.0f64..4.0, m in -4i32..4) {
            let c = cube_containing(t, &[x], m, &[0.0, 0.0], alpha).unwrap();
            prop_assert!(c.dilate().contains_box(&c.bounds()));
            prop_assert!(c.contains(t, &[x]));
        }

        #[test]
        fn cubes_nest_when_time_grids_refine(
            alpha in prop_oneof![Just(0.5), Just(1.0)],
            t in 0.0f64..16.0, x in -8.0f64..8.0, y in -8.0f64..8.0,
            st in 0.0f64..1.0, sx in -1.0f64..1.0,
        ) {
            let shift = [st, sx, 0.0];
            prop_assume!(t >= st);
            let cubes = cubes_containing(t, &[x, y], -6..=4, &shift, alpha).unwrap();
            for w in cubes.windows(2) {
                prop_assert!(w[1].bounds().contains_box(&w[0].bounds()));
            }
        }
    }
}
