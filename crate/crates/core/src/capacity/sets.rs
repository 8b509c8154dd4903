use serde::Serialize;

use crate::geometry::ParabolicBall;
use crate::scalar::Real;

use super::CapacityError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SetTag {
    Ball,
    Superlevel,
    Union,
    Custom,
}

/// Finite sample of a compact `K ⊂ ℝ_+^{1+n}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CompactSetApprox<T> {
    pub points: Vec<(T, Vec<T>)>,
    pub tag: SetTag,
}

impl<T: Real> CompactSetApprox<T> {
    pub fn new(points: Vec<(T, Vec<T>)>, tag: SetTag) -> Result<Self, CapacityError> {
        let Some(first) = points.first() else {
            return Err(CapacityError::EmptySet);
        };
        let n = first.1.len();
        for (t, x) in &points {
            if !(*t > T::zero()) || !t.is_finite() {
                return Err(CapacityError::NonPositiveTime(t.as_f64()));
            }
            if x.len() != n {
                return Err(CapacityError::UnsupportedDim(x.len()));
            }
        }
        Ok(Self { points, tag })
    }

    pub fn custom(points: Vec<(T, Vec<T>)>) -> Result<Self, CapacityError> {
        Self::new(points, SetTag::Custom)
    }

    /// `nt × nx` product sample of the closure of a ball with `n = 1`: times
    /// at the midpoints of `nt` equal slices of the time window, positions at
    /// the midpoints of `nx` slices of `(x0 − r, x0 + r)`. Samples with
    /// `t ≤ 0` are dropped.
    pub fn ball(ball: &ParabolicBall<T>, nt: usize, nx: usize) -> Result<Self, CapacityError> {
        if ball.dim() != 1 {
            return Err(CapacityError::UnsupportedDim(ball.dim()));
        }
        let (lo, hi) = ball.time_window();
        let mut points = Vec::with_capacity(nt * nx);
        for i in 0..nt {
            let t = lo + (hi - lo) * T::lit((i as f64 + 0.5) / nt as f64);
            if !(t > T::zero()) {
                continue;
            }
            for k in 0..nx {
                let x = ball.x0[0] + ball.r * T::lit(-1.0 + (2.0 * k as f64 + 1.0) / nx as f64);
                points.push((t, vec![x]));
            }
        }
        Self::new(points, SetTag::Ball)
    }

    pub fn union(parts: &[Self]) -> Result<Self, CapacityError> {
        Self::new(parts.iter().flat_map(|s| s.points.iter().cloned()).collect(), SetTag::Union)
    }

    pub fn dim(&self) -> usize {
        self.points[0].1.len()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// `((t_min, t_max), [(x_min, x_max); n])`.
    pub fn bounding_box(&self) -> ((T, T), Vec<(T, T)>) {
        let n = self.dim();
        let mut t = (T::infinity(), T::neg_infinity());
        let mut x = vec![(T::infinity(), T::neg_infinity()); n];
        for (s, y) in &self.points {
            t = (t.0.min(*s), t.1.max(*s));
            for (b, v) in x.iter_mut().zip(y) {
                *b = (b.0.min(*v), b.1.max(*v));
            }
        }
        (t, x)
    }

    /// Keeps the samples at `indices`.
    pub fn subset(&self, indices: &[usize], tag: SetTag) -> Result<Self, CapacityError> {
        Self::new(indices.iter().map(|&i| self.points[i].clone()).collect(), tag)
    }
}
