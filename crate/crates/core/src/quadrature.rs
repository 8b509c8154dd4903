//! Gauss–Legendre rules and a globally adaptive panel integrator.
//!
//! Each panel is integrated with a 10- and a 20-point rule; the difference is
//! the panel's error estimate. The panel with the largest estimate is bisected
//! until the summed estimate drops below the tolerance.

use std::collections::BinaryHeap;
use std::cmp::Ordering;
use std::ops::{Add, Mul, Sub};
use std::sync::OnceLock;

use rustfft::num_complex::Complex;

use crate::scalar::Real;

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Computes an `n`-point rule by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, 0.0);
                for j in 0..n {
                    let p2 = p1;
                    p1 = p0;
                    p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
                }
                dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
                let dz = p0 / dp;
                z -= dz;
                if dz.abs() < 1e-16 {
                    break;
                }
            }
            nodes[i] = -z;
            nodes[n - 1 - i] = z;
            let w = 2.0 / ((1.0 - z * z) * dp * dp);
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    /// Integrates `f` over `[a, b]`.
    pub fn integrate<T: Real, V: Integrand<T>>(&self, a: T, b: T, f: &mut impl FnMut(T) -> V) -> V {
        let half = (b - a) * T::lit(0.5);
        let mid = (a + b) * T::lit(0.5);
        let mut acc = V::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * T::lit(*x)) * (T::lit(*w) * half);
        }
        acc
    }
}

pub fn gl10() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(10))
}

pub fn gl20() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(20))
}

pub fn gl8() -> &'static GaussLegendre {
    static RULE: OnceLock<GaussLegendre> = OnceLock::new();
    RULE.get_or_init(|| GaussLegendre::new(8))
}

/// Values the adaptive integrator can accumulate.
pub trait Integrand<T>: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> {
    fn zero() -> Self;
    fn magnitude(self) -> T;
}

impl<T: Real> Integrand<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn magnitude(self) -> T {
        self.abs()
    }
}

impl<T: Real> Integrand<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn magnitude(self) -> T {
        self.norm()
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<V, T> {
    pub value: V,
    pub error: T,
    pub panels: usize,
    pub converged: bool,
}

struct Panel<V, T> {
    a: T,
    b: T,
    value: V,
    error: T,
}

struct Keyed<V, T>(f64, Panel<V, T>);

impl<V, T> PartialEq for Keyed<V, T> {
    fn eq(&self, other: &Self) -> bool {
        self.0 == other.0
    }
}
impl<V, T> Eq for Keyed<V, T> {}
impl<V, T> PartialOrd for Keyed<V, T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V, T> Ord for Keyed<V, T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn panel<T: Real, V: Integrand<T>>(a: T, b: T, f: &mut impl FnMut(T) -> V) -> Panel<V, T> {
    let coarse = gl10().integrate(a, b, f);
    let fine = gl20().integrate(a, b, f);
    Panel { a, b, value: fine, error: (fine - coarse).magnitude() }
}

/// Integrates `f` over the union of the panels delimited by the sorted
/// `breakpoints`, bisecting the worst panel until the summed error estimate
/// is at most `tol` or `max_panels` is reached.
pub fn adaptive<T: Real, V: Integrand<T>>(
    mut f: impl FnMut(T) -> V,
    breakpoints: &[T],
    tol: T,
    max_panels: usize,
) -> Quadrature<V, T> {
    assert!(breakpoints.len() >= 2, "need at least one panel");
    let mut heap = BinaryHeap::new();
    let mut total_err = T::zero();
    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let p = panel(w[0], w[1], &mut f);
            total_err += p.error;
            heap.push(Keyed(p.error.as_f64(), p));
        }
    }
    let mut steps = 0usize;
    while total_err > tol && heap.len() < max_panels {
        let Some(Keyed(_, worst)) = heap.pop() else { break };
        let mid = (worst.a + worst.b) * T::lit(0.5);
        if !(mid > worst.a && mid < worst.b) {
            // Panel cannot be split further in this precision.
            heap.push(Keyed(-1.0, worst));
            break;
        }
        let left = panel(worst.a, mid, &mut f);
        let right = panel(mid, worst.b, &mut f);
        total_err = total_err - worst.error + left.error + right.error;
        heap.push(Keyed(left.error.as_f64(), left));
        heap.push(Keyed(right.error.as_f64(), right));
        steps += 1;
        if steps % 64 == 0 {
            total_err = heap.iter().map(|k| k.1.error).fold(T::zero(), |s, e| s + e);
        }
    }
    let mut panels: Vec<Panel<V, T>> = heap.into_iter().map(|k| k.1).collect();
    panels.sort_by(|x, y| x.a.partial_cmp(&y.a).unwrap_or(Ordering::Equal));
    let mut value = V::zero();
    let mut error = T::zero();
    for p in &panels {
        value = value + p.value;
        error += p.error;
    }
    Quadrature { value, error, panels: panels.len(), converged: error <= tol }
}

/// Breakpoints `0, b·2^{-levels}, …, b/2, b` grading geometrically toward the
/// origin, followed by `uniform` equal panels on `[b, end]`.
pub fn graded_breakpoints<T: Real>(b: T, levels: usize, end: T, uniform: usize) -> Vec<T> {
    let mut pts = Vec::with_capacity(levels + uniform + 2);
    pts.push(T::zero());
    for k in (0..levels).rev() {
        pts.push(b * T::lit(0.5f64.powi(k as i32 + 1)));
    }
    pts.push(b);
    if end > b {
        let n = uniform.max(1);
        for j in 1..=n {
            pts.push(b + (end - b) * T::lit(j as f64 / n as f64));
        }
    }
    pts
}
