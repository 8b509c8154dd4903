//! Fourier inversion of `exp(−t|ξ|^{2α})`.
//!
//! The radial inversion reduces to `J_m(a; t) = ∫_0^∞ ξ^m e^{iaξ − tξ^{2α}} dξ`
//! with `m ∈ {0, 1}`:
//!
//! * `n = 1`: `K = Re J_0(|x|) / π`
//! * `n = 2`: `K = π^{-2} ∫_0^{π/2} Re J_1(|x| cos φ) dφ`
//! * `n = 3`: `K = Im J_1(|x|) / (2π²|x|)`
//!
//! `J_m` is integrated along the ray `ξ = s e^{iθ}`, `θ = min(π/2, π/8α)`,
//! where the integrand decays like `exp(−a s sin θ − t s^{2α} cos 2αθ)` and no
//! longer oscillates. The ray is truncated where an explicit tail bound falls
//! below a fraction of the tolerance, and the returned error bound is the
//! quadrature estimate plus that tail bound plus a round-off term.

use rustfft::num_complex::Complex;

use crate::quadrature::adaptive;
use crate::scalar::Real;
use crate::special;

use super::{KernelSpec, KernelValue};

const MAX_PANELS: usize = 4000;

struct Ray<T> {
    alpha: T,
    theta: T,
    /// `cos 2αθ`, the damping factor of `s^{2α}` on the ray.
    damp: T,
}

impl<T: Real> Ray<T> {
    fn new(alpha: T) -> Self {
        let theta = (T::FRAC_PI_2()).min(T::PI() / (T::lit(8.0) * alpha));
        let damp = (T::lit(2.0) * alpha * theta).cos();
        Self { alpha, theta, damp }
    }

    /// Bound on `∫_S^∞ s^m e^{−c s^{2α}} ds`.
    fn decay_tail(&self, m: usize, c: T, s: T) -> T {
        let two_a = T::lit(2.0) * self.alpha;
        let p = T::from_usize_lossy(m + 1) / two_a;
        c.powf(-p) * special::upper_gamma(p, c * s.powf(two_a)) / two_a
    }

    /// Bound on `∫_S^∞ s^m e^{−b s} ds`.
    fn exp_tail(m: usize, b: T, s: T) -> T {
        let e = (-b * s).exp();
        if m == 0 {
            e / b
        } else {
            e * (s / b + T::one() / (b * b))
        }
    }

    /// `∫_0^∞ |integrand| ds`, used for the round-off term.
    fn abs_mass(&self, m: usize, b: T, c: T) -> T {
        let decay = self.decay_tail(m, c, T::zero());
        if b > T::zero() {
            decay.min(Self::exp_tail(m, b, T::zero()))
        } else {
            decay
        }
    }

    fn integrate(&self, m: usize, a: T, t: T, cutoff: T, tol: T) -> (Complex<T>, T) {
        let c = t * self.damp;
        let b = a * self.theta.sin();
        let tail_budget = tol * T::lit(0.1);
        let mut s_end = cutoff;
        let mut tail = self.decay_tail(m, c, s_end);
        while tail > tail_budget && s_end < T::max_value() / T::lit(4.0) {
            s_end = s_end * T::lit(2.0);
            tail = self.decay_tail(m, c, s_end);
        }
        if b > T::zero() {
            let mut s = (-(tail_budget * b).ln() / b).max(T::zero());
            for _ in 0..6 {
                let lead = if m == 0 { T::one() / b } else { s / b + T::one() / (b * b) };
                s = ((lead / tail_budget).ln() / b).max(T::zero());
            }
            if s < s_end {
                s_end = s;
                tail = self.decay_tail(m, c, s_end).min(Self::exp_tail(m, b, s_end));
            }
        }
        let two_a = T::lit(2.0) * self.alpha;
        let e1 = Complex::from_polar(T::one(), self.theta);
        let e2 = Complex::from_polar(T::one(), two_a * self.theta);
        let ia = Complex::new(T::zero(), a) * e1;
        let f = |s: T| {
            if s <= T::zero() {
                return if m == 0 { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) };
            }
            let z = ia * s - e2 * (t * s.powf(two_a));
            let v = z.exp();
            if m == 0 {
                v
            } else {
                v * s
            }
        };
        let mut pts = Vec::with_capacity(64);
        pts.push(T::zero());
        for k in (0..48).rev() {
            pts.push(s_end * T::lit(0.5f64.powi(k + 1)));
        }
        pts.push(s_end);
        let round = T::epsilon() * T::lit(8.0) * self.abs_mass(m, b, c);
        // Refining below the round-off floor only burns panels.
        let quad_tol = (tol - tail).max(tol * T::lit(0.05)).max(round);
        let q = adaptive(f, &pts, quad_tol, MAX_PANELS);
        let pre = Complex::from_polar(T::one(), T::from_usize_lossy(m + 1) * self.theta);
        (q.value * pre, q.error + tail + round)
    }
}

/// Ray truncation radius at `t = 1` leaving a tail far below `spec.tol`.
pub(crate) fn default_cutoff<T: Real>(spec: &KernelSpec<T>) -> T {
    let ray = Ray::new(spec.alpha);
    let target = spec.tol * T::lit(1e-4);
    let (mut lo, mut hi) = (T::zero(), T::one());
    while ray.decay_tail(1, ray.damp, hi) > target && hi < T::lit(1e30) {
        lo = hi;
        hi = hi * T::lit(2.0);
    }
    for _ in 0..60 {
        let mid = (lo + hi) * T::lit(0.5);
        if ray.decay_tail(1, ray.damp, mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// `K_t(0) = (2π)^{-n} |S^{n−1}| Γ(n/2α) / (2α) · t^{−n/2α}`.
pub fn value_at_origin<T: Real>(alpha: T, dim: usize, t: T) -> T {
    let nf = T::from_usize_lossy(dim);
    let two_a = T::lit(2.0) * alpha;
    (T::lit(2.0) * T::PI()).powf(-nf) * special::unit_sphere_area::<T>(dim) * special::gamma(nf / two_a) / two_a
        * t.powf(-nf / two_a)
}

/// `K_t(x)` at `|x| = r` to absolute tolerance `tol`.
///
/// The returned bound may exceed `tol` when the panel budget runs out; the
/// caller decides whether that is an error.
pub fn invert<T: Real>(spec: &KernelSpec<T>, t: T, r: T, tol: T) -> KernelValue<T> {
    let ray = Ray::new(spec.alpha);
    let two_a = T::lit(2.0) * spec.alpha;
    let cutoff = spec.freq_cutoff * t.powf(-T::one() / two_a);
    match spec.dim {
        1 => {
            let pi = T::PI();
            let (j, err) = ray.integrate(0, r, t, cutoff, tol * pi);
            KernelValue { value: j.re / pi, abs_error_bound: err / pi }
        }
        3 => three_d(&ray, t, r, cutoff, tol),
        _ => projected(&ray, t, r, cutoff, tol),
    }
}

fn three_d<T: Real>(ray: &Ray<T>, t: T, r: T, cutoff: T, tol: T) -> KernelValue<T> {
    let pi = T::PI();
    let two_a = T::lit(2.0) * ray.alpha;
    let rho = r * t.powf(-T::one() / two_a);
    if rho < T::lit(1e-3) {
        // K(0) − c₂ r² with the next Taylor term as the error bound; the
        // contour loses digits to cancellation as r → 0.
        let norm = (T::lit(2.0) * pi).powi(-3) * T::lit(4.0) * pi / two_a;
        let k0 = norm * special::gamma(T::lit(3.0) / two_a) * t.powf(-T::lit(3.0) / two_a);
        let c2 = norm * special::gamma(T::lit(5.0) / two_a) * t.powf(-T::lit(5.0) / two_a) / T::lit(6.0);
        let c4 = norm * special::gamma(T::lit(7.0) / two_a) * t.powf(-T::lit(7.0) / two_a) / T::lit(120.0);
        let r2 = r * r;
        let bound = c4 * r2 * r2 + k0 * T::round_off();
        if bound <= tol || rho == T::zero() {
            return KernelValue { value: k0 - c2 * r2, abs_error_bound: bound };
        }
    }
    let scale = T::lit(2.0) * pi * pi * r;
    let (j, err) = ray.integrate(1, r, t, cutoff, tol * scale);
    KernelValue { value: j.im / scale, abs_error_bound: err / scale }
}

/// `n = 2` as the marginal of `n = 3`: `K²(ρ) = 2 ∫_0^∞ K³(√(ρ² + w²)) dw`.
fn projected<T: Real>(ray: &Ray<T>, t: T, r: T, cutoff: T, tol: T) -> KernelValue<T> {
    let two_a = T::lit(2.0) * ray.alpha;
    let ell = t.powf(T::one() / two_a);
    let len = r.max(ell);
    // Pointwise budget q(w) with ∫ q = 1, so the summed 3-d errors stay below tol/10.
    let budget = |w: T| T::lit(0.05) * tol * len.sqrt() * T::lit(0.5) * (len + w).powf(-T::lit(1.5));
    let k3 = |w: T| three_d(ray, t, (r * r + w * w).sqrt(), cutoff, budget(w));

    // Leading large-radius coefficient of K³, used to bound the truncated tail.
    let c1 = T::PI().powf(-T::lit(2.5))
        * T::lit(4.0).powf(ray.alpha)
        * special::gamma(T::lit(1.5) + ray.alpha)
        * special::gamma(T::one() + ray.alpha)
        * (T::PI() * ray.alpha).sin();
    let expo = T::lit(3.0) + two_a;
    let tail_at = |w: T| {
        let k = k3(w).value;
        let rad = (r * r + w * w).sqrt();
        let c = (k * rad.powf(expo) / t).max(c1);
        c * t * w.powf(T::one() - expo) / (expo - T::one())
    };
    let mut w_end = len * T::lit(8.0);
    let mut tail = tail_at(w_end);
    while tail > tol * T::lit(0.05) && w_end < len * T::lit(1e30) {
        w_end = w_end * T::lit(4.0);
        tail = tail_at(w_end);
    }
    let mut pts = vec![T::zero(), len * T::lit(0.25), len * T::lit(0.5)];
    let mut b = len;
    while b < w_end {
        pts.push(b);
        b = b * T::lit(2.0);
    }
    pts.push(w_end);
    let q = adaptive(
        |w: T| {
            let v = k3(w);
            Complex::new(v.value, v.abs_error_bound)
        },
        &pts,
        tol * T::lit(0.3),
        2000,
    );
    let two = T::lit(2.0);
    KernelValue { value: two * q.value.re, abs_error_bound: two * (q.error + q.value.im + tail) }
}
