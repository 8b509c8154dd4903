//! Seeded trial functions.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// `b(s) = (1 − s²)³` on `|s| < 1`, zero outside.
fn profile(s: f64) -> f64 {
    let u = 1.0 - s * s;
    if u > 0.0 {
        u * u * u
    } else {
        0.0
    }
}

/// `a · b((t − t0)/st) · Π_i b((x_i − x0_i)/sx)`; compactly supported.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bump {
    pub a: f64,
    pub t0: f64,
    pub st: f64,
    pub x0: Vec<f64>,
    pub sx: f64,
}

impl Bump {
    pub fn eval(&self, t: f64, x: &[f64]) -> f64 {
        self.a * profile((t - self.t0) / self.st) * self.eval_space(x)
    }

    /// The spatial factor alone, without `a`.
    pub fn eval_space(&self, x: &[f64]) -> f64 {
        x.iter().zip(&self.x0).map(|(x, c)| profile((x - c) / self.sx)).product()
    }

    /// `g_λ(t, x) = g(λ^{2α} t, λ x)`.
    pub fn rescaled(&self, lambda: f64, alpha: f64) -> Self {
        let lt = lambda.powf(2.0 * alpha);
        Self { a: self.a, t0: self.t0 / lt, st: self.st / lt, x0: self.x0.iter().map(|c| c / lambda).collect(), sx: self.sx / lambda }
    }

    /// Largest `|x_i|` and `t` where the bump is nonzero.
    pub fn reach(&self) -> (f64, f64) {
        let x = self.x0.iter().map(|c| c.abs() + self.sx).fold(0.0, f64::max);
        (self.t0 + self.st, x)
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo.ln()..hi.ln()).exp()
    } else {
        lo
    }
}

fn uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

/// Ranges for [`random_bump`]: centres uniform, widths log-uniform.
#[derive(Debug, Clone, Copy)]
pub(crate) struct BumpRanges {
    pub t0: (f64, f64),
    pub st: (f64, f64),
    pub x0: (f64, f64),
    pub sx: (f64, f64),
}

pub(crate) fn random_bump(rng: &mut ChaCha8Rng, r: &BumpRanges, dim: usize) -> Bump {
    let a = uniform(rng, 0.5, 1.5);
    let t0 = uniform(rng, r.t0.0, r.t0.1);
    let st = log_uniform(rng, r.st.0, r.st.1);
    let x0 = (0..dim).map(|_| uniform(rng, r.x0.0, r.x0.1)).collect();
    let sx = log_uniform(rng, r.sx.0, r.sx.1);
    Bump { a, t0, st, x0, sx }
}

/// `|Σ_k a_k cos(ξ_k x + φ_k) cos(ω_k t + ψ_k)|` with frequencies below the
/// given bands.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Wave {
    modes: Vec<[f64; 5]>,
}

impl Wave {
    pub fn random(rng: &mut ChaCha8Rng, modes: usize, band_x: f64, band_t: f64) -> Self {
        let modes = (0..modes)
            .map(|_| {
                let tau = std::f64::consts::TAU;
                [uniform(rng, -1.0, 1.0), uniform(rng, 0.0, band_x), uniform(rng, 0.0, tau), uniform(rng, 0.0, band_t), uniform(rng, 0.0, tau)]
            })
            .collect();
        Self { modes }
    }

    pub fn eval(&self, t: f64, x: f64) -> f64 {
        self.modes.iter().map(|[a, k, ph, w, ps]| a * (k * x + ph).cos() * (w * t + ps).cos()).sum::<f64>().abs()
    }
}
