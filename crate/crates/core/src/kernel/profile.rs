use rayon::prelude::*;

use crate::quadrature::gl8;
use crate::scalar::Real;
use crate::special;

use super::numeric::{invert, value_at_origin};
use super::{KernelError, KernelSpec};

/// Nodes per unit of `u = asinh(ρ/ρ₀)`.
const NODES_PER_UNIT: f64 = 16.0;
const RHO_MAX: f64 = 1e6;
const SERIES_TERMS: usize = 14;
/// Relative size of the last series terms at which the series takes over.
const SERIES_ACCURACY: f64 = 1e-12;

/// Tabulated unit-time profile `ρ ↦ K_1(ρ)` for an index without closed form.
///
/// `ln K_1` is interpolated by cubic Hermite splines in `u = asinh(ρ/ρ₀)`, with `ρ₀` well inside the
/// central peak. Once
/// it has converged (at the latest from `ρ = 10^6`) the large-`ρ` series
/// `K_1(ρ) = π^{−n/2−1} Σ_j (−1)^{j+1}/j! 4^{αj} Γ(n/2+αj) Γ(1+αj) sin(παj) ρ^{−n−2αj}`
/// is used. For `n = 1` the distribution function is tabulated alongside
/// as the survival function `P(X > ρ)`, accumulated from the far end so
/// small tail masses keep their relative accuracy.
#[derive(Debug, Clone)]
pub struct RadialProfile<T> {
    alpha: T,
    dim: usize,
    du: T,
    inner: T,
    log_k: Vec<T>,
    slope: Vec<T>,
    series: Vec<T>,
    survival: Vec<T>,
    log_surv: Vec<T>,
    surv_slope: Vec<T>,
    rel_err: T,
    mass_defect: T,
    mass_scale: T,
}

impl<T: Real> RadialProfile<T> {
    pub fn build(spec: &KernelSpec<T>) -> Result<Self, KernelError> {
        let alpha = spec.alpha;
        let dim = spec.dim;
        let du = T::lit(1.0 / NODES_PER_UNIT);
        let series = series_coefficients(alpha, dim);
        let rho_max = series_switch(&series, alpha);
        let inner = inner_scale(alpha, dim);
        let count = (to_u(inner, rho_max) / du).ceil().to_usize().unwrap_or(0) + 1;

        let eval = |rho: T| -> Result<T, KernelError> {
            if rho == T::zero() {
                return Ok(value_at_origin(alpha, dim, T::one()));
            }
            let tol = spec.envelope(T::one(), rho) * T::lit(1e-10);
            let v = invert(spec, T::one(), rho, tol);
            if !(v.value > T::zero()) || v.abs_error_bound > v.value * T::lit(1e-4) {
                return Err(KernelError::Unconverged {
                    achieved: v.abs_error_bound.as_f64(),
                    requested: tol.as_f64(),
                });
            }
            Ok(v.value)
        };

        let values: Vec<T> = (0..count)
            .into_par_iter()
            .map(|i| eval(from_u(inner, T::from_usize_lossy(i) * du)))
            .collect::<Result<_, _>>()?;
        let log_k: Vec<T> = values.iter().map(|v| v.ln()).collect();
        let slope = hermite_slopes(&log_k, du);

        let mut prof = Self {
            alpha,
            dim,
            du,
            inner,
            log_k,
            slope,
            series,
            survival: Vec::new(),
            log_surv: Vec::new(),
            surv_slope: Vec::new(),
            rel_err: T::zero(),
            mass_defect: T::zero(),
            mass_scale: T::one(),
        };

        // Interpolation error, measured against fresh inversions at the
        // midpoints of every fourth interval.
        let checks: Vec<T> = (0..count - 1)
            .step_by(4)
            .collect::<Vec<_>>()
            .into_par_iter()
            .map(|i| {
                let rho = from_u(inner, (T::from_usize_lossy(i) + T::lit(0.5)) * du);
                eval(rho).map(|exact| ((prof.unit(rho) - exact) / exact).abs())
            })
            .collect::<Result<_, _>>()?;
        let worst = checks.into_iter().fold(T::zero(), T::max);
        let switch = (prof.unit_series(rho_max) / prof.unit_table(rho_max) - T::one()).abs();
        prof.rel_err = (worst * T::lit(4.0)).max(switch * T::lit(2.0)).max(T::lit(1e-9));

        if dim == 1 {
            prof.build_survival();
        }
        Ok(prof)
    }

    fn build_survival(&mut self) {
        let n = self.log_k.len();
        let mut pieces = Vec::with_capacity(n - 1);
        for i in 0..n - 1 {
            let a = from_u(self.inner, T::from_usize_lossy(i) * self.du);
            let b = from_u(self.inner, T::from_usize_lossy(i + 1) * self.du);
            pieces.push(gl8().integrate(a, b, &mut |r| self.unit(r)));
        }
        let rho_max = from_u(self.inner, T::from_usize_lossy(n - 1) * self.du);
        let mut surv = vec![T::zero(); n];
        surv[n - 1] = self.series_tail_mass(rho_max);
        for i in (0..n - 1).rev() {
            surv[i] = surv[i + 1] + pieces[i];
        }
        let half = T::lit(0.5);
        self.mass_defect = (surv[0] - half).abs() * T::lit(2.0);
        self.mass_scale = half / surv[0];
        for s in &mut surv {
            *s *= self.mass_scale;
        }
        // ln S is interpolated like ln K, with exact slopes
        // d ln S/du = −K_1(ρ) ρ'(u) / S.
        self.log_surv = surv.iter().map(|v| v.ln()).collect();
        self.surv_slope = (0..n)
            .map(|i| {
                let u = T::from_usize_lossy(i) * self.du;
                let rho = from_u(self.inner, u);
                -self.unit(rho) * self.mass_scale * self.inner * u.cosh() / surv[i]
            })
            .collect();
        self.survival = surv;
        let worst = (0..n - 1)
            .map(|i| {
                let rho = from_u(self.inner, (T::from_usize_lossy(i) + T::lit(0.5)) * self.du);
                let exact = self.unit_survival_quadrature(rho);
                ((self.unit_survival(rho) - exact) / exact).abs()
            })
            .fold(T::zero(), T::max);
        self.rel_err = self.rel_err.max(worst * T::lit(4.0));
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Relative accuracy of [`RadialProfile::density`], from the midpoint
    /// checks and the table/series switch.
    pub fn rel_error_bound(&self) -> T {
        self.rel_err
    }

    /// `|1 − ∫K_1|` before renormalization of the survival table (`n = 1`).
    pub fn mass_defect(&self) -> T {
        self.mass_defect
    }

    fn rho_max(&self) -> T {
        from_u(self.inner, T::from_usize_lossy(self.log_k.len() - 1) * self.du)
    }

    fn unit_table(&self, rho: T) -> T {
        let u = to_u(self.inner, rho) / self.du;
        let last = self.log_k.len() - 1;
        let i = u.floor().to_usize().unwrap_or(0).min(last - 1);
        let s = u - T::from_usize_lossy(i);
        hermite(s, self.log_k[i], self.log_k[i + 1], self.slope[i] * self.du, self.slope[i + 1] * self.du).exp()
    }

    fn unit_series(&self, rho: T) -> T {
        let nf = T::from_usize_lossy(self.dim);
        let decay = rho.powf(-T::lit(2.0) * self.alpha);
        let mut p = decay;
        let mut sum = T::zero();
        for c in &self.series {
            sum += *c * p;
            p *= decay;
        }
        sum * rho.powf(-nf)
    }

    /// `∫_ρ^∞ K_1` from the series (`n = 1`).
    fn series_tail_mass(&self, rho: T) -> T {
        let two_a = T::lit(2.0) * self.alpha;
        let decay = rho.powf(-two_a);
        let mut p = decay;
        let mut sum = T::zero();
        for (j, c) in self.series.iter().enumerate() {
            sum += *c * p / (two_a * T::from_usize_lossy(j + 1));
            p *= decay;
        }
        sum
    }

    /// `K_1(ρ)`.
    pub fn unit(&self, rho: T) -> T {
        if rho <= self.rho_max() {
            self.unit_table(rho)
        } else {
            self.unit_series(rho)
        }
    }

    /// `K_t(x)` at `|x| = r`.
    pub fn density(&self, t: T, r: T) -> T {
        let two_a = T::lit(2.0) * self.alpha;
        let scale = t.powf(T::one() / two_a);
        self.unit(r / scale) / scale.powi(self.dim as i32)
    }

    /// `P(X > ρ)` at unit time, `ρ ≥ 0` (`n = 1`).
    pub fn unit_survival(&self, rho: T) -> T {
        debug_assert_eq!(self.dim, 1);
        if rho > self.rho_max() {
            return self.series_tail_mass(rho) * self.mass_scale;
        }
        let u = to_u(self.inner, rho) / self.du;
        let last = self.log_surv.len() - 1;
        let i = u.floor().to_usize().unwrap_or(0).min(last - 1);
        let s = u - T::from_usize_lossy(i);
        hermite(s, self.log_surv[i], self.log_surv[i + 1], self.surv_slope[i] * self.du, self.surv_slope[i + 1] * self.du).exp()
    }

    /// Survival from the node value and a quadrature of the table; the
    /// reference the interpolated survival is checked against.
    fn unit_survival_quadrature(&self, rho: T) -> T {
        let u = to_u(self.inner, rho) / self.du;
        let last = self.survival.len() - 1;
        let i = u.floor().to_usize().unwrap_or(0).min(last - 1);
        let a = from_u(self.inner, T::from_usize_lossy(i) * self.du);
        let part = gl8().integrate(a, rho, &mut |r| self.unit(r));
        (self.survival[i] - part * self.mass_scale).max(T::zero())
    }

    /// `P(X_t > z)` for `z ≥ 0` (`n = 1`).
    pub fn survival(&self, t: T, z: T) -> T {
        let scale = t.powf(T::one() / (T::lit(2.0) * self.alpha));
        self.unit_survival(z / scale)
    }

    /// `P(X_t ≤ z)` (`n = 1`).
    pub fn cdf(&self, t: T, z: T) -> T {
        if z >= T::zero() {
            T::one() - self.survival(t, z)
        } else {
            self.survival(t, -z)
        }
    }
}

/// Smallest `ρ` on a half-decade grid (capped at `10^6`) where the last
/// three series terms are below `SERIES_ACCURACY` relative to the first.
fn series_switch<T: Real>(coef: &[T], alpha: T) -> T {
    let mut rho = T::lit(10.0);
    let step = T::lit(10f64.sqrt());
    while rho < T::lit(RHO_MAX) {
        let d = rho.powf(-T::lit(2.0) * alpha);
        let k = coef.len();
        let last = (k - 3..k)
            .map(|j| coef[j].abs() * d.powi(j as i32))
            .fold(T::zero(), T::max);
        if last <= T::lit(SERIES_ACCURACY) * coef[0].abs() {
            return rho;
        }
        rho = rho * step;
    }
    T::lit(RHO_MAX)
}

/// Inner length scale of the node grid, a fraction of the width of the
/// central peak `√(K(0)/|K''(0)|)`, which shrinks quickly for small `α`.
fn inner_scale<T: Real>(alpha: T, dim: usize) -> T {
    let nf = T::from_usize_lossy(dim);
    let two_a = T::lit(2.0) * alpha;
    let ln_ratio = special::ln_gamma(nf / two_a) - special::ln_gamma((nf + T::lit(2.0)) / two_a);
    let width = (T::lit(2.0) * nf).sqrt() * (ln_ratio / T::lit(2.0)).exp();
    (T::lit(0.02) * width).min(T::lit(0.01))
}

fn to_u<T: Real>(inner: T, rho: T) -> T {
    (rho / inner).asinh()
}

/// Cubic Hermite interpolant on `[0, 1]` with end values `y` and end
/// derivatives `m`.
fn hermite<T: Real>(s: T, y0: T, y1: T, m0: T, m1: T) -> T {
    let s2 = s * s;
    let s3 = s2 * s;
    let two = T::lit(2.0);
    let three = T::lit(3.0);
    (two * s3 - three * s2 + T::one()) * y0 + (s3 - two * s2 + s) * m0 + (three * s2 - two * s3) * y1 + (s3 - s2) * m1
}

fn from_u<T: Real>(inner: T, u: T) -> T {
    u.sinh() * inner
}

/// `c` in `K_1(ρ) ~ c ρ^{−n−2α}` as `ρ → ∞` (zero at `α = 1`).
pub(crate) fn tail_coefficient<T: Real>(alpha: T, dim: usize) -> T {
    if alpha >= T::one() {
        return T::zero();
    }
    series_coefficients(alpha, dim)[0]
}

fn series_coefficients<T: Real>(alpha: T, dim: usize) -> Vec<T> {
    let nf = T::from_usize_lossy(dim);
    let pre = T::PI().powf(-nf / T::lit(2.0) - T::one());
    (1..=SERIES_TERMS)
        .map(|j| {
            let jf = T::from_usize_lossy(j);
            let aj = alpha * jf;
            let sign = if j % 2 == 1 { T::one() } else { -T::one() };
            let log_mag = special::ln_gamma(nf / T::lit(2.0) + aj) + special::ln_gamma(T::one() + aj)
                + aj * T::lit(4.0).ln()
                - special::ln_gamma(jf + T::one());
            sign * pre * log_mag.exp() * (T::PI() * aj).sin()
        })
        .collect()
}

/// Fourth-order centered slopes; the profile is even in `u`, so `u = 0`
/// gets slope zero and mirrored neighbours.
fn hermite_slopes<T: Real>(y: &[T], h: T) -> Vec<T> {
    let n = y.len();
    let at = |i: isize| -> T {
        if i < 0 {
            y[(-i) as usize]
        } else {
            y[(i as usize).min(n - 1)]
        }
    };
    (0..n as isize)
        .map(|i| {
            if i == 0 {
                T::zero()
            } else if (i as usize) + 2 < n {
                (at(i - 2) - T::lit(8.0) * at(i - 1) + T::lit(8.0) * at(i + 1) - at(i + 2)) / (T::lit(12.0) * h)
            } else if (i as usize) + 1 < n {
                (at(i + 1) - at(i - 1)) / (T::lit(2.0) * h)
            } else {
                (at(i) - at(i - 1)) / h
            }
        })
        .collect()
}
