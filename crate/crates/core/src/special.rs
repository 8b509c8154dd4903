//! Thin generic wrappers over the `statrs` special functions.

use crate::scalar::Real;

pub fn gamma<T: Real>(x: T) -> T {
    T::lit(statrs::function::gamma::gamma(x.as_f64()))
}

pub fn ln_gamma<T: Real>(x: T) -> T {
    T::lit(statrs::function::gamma::ln_gamma(x.as_f64()))
}

/// Unnormalized upper incomplete gamma `Γ(a, x) = ∫_x^∞ s^{a-1} e^{-s} ds`.
pub fn upper_gamma<T: Real>(a: T, x: T) -> T {
    let (a, x) = (a.as_f64(), x.as_f64());
    if x <= 0.0 {
        return T::lit(statrs::function::gamma::gamma(a));
    }
    let q = statrs::function::gamma::gamma_ur(a, x);
    T::lit((q.ln() + statrs::function::gamma::ln_gamma(a)).exp())
}

pub fn erf<T: Real>(x: T) -> T {
    T::lit(statrs::function::erf::erf(x.as_f64()))
}

pub fn erfc<T: Real>(x: T) -> T {
    T::lit(statrs::function::erf::erfc(x.as_f64()))
}

/// Volume of the unit ball in ℝ^n.
pub fn unit_ball_volume<T: Real>(n: usize) -> T {
    let half = T::lit(n as f64 / 2.0);
    T::PI().powf(half) / gamma(half + T::one())
}

/// Surface area of the unit sphere S^{n-1} ⊂ ℝ^n.
pub fn unit_sphere_area<T: Real>(n: usize) -> T {
    let half = T::lit(n as f64 / 2.0);
    T::lit(2.0) * T::PI().powf(half) / gamma(half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_and_ball_constants() {
        assert!((unit_sphere_area::<f64>(1) - 2.0).abs() < 1e-14);
        assert!((unit_sphere_area::<f64>(2) - 2.0 * std::f64::consts::PI).abs() < 1e-13);
        assert!((unit_sphere_area::<f64>(3) - 4.0 * std::f64::consts::PI).abs() < 1e-12);
        assert!((unit_ball_volume::<f64>(3) - 4.0 / 3.0 * std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn upper_gamma_matches_exponential_case() {
        // Γ(1, x) = e^{-x}
        for &x in &[0.1, 1.0, 5.0, 30.0] {
            let v: f64 = upper_gamma(1.0, x);
            assert!((v - (-x as f64).exp()).abs() <= 1e-12 * (-x as f64).exp().max(1e-300));
        }
    }
}
