use serde::{Deserialize, Serialize};

use crate::scalar::Real;

use super::coupling::Coupling;
use super::CapacityError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverControls<T> {
    pub max_iter: usize,
    /// Target relative gap `(primal − dual)/primal`.
    pub tol: T,
    pub feas_tol: T,
}

impl<T: Real> Default for SolverControls<T> {
    fn default() -> Self {
        Self { max_iter: 4000, tol: T::lit(1e-3), feas_tol: T::lit(1e-6) }
    }
}

/// A certified bracket `dual ≤ C ≤ primal` for the discretized capacity.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityEstimate<T> {
    /// `Σ vol h^p` of the feasible `witness_h`.
    pub primal: T,
    /// `(Σ_j μ_j)^p` of `witness_mu`, which has `‖Aᵀμ‖_{p'} = 1`.
    pub dual: T,
    pub gap: T,
    pub witness_h: Vec<T>,
    pub witness_mu: Vec<T>,
    pub iterations: usize,
    pub converged: bool,
}

impl<T: Real> CapacityEstimate<T> {
    /// `(1 − min_j (A h)_j, ‖Aᵀμ‖_{p'} − 1, min h)`.
    pub fn residuals(&self, a: &Coupling<T>, p: T) -> (T, T, T) {
        let q = p / (p - T::one());
        let ah = a.apply(&self.witness_h);
        let lo = ah.iter().copied().fold(T::infinity(), T::min);
        let norm = a.norm_pow(&a.adjoint(&self.witness_mu), q).powf(T::one() / q);
        let hmin = self.witness_h.iter().copied().fold(T::infinity(), T::min);
        (T::one() - lo, norm - T::one(), hmin)
    }

    pub fn midpoint(&self) -> T {
        (self.primal * self.dual).sqrt()
    }
}

struct Bounds<T> {
    upper: T,
    h: Vec<T>,
    lower: T,
    mu: Vec<T>,
}

/// Bounds generated by a nonnegative direction `w` on the samples: the
/// Hölder-extremal `h ∝ (Aᵀw)^{p'−1}` rescaled to feasibility, and `w`
/// rescaled to unit dual norm.
fn bounds_from<T: Real>(a: &Coupling<T>, w: &[T], p: T) -> Option<Bounds<T>> {
    let q = p / (p - T::one());
    let at = a.adjoint(w);
    let f = a.norm_pow(&at, q);
    if !(f > T::zero()) || !f.is_finite() {
        return None;
    }
    let scale = f.powf(-T::one() / q);
    let mu: Vec<T> = w.iter().map(|v| *v * scale).collect();
    let lower = mu.iter().copied().sum::<T>().powf(p);
    let mut h: Vec<T> = at.iter().map(|v| v.max(T::zero()).powf(q - T::one())).collect();
    let s = a.apply(&h).into_iter().fold(T::infinity(), T::min);
    let upper = if s > T::zero() {
        h.iter_mut().for_each(|v| *v = *v / s);
        a.norm_pow(&h, p)
    } else {
        T::infinity()
    };
    Some(Bounds { upper, h, lower, mu })
}

/// Euclidean projection onto the probability simplex.
fn project_simplex<T: Real>(v: &mut [T]) {
    let mut u: Vec<T> = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite iterate"));
    let mut cum = T::zero();
    let mut theta = T::zero();
    for (i, ui) in u.iter().enumerate() {
        cum += *ui;
        let cand = (cum - T::one()) / T::from_usize_lossy(i + 1);
        if *ui - cand > T::zero() {
            theta = cand;
        }
    }
    v.iter_mut().for_each(|x| *x = (*x - theta).max(T::zero()));
}

fn project_nonneg<T: Real>(v: &mut [T]) {
    v.iter_mut().for_each(|x| *x = x.max(T::zero()));
}

/// Accelerated projected gradient with backtracking and function-value
/// restart.
struct Fista<T> {
    x: Vec<T>,
    y: Vec<T>,
    fx: T,
    theta: T,
    lip: T,
}

impl<T: Real> Fista<T> {
    fn new(x: Vec<T>, fx: T, lip: T) -> Self {
        Self { y: x.clone(), x, fx, theta: T::one(), lip }
    }

    fn step(&mut self, value: &impl Fn(&[T]) -> T, grad: &impl Fn(&[T]) -> (T, Vec<T>), proj: &impl Fn(&mut [T])) {
        let (fy, gy) = grad(&self.y);
        let slack = T::round_off() * fy.abs().max(T::one());
        let (z, fz) = loop {
            let mut z: Vec<T> = self.y.iter().zip(&gy).map(|(y, g)| *y - *g / self.lip).collect();
            proj(&mut z);
            let fz = value(&z);
            let (mut lin, mut quad) = (T::zero(), T::zero());
            for ((zi, yi), gi) in z.iter().zip(&self.y).zip(&gy) {
                let d = *zi - *yi;
                lin += *gi * d;
                quad += d * d;
            }
            if fz <= fy + lin + self.lip / T::lit(2.0) * quad + slack || self.lip > T::lit(1e300) {
                break (z, fz);
            }
            self.lip = self.lip * T::lit(2.0);
        };
        if fz > self.fx {
            self.y = self.x.clone();
            self.theta = T::one();
        } else {
            let theta_next = (T::one() + (T::one() + T::lit(4.0) * self.theta * self.theta).sqrt()) / T::lit(2.0);
            let m = (self.theta - T::one()) / theta_next;
            self.y = z.iter().zip(&self.x).map(|(zi, xi)| *zi + m * (*zi - *xi)).collect();
            self.x = z;
            self.fx = fz;
            self.theta = theta_next;
        }
        self.lip = self.lip * T::lit(0.9);
    }
}

/// Solves both sides of the discretized capacity problem
///
/// `min Σ_c vol_c h_c^p` subject to `A h ≥ 1`, `h ≥ 0`, and
/// `max (Σ_j μ_j)^p` subject to `‖Aᵀμ‖_{p'} ≤ 1`, `μ ≥ 0`.
///
/// The primal side maximizes the Lagrange dual function over multipliers
/// `λ ≥ 0` using the closed-form minimizer `h = (Aᵀλ/p)^{p'−1}`; the dual side
/// minimizes `‖Aᵀw‖_{p'}^{p'}` over the simplex. Every iterate of either
/// yields a feasible `h` and a feasible `μ`; the best of each is kept, so
/// the bracket is sound however early the iteration stops.
pub fn solve<T: Real>(a: &Coupling<T>, p: T, ctl: &SolverControls<T>) -> Result<CapacityEstimate<T>, CapacityError> {
    if !(p > T::one()) || !p.is_finite() {
        return Err(CapacityError::Exponent(p.as_f64()));
    }
    if a.rows == 0 {
        return Err(CapacityError::EmptySet);
    }
    let q = p / (p - T::one());
    let n = a.rows;
    let ones = vec![T::one(); n];

    // simplex side: f(w) = ‖Aᵀw‖^{p'}
    let f_val = |w: &[T]| a.norm_pow(&a.adjoint(w), q);
    let f_grad = |w: &[T]| {
        let at = a.adjoint(w);
        let pw: Vec<T> = at.iter().map(|v| v.max(T::zero()).powf(q - T::one())).collect();
        let g = a.apply(&pw).into_iter().map(|v| v * q).collect();
        (a.norm_pow(&at, q), g)
    };
    // multiplier side: −G(λ) = (p − 1) Σ vol (Aᵀλ/p)^{p'} − Σλ
    let g_val = |l: &[T]| {
        let at: Vec<T> = a.adjoint(l).into_iter().map(|v| v / p).collect();
        (p - T::one()) * a.norm_pow(&at, q) - l.iter().copied().sum::<T>()
    };
    let g_grad = |l: &[T]| {
        let at: Vec<T> = a.adjoint(l).into_iter().map(|v| v / p).collect();
        let h: Vec<T> = at.iter().map(|v| v.max(T::zero()).powf(q - T::one())).collect();
        let g = a.apply(&h).into_iter().map(|v| v - T::one()).collect();
        ((p - T::one()) * a.norm_pow(&at, q) - l.iter().copied().sum::<T>(), g)
    };

    let w0 = vec![T::one() / T::from_usize_lossy(n); n];
    // best multiple of 1 along the ray: s = (n / (p B))^{1/(p'−1)}, B = Σ vol (Aᵀ1/p)^{p'}
    let b = a.norm_pow(&a.adjoint(&ones).into_iter().map(|v| v / p).collect::<Vec<_>>(), q);
    let s = (T::from_usize_lossy(n) / (p * b)).powf(p - T::one());
    let l0: Vec<T> = ones.iter().map(|v| *v * s).collect();

    let mut simplex = Fista::new(w0.clone(), f_val(&w0), T::one());
    let mut mult = Fista::new(l0.clone(), g_val(&l0), T::one());

    let mut best: Option<(T, Vec<T>)> = None;
    let mut best_low: Option<(T, Vec<T>)> = None;
    let absorb = |w: &[T], best: &mut Option<(T, Vec<T>)>, best_low: &mut Option<(T, Vec<T>)>| {
        if let Some(bd) = bounds_from(a, w, p) {
            if best.as_ref().is_none_or(|(u, _)| bd.upper < *u) {
                *best = Some((bd.upper, bd.h));
            }
            if best_low.as_ref().is_none_or(|(l, _)| bd.lower > *l) {
                *best_low = Some((bd.lower, bd.mu));
            }
        }
    };
    absorb(&w0, &mut best, &mut best_low);
    absorb(&l0, &mut best, &mut best_low);

    let gap_of = |b: &Option<(T, Vec<T>)>, l: &Option<(T, Vec<T>)>| match (b, l) {
        (Some((u, _)), Some((lo, _))) if u.is_finite() && *u > T::zero() => (*u - *lo) / *u,
        _ => T::infinity(),
    };
    let mut iterations = 0;
    while iterations < ctl.max_iter && gap_of(&best, &best_low) > ctl.tol {
        simplex.step(&f_val, &f_grad, &project_simplex);
        mult.step(&g_val, &g_grad, &project_nonneg);
        iterations += 1;
        if iterations % 5 == 0 || iterations == ctl.max_iter {
            absorb(&simplex.x, &mut best, &mut best_low);
            absorb(&mult.x, &mut best, &mut best_low);
        }
    }
    let (Some((mut primal, witness_h)), Some((mut dual, witness_mu))) = (best, best_low) else {
        return Err(CapacityError::Degenerate);
    };
    if !primal.is_finite() {
        return Err(CapacityError::Degenerate);
    }
    // one-constraint problems give identical bounds up to the last ulp
    if dual > primal && dual - primal <= T::round_off() * primal {
        dual = primal;
    }
    primal = primal.max(dual);
    let gap = (primal - dual) / primal;
    Ok(CapacityEstimate { primal, dual, gap, witness_h, witness_mu, iterations, converged: gap <= ctl.tol })
}
