use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::kernel::Kernel;
use crate::quadrature::gl8;
use crate::scalar::Real;
use crate::semigroup::{Grid, Operator};

use super::{CapacityError, CompactSetApprox};

/// Piecewise constant trial space for `h`: spatial cells of width `h`
/// centred on the nodes of a `[−L, L)` grid, and for `S` additionally time
/// cells `[m Δ, (m + 1) Δ)`, `Δ = T/M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellGrid<T> {
    pub half_width: T,
    pub h: T,
    pub horizon: T,
    pub steps: usize,
}

impl<T: Real> CellGrid<T> {
    pub fn new(half_width: T, h: T, horizon: T, steps: usize) -> Result<Self, CapacityError> {
        Grid::new(1, half_width, h)?;
        if !(horizon > T::zero()) || steps == 0 {
            return Err(CapacityError::Grid("time axis needs T > 0 and M ≥ 1".into()));
        }
        Ok(Self { half_width, h, horizon, steps })
    }

    /// Parses `"L,h,T,M"`.
    pub fn parse(s: &str) -> Result<Self, CapacityError> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let bad = || CapacityError::Grid(format!("expected \"L,h,T,M\", got {s:?}"));
        if parts.len() != 4 {
            return Err(bad());
        }
        let num = |i: usize| parts[i].parse::<f64>().map_err(|_| bad());
        let steps = parts[3].parse::<usize>().map_err(|_| bad())?;
        Self::new(T::lit(num(0)?), T::lit(num(1)?), T::lit(num(2)?), steps)
    }

    pub fn space(&self) -> Grid<T> {
        Grid::new(1, self.half_width, self.h).expect("validated grid")
    }

    pub fn dt(&self) -> T {
        self.horizon / T::from_usize_lossy(self.steps)
    }

    pub fn space_cells(&self) -> usize {
        self.space().len()
    }

    /// Number of cells of the trial space for `operator`.
    pub fn cells(&self, operator: Operator) -> usize {
        match operator {
            Operator::R => self.space_cells(),
            Operator::S => self.space_cells() * self.steps,
        }
    }

    /// `(t_lo, t_hi, x_lo, x_hi)` of cell `c`; `R` cells have no time extent.
    pub fn cell(&self, operator: Operator, c: usize) -> (T, T, T, T) {
        let nx = self.space_cells();
        let (m, i) = (c / nx, c % nx);
        let xc = self.space().coord(i);
        let half = self.h / T::lit(2.0);
        match operator {
            Operator::R => (T::zero(), T::zero(), xc - half, xc + half),
            Operator::S => {
                let dt = self.dt();
                (dt * T::from_usize_lossy(m), dt * T::from_usize_lossy(m + 1), xc - half, xc + half)
            }
        }
    }

    pub fn cell_volume(&self, operator: Operator) -> T {
        match operator {
            Operator::R => self.h,
            Operator::S => self.h * self.dt(),
        }
    }

    /// Uniformly rescales space by `r` and time by `r^{2α}`.
    pub fn scaled(&self, r: T, alpha: T) -> Self {
        let tr = r.powf(T::lit(2.0) * alpha);
        Self { half_width: self.half_width * r, h: self.h * r, horizon: self.horizon * tr, steps: self.steps }
    }
}

/// Dense `rows × cols` matrix with `(T h)(t_j, x_j) = Σ_c a[j, c] vol_c h_c`
/// for `h` piecewise constant on the cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Coupling<T> {
    pub rows: usize,
    pub cols: usize,
    pub a: Vec<T>,
    pub vol: Vec<T>,
}

impl<T: Real> Coupling<T> {
    pub fn new(rows: usize, cols: usize, a: Vec<T>, vol: Vec<T>) -> Result<Self, CapacityError> {
        if a.len() != rows * cols || vol.len() != cols {
            return Err(CapacityError::Grid(format!("coupling shape {rows}×{cols} does not match data")));
        }
        Ok(Self { rows, cols, a, vol })
    }

    pub fn row(&self, j: usize) -> &[T] {
        &self.a[j * self.cols..(j + 1) * self.cols]
    }

    /// `(A (vol ⊙ h))_j` for every row.
    pub fn apply(&self, h: &[T]) -> Vec<T> {
        let vh: Vec<T> = h.iter().zip(&self.vol).map(|(h, v)| *h * *v).collect();
        (0..self.rows).map(|j| self.row(j).iter().zip(&vh).map(|(a, b)| *a * *b).sum()).collect()
    }

    /// `(Aᵀ w)_c`.
    pub fn adjoint(&self, w: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.cols];
        for (j, wj) in w.iter().enumerate() {
            if *wj != T::zero() {
                for (o, a) in out.iter_mut().zip(self.row(j)) {
                    *o += *wj * *a;
                }
            }
        }
        out
    }

    /// Rows restricted to `keep`, in that order.
    pub fn select_rows(&self, keep: &[usize]) -> Self {
        let a = keep.iter().flat_map(|&j| self.row(j).iter().copied()).collect();
        Self { rows: keep.len(), cols: self.cols, a, vol: self.vol.clone() }
    }

    pub fn scaled(&self, c: T) -> Self {
        Self { a: self.a.iter().map(|v| *v * c).collect(), ..self.clone() }
    }

    /// `Σ_c vol_c |f_c|^q`.
    pub fn norm_pow(&self, f: &[T], q: T) -> T {
        f.iter().zip(&self.vol).map(|(f, v)| *v * f.abs().powf(q)).sum()
    }
}

/// `∫_{τ_lo}^{τ_hi} ∫_a^b K_τ(y) dy dτ` for the one-dimensional kernel.
fn lag_integral<T: Real>(kernel: &Kernel<T>, tau_lo: T, tau_hi: T, a: T, b: T) -> T {
    let rule = gl8();
    let mut f = |tau: T| kernel.interval_mass(tau, a, b);
    let mut total = T::zero();
    let two = T::lit(2.0);
    if tau_lo > T::zero() {
        let mut lo = tau_lo;
        while lo < tau_hi {
            let hi = (lo * two).min(tau_hi);
            total += rule.integrate(lo, hi, &mut f);
            lo = hi;
        }
    } else {
        let mut hi = tau_hi;
        for _ in 0..40 {
            let lo = hi / two;
            total += rule.integrate(lo, hi, &mut f);
            hi = lo;
        }
        // the innermost piece, where the mass is within rounding of its limit
        total += f(hi / two) * hi;
    }
    total
}

/// Cell-averaged kernel coupling between the samples of `set` and the cells
/// of `grid`. Rows are computed in parallel.
pub fn assemble<T: Real>(
    operator: Operator,
    kernel: &Kernel<T>,
    set: &CompactSetApprox<T>,
    grid: &CellGrid<T>,
) -> Result<Coupling<T>, CapacityError> {
    if kernel.dim() != 1 || set.dim() != 1 {
        return Err(CapacityError::UnsupportedDim(set.dim().max(kernel.dim())));
    }
    let cols = grid.cells(operator);
    let vol = grid.cell_volume(operator);
    let rows: Vec<Vec<T>> = set
        .points
        .par_iter()
        .map(|(t, x)| {
            (0..cols)
                .map(|c| {
                    let (s_lo, s_hi, y_lo, y_hi) = grid.cell(operator, c);
                    let (a, b) = (y_lo - x[0], y_hi - x[0]);
                    let v = match operator {
                        Operator::R => kernel.interval_mass(*t, a, b),
                        Operator::S if s_lo >= *t => T::zero(),
                        Operator::S => lag_integral(kernel, (*t - s_hi).max(T::zero()), *t - s_lo, a, b),
                    };
                    v / vol
                })
                .collect()
        })
        .collect();
    for (j, r) in rows.iter().enumerate() {
        if r.iter().all(|v| *v == T::zero()) {
            return Err(CapacityError::ZeroRow { index: j });
        }
    }
    Coupling::new(set.points.len(), cols, rows.concat(), vec![vol; cols])
}
