//! Ball-capacity scaling in the radius.

use rayon::prelude::*;
use serde::Serialize;

use crate::capacity::{ball_capacity, SolverControls};
use crate::geometry::ParabolicBall;
use crate::kernel::Kernel;
use crate::semigroup::Operator;

use super::stats::{fit_loglog, LineFit};
use super::LabError;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingRow {
    pub r: f64,
    pub primal: f64,
    pub dual: f64,
    pub gap: f64,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingReport {
    pub operator: Operator,
    pub alpha: f64,
    pub p: f64,
    pub dim: usize,
    pub rows: Vec<ScalingRow>,
    /// Fit of `ln √(primal·dual)` against `ln r`.
    pub fit: LineFit,
    /// `n` for `R`, `n + 2α(1 − p)` for `S`.
    pub expected_slope: f64,
}

/// Capacities of `B_r(0, 0)` for every `r`, each sampled on
/// `samples = (nt, nx)` points, and the fitted log–log slope.
pub fn run_scaling(
    operator: Operator,
    kernel: &Kernel<f64>,
    p: f64,
    radii: &[f64],
    samples: (usize, usize),
    ctl: &SolverControls<f64>,
) -> Result<ScalingReport, LabError> {
    if radii.len() < 2 {
        return Err(LabError::Config("a slope needs at least two radii".into()));
    }
    let alpha = kernel.alpha();
    let dim = kernel.dim();
    let rows: Vec<ScalingRow> = radii
        .par_iter()
        .map(|&r| {
            let ball = ParabolicBall::new(0.0, vec![0.0; dim], r, alpha);
            let e = ball_capacity(operator, kernel, &ball, p, samples, ctl)?;
            Ok(ScalingRow { r, primal: e.primal, dual: e.dual, gap: e.gap, converged: e.converged })
        })
        .collect::<Result<_, LabError>>()?;
    let mid: Vec<f64> = rows.iter().map(|r| (r.primal * r.dual).sqrt()).collect();
    let fit = fit_loglog(radii, &mid).ok_or_else(|| LabError::Config("radii must be distinct".into()))?;
    let expected_slope = match operator {
        Operator::R => dim as f64,
        Operator::S => dim as f64 + 2.0 * alpha * (1.0 - p),
    };
    Ok(ScalingReport { operator, alpha, p, dim, rows, fit, expected_slope })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::KernelSpec;

    #[test]
    fn cauchy_r_slope_is_one() {
        let k = Kernel::new(&KernelSpec::new(0.5, 1).unwrap()).unwrap();
        let radii = [0.25, 0.5, 1.0, 2.0];
        let rep = run_scaling(Operator::R, &k, 2.0, &radii, (8, 16), &SolverControls::default()).unwrap();
        assert!((rep.fit.slope - 1.0).abs() < 0.05, "{:?}", rep.fit);
        assert_eq!(rep.expected_slope, 1.0);
        assert!(rep.rows.iter().all(|r| r.dual <= r.primal));
        assert!(run_scaling(Operator::R, &k, 2.0, &[1.0], (8, 16), &SolverControls::default()).is_err());
    }
}
