//! Experiment harness: scaling fits, trace-inequality testers, Strichartz
//! sweeps, capacitary inequalities and report files. Everything here is a
//! pure function of its inputs and seed; the harness works in `f64`.

mod capacitary;
mod conditions;
mod config;
mod domination;
mod families;
mod report;
mod scaling;
pub mod stats;
mod strichartz;
mod trace;
mod trials;

pub use capacitary::{capacitary_suite, CapacitaryConfig, CapacitaryLevel, CapacitaryReport, CapacitaryTrial};
pub use conditions::{ball_sup, compact_sup, condition_values, wolff_integral, BallLattice, BallSup, CompactSup, ConditionValues};
pub use config::{check_alpha, check_s_regime, check_wolff_regime, ExperimentConfig};
pub use domination::{domination_constant, maximal_domination, Domination};
pub use families::{builtin_families, MeasureFamily, MeasureSource, Slab};
pub use report::{emit_report, fmt_f64, Table};
pub use scaling::{run_scaling, ScalingReport, ScalingRow};
pub use strichartz::{strichartz_sweep, StrichartzConfig, StrichartzReport, StrichartzRow};
pub use trace::{auto_grid, trace_ratio, TraceReport, TrialKind, TrialRatio, TrialSpec};
pub use trials::Bump;

use std::path::PathBuf;

use thiserror::Error;

use crate::capacity::CapacityError;
use crate::kernel::KernelError;
use crate::measure::MeasureError;
use crate::potentials::PotentialError;
use crate::semigroup::SemigroupError;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Csv { path: PathBuf, source: csv::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Capacity(#[from] CapacityError),
    #[error(transparent)]
    Semigroup(#[from] SemigroupError),
}
