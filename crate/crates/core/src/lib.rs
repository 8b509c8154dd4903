//! Potential theory for the fractional heat semigroup `e^{−t(−Δ)^α}`.
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the aliases
//! at the crate root fix `f64`, which is what the command line tool uses.

pub mod capacity;
pub mod geometry;
pub mod kernel;
pub mod lab;
pub mod measure;
pub mod potentials;
pub mod quadrature;
pub mod scalar;
pub mod semigroup;
pub mod special;

pub use scalar::Real;

pub type KernelSpec = kernel::KernelSpec<f64>;
pub type KernelValue = kernel::KernelValue<f64>;
pub type Kernel = kernel::Kernel<f64>;
pub type DiscreteMeasure = measure::DiscreteMeasure<f64>;
pub type ParabolicBall = geometry::ParabolicBall<f64>;
pub type DyadicCube = geometry::DyadicCube<f64>;
