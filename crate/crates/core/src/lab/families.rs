//! Built-in test measures. All are atomizations: a continuum measure is
//! replaced by one atom per cell, at the cell midpoint, carrying the cell's
//! mass.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::measure::{DiscreteMeasure, MeasureError};

/// Lebesgue measure with total mass `mass` on
/// `(t0, t0 + thickness) × [−half_width, half_width]^dim`, atomized on
/// `nt × nx^dim` cells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Slab {
    pub t0: f64,
    pub thickness: f64,
    pub half_width: f64,
    pub mass: f64,
    pub nt: usize,
    pub nx: usize,
    #[serde(default = "one")]
    pub dim: usize,
}

fn one() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum MeasureFamily {
    Dirac { t: f64, x: Vec<f64>, w: f64 },
    SlabLebesgue(Slab),
    /// Surface measure of constant `density` on
    /// `{t} × [−half_width, half_width]^dim`, atomized on `nx^dim` cells.
    Hyperplane {
        t: f64,
        half_width: f64,
        density: f64,
        nx: usize,
        #[serde(default = "one")]
        dim: usize,
    },
    /// Sum of a coarse and a fine slab.
    TwoScale { coarse: Slab, fine: Slab },
}

/// Where an experiment takes its measure from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MeasureSource {
    File { file: PathBuf },
    Builtin(MeasureFamily),
}

impl MeasureSource {
    pub fn load(&self) -> Result<DiscreteMeasure<f64>, MeasureError> {
        match self {
            Self::File { file } => DiscreteMeasure::load(file),
            Self::Builtin(f) => f.build(),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Self::File { file } => format!("file:{}", file.display()),
            Self::Builtin(f) => format!("builtin:{}", f.label()),
        }
    }
}

/// Midpoints of `n` equal cells of `[lo, hi]`.
fn midpoints(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let h = (hi - lo) / n as f64;
    (0..n).map(move |i| lo + (i as f64 + 0.5) * h)
}

/// All points of the `nx^dim` midpoint lattice of the cube.
fn cube_lattice(half_width: f64, nx: usize, dim: usize) -> Vec<Vec<f64>> {
    let axis: Vec<f64> = midpoints(-half_width, half_width, nx).collect();
    let mut out = vec![Vec::new()];
    for _ in 0..dim {
        out = out.into_iter().flat_map(|p| axis.iter().map(move |v| [p.clone(), vec![*v]].concat())).collect();
    }
    out
}

fn push_slab(mu: &mut DiscreteMeasure<f64>, s: &Slab) -> Result<(), MeasureError> {
    let cells = cube_lattice(s.half_width, s.nx, s.dim);
    let w = s.mass / (s.nt * cells.len()) as f64;
    for t in midpoints(s.t0, s.t0 + s.thickness, s.nt) {
        for x in &cells {
            mu.push(t, x, w)?;
        }
    }
    Ok(())
}

impl MeasureFamily {
    pub fn build(&self) -> Result<DiscreteMeasure<f64>, MeasureError> {
        match self {
            Self::Dirac { t, x, w } => DiscreteMeasure::dirac(*t, x.clone(), *w),
            Self::SlabLebesgue(s) => {
                let mut mu = DiscreteMeasure::new(s.dim);
                push_slab(&mut mu, s)?;
                Ok(mu)
            }
            Self::Hyperplane { t, half_width, density, nx, dim } => {
                let cells = cube_lattice(*half_width, *nx, *dim);
                let w = density * (2.0 * half_width / *nx as f64).powi(*dim as i32);
                let mut mu = DiscreteMeasure::new(*dim);
                for x in &cells {
                    mu.push(*t, x, w)?;
                }
                Ok(mu)
            }
            Self::TwoScale { coarse, fine } => {
                if coarse.dim != fine.dim {
                    return Err(MeasureError::DimensionMismatch { expected: coarse.dim, got: fine.dim });
                }
                let mut mu = DiscreteMeasure::new(coarse.dim);
                push_slab(&mut mu, coarse)?;
                push_slab(&mut mu, fine)?;
                Ok(mu)
            }
        }
    }

    pub fn label(&self) -> String {
        let slab = |s: &Slab| format!("t0={} thickness={} half_width={} mass={}", s.t0, s.thickness, s.half_width, s.mass);
        match self {
            Self::Dirac { t, x, w } => format!("dirac(t={t} x={x:?} w={w})"),
            Self::SlabLebesgue(s) => format!("slab-lebesgue({})", slab(s)),
            Self::Hyperplane { t, half_width, density, .. } => format!("hyperplane(t={t} half_width={half_width} density={density})"),
            Self::TwoScale { coarse, fine } => format!("two-scale(coarse: {}; fine: {})", slab(coarse), slab(fine)),
        }
    }
}

/// Spatial cell count on `[−half_width, half_width]` that keeps the atom
/// spacing below `t^{1/2α}/4`, between `min` and 4096.
fn resolving(half_width: f64, t: f64, alpha: f64, min: usize) -> usize {
    let spacing = t.powf(1.0 / (2.0 * alpha)) / 4.0;
    ((2.0 * half_width / spacing).ceil() as usize).clamp(min, 4096)
}

/// The built-in sweep: four one-parameter families in `n = 1`, member `j`
/// using `ε = 2^{−j}` for `j < levels`. Each family moves mass toward the
/// initial slice as `ε → 0`:
///
/// * `dirac`: unit mass at `(ε, 0)`;
/// * `slab`: unit mass on `(ε, 2ε) × [−1, 1]`;
/// * `hyperplane`: unit density on `{ε} × [−1, 1]`;
/// * `two-scale`: a fixed slab on `(1/2, 3/2) × [−1, 1]` plus unit mass on
///   `(ε, 2ε) × [−ε, ε]`.
///
/// Spatial resolution follows the parabolic scale of the earliest atoms.
pub fn builtin_families(alpha: f64, levels: usize) -> Vec<(&'static str, Vec<MeasureFamily>)> {
    let eps: Vec<f64> = (0..levels).map(|j| 2f64.powi(-(j as i32))).collect();
    let slab = |t0: f64, thickness: f64, half_width: f64, nt: usize, nx: usize| Slab { t0, thickness, half_width, mass: 1.0, nt, nx, dim: 1 };
    vec![
        ("dirac", eps.iter().map(|&e| MeasureFamily::Dirac { t: e, x: vec![0.0], w: 1.0 }).collect()),
        ("slab", eps.iter().map(|&e| MeasureFamily::SlabLebesgue(slab(e, e, 1.0, 4, resolving(1.0, e, alpha, 16)))).collect()),
        (
            "hyperplane",
            eps.iter()
                .map(|&e| MeasureFamily::Hyperplane { t: e, half_width: 1.0, density: 1.0, nx: resolving(1.0, e, alpha, 32), dim: 1 })
                .collect(),
        ),
        (
            "two-scale",
            eps.iter()
                .map(|&e| MeasureFamily::TwoScale { coarse: slab(0.5, 1.0, 1.0, 4, 8), fine: slab(e, e, e, 2, resolving(e, e, alpha, 8)) })
                .collect(),
        ),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn slab(t0: f64, thickness: f64) -> Slab {
        Slab { t0, thickness, half_width: 1.0, mass: 2.0, nt: 4, nx: 8, dim: 1 }
    }

    #[test]
    fn atomizations_keep_mass() {
        let mu = MeasureFamily::SlabLebesgue(slab(0.5, 0.25)).build().unwrap();
        assert_eq!(mu.len(), 32);
        assert!((mu.total() - 2.0).abs() < 1e-14);
        assert_eq!(mu.time_range(), Some((0.53125, 0.71875)));
        let h = MeasureFamily::Hyperplane { t: 1.0, half_width: 2.0, density: 0.5, nx: 10, dim: 2 }.build().unwrap();
        assert_eq!(h.len(), 100);
        assert!((h.total() - 8.0).abs() < 1e-12);
        let two = MeasureFamily::TwoScale { coarse: slab(1.0, 1.0), fine: Slab { half_width: 0.01, ..slab(0.01, 0.01) } };
        assert!((two.build().unwrap().total() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn sources_round_trip_through_json() {
        let src = MeasureSource::Builtin(MeasureFamily::Dirac { t: 1.0, x: vec![0.0], w: 1.0 });
        let text = serde_json::to_string(&src).unwrap();
        assert_eq!(text, r#"{"family":"dirac","t":1.0,"x":[0.0],"w":1.0}"#);
        assert_eq!(serde_json::from_str::<MeasureSource>(&text).unwrap(), src);
        let file: MeasureSource = serde_json::from_str(r#"{"file":"mu.csv"}"#).unwrap();
        assert_eq!(file, MeasureSource::File { file: "mu.csv".into() });
        let s: MeasureSource = serde_json::from_str(r#"{"family":"slab-lebesgue","t0":0.5,"thickness":0.25,"half_width":1.0,"mass":2.0,"nt":4,"nx":8}"#).unwrap();
        assert_eq!(s, MeasureSource::Builtin(MeasureFamily::SlabLebesgue(slab(0.5, 0.25))));
    }

    #[test]
    fn builtin_sweep_resolves_the_earliest_atoms() {
        let fams = builtin_families(0.5, 6);
        let names: Vec<&str> = fams.iter().map(|f| f.0).collect();
        assert_eq!(names, ["dirac", "slab", "hyperplane", "two-scale"]);
        let MeasureFamily::SlabLebesgue(s) = &fams[1].1[5] else { panic!("slab member") };
        assert_eq!((s.t0, s.thickness, s.nx), (1.0 / 32.0, 1.0 / 32.0, 256));
        let MeasureFamily::Hyperplane { nx, .. } = &fams[2].1[0] else { panic!("hyperplane member") };
        assert_eq!(*nx, 32);
    }
}
