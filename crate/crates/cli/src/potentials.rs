use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, ValueEnum};
use fractrace::potentials::{maximal_centered, maximal_dyadic, maximal_r, maximal_spacetime, wolff_dyadic, wolff_r, wolff_s};
use rayon::prelude::*;
use serde_json::json;

use crate::common::{header, load_measure, need, parse_list, point_row, query_points, table, Ctx, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum WolffVariant {
    #[value(name = "R")]
    R,
    #[value(name = "S")]
    S,
    Dyadic,
}

#[derive(Debug, Args)]
pub struct WolffArgs {
    #[arg(long, value_enum)]
    variant: WolffVariant,
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    /// CSV with header `t,x1..xn`.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    at_atoms: bool,
    /// Truncation radius for the R potential.
    #[arg(long)]
    rho: Option<f64>,
    #[command(flatten)]
    dyadic: DyadicArgs,
}

#[derive(Debug, Args)]
pub struct DyadicArgs {
    /// Dyadic scale range `lo,hi` (side lengths `2^m`).
    #[arg(long, default_value = "-8,4")]
    scales: String,
    /// Origin of the dyadic lattice, `t,x1..xn`; zero by default.
    #[arg(long)]
    shift: Option<String>,
}

impl DyadicArgs {
    fn parse(&self, dim: usize) -> Result<(std::ops::RangeInclusive<i32>, Vec<f64>)> {
        let s = parse_list(&self.scales)?;
        if s.len() != 2 || s[0] > s[1] || s.iter().any(|v| v.fract() != 0.0) {
            bail!("--scales must be two integers lo,hi with lo ≤ hi, got {:?}", self.scales);
        }
        let shift = match &self.shift {
            Some(v) => parse_list(v)?,
            None => vec![0.0; dim + 1],
        };
        if shift.len() != dim + 1 {
            bail!("--shift needs {} values", dim + 1);
        }
        Ok((s[0] as i32..=s[1] as i32, shift))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MaximalVariant {
    #[value(name = "R")]
    R,
    Spacetime,
    Centered,
    Dyadic,
}

#[derive(Debug, Args)]
pub struct MaximalArgs {
    #[arg(long, value_enum)]
    variant: MaximalVariant,
    #[arg(long)]
    measure: Option<PathBuf>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long)]
    at_atoms: bool,
    /// One-column CSV (header `g`) with a value per atom; `g = 1` if absent.
    #[arg(long)]
    g: Option<PathBuf>,
    #[command(flatten)]
    dyadic: DyadicArgs,
}

pub fn wolff(a: &WolffArgs, ctx: &Ctx) -> Result<Outcome> {
    let (mu, label) = load_measure(a.measure.as_deref(), ctx)?;
    let p = need("p", a.p, ctx.config.p)?;
    let alpha = need("alpha", a.alpha, ctx.config.alpha)?;
    let points = query_points(a.points.as_ref(), a.at_atoms, &mu)?;
    let dyadic = match a.variant {
        WolffVariant::Dyadic => Some(a.dyadic.parse(mu.dim())?),
        _ => None,
    };
    let values: Vec<(f64, f64)> = points
        .par_iter()
        .map(|(t, x)| -> Result<(f64, f64)> {
            Ok(match a.variant {
                WolffVariant::R => (wolff_r(&mu, p, *t, x, alpha, a.rho)?.value, 0.0),
                WolffVariant::S => (wolff_s(&mu, p, *t, x, alpha)?.value, 0.0),
                WolffVariant::Dyadic => {
                    let (scales, shift) = dyadic.as_ref().expect("parsed above");
                    let d = wolff_dyadic(&mu, p, *t, x, alpha, scales.clone(), shift)?;
                    (d.value, d.tail_bound)
                }
            })
        })
        .collect::<Result<_>>()?;
    let mut tab = table("wolff", header(mu.dim(), &["value"]));
    for ((t, x), (v, _)) in points.iter().zip(&values) {
        tab.push(point_row(*t, x, &[*v]));
    }
    let pass = values.iter().all(|(v, _)| v.is_finite() && *v >= 0.0);
    let mut summary = json!({
        "command": "wolff",
        "variant": a.variant.to_possible_value().map(|v| v.get_name().to_string()),
        "measure": label,
        "p": p,
        "alpha": alpha,
        "rho": a.rho,
        "points": points.len(),
        "max": values.iter().map(|v| v.0).fold(0.0, f64::max),
    });
    if dyadic.is_some() {
        summary["scales"] = json!(a.dyadic.scales);
        summary["tail_bound"] = json!(values.iter().map(|v| v.1).fold(0.0, f64::max));
    }
    Ok(Outcome { tables: vec![tab], summary, pass })
}

fn read_g(path: &PathBuf, atoms: usize) -> Result<Vec<f64>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_path(path).with_context(|| path.display().to_string())?;
    if rdr.headers()?.iter().next() != Some("g") {
        bail!("{}: header must be g", path.display());
    }
    let g: Vec<f64> = rdr
        .records()
        .map(|r| -> Result<f64> { Ok(r?.get(0).unwrap_or_default().parse()?) })
        .collect::<Result<_>>()
        .with_context(|| path.display().to_string())?;
    if g.len() != atoms {
        bail!("{}: {} values for {atoms} atoms", path.display(), g.len());
    }
    Ok(g)
}

pub fn maximal(a: &MaximalArgs, ctx: &Ctx) -> Result<Outcome> {
    let (mu, label) = load_measure(a.measure.as_deref(), ctx)?;
    let alpha = need("alpha", a.alpha, ctx.config.alpha)?;
    let points = query_points(a.points.as_ref(), a.at_atoms, &mu)?;
    let g = match &a.g {
        Some(path) => read_g(path, mu.len())?,
        None => vec![1.0; mu.len()],
    };
    let dyadic = match a.variant {
        MaximalVariant::Dyadic => Some(a.dyadic.parse(mu.dim())?),
        _ => None,
    };
    let values: Vec<f64> = points
        .par_iter()
        .map(|(t, x)| -> Result<f64> {
            Ok(match a.variant {
                MaximalVariant::R => maximal_r(&mu, x, alpha)?,
                MaximalVariant::Spacetime => maximal_spacetime(&mu, *t, x, alpha)?,
                MaximalVariant::Centered => maximal_centered(&g, &mu, *t, x, alpha)?,
                MaximalVariant::Dyadic => {
                    let (scales, shift) = dyadic.as_ref().expect("parsed above");
                    maximal_dyadic(&g, &mu, *t, x, alpha, scales.clone(), shift)?
                }
            })
        })
        .collect::<Result<_>>()?;
    let mut tab = table("maximal", header(mu.dim(), &["value"]));
    for ((t, x), v) in points.iter().zip(&values) {
        tab.push(point_row(*t, x, &[*v]));
    }
    let pass = values.iter().all(|v| v.is_finite() && *v >= 0.0);
    let summary = json!({
        "command": "maximal",
        "variant": a.variant.to_possible_value().map(|v| v.get_name().to_string()),
        "measure": label,
        "alpha": alpha,
        "points": points.len(),
        "max": values.iter().copied().fold(0.0, f64::max),
    });
    Ok(Outcome { tables: vec![tab], summary, pass })
}
