use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use fractrace::lab::{fmt_f64, ExperimentConfig, MeasureSource, Table};
use fractrace::semigroup::Operator;
use fractrace::DiscreteMeasure;
use serde_json::Value;

pub struct Ctx {
    pub seed: u64,
    pub config: ExperimentConfig,
}

/// What a subcommand produced: tables, a summary and the verdict on its
/// asserted properties.
pub struct Outcome {
    pub tables: Vec<Table>,
    pub summary: Value,
    pub pass: bool,
}

pub fn need<T>(name: &str, flag: Option<T>, config: Option<T>) -> Result<T> {
    flag.or(config).ok_or_else(|| anyhow!("missing --{name} (flag or config field)"))
}

pub fn f(v: f64) -> String {
    fmt_f64(v)
}

pub fn coord_header(dim: usize) -> Vec<String> {
    (1..=dim).map(|i| format!("x{i}")).collect()
}

/// Header `t, x1..xn, rest...`.
pub fn header(dim: usize, rest: &[&str]) -> Vec<String> {
    let mut h = vec!["t".to_string()];
    h.extend(coord_header(dim));
    h.extend(rest.iter().map(|s| s.to_string()));
    h
}

pub fn table(name: &str, header: Vec<String>) -> Table {
    Table { name: name.into(), header, rows: Vec::new() }
}

pub fn point_row(t: f64, x: &[f64], rest: &[f64]) -> Vec<String> {
    std::iter::once(t).chain(x.iter().copied()).chain(rest.iter().copied()).map(f).collect()
}

pub fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|v| v.trim().parse::<f64>().with_context(|| format!("bad number {v:?} in {s:?}")))
        .collect()
}

pub fn parse_pair(s: &str) -> Result<(usize, usize)> {
    let v: Vec<&str> = s.split(',').map(str::trim).collect();
    if v.len() != 2 {
        bail!("expected \"a,b\", got {s:?}");
    }
    Ok((v[0].parse()?, v[1].parse()?))
}

pub fn operator(flag: Option<Operator>, ctx: &Ctx) -> Result<Operator> {
    need("variant", flag, ctx.config.variant)
}

/// The measure from `--measure FILE`, else from the config.
pub fn load_measure(flag: Option<&Path>, ctx: &Ctx) -> Result<(DiscreteMeasure, String)> {
    let source = match flag {
        Some(p) => MeasureSource::File { file: p.to_path_buf() },
        None => ctx.config.measure.clone().ok_or_else(|| anyhow!("missing --measure (flag or config field)"))?,
    };
    let mu = source.load().with_context(|| source.label())?;
    Ok((mu, source.label()))
}

/// Reads `t,x1..xn[,...]` rows; extra columns are ignored.
pub fn read_points(path: &Path, dim: usize) -> Result<Vec<(f64, Vec<f64>)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| path.display().to_string())?;
    let head: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let want = header(dim, &[]);
    if head.len() < want.len() || head[..want.len()] != want[..] {
        bail!("{}: header must start with {}", path.display(), want.join(","));
    }
    let mut out = Vec::new();
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let vals: Vec<f64> = rec
            .iter()
            .take(dim + 1)
            .map(|s| s.parse::<f64>())
            .collect::<Result<_, _>>()
            .with_context(|| format!("{} row {}", path.display(), row + 1))?;
        out.push((vals[0], vals[1..].to_vec()));
    }
    Ok(out)
}

/// `--points FILE` or, with `--at-atoms`, the atoms of `mu`.
pub fn query_points(points: Option<&PathBuf>, at_atoms: bool, mu: &DiscreteMeasure) -> Result<Vec<(f64, Vec<f64>)>> {
    match (points, at_atoms) {
        (Some(p), false) => read_points(p, mu.dim()),
        (None, true) => Ok(mu.atoms().map(|a| (a.t, a.x.to_vec())).collect()),
        _ => bail!("give exactly one of --points FILE and --at-atoms"),
    }
}
