use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Subcommand};
use fractrace::capacity::{ball_grid, capacity, CapacityEstimate, CellGrid, CompactSetApprox, SolverControls, SuperlevelProblem};
use fractrace::kernel::{Kernel, KernelSpec};
use fractrace::lab::{check_s_regime, Table};
use fractrace::semigroup::{read_spacetime_field, Operator};
use fractrace::ParabolicBall;
use serde_json::{json, Value};

use crate::common::{f, need, operator, parse_list, parse_pair, read_points, table, Ctx, Outcome};

#[derive(Debug, Subcommand)]
pub enum CapacityCmd {
    /// Parabolic balls `B_r(t0, x0)`, one solve per radius.
    Ball(BallArgs),
    /// A sampled set read from `t,x1` rows.
    File(FileArgs),
    /// The superlevel set `{S g ≥ λ}` of a space-time field.
    Superlevel(SuperlevelArgs),
}

#[derive(Debug, Args)]
pub struct Common {
    #[arg(long)]
    variant: Option<Operator>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Target relative gap.
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long)]
    feas_tol: Option<f64>,
}

#[derive(Debug, Args)]
pub struct BallArgs {
    #[command(flatten)]
    common: Common,
    /// Comma-separated radii.
    #[arg(long)]
    r: String,
    #[arg(long, default_value_t = 0.0)]
    t0: f64,
    #[arg(long, default_value_t = 0.0)]
    x0: f64,
    /// Samples `nt,nx` per ball.
    #[arg(long)]
    samples: Option<String>,
    /// Cell grid `L,h,T,M`; sized to each ball if absent.
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct FileArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    set: PathBuf,
    #[arg(long)]
    grid: Option<String>,
}

#[derive(Debug, Args)]
pub struct SuperlevelArgs {
    #[command(flatten)]
    common: Common,
    /// Space-time field CSV with its JSON sidecar.
    #[arg(long)]
    g: PathBuf,
    /// Comma-separated levels.
    #[arg(long)]
    lambda: String,
    #[arg(long, default_value_t = 2)]
    coarsen: usize,
}

struct Setup {
    operator: Operator,
    p: f64,
    alpha: f64,
    kernel: Kernel<f64>,
    ctl: SolverControls<f64>,
}

fn setup(c: &Common, ctx: &Ctx, operator_override: Option<Operator>) -> Result<Setup> {
    let op = match operator_override {
        Some(op) => op,
        None => operator(c.variant, ctx)?,
    };
    let p = need("p", c.p, ctx.config.p)?;
    let alpha = need("alpha", c.alpha, ctx.config.alpha)?;
    if op == Operator::S {
        check_s_regime(alpha, p, 1)?;
    }
    let kernel = Kernel::new(&KernelSpec::new(alpha, 1)?)?;
    let mut ctl = ctx.config.controls.unwrap_or_default();
    ctl.max_iter = c.max_iter.unwrap_or(ctl.max_iter);
    ctl.tol = c.tol.unwrap_or(ctl.tol);
    ctl.feas_tol = c.feas_tol.unwrap_or(ctl.feas_tol);
    Ok(Setup { operator: op, p, alpha, kernel, ctl })
}

/// Accumulates solves into the sweep table, the witness table and the
/// summary list.
struct Solves {
    sweep: Table,
    witnesses: Table,
    results: Vec<Value>,
    ordered: bool,
}

impl Solves {
    fn new(key: &str) -> Self {
        Self {
            sweep: table("capacity", vec![key.into(), "primal".into(), "dual".into()]),
            witnesses: table("witnesses", ["case", "kind", "index", "t", "x1", "value"].map(String::from).to_vec()),
            results: Vec::new(),
            ordered: true,
        }
    }

    fn record(&mut self, key: f64, e: &CapacityEstimate<f64>, op: Operator, grid: &CellGrid<f64>, samples: &[(f64, Vec<f64>)]) {
        self.ordered &= e.dual <= e.primal;
        self.sweep.push(vec![f(key), f(e.primal), f(e.dual)]);
        for (c, h) in e.witness_h.iter().enumerate() {
            let (t0, t1, x0, x1) = grid.cell(op, c);
            self.witnesses.push(vec![f(key), "h".into(), c.to_string(), f((t0 + t1) / 2.0), f((x0 + x1) / 2.0), f(*h)]);
        }
        for (j, (w, (t, x))) in e.witness_mu.iter().zip(samples).enumerate() {
            self.witnesses.push(vec![f(key), "mu".into(), j.to_string(), f(*t), f(x[0]), f(*w)]);
        }
        self.results.push(json!({
            "case": key,
            "primal": e.primal,
            "dual": e.dual,
            "gap": e.gap,
            "converged": e.converged,
            "iterations": e.iterations,
        }));
    }

    fn finish(self, mut summary: Value) -> Outcome {
        if let [only] = &self.results[..] {
            for (k, v) in only.as_object().expect("object") {
                summary[k] = v.clone();
            }
        }
        summary["results"] = Value::Array(self.results);
        summary["witnesses_path"] = json!("witnesses.csv");
        summary["dual_le_primal"] = json!(self.ordered);
        Outcome { tables: vec![self.sweep, self.witnesses], summary, pass: self.ordered }
    }
}

fn grid_arg(flag: Option<&String>, ctx: &Ctx) -> Option<String> {
    flag.cloned().or_else(|| ctx.config.grid.clone())
}

pub fn run(cmd: &CapacityCmd, ctx: &Ctx) -> Result<Outcome> {
    match cmd {
        CapacityCmd::Ball(a) => ball(a, ctx),
        CapacityCmd::File(a) => file(a, ctx),
        CapacityCmd::Superlevel(a) => superlevel(a, ctx),
    }
}

fn ball(a: &BallArgs, ctx: &Ctx) -> Result<Outcome> {
    let s = setup(&a.common, ctx, None)?;
    let radii = parse_list(&a.r)?;
    let samples = match &a.samples {
        Some(v) => parse_pair(v)?,
        None => ctx.config.samples.unwrap_or((16, 16)),
    };
    let fixed = grid_arg(a.grid.as_ref(), ctx).map(|g| CellGrid::parse(&g)).transpose()?;
    let mut solves = Solves::new("r");
    for &r in &radii {
        let b = ParabolicBall::new(a.t0, vec![a.x0], r, s.alpha);
        let grid = fixed.unwrap_or_else(|| ball_grid(s.operator, &b));
        let set = CompactSetApprox::ball(&b, samples.0, samples.1)?;
        let e = capacity(s.operator, &s.kernel, &set, s.p, &grid, &s.ctl)?;
        solves.record(r, &e, s.operator, &grid, &set.points);
    }
    let summary = json!({
        "command": "capacity ball",
        "variant": s.operator,
        "p": s.p,
        "alpha": s.alpha,
        "t0": a.t0,
        "x0": a.x0,
        "samples": [samples.0, samples.1],
        "controls": s.ctl,
    });
    Ok(solves.finish(summary))
}

fn file(a: &FileArgs, ctx: &Ctx) -> Result<Outcome> {
    let s = setup(&a.common, ctx, None)?;
    let Some(g) = grid_arg(a.grid.as_ref(), ctx) else {
        bail!("missing --grid \"L,h,T,M\" (flag or config field)");
    };
    let grid = CellGrid::parse(&g)?;
    let set = CompactSetApprox::custom(read_points(&a.set, 1)?)?;
    let e = capacity(s.operator, &s.kernel, &set, s.p, &grid, &s.ctl)?;
    let mut solves = Solves::new("case");
    solves.record(0.0, &e, s.operator, &grid, &set.points);
    let summary = json!({
        "command": "capacity file",
        "variant": s.operator,
        "p": s.p,
        "alpha": s.alpha,
        "set": a.set.display().to_string(),
        "samples": set.len(),
        "grid": grid,
        "controls": s.ctl,
    });
    Ok(solves.finish(summary))
}

fn superlevel(a: &SuperlevelArgs, ctx: &Ctx) -> Result<Outcome> {
    if a.common.variant.or(ctx.config.variant) == Some(Operator::R) {
        bail!("superlevel capacities are defined for variant S");
    }
    let s = setup(&a.common, ctx, Some(Operator::S))?;
    let g = read_spacetime_field::<f64>(&a.g)?;
    let problem = SuperlevelProblem::new(&s.kernel, &g, a.coarsen)?;
    let mut solves = Solves::new("lambda");
    let mut empty = Vec::new();
    for lambda in parse_list(&a.lambda)? {
        if !(lambda > 0.0) {
            bail!("lambda must be positive, got {lambda}");
        }
        let sl = problem.capacity(lambda, s.p, &s.ctl)?;
        match &sl.estimate {
            Some(e) => {
                let kept: Vec<(f64, Vec<f64>)> = problem
                    .candidates
                    .points
                    .iter()
                    .zip(&problem.values)
                    .filter(|(_, v)| **v >= lambda)
                    .map(|(pt, _)| pt.clone())
                    .collect();
                solves.record(lambda, e, Operator::S, &problem.grid, &kept);
            }
            None => {
                solves.sweep.push(vec![f(lambda), f(0.0), f(0.0)]);
                empty.push(lambda);
            }
        }
    }
    let summary = json!({
        "command": "capacity superlevel",
        "variant": Operator::S,
        "p": s.p,
        "alpha": s.alpha,
        "field": a.g.display().to_string(),
        "coarsen": a.coarsen,
        "max_sg": problem.max_value(),
        "g_norm_pow": problem.g_norm_pow(s.p),
        "empty_levels": empty,
        "controls": s.ctl,
    });
    Ok(solves.finish(summary))
}
