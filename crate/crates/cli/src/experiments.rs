use std::path::PathBuf;

use anyhow::{anyhow, bail, Result};
use clap::Args;
use fractrace::capacity::SolverControls;
use fractrace::kernel::{Kernel, KernelSpec};
use fractrace::lab::stats::spearman;
use fractrace::lab::{
    auto_grid, builtin_families, capacitary_suite, check_s_regime, condition_values, run_scaling, strichartz_sweep, trace_ratio, BallLattice,
    ConditionValues, MeasureSource,
};
use fractrace::semigroup::Operator;
use rayon::prelude::*;
use serde_json::json;

use crate::common::{f, need, operator, parse_list, parse_pair, table, Ctx, Outcome};

#[derive(Debug, Args)]
pub struct ScalingArgs {
    #[arg(long)]
    variant: Option<Operator>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Comma-separated radii; `2^-3, …, 2^2` by default.
    #[arg(long)]
    radii: Option<String>,
    /// Samples `nt,nx` per ball.
    #[arg(long)]
    samples: Option<String>,
    /// Allowed distance between fitted and predicted slope; 0.2 for R,
    /// 0.3 for S by default.
    #[arg(long)]
    slope_tol: Option<f64>,
}

pub fn scaling(a: &ScalingArgs, ctx: &Ctx) -> Result<Outcome> {
    let op = operator(a.variant, ctx)?;
    let alpha = need("alpha", a.alpha, ctx.config.alpha)?;
    let p = need("p", a.p, ctx.config.p)?;
    if op == Operator::S {
        check_s_regime(alpha, p, 1)?;
    }
    let radii = match &a.radii {
        Some(s) => parse_list(s)?,
        None => ctx.config.radii.clone().unwrap_or_else(|| (-3..=2).map(|k| 2f64.powi(k)).collect()),
    };
    let samples = match &a.samples {
        Some(s) => parse_pair(s)?,
        None => ctx.config.samples.unwrap_or((16, 16)),
    };
    let ctl = ctx.config.controls.unwrap_or_default();
    let kernel = Kernel::new(&KernelSpec::new(alpha, 1)?)?;
    let rep = run_scaling(op, &kernel, p, &radii, samples, &ctl)?;
    let slope_tol = a.slope_tol.unwrap_or(match op {
        Operator::R => 0.2,
        Operator::S => 0.3,
    });
    let mut tab = table("scaling", ["r", "primal", "dual", "gap", "converged"].map(String::from).to_vec());
    for r in &rep.rows {
        tab.push(vec![f(r.r), f(r.primal), f(r.dual), f(r.gap), r.converged.to_string()]);
    }
    let ordered = rep.rows.iter().all(|r| r.dual <= r.primal);
    let slope_ok = (rep.fit.slope - rep.expected_slope).abs() <= slope_tol;
    let summary = json!({
        "command": "scaling",
        "variant": op,
        "alpha": alpha,
        "p": p,
        "n": rep.dim,
        "samples": [samples.0, samples.1],
        "slope": rep.fit.slope,
        "half_width": rep.fit.half_width,
        "r_squared": rep.fit.r_squared,
        "expected_slope": rep.expected_slope,
        "slope_tol": slope_tol,
        "slope_ok": slope_ok,
        "dual_le_primal": ordered,
    });
    Ok(Outcome { tables: vec![tab], summary, pass: ordered && slope_ok })
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    variant: Option<Operator>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// A single measure file; otherwise the config's `measure` or `family`.
    #[arg(long)]
    measure: Option<PathBuf>,
    /// Sweep the built-in measure families with this many members each.
    #[arg(long)]
    builtin: Option<usize>,
    #[arg(long)]
    bandlimited: Option<usize>,
    #[arg(long)]
    bumps: Option<usize>,
    /// Cell budget of the automatic trial grid.
    #[arg(long, default_value_t = 2048)]
    max_cells: usize,
    /// Also evaluate the compact-set condition when `p ≠ q`.
    #[arg(long)]
    compact: bool,
}

/// The condition that governs the regime: the ball test for `p < q`, the
/// compact-set test for `p = q` and the Wolff integral for `p > q`.
pub fn regime_condition(p: f64, q: f64, c: &ConditionValues) -> Option<f64> {
    if p < q {
        Some(c.ball_sup.value)
    } else if p == q {
        c.compact_sup.as_ref().map(|s| s.value)
    } else {
        c.wolff_integral
    }
}

/// Spearman correlation of condition and largest ratio, `None` below three
/// members.
fn correlation(rows: &[(Option<f64>, f64)]) -> Option<f64> {
    let (c, r): (Vec<f64>, Vec<f64>) = rows.iter().filter_map(|(c, r)| c.map(|c| (c, *r))).unzip();
    (c.len() >= 3).then(|| spearman(&c, &r))
}

pub fn trace(a: &TraceArgs, ctx: &Ctx) -> Result<Outcome> {
    let op = operator(a.variant, ctx)?;
    let alpha = need("alpha", a.alpha, ctx.config.alpha)?;
    let p = need("p", a.p, ctx.config.p)?;
    let q = need("q", a.q, ctx.config.q)?;
    if op == Operator::S {
        check_s_regime(alpha, p, 1)?;
    }
    let sources: Vec<(String, MeasureSource)> = match (&a.measure, a.builtin) {
        (Some(_), Some(_)) => bail!("give at most one of --measure and --builtin"),
        (Some(file), None) => vec![("measure".into(), MeasureSource::File { file: file.clone() })],
        (None, Some(levels)) => builtin_families(alpha, levels)
            .into_iter()
            .flat_map(|(name, members)| members.into_iter().map(move |m| (name.to_string(), MeasureSource::Builtin(m))))
            .collect(),
        (None, None) => match (&ctx.config.measure, ctx.config.family.is_empty()) {
            (Some(m), true) => vec![("measure".into(), m.clone())],
            (None, false) => ctx.config.family.iter().map(|m| ("family".to_string(), m.clone())).collect(),
            (Some(_), false) => bail!("config sets both measure and family"),
            (None, true) => bail!("missing --measure, --builtin or a config measure/family"),
        },
    };
    let mut spec = ctx.config.trials.clone().unwrap_or_default();
    spec.seed = ctx.seed;
    spec.bandlimited = a.bandlimited.unwrap_or(spec.bandlimited);
    spec.bumps = a.bumps.unwrap_or(spec.bumps);
    let lattice = ctx.config.lattice.clone().unwrap_or_else(|| BallLattice::dyadic(1.0 / 64.0, 4.0, 4));
    let ctl: SolverControls<f64> = ctx.config.controls.unwrap_or_default();
    let kernel = Kernel::new(&KernelSpec::new(alpha, 1)?)?;

    let results = sources
        .par_iter()
        .map(|(group, src)| -> Result<_> {
            let mu = src.load().map_err(|e| anyhow!("{}: {e}", src.label()))?;
            let grid = auto_grid(op, &mu, alpha, a.max_cells)?;
            let compact = (p == q || a.compact).then_some((&grid, &ctl));
            let cond = condition_values(op, &kernel, &mu, p, q, &lattice, compact)?;
            let rep = trace_ratio(op, &kernel, &mu, p, q, &grid, &spec)?;
            Ok((group.clone(), src.label(), cond, rep))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut trials = table("trace_trials", ["group", "measure", "kind", "index", "ratio"].map(String::from).to_vec());
    let mut conds = table(
        "trace_conditions",
        ["group", "measure", "ball_sup", "ball_r", "compact_sup", "wolff_integral", "condition", "max_ratio", "mean_ratio"]
            .map(String::from)
            .to_vec(),
    );
    let opt = |v: Option<f64>| v.map_or(String::new(), f);
    let mut groups: Vec<(String, Vec<(Option<f64>, f64)>)> = Vec::new();
    for (group, label, c, rep) in &results {
        for t in &rep.trials {
            trials.push(vec![group.clone(), label.clone(), t.kind.to_string(), t.index.to_string(), f(t.ratio)]);
        }
        let value = regime_condition(p, q, c);
        conds.push(vec![
            group.clone(),
            label.clone(),
            f(c.ball_sup.value),
            f(c.ball_sup.r),
            opt(c.compact_sup.as_ref().map(|s| s.value)),
            opt(c.wolff_integral),
            opt(value),
            f(rep.max),
            f(rep.mean),
        ]);
        match groups.last_mut() {
            Some((g, rows)) if g == group => rows.push((value, rep.max)),
            _ => groups.push((group.clone(), vec![(value, rep.max)])),
        }
    }
    let finite = results.iter().all(|(.., r)| r.trials.iter().all(|t| t.ratio.is_finite() && t.ratio >= 0.0));
    let per_group: Vec<(String, Option<f64>)> = groups.iter().map(|(g, rows)| (g.clone(), correlation(rows))).collect();
    let pooled: Vec<(Option<f64>, f64)> = groups.iter().flat_map(|(_, rows)| rows.iter().copied()).collect();
    let consistent = per_group.iter().all(|(_, rho)| rho.is_none_or(|r| r >= 0.9));
    let summary = json!({
        "command": "trace",
        "variant": op,
        "alpha": alpha,
        "p": p,
        "q": q,
        "regime": if p < q { "p<q" } else if p == q { "p=q" } else { "p>q" },
        "trials": spec,
        "lattice": lattice,
        "measures": results.iter().map(|(g, l, c, r)| json!({
            "group": g,
            "measure": l,
            "conditions": c,
            "grid": r.grid,
            "max_ratio": r.max,
            "mean_ratio": r.mean,
        })).collect::<Vec<_>>(),
        "spearman": per_group.iter().map(|(g, rho)| json!({"group": g, "rho": rho})).collect::<Vec<_>>(),
        "spearman_pooled": if groups.len() > 1 { correlation(&pooled) } else { None },
        "consistent": consistent,
    });
    Ok(Outcome { tables: vec![trials, conds], summary, pass: finite && consistent })
}

#[derive(Debug, Args)]
pub struct StrichartzArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
}

pub fn strichartz(a: &StrichartzArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = ctx.config.strichartz.clone().unwrap_or_default();
    cfg.alpha = a.alpha.or(ctx.config.alpha).unwrap_or(cfg.alpha);
    cfg.p = a.p.or(ctx.config.p).unwrap_or(cfg.p);
    cfg.trials = a.trials.unwrap_or(cfg.trials);
    cfg.seed = ctx.seed;
    let rep = strichartz_sweep(&cfg)?;
    let mut tab = table("strichartz", ["trial", "lambda", "refine", "g_norm", "sg_norm", "ratio"].map(String::from).to_vec());
    for r in &rep.rows {
        tab.push(vec![r.trial.to_string(), f(r.lambda), r.refine.to_string(), f(r.g_norm), f(r.sg_norm), f(r.ratio)]);
    }
    let (ref_tol, resc_tol) = (0.15, 0.10);
    let pass = rep.refinement_change <= ref_tol && rep.rescaling_change <= resc_tol;
    let summary = json!({
        "command": "strichartz",
        "config": cfg,
        "q_tilde": rep.q_tilde,
        "maxima": rep.maxima.iter().map(|(l, k, m)| json!({"lambda": l, "refine": k, "max_ratio": m})).collect::<Vec<_>>(),
        "refinement_change": rep.refinement_change,
        "refinement_tol": ref_tol,
        "rescaling_change": rep.rescaling_change,
        "rescaling_tol": resc_tol,
    });
    Ok(Outcome { tables: vec![tab], summary, pass })
}

#[derive(Debug, Args)]
pub struct CapacitaryArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    p: Option<f64>,
    /// Number of seeds, counted from `--seed`.
    #[arg(long)]
    seeds: Option<u64>,
}

pub fn capacitary(a: &CapacitaryArgs, ctx: &Ctx) -> Result<Outcome> {
    let mut cfg = ctx.config.capacitary.clone().unwrap_or_default();
    cfg.alpha = a.alpha.or(ctx.config.alpha).unwrap_or(cfg.alpha);
    cfg.p = a.p.or(ctx.config.p).unwrap_or(cfg.p);
    if let Some(ctl) = ctx.config.controls {
        cfg.controls = ctl;
    }
    let count = a.seeds.unwrap_or(cfg.seeds.len() as u64);
    cfg.seeds = (ctx.seed..ctx.seed + count).collect();
    let rep = capacitary_suite(&cfg)?;
    let mut levels = table(
        "capacitary_levels",
        ["seed", "level", "lambda", "samples", "primal", "dual", "converged", "weak_ratio"].map(String::from).to_vec(),
    );
    for l in &rep.levels {
        levels.push(vec![
            l.seed.to_string(),
            l.level.to_string(),
            f(l.lambda),
            l.samples.to_string(),
            f(l.primal),
            f(l.dual),
            l.converged.to_string(),
            f(l.weak_ratio),
        ]);
    }
    let mut trials = table(
        "capacitary_trials",
        ["seed", "g_norm_pow", "max_sg", "strong_sum", "tail_bound", "strong_ratio", "weak_max"].map(String::from).to_vec(),
    );
    for t in &rep.trials {
        trials.push(vec![t.seed.to_string(), f(t.g_norm_pow), f(t.max_sg), f(t.strong_sum), f(t.tail_bound), f(t.strong_ratio), f(t.weak_max)]);
    }
    let weak_bound = 1.0 + 2.0 * cfg.controls.feas_tol;
    let ordered = rep.levels.iter().all(|l| l.dual <= l.primal);
    let pass = rep.weak_max <= weak_bound && ordered;
    let summary = json!({
        "command": "capacitary",
        "config": cfg,
        "weak_max": rep.weak_max,
        "weak_bound": weak_bound,
        "strong_min": rep.strong_min,
        "strong_max": rep.strong_max,
        "dual_le_primal": ordered,
    });
    Ok(Outcome { tables: vec![levels, trials], summary, pass })
}
