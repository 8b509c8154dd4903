use anyhow::{bail, Result};
use clap::{Args, Subcommand, ValueEnum};
use fractrace::kernel::numeric::value_at_origin;
use fractrace::kernel::stable::{density_at_origin_conditional, density_at_origin_histogram};
use fractrace::kernel::validate::{check_mass, check_self_similarity, envelope_ratio_scan, log_grid};
use fractrace::kernel::{sample_stable, StableMethod};
use fractrace::KernelSpec;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::common::{f, header, need, parse_list, point_row, table, Ctx, Outcome};

#[derive(Debug, Subcommand)]
pub enum KernelCmd {
    /// Evaluate `K_t(x)` at every `(t, x)` combination.
    Eval(EvalArgs),
    /// Run a validation suite; rows `suite,alpha,n,t,metric,value,bound,pass`.
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, required = true)]
    t: Vec<f64>,
    /// Comma-separated point, repeatable.
    #[arg(long, required = true)]
    x: Vec<String>,
    /// Absolute tolerance; forces numerical inversion.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Mass,
    Scaling,
    Envelope,
    ClosedForm,
    Stable,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long, value_enum)]
    suite: Suite,
    /// Times for the mass and scaling suites.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 1.0, 10.0])]
    t: Vec<f64>,
    /// Pass bound for the mass defect.
    #[arg(long, default_value_t = 1e-3)]
    tol: f64,
    /// Seeded points for the closed-form suite.
    #[arg(long, default_value_t = 200)]
    points: usize,
    /// Draws for the stable suite.
    #[arg(long, default_value_t = 1_000_000)]
    samples: usize,
}

pub fn run(cmd: &KernelCmd, ctx: &Ctx) -> Result<Outcome> {
    match cmd {
        KernelCmd::Eval(a) => eval(a, ctx),
        KernelCmd::Validate(a) => validate(a, ctx),
    }
}

fn spec(alpha: Option<f64>, dim: Option<usize>, ctx: &Ctx) -> Result<KernelSpec> {
    let alpha = need("alpha", alpha, ctx.config.alpha)?;
    let dim = dim.or(ctx.config.dim).unwrap_or(1);
    Ok(KernelSpec::new(alpha, dim)?)
}

fn eval(a: &EvalArgs, ctx: &Ctx) -> Result<Outcome> {
    let spec = spec(a.alpha, a.dim, ctx)?;
    let points: Vec<Vec<f64>> = a.x.iter().map(|s| parse_list(s)).collect::<Result<_>>()?;
    let mut tab = table("kernel_eval", header(spec.dim, &["value", "abs_error_bound"]));
    for &t in &a.t {
        for x in &points {
            let v = match a.tol {
                Some(tol) => spec.eval_numeric_tol(t, x, tol)?,
                None => spec.eval(t, x)?,
            };
            tab.push(point_row(t, x, &[v.value, v.abs_error_bound]));
        }
    }
    let summary = json!({
        "command": "kernel eval",
        "alpha": spec.alpha,
        "n": spec.dim,
        "method": if a.tol.is_none() && spec.has_closed_form() { "closed-form" } else { "numeric" },
        "points": tab.rows.len(),
    });
    Ok(Outcome { tables: vec![tab], summary, pass: true })
}

struct Rows {
    tab: fractrace::lab::Table,
    suite: &'static str,
    alpha: f64,
    n: usize,
    failures: usize,
}

impl Rows {
    fn push(&mut self, t: Option<f64>, metric: &str, value: f64, bound: f64, pass: bool) {
        if !pass {
            self.failures += 1;
        }
        self.tab.push(vec![
            self.suite.into(),
            f(self.alpha),
            self.n.to_string(),
            t.map_or(String::new(), f),
            metric.into(),
            f(value),
            f(bound),
            pass.to_string(),
        ]);
    }
}

fn validate(a: &ValidateArgs, ctx: &Ctx) -> Result<Outcome> {
    let spec = spec(a.alpha, a.dim, ctx)?;
    let suite = match a.suite {
        Suite::Mass => "mass",
        Suite::Scaling => "scaling",
        Suite::Envelope => "envelope",
        Suite::ClosedForm => "closed-form",
        Suite::Stable => "stable",
    };
    let head = ["suite", "alpha", "n", "t", "metric", "value", "bound", "pass"].map(String::from).to_vec();
    let mut rows = Rows { tab: table("kernel_validate", head), suite, alpha: spec.alpha, n: spec.dim, failures: 0 };
    match a.suite {
        Suite::Mass => {
            for &t in &a.t {
                let m = check_mass(&spec, t, None, a.tol * 0.1)?;
                rows.push(Some(t), "mass_defect", m.defect, a.tol, m.defect <= a.tol);
            }
        }
        Suite::Scaling => {
            for &t in &a.t {
                let ell = spec.length_scale(t);
                for u in [0.0, 0.5, 2.0] {
                    let mut x = vec![0.0; spec.dim];
                    x[0] = u * ell;
                    let s = check_self_similarity(&spec, t, &x, 1e-10)?;
                    rows.push(Some(t), &format!("residual_at_{u}ell"), s.residual, s.bound, s.residual <= s.bound);
                }
            }
        }
        Suite::Envelope => {
            let ts = log_grid(0.01, 100.0, 21);
            let radii: Vec<f64> = (0..=50).map(f64::from).collect();
            let scan = envelope_ratio_scan(&spec, &ts, &radii)?;
            let bound = 100.0;
            let within = scan.min_ratio > 0.0 && scan.spread() <= bound;
            rows.push(None, "envelope_spread", scan.spread(), bound, within == scan.envelope_expected);
        }
        Suite::ClosedForm => {
            if !spec.has_closed_form() {
                bail!("closed forms exist only for alpha 1/2 and 1, got {}", spec.alpha);
            }
            let mut rng = ChaCha8Rng::seed_from_u64(ctx.seed);
            let cap = if spec.dim == 1 { 1e-6 } else { f64::INFINITY };
            for _ in 0..a.points {
                let t = 10f64.powf(rng.random_range(-1.0..1.0));
                let r = spec.length_scale(t) * 10f64.powf(rng.random_range(-2.0..1.5));
                let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
                let x = match spec.dim {
                    1 => vec![if theta < std::f64::consts::PI { r } else { -r }],
                    2 => vec![r * theta.cos(), r * theta.sin()],
                    _ => bail!("closed-form suite covers n = 1, 2"),
                };
                let num = spec.eval_numeric(t, &x)?;
                let exact = spec.eval_closed_form(t, &x)?;
                let err = (num.value - exact.value).abs();
                let bound = num.abs_error_bound + exact.abs_error_bound;
                rows.push(Some(t), "abs_error", err, bound, err <= bound && num.abs_error_bound <= cap);
            }
        }
        Suite::Stable => {
            let t = 1.0;
            let exact = value_at_origin(spec.alpha, spec.dim, t);
            let method = if spec.dim == 1 { StableMethod::ChambersMallowsStuck } else { StableMethod::SubGaussian };
            let s = sample_stable(&spec, t, a.samples, ctx.seed, method)?;
            let hist = density_at_origin_histogram(&s, 0.05 * spec.length_scale(t));
            let (cond, _) = density_at_origin_conditional(&spec, t, a.samples, ctx.seed)?;
            for (metric, est) in [("histogram_rel_error", hist), ("conditional_rel_error", cond)] {
                let rel = (est / exact - 1.0).abs();
                rows.push(Some(t), metric, rel, 0.01, rel <= 0.01);
            }
        }
    }
    let summary = json!({
        "command": "kernel validate",
        "suite": suite,
        "alpha": spec.alpha,
        "n": spec.dim,
        "seed": ctx.seed,
        "rows": rows.tab.rows.len(),
        "failures": rows.failures,
    });
    let pass = rows.failures == 0;
    Ok(Outcome { tables: vec![rows.tab], summary, pass })
}
