//! `fractrace`: kernels, potentials, capacities and trace experiments from
//! the command line. Every run writes its CSV tables and `summary.json` to
//! `--out`; the exit code is 0 when all asserted properties hold, 2 when
//! one fails and 1 on errors.

mod capacity;
mod common;
mod experiments;
mod kernel;
mod potentials;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use fractrace::lab::{emit_report, ExperimentConfig};
use serde_json::json;

use common::{Ctx, Outcome};

#[derive(Debug, Parser)]
#[command(name = "fractrace", version, about = "Potential theory experiments for the fractional heat semigroup")]
struct Cli {
    /// Seed for every random choice; overrides the config.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// JSON config supplying defaults for the flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    #[command(subcommand)]
    Kernel(kernel::KernelCmd),
    /// Wolff potentials; CSV `t,x1..xn,value`.
    Wolff(potentials::WolffArgs),
    /// Maximal functions; CSV `t,x1..xn,value`.
    Maximal(potentials::MaximalArgs),
    /// Capacity brackets; CSV sweep plus witnesses.
    #[command(subcommand)]
    Capacity(capacity::CapacityCmd),
    /// Ball-capacity scaling law.
    Scaling(experiments::ScalingArgs),
    /// Trace-inequality ratios and regime conditions.
    Trace(experiments::TraceArgs),
    /// Strichartz ratios under refinement and rescaling.
    Strichartz(experiments::StrichartzArgs),
    /// Weak- and strong-type capacitary inequalities.
    Capacitary(experiments::CapacitaryArgs),
}

fn dispatch(cmd: &Command, ctx: &Ctx) -> Result<Outcome> {
    match cmd {
        Command::Kernel(c) => kernel::run(c, ctx),
        Command::Wolff(a) => potentials::wolff(a, ctx),
        Command::Maximal(a) => potentials::maximal(a, ctx),
        Command::Capacity(c) => capacity::run(c, ctx),
        Command::Scaling(a) => experiments::scaling(a, ctx),
        Command::Trace(a) => experiments::trace(a, ctx),
        Command::Strichartz(a) => experiments::strichartz(a, ctx),
        Command::Capacitary(a) => experiments::capacitary(a, ctx),
    }
}

fn run(cli: &Cli) -> Result<(PathBuf, Outcome)> {
    let config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    let out = cli.out.clone().or_else(|| config.out.clone()).unwrap_or_else(|| PathBuf::from("fractrace-out"));
    let ctx = Ctx { seed: cli.seed.or(config.seed).unwrap_or(0), config };
    let mut outcome = dispatch(&cli.command, &ctx)?;
    outcome.summary["seed"] = json!(ctx.seed);
    outcome.summary["pass"] = json!(outcome.pass);
    Ok((out, outcome))
}

/// The error chain, skipping causes already quoted by their parent.
fn message(e: &anyhow::Error) -> String {
    let mut out = String::new();
    for cause in e.chain() {
        let text = cause.to_string();
        if !out.contains(&text) {
            if !out.is_empty() {
                out.push_str(": ");
            }
            out.push_str(&text);
        }
    }
    out
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok((out, outcome)) => match emit_report(&out, &outcome.tables, &outcome.summary) {
            Ok(files) => {
                let verdict = if outcome.pass { "pass" } else { "FAIL" };
                println!("{verdict}: wrote {} files to {}", files.len(), out.display());
                if outcome.pass {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(2)
                }
            }
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(1)
            }
        },
        Err(e) => {
            let msg = message(&e);
            eprintln!("error: {msg}");
            if let Some(out) = cli.out.as_ref() {
                let summary = json!({ "error": msg, "pass": false });
                let _ = emit_report(out, &[], &summary);
            }
            ExitCode::from(1)
        }
    }
}
