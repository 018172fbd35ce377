//! `rieszdiag`: run a diagnostics configuration and write the report.
//!
//! The exit status reports operational errors only; verdicts live in the report.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, Context, Result};
use clap::Parser;
use rieszlike::config::{Format, RunConfig};
use rieszlike::report::save_report;
use rieszlike::trend::Ladder;

#[derive(Parser, Debug)]
#[command(
    name = "rieszdiag",
    version,
    about = "Diagnostics for Riesz-like bases on truncated rigged Hilbert spaces"
)]
struct Args {
    /// JSON run configuration
    #[arg(long, value_name = "PATH")]
    config: PathBuf,

    /// Seed for every randomized probe (overrides the config)
    #[arg(long)]
    seed: Option<u64>,

    /// Report path; stdout when absent
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Report format: json or csv
    #[arg(long)]
    format: Option<Format>,

    /// Truncation ladder, e.g. "8,16,32,64"
    #[arg(long)]
    ladder: Option<Ladder>,

    /// Tolerance override, repeatable: --tolerance gram=1e-9
    #[arg(long = "tolerance", value_name = "KEY=VALUE")]
    tolerances: Vec<String>,

    /// Leave timing out of the report so reruns are byte-identical
    #[arg(long)]
    no_timing: bool,
}

fn apply(args: &Args, cfg: &mut RunConfig) -> Result<()> {
    if let Some(seed) = args.seed {
        cfg.seed = Some(seed);
    }
    if let Some(out) = &args.out {
        cfg.output.path = Some(out.clone());
    }
    if let Some(format) = args.format {
        cfg.output.format = format;
    }
    if let Some(ladder) = &args.ladder {
        cfg.model.ladder = Some(ladder.clone());
    }
    for kv in &args.tolerances {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| anyhow!("--tolerance expects KEY=VALUE, got {kv:?}"))?;
        cfg.tolerances.set(k.trim(), v.trim())?;
    }
    if args.no_timing {
        cfg.timing = false;
    }
    Ok(())
}

fn main() -> Result<()> {
    let args = Args::parse();
    let mut cfg = RunConfig::load(&args.config).with_context(|| format!("loading {}", args.config.display()))?;
    apply(&args, &mut cfg)?;

    let report = rieszlike::run(&cfg)?;
    match &cfg.output.path {
        Some(path) => save_report(&report, path, cfg.output.format)?,
        None => {
            let text = match cfg.output.format {
                Format::Json => report.to_json()?,
                Format::Csv => report.to_csv()?,
            };
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    for (section, v) in report.verdicts() {
        eprintln!("{section}: {} = {}", v.name, v.verdict);
    }
    Ok(())
}
