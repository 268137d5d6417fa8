//! `shadowlab`: runs the shadow-ambiguity experiments from a TOML config.

mod config;
mod error;
mod output;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::json;
use shadowlab_core::parallel::with_workers;

use config::ExperimentConfig;
use error::CliError;
use run::Pipeline;

#[derive(Parser)]
#[command(name = "shadowlab", version, about = "Shadow-ambiguity experiments for convex bodies")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample direction chains.
    Sample(RunArgs),
    /// Project the body along sampled chains.
    Project(RunArgs),
    /// Estimate N_ε and E[log N_ε] over the ε grid.
    EstimateN(RunArgs),
    /// Evaluate the information bound next to the plug-in MI.
    Bound(RunArgs),
    /// Plug-in I(K1; Km | K0) with a δ sensitivity sweep.
    Mi(RunArgs),
    /// Data-processing check I(K1; Km) <= I(K1; K2).
    Dpi(RunArgs),
    /// Orbit-type stratification and its lower-bound formula.
    Stratify(RunArgs),
    /// Every stage above, in order.
    Full(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, env = "SHADOWLAB_WORKERS")]
    workers: Option<usize>,
    /// Output directory; overrides the config `out`.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn execute(pipeline: Pipeline, args: RunArgs) -> Result<run::RunManifest, CliError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let seed = args.seed.unwrap_or(cfg.seed);
    let workers = args.workers.unwrap_or(0);
    let out = args
        .out
        .or_else(|| cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("shadowlab-out"));
    with_workers(workers, || run::run(pipeline, cfg, seed, workers, &out))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = json!({
                "error": "usage",
                "message": e.kind().to_string(),
                "detail": e.render().to_string(),
                "exit_code": 2,
            });
            eprintln!("{err}");
            return ExitCode::from(2);
        }
    };
    let (pipeline, args) = match cli.command {
        Command::Sample(a) => (Pipeline::Sample, a),
        Command::Project(a) => (Pipeline::Project, a),
        Command::EstimateN(a) => (Pipeline::EstimateN, a),
        Command::Bound(a) => (Pipeline::Bound, a),
        Command::Mi(a) => (Pipeline::Mi, a),
        Command::Dpi(a) => (Pipeline::Dpi, a),
        Command::Stratify(a) => (Pipeline::Stratify, a),
        Command::Full(a) => (Pipeline::Full, a),
    };
    match execute(pipeline, args) {
        Ok(manifest) => {
            let summary = json!({
                "status": "ok",
                "subcommand": manifest.subcommand,
                "outputs": manifest.outputs,
                "skipped": manifest.skipped,
            });
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
