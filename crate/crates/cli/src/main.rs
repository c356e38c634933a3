//! `ehg`: command-line front end for the EHG/TOCO preterm-birth
//! prediction pipeline.
//!
//! Exit codes: 0 on success, 1 when inputs fail validation (bad flags,
//! malformed configs or data files, impossible settings), 2 on runtime
//! failures (I/O, numerical breakdown).

mod commands;
mod config;
mod pipeline;

use clap::{Args, Parser, Subcommand};
use config::PipelineConfig;
use ehg_core::{Error, Result};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "ehg",
    version,
    about = "Preterm-birth prediction from EHG/TOCO recordings",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Scan a WFDB dataset directory and write a record manifest
    Ingest(PipelineArgs),
    /// Extract per-segment feature rows into a CSV
    Features(PipelineArgs),
    /// Run the cross-validated evaluation protocol on a feature CSV
    Evaluate(EvaluateArgs),
    /// Sweep the regime x KLT x channel grid and merge the reports
    Ablate(PipelineArgs),
    /// Rebuild plot data and a console table from a summary CSV
    Report(ReportArgs),
}

#[derive(Args)]
struct PipelineArgs {
    /// Pipeline configuration file
    #[arg(long)]
    config: PathBuf,
    /// Override evaluation.master_seed
    #[arg(long)]
    seed: Option<u64>,
    /// Override output.dir
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for batch stages (default: all logical cores)
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    pipeline: PipelineArgs,
    /// Feature CSV produced by `ehg features`
    #[arg(long)]
    features: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Summary CSV produced by `ehg evaluate`
    #[arg(long)]
    summary: PathBuf,
    /// Output directory for plot data (default: the summary's directory)
    #[arg(long)]
    out: Option<PathBuf>,
}

fn init_worker_pool(jobs: Option<usize>) -> Result<()> {
    let Some(n) = jobs else { return Ok(()) };
    if n == 0 {
        return Err(Error::Validation("--jobs must be at least 1".into()));
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Validation(format!("cannot size the worker pool: {e}")))?;
    #[cfg(not(feature = "parallel"))]
    log::warn!("built without the `parallel` feature; --jobs {n} has no effect");
    Ok(())
}

fn load(args: &PipelineArgs) -> Result<(PipelineConfig, PathBuf)> {
    init_worker_pool(args.jobs)?;
    let cfg = config::load_config(&args.config)?;
    let out = args.out.clone().unwrap_or_else(|| cfg.output_dir.clone());
    Ok((cfg, out))
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Ingest(args) => {
            let (cfg, out) = load(&args)?;
            commands::cmd_ingest(&cfg, &out)
        }
        Command::Features(args) => {
            let (cfg, out) = load(&args)?;
            commands::cmd_features(&cfg, &out)
        }
        Command::Evaluate(args) => {
            let (cfg, out) = load(&args.pipeline)?;
            commands::cmd_evaluate(&cfg, &args.features, args.pipeline.seed, &out)
        }
        Command::Ablate(args) => {
            let (cfg, out) = load(&args)?;
            commands::cmd_ablate(&cfg, args.seed, &out)
        }
        Command::Report(args) => {
            let out = args.out.clone().unwrap_or_else(|| {
                args.summary
                    .parent()
                    .map_or_else(|| PathBuf::from("."), Path::to_path_buf)
            });
            commands::cmd_report(&args.summary, &out)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_) | Error::Numeric(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
