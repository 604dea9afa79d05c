use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use orlicz_core::cli::{cmd_chain, cmd_check, cmd_envelope, cmd_jensen, cmd_norm, write_outputs, AnalysisConfig, CheckName, Outcome};
use orlicz_core::Result;

#[derive(Parser)]
#[command(name = "orlicz", version, about = "Envelopes and condition certificates for anisotropic Orlicz functions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Analysis config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for report.txt and CSV files; overrides `out` in the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand)]
enum Command {
    /// Check one condition: a0, inc1, ainc1, almost-convex, equivalence, a1, m, azero-reduction.
    Check { condition: String },
    /// Write the grid envelope as CSV.
    Envelope,
    /// A1, the A1 => M constant chain and an independent M check.
    Chain,
    /// Jensen-type inequality on random piecewise-constant fields.
    Jensen,
    /// Luxemburg norm against a dense scan.
    Norm,
}

fn run(cli: &Cli) -> Result<Outcome> {
    let path = cli
        .config
        .as_ref()
        .ok_or_else(|| orlicz_core::Error::Config("--config PATH is required".into()))?;
    let mut cfg = AnalysisConfig::load(path)?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.tol.is_some() {
        cfg.tol = cli.tol;
    }
    cfg.validate()?;
    let outcome = match &cli.command {
        Command::Check { condition } => cmd_check(&cfg, condition.parse::<CheckName>()?)?,
        Command::Envelope => cmd_envelope(&cfg)?,
        Command::Chain => cmd_chain(&cfg)?,
        Command::Jensen => cmd_jensen(&cfg)?,
        Command::Norm => cmd_norm(&cfg)?,
    };
    if let Some(dir) = cli.out.as_ref().or(cfg.out.as_ref()) {
        write_outputs(dir, &outcome)?;
    }
    Ok(outcome)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if let Some(line) = outcome.report.lines().last() {
                println!("{line}");
            }
            ExitCode::from(outcome.code as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
