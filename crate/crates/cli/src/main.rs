use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use framemult::linalg::{CMatrix, CVector};
use framemult::{FrameSeq, GaborSystem, Multiplier};
use framemult_cli::commands::{self, DualKind, GaborAction, Strategy};
use framemult_cli::config::{OutputFormat, RunConfig};
use framemult_cli::error::CliError;
use framemult_cli::suite;

#[derive(Parser, Debug)]
#[command(name = "framemult", version, about = "Frame multipliers, their inverses and Gabor multipliers")]
struct Cli {
    #[arg(long, global = true, default_value_t = 1e-10)]
    tolerance_rank: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance_dual: f64,
    #[arg(long, global = true, default_value_t = 1e-9)]
    tolerance_inverse: f64,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Write output here instead of stdout
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Optimal frame bounds and classification of a sequence
    Bounds { frame: PathBuf },
    /// A dual frame
    Dual {
        frame: PathBuf,
        #[arg(long, value_enum, default_value_t = DualKind::Canonical)]
        kind: DualKind,
    },
    /// Apply a multiplier to a vector
    Apply { multiplier: PathBuf, vector: PathBuf },
    /// Invert a multiplier
    Invert {
        multiplier: PathBuf,
        #[arg(long, value_enum, default_value_t = Strategy::Auto)]
        strategy: Strategy,
        #[arg(long, value_enum, default_value_t = DualKind::Canonical)]
        dual: DualKind,
    },
    /// Gabor system operations
    Gabor {
        #[command(subcommand)]
        action: GaborAction,
        /// Gabor system file: {"L", "a", "b", "window"}
        #[arg(long, global = true)]
        system: Option<PathBuf>,
        /// Operator matrix file (nested rows of [re, im] pairs)
        #[arg(long, global = true)]
        operator: Option<PathBuf>,
    },
    /// Run every example and acceptance check
    Verify {
        /// Only run checks with this id (or id prefix before a dot)
        #[arg(long)]
        only: Option<String>,
    },
}

fn render<T: Serialize>(value: &T, text: impl FnOnce(&T) -> String, cfg: &RunConfig) -> Result<String, CliError> {
    Ok(match cfg.output_format {
        OutputFormat::Json => serde_json::to_string_pretty(value)? + "\n",
        OutputFormat::Text => text(value),
    })
}

fn json_text<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).unwrap_or_default() + "\n"
}

/// Output text and whether the run counts as a mathematical failure.
fn run(cli: &Cli, cfg: &RunConfig) -> Result<(String, bool), CliError> {
    match &cli.command {
        Command::Bounds { frame } => {
            let frame: FrameSeq = commands::load_json(frame)?;
            let out = commands::bounds(&frame);
            let text = |o: &commands::BoundsOutput| {
                format!("lower={:e} upper={:e} kind={:?} minimal={}\n", o.bounds.lower, o.bounds.upper, o.class.kind, o.class.minimal)
            };
            Ok((render(&out, text, cfg)?, false))
        }
        Command::Dual { frame, kind } => {
            let frame: FrameSeq = commands::load_json(frame)?;
            Ok((render(&commands::dual(&frame, *kind, cfg.seed)?, json_text, cfg)?, false))
        }
        Command::Apply { multiplier, vector } => {
            let m: Multiplier = commands::load_json(multiplier)?;
            let h: CVector = commands::load_json(vector)?;
            Ok((render(&commands::apply(&m, &h)?, json_text, cfg)?, false))
        }
        Command::Invert { multiplier, strategy, dual } => {
            let m: Multiplier = commands::load_json(multiplier)?;
            let out = commands::invert(&m, *strategy, *dual, cfg)?;
            let text = |o: &commands::InvertOutput| {
                format!(
                    "strategy={:?} classification={:?} left={:e} right={:e}\n",
                    o.strategy, o.report.classification, o.report.left_residual, o.report.right_residual
                )
            };
            Ok((render(&out, text, cfg)?, !out.is_invertible()))
        }
        Command::Gabor { action, system, operator } => {
            let system = system.as_ref().ok_or_else(|| CliError::Input("gabor needs --system".into()))?;
            let system: GaborSystem = commands::load_json(system)?;
            let operator: Option<CMatrix> = operator.as_deref().map(commands::load_json).transpose()?;
            let out = commands::gabor(*action, &system, operator.as_ref(), cfg)?;
            Ok((render(&out, json_text, cfg)?, false))
        }
        Command::Verify { only } => {
            let report = match only {
                Some(id) => suite::VerificationReport { config: cfg.clone(), checks: suite::run_matching(id, cfg) },
                None => suite::run_all(cfg),
            };
            if report.checks.is_empty() {
                return Err(CliError::Input(format!("no check matches {:?}", only)));
            }
            Ok((render(&report, suite::VerificationReport::to_text, cfg)?, !report.all_passed()))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = RunConfig {
        rank_tol: cli.tolerance_rank,
        dual_tol: cli.tolerance_dual,
        inverse_tol: cli.tolerance_inverse,
        seed: cli.seed,
        output_format: cli.format,
    };
    let result = cfg.validate().and_then(|()| run(&cli, &cfg)).and_then(|(text, failed)| {
        match &cli.out {
            Some(path) => std::fs::write(path, &text).map_err(|e| CliError::Internal(format!("{}: {e}", path.display())))?,
            None => print!("{text}"),
        }
        Ok(failed)
    });
    match result {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
