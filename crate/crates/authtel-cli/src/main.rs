//! Command-line front end: planning, certification, α derivation, NPA export, SDP solving,
//! protocol simulation and figure data.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use authtel::cert::AlphaSource;
use authtel::{Inequality, Trust};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("I/O: {0}")]
    Io(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Cert(#[from] authtel::cert::CertError),
    #[error(transparent)]
    Npa(#[from] authtel::npa::NpaError),
    #[error(transparent)]
    Sdp(#[from] authtel::sdp::SdpError),
    #[error(transparent)]
    Protosim(#[from] authtel::protosim::ProtosimError),
}

/// Result of a subcommand that ran to completion.
pub enum Status {
    Success,
    /// Infeasible target, vacuous certificate, failed solve or violated bound.
    Negative(String),
}

#[derive(Debug, Parser)]
#[command(name = "authtel", version, about = "Certification toolkit for authenticated teleportation")]
struct Cli {
    /// JSON file with the subcommand's options; command-line flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cheapest certificate parameters reaching a fidelity target.
    Plan(PlanArgs),
    /// Fidelity certificate for given parameters.
    Certify(CertifyArgs),
    /// Monte Carlo runs of the protocol against a source.
    Simulate(SimulateArgs),
    /// Self-testing constant from a minimum-fidelity curve.
    DeriveAlpha(DeriveArgs),
    /// Moment problem written in SDPA sparse format.
    NpaExport(ExportArgs),
    /// Solves an SDPA file.
    SdpSolve(SolveArgs),
    /// Fidelity and copy curves in both statistical regimes.
    Figure2(FigureArgs),
}

fn parse_alpha_source(s: &str) -> Result<AlphaSource, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string()))
        .map_err(|_| format!("`{s}` is not one of paper-default, sdp-derived, explicit"))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    Json,
    Csv,
}

/// Certificate parameters shared by several subcommands.
#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct CertArgs {
    /// 1sDI or DI.
    #[arg(long)]
    pub trust: Option<Trust>,
    /// steering or chsh.
    #[arg(long)]
    pub inequality: Option<Inequality>,
    /// iid statistics (Chernoff) when true, martingale statistics (Azuma) when false.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub iid: Option<bool>,
    /// Deviation from maximal violation.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Observed violation; sets ε = maximum − violation.
    #[arg(long)]
    pub violation: Option<f64>,
    #[arg(long)]
    pub q: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// paper-default, sdp-derived or explicit.
    #[arg(long, value_parser = parse_alpha_source)]
    pub alpha_source: Option<AlphaSource>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct PlanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cert: CertArgs,
    /// Fidelity to certify (default 2/3).
    #[arg(long)]
    pub target_fidelity: Option<f64>,
    /// Minimum success probability (default 0).
    #[arg(long)]
    pub target_probability: Option<f64>,
    #[arg(long)]
    pub epsilon_min: Option<f64>,
    #[arg(long)]
    pub epsilon_max: Option<f64>,
    #[arg(long)]
    pub q_max: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long)]
    pub max_copies: Option<u64>,
    /// Points of the per-ε table (default 12).
    #[arg(long)]
    pub table_points: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct CertifyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cert: CertArgs,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub cert: CertArgs,
    /// honest-ideal, werner, one-bad-pair or drifting.
    #[arg(long)]
    pub source: Option<String>,
    #[arg(long)]
    pub visibility: Option<f64>,
    #[arg(long)]
    pub bad_visibility: Option<f64>,
    #[arg(long)]
    pub start: Option<f64>,
    #[arg(long)]
    pub end: Option<f64>,
    #[arg(long)]
    pub levels: Option<u32>,
    #[arg(long)]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Haar inputs teleported through each accepted pair.
    #[arg(long)]
    pub teleport_inputs: Option<usize>,
    /// Summary JSON (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Per-trial CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SolverArgs {
    #[arg(long)]
    pub gap_tol: Option<f64>,
    #[arg(long)]
    pub residual_tol: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct DeriveArgs {
    #[arg(long)]
    pub trust: Option<Trust>,
    #[arg(long)]
    pub inequality: Option<Inequality>,
    /// state, ZB, XB, ZAZB, XAXB, ZAXB, or `measurement` for the largest of the measurement constants.
    #[arg(long)]
    pub objective: Option<String>,
    /// Comma-separated ε grid (default 0.01,0.02,0.05,0.1,0.2).
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// α JSON (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Curve CSV.
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct ExportArgs {
    #[arg(long)]
    pub trust: Option<Trust>,
    #[arg(long)]
    pub inequality: Option<Inequality>,
    #[arg(long)]
    pub objective: Option<String>,
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub violation: Option<f64>,
    /// Word list JSON replacing the default words.
    #[arg(long)]
    pub words: Option<PathBuf>,
    /// SDPA output path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary JSON (stdout when absent).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    /// SDPA input file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub solver: SolverArgs,
    /// Include the primal matrix and dual slack in the report.
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    pub include_matrices: Option<bool>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
pub struct FigureArgs {
    /// Restricts output to one trust setting (default both).
    #[arg(long)]
    pub trust: Option<Trust>,
    /// Default chsh.
    #[arg(long)]
    pub inequality: Option<Inequality>,
    #[arg(long)]
    pub q_iid: Option<f64>,
    #[arg(long)]
    pub q_noniid: Option<f64>,
    #[arg(long)]
    pub x: Option<f64>,
    /// Replaces the published constant for every curve.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub epsilon_min: Option<f64>,
    #[arg(long)]
    pub epsilon_max: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<Status, CliError> {
    let file = cli.config.as_deref();
    match cli.command {
        Command::Plan(a) => commands::plan(config::merge(&a, file)?),
        Command::Certify(a) => commands::certify(config::merge(&a, file)?),
        Command::Simulate(a) => commands::simulate(config::merge(&a, file)?),
        Command::DeriveAlpha(a) => commands::derive_alpha(config::merge(&a, file)?),
        Command::NpaExport(a) => commands::npa_export(config::merge(&a, file)?),
        Command::SdpSolve(a) => commands::sdp_solve(config::merge(&a, file)?),
        Command::Figure2(a) => commands::figure2(config::merge(&a, file)?),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // Usage errors exit 1; 2 is reserved for negative results.
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(Status::Success) => ExitCode::SUCCESS,
        Ok(Status::Negative(reason)) => {
            eprintln!("{reason}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
