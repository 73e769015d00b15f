//! `fbgain`: feedback capacity gains for Gaussian multiple-access channels.

mod commands;
mod render;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fbgain::Users;

#[derive(Parser)]
#[command(
    name = "fbgain",
    version,
    about = "Feedback capacity gains for K-user Gaussian multiple-access channels"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a single operating point.
    Solve(SolveArgs),
    /// Sweep lambda and F over total power in dB.
    Curve(CurveArgs),
    /// Find the maximal capacity gain factor.
    Peak(PeakArgs),
    /// Run the bound verification suite.
    Verify(VerifyArgs),
    /// Regenerate the power-gain or capacity-gain figure data.
    Figure(FigureArgs),
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct UserSelection {
    /// Number of users K (at least 2).
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    users: Option<u64>,
    /// Massive limit: K to infinity at fixed total power.
    #[arg(long)]
    massive: bool,
}

impl UserSelection {
    pub fn users(&self) -> Users {
        match self.users {
            Some(k) => Users::Finite(k),
            None => Users::Massive,
        }
    }
}

#[derive(Args, Debug)]
#[group(required = true, multiple = false)]
pub struct PowerSelection {
    /// Per-user power P in dB (finite K only).
    #[arg(long, allow_hyphen_values = true)]
    power_db: Option<f64>,
    /// Total power pi = K*P in dB.
    #[arg(long, allow_hyphen_values = true)]
    total_power_db: Option<f64>,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Csv,
    Json,
    Svg,
}

#[derive(Args, Debug)]
pub struct OutputArgs {
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Digits after the decimal point.
    #[arg(long, default_value_t = 9, value_parser = clap::value_parser!(u8).range(1..=17))]
    precision: u8,
}

#[derive(Args, Debug)]
pub struct RangeArgs {
    #[arg(long, default_value_t = -10.0, allow_hyphen_values = true)]
    from_db: f64,
    #[arg(long, default_value_t = 30.0, allow_hyphen_values = true)]
    to_db: f64,
}

#[derive(Args, Debug)]
pub struct SolveArgs {
    #[command(flatten)]
    who: UserSelection,
    #[command(flatten)]
    power: PowerSelection,
    /// Also print capacities in bits.
    #[arg(long)]
    bits: bool,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Which {
    /// Power gain factor lambda* vs. pi.
    Pfactor,
    /// Capacity gain factor F(pi) vs. pi.
    Cfactor,
}

#[derive(Args, Debug)]
pub struct CurveArgs {
    #[command(flatten)]
    who: UserSelection,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long, default_value_t = 0.1)]
    step_db: f64,
    /// Quantity plotted when writing SVG.
    #[arg(long, value_enum, default_value_t = Which::Pfactor)]
    which: Which,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args, Debug)]
pub struct PeakArgs {
    #[command(flatten)]
    who: UserSelection,
    #[command(flatten)]
    range: RangeArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Sabotage {
    /// Flip the sign of the finite-K dependence-balance residual.
    NegateResidual,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    samples: u64,
    /// Negative control: inject a defect so the suite must fail.
    #[arg(long, value_enum, hide = true)]
    sabotage: Option<Sabotage>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FigureArgs {
    #[arg(long, value_enum)]
    which: Which,
    /// Comma-separated user counts; `massive` (or `inf`) for the limit.
    #[arg(long, value_delimiter = ',', value_parser = parse_users, default_value = "2,3,10,100,massive")]
    users: Vec<Users>,
    #[command(flatten)]
    range: RangeArgs,
    #[arg(long, default_value_t = 0.1)]
    step_db: f64,
    #[command(flatten)]
    output: OutputArgs,
}

fn parse_users(s: &str) -> Result<Users, String> {
    match s.trim() {
        "massive" | "inf" => Ok(Users::Massive),
        other => {
            let k: u64 = other
                .parse()
                .map_err(|_| format!("not a user count: {other:?}"))?;
            Users::finite(k).map_err(|e| e.to_string())
        }
    }
}

/// Usage errors exit with 2, computation and verification failures with 1.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Solve(args) => commands::run_solve(args),
        Command::Curve(args) => commands::run_curve(args),
        Command::Peak(args) => commands::run_peak(args),
        Command::Verify(args) => commands::run_verify(args),
        Command::Figure(args) => commands::run_figure(args),
    };
    match result {
        Ok(code) => code,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
