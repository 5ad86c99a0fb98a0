//! `infocorr` command line. Every output embeds the manifest of the run
//! that produced it; `infocorr rerun FILE` replays it.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 infeasible or violated
//! verdict, 3 solver failure.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use infocorr::Error;

#[derive(Parser, Debug)]
#[command(name = "infocorr", version, about = "Prepare-and-measure correlations under a guessing-probability bound")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Facets of the classical set lifted over (p, G), or of its slice at one G.
    Facets(FacetsArgs),
    /// Classical membership of a behavior at a given G.
    Membership(MembershipArgs),
    /// Relaxation upper bounds on a witness over a G grid (CSV).
    Bound(BoundArgs),
    /// See-saw lower bound with an explicit strategy (JSON).
    Seesaw(SeesawArgs),
    /// Certified min-entropy of one event over a G grid (CSV).
    Randomness(RandomnessArgs),
    /// Least information compatible with an observed witness value (JSON).
    CertifyInfo(CertifyArgs),
    /// Replays the manifest embedded in an earlier output.
    Rerun(RerunArgs),
}

#[derive(Args, Debug, Clone)]
pub struct PriorArg {
    /// `uniform` or comma-separated probabilities (decimals or fractions).
    #[arg(long, default_value = "uniform")]
    pub prior: String,
}

/// Grids accept a single value, a list `a,b,c` or a range `start:stop:n`;
/// fractions such as `2/3` are allowed.
#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct GridArgs {
    /// Guessing-probability bound(s).
    #[arg(long)]
    pub g: Option<String>,
    /// Information bound(s) in bits, converted with the prior.
    #[arg(long)]
    pub alpha: Option<String>,
}

#[derive(Args, Debug, Clone)]
pub struct RelaxArgs {
    /// `general`, `pure` or `classical` (commuting operators).
    #[arg(long, default_value = "general")]
    pub mode: String,
    /// Relaxation level; a filter overrides the words used.
    #[arg(long, default_value_t = 2)]
    pub level: usize,
    /// Preset name (`fixed-322`), a file holding a word list, or an inline list.
    #[arg(long)]
    pub filter: Option<String>,
    /// Word list for the localizing matrices.
    #[arg(long)]
    pub localizer_filter: Option<String>,
}

#[derive(Args, Debug)]
pub struct FacetsArgs {
    /// `322`, `212`, `211`, `rac22` or `nx,ny,nb`.
    #[arg(long)]
    pub scenario: String,
    #[command(flatten)]
    pub prior: PriorArg,
    /// `stochastic` or `det`.
    #[arg(long, default_value = "stochastic")]
    pub variant: String,
    /// Slice at this G (exact, e.g. `2/3`) and drop redundant rows.
    #[arg(long)]
    pub g: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct MembershipArgs {
    /// Behavior as JSON, or CSV with columns b,x,y,p (needs --scenario).
    #[arg(long)]
    pub behavior: PathBuf,
    #[arg(long)]
    pub scenario: Option<String>,
    #[command(flatten)]
    pub prior: PriorArg,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long, default_value = "stochastic")]
    pub variant: String,
    /// Message alphabet for the stochastic variant (smaller is an inner approximation).
    #[arg(long)]
    pub n_m: Option<usize>,
    #[arg(long, default_value_t = 1e-8)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Witness name (`322`, `rac22`) or JSON file.
    #[arg(long)]
    pub witness: String,
    #[command(flatten)]
    pub prior: PriorArg,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub relax: RelaxArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SeesawArgs {
    #[arg(long)]
    pub witness: String,
    #[command(flatten)]
    pub prior: PriorArg,
    #[command(flatten)]
    pub grid: GridArgs,
    #[arg(long)]
    pub dim: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 200)]
    pub rounds: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also writes `<out>.ensemble.json` and `<out>.measurements.json`.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RandomnessArgs {
    #[arg(long)]
    pub witness: String,
    #[command(flatten)]
    pub prior: PriorArg,
    #[command(flatten)]
    pub grid: GridArgs,
    /// One-based `x,y`.
    #[arg(long, default_value = "1,1")]
    pub event: String,
    /// Witness value to pin; defaults to the bound at each G.
    #[arg(long)]
    pub observed: Option<f64>,
    #[arg(long, default_value_t = infocorr::hierarchy::DEFAULT_PIN_TOL)]
    pub pin_tol: f64,
    #[command(flatten)]
    pub relax: RelaxArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct CertifyArgs {
    #[arg(long)]
    pub witness: String,
    #[command(flatten)]
    pub prior: PriorArg,
    #[arg(long)]
    pub observed: f64,
    /// Experimental error; brackets are also searched at observed - error.
    #[arg(long, default_value_t = 0.0)]
    pub error: f64,
    /// Also search at observed + error.
    #[arg(long)]
    pub with_upper: bool,
    #[arg(long, default_value_t = 0.01)]
    pub alpha_tol: f64,
    #[command(flatten)]
    pub relax: RelaxArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct RerunArgs {
    /// Output of an earlier run.
    pub file: PathBuf,
    /// Destination for the new output (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Infeasible(_) => 2,
        Error::Solver(_) => 3,
        _ => 1,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let argv: Vec<String> = std::env::args().collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors must not collide with the verdict code 2
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli, &argv[1..]) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
