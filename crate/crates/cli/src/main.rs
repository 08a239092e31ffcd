mod compat;
mod input;
mod inspect;
mod polar;
mod repro;
mod solve;
mod svg;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use infcost_core::Error;

/// Optimal transport with costs that may be +∞.
#[derive(Parser)]
#[command(name = "infcost", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide (strong) c-compatibility of the instance's measures.
    CheckCompat(CompatArgs),
    /// Solve a semi-discrete or discrete transport problem.
    Solve(SolveArgs),
    /// Print the Hall polytope's inequalities, vertices and face lattice.
    Polytope(PolytopeArgs),
    /// Certify that a potential's subgradient is c-cyclically monotone.
    VerifyPotential(VerifyArgs),
    /// Polar-cost calculus.
    #[command(subcommand)]
    Polar(PolarCommand),
    /// Run a canned worked example and check its documented outcome.
    Repro {
        #[arg(value_enum)]
        name: ReproName,
    },
}

#[derive(Args)]
struct CompatArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Target weights overriding ν's, comma separated.
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Semi,
    Discrete,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(value_enum)]
    mode: Mode,
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    max_iter: usize,
    /// Solve the two halves of a split separately and recombine.
    #[arg(long)]
    decompose: bool,
    /// Draw the cells (semi-discrete, dimension ≤ 2).
    #[arg(long)]
    svg: bool,
    /// Seed for subsampling large supports in the certificate.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Args)]
struct PolytopeArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    alpha: Option<String>,
    #[arg(long)]
    tol: Option<f64>,
    /// Write the mass table as JSON to this file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    potential: PathBuf,
    /// Plan CSV whose support must lie in the subgradient.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long)]
    tol: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct PolarCommon {
    /// Convex function JSON.
    #[arg(long)]
    function: PathBuf,
    /// Search grid `lo,hi,resolution`, applied on every axis.
    #[arg(long, default_value = "-4,4,201", allow_hyphen_values = true)]
    grid: String,
    /// Zoom rounds after the grid sweep.
    #[arg(long, default_value_t = 2)]
    refine: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum PolarCommand {
    /// Aφ at the points of `--ys` (CSV) or at the grid points.
    ATransform {
        #[command(flatten)]
        common: PolarCommon,
        #[arg(long)]
        ys: Option<PathBuf>,
    },
    /// Polar subgradient at `--x`: from a subgradient `--z`, or by scanning `--y-grid`.
    Subgrad {
        #[command(flatten)]
        common: PolarCommon,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        y_grid: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
    },
}

/// Variant names double as the CLI spellings.
#[allow(clippy::enum_variant_names)]
#[derive(Clone, Copy, ValueEnum)]
enum ReproName {
    ExmNegCycle,
    ExmHyperbola,
    ExmDecompose,
    ExmInversion,
}

/// Exit statuses shared by all commands.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Ok = 0,
    Usage = 1,
    Infeasible = 2,
    NoConvergence = 3,
}

fn status_of(err: &anyhow::Error) -> Status {
    match err.downcast_ref::<Error>() {
        Some(Error::NotInterior { .. } | Error::Infeasible | Error::Uncovered { .. }) => Status::Infeasible,
        Some(Error::MaxIterExceeded { .. }) => Status::NoConvergence,
        _ => Status::Usage,
    }
}

fn init_threads() {
    if let Some(n) = std::env::var("INFCOST_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn run(cli: Cli) -> anyhow::Result<Status> {
    match cli.command {
        Command::CheckCompat(a) => compat::run(&a),
        Command::Solve(a) => match a.mode {
            Mode::Semi => solve::semi(&a),
            Mode::Discrete => solve::discrete(&a),
        },
        Command::Polytope(a) => inspect::polytope(&a),
        Command::VerifyPotential(a) => inspect::verify(&a),
        Command::Polar(PolarCommand::ATransform { common, ys }) => polar::a_transform_cmd(&common, ys.as_deref()),
        Command::Polar(PolarCommand::Subgrad { common, x, z, y_grid, tol }) => {
            polar::subgrad(&common, &x, z.as_deref(), y_grid.as_deref(), tol)
        }
        Command::Repro { name } => repro::run(name),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { Status::Usage as u8 } else { 0 });
        }
    };
    init_threads();
    match run(cli) {
        Ok(status) => ExitCode::from(status as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(status_of(&e) as u8)
        }
    }
}
