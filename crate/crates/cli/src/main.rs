//! `hpvem`: adaptive hp virtual element runs from JSON configs.
//!
//! Exit codes: 0 success, 2 configuration error, 3 invalid data,
//! 4 solver failure.

mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use hpvem::adaptivity::Strategy;

use crate::commands::MeshSource;
use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid data: {0}")]
    Data(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            Self::Config(_) => 2,
            Self::Data(_) => 3,
            Self::Solver(_) => 4,
        }
    }

    fn context(self, what: &str) -> Self {
        match self {
            Self::Config(m) => Self::Config(format!("{what}: {m}")),
            Self::Data(m) => Self::Data(format!("{what}: {m}")),
            Self::Solver(m) => Self::Solver(format!("{what}: {m}")),
        }
    }
}

impl From<hpvem::Error> for CliError {
    fn from(e: hpvem::Error) -> Self {
        use hpvem::Error as E;
        match e {
            E::Solver(_) | E::Singular(_) => Self::Solver(e.to_string()),
            E::InvalidArgument(_) | E::UnknownProblem(_) => Self::Config(e.to_string()),
            E::Topology(_) | E::Geometry(_) | E::Io(_) | E::Json(_) => Self::Data(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "hpvem", version, about = "Adaptive hp virtual element solver for the Poisson problem")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Uniform degree sweep on a fixed mesh; writes p_study.csv.
    PStudy(RunArgs),
    /// Adaptive hp refinement; writes history.csv.
    AdaptiveHp(RunArgs),
    /// Adaptive h refinement at fixed degree; writes history.csv.
    AdaptiveH(RunArgs),
    /// Writes mesh.json from a config or a positional description.
    MeshGen(MeshGenArgs),
    /// Checks a mesh file and prints its quality report.
    Validate { mesh: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory (default: the config's `out`, else `out`).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write a mesh and element table after every estimate.
    #[arg(long)]
    snapshots: bool,
    /// Overrides the Voronoi seed of the config.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct MeshGenArgs {
    /// `cartesian NX NY`, `lshape N`, `voronoi N [LLOYD]` or `voronoi-lshape N [LLOYD]`.
    spec: Vec<String>,
    #[arg(long, conflicts_with = "spec")]
    config: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
}

fn load(args: &RunArgs) -> Result<(RunConfig, PathBuf), CliError> {
    let mut cfg = RunConfig::read(&args.config)?;
    cfg.apply_seed(args.seed);
    let out = args.out.clone().or_else(|| cfg.out.clone()).unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn execute(command: Command) -> Result<(), CliError> {
    match command {
        Command::PStudy(args) => {
            let (cfg, out) = load(&args)?;
            commands::p_study(&cfg, &out)
        }
        Command::AdaptiveHp(args) => {
            let (cfg, out) = load(&args)?;
            commands::adaptive(&cfg, &out, Strategy::Hp, args.snapshots || cfg.snapshots)
        }
        Command::AdaptiveH(args) => {
            let (cfg, out) = load(&args)?;
            commands::adaptive(&cfg, &out, Strategy::HOnly, args.snapshots || cfg.snapshots)
        }
        Command::MeshGen(args) => {
            let out = args.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let path = match &args.config {
                Some(c) => {
                    let mut cfg = RunConfig::read(c)?;
                    cfg.apply_seed(args.seed);
                    commands::mesh_gen(MeshSource::Config(&cfg), &out)?
                }
                None => commands::mesh_gen(MeshSource::Positional(&args.spec, args.seed.unwrap_or(0)), &out)?,
            };
            println!("{}", path.display());
            Ok(())
        }
        Command::Validate { mesh } => {
            print!("{}", commands::validate_file(&mesh)?);
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
