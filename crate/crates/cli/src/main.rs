mod commands;
mod input;
mod json;
mod render;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Exact toric geometry for exoflops of gauged Landau–Ginzburg models.
#[derive(Parser, Debug)]
#[command(name = "exoflop", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full pipeline on a model and print the verdict.
    Analyze(AnalyzeArgs),
    /// Re-check the certificates of a saved JSON report.
    Verify { report: PathBuf },
    /// Extreme rays and facets of the dual cone.
    Dual {
        cone: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Gorenstein classification of a cone.
    Gorenstein {
        cone: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Complete splittings of a cone.
    Split(SplitArgs),
    /// Nef partition from a splitting, optionally rewriting a model's potential.
    NefPartition(NefArgs),
    /// Regular triangulations: certify, or extend by new points.
    Triangulate {
        file: PathBuf,
        /// Points to add, as a document with a `points` array.
        #[arg(long)]
        extend: Option<PathBuf>,
        #[arg(long)]
        json: bool,
    },
    /// Built-in worked examples.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
}

#[derive(Args, Debug)]
pub struct AnalyzeArgs {
    file: PathBuf,
    /// Cone document for σ′; defaults to σ_W^∨.
    #[arg(long)]
    sigma_prime: Option<PathBuf>,
    /// Splitting points by name or as `[a,b,...]`, comma separated.
    #[arg(long)]
    splitting: Option<String>,
    #[arg(long)]
    smooth_input: bool,
    #[arg(long)]
    smooth_output: bool,
    #[arg(long)]
    height_bound: Option<usize>,
    /// Functional for the triangulation hyperplane, e.g. `1,1,0,2/3`.
    #[arg(long)]
    mbar: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
pub struct SplitArgs {
    cone: PathBuf,
    /// List every splitting instead of the first.
    #[arg(long)]
    all: bool,
    /// Degree element on the cone; required with `--n` for non-reflexive cones.
    #[arg(long, requires = "n")]
    m: Option<String>,
    #[arg(long, requires = "m")]
    n: Option<String>,
    #[arg(long)]
    json: bool,
}

#[derive(Args, Debug)]
pub struct NefArgs {
    cone: PathBuf,
    #[arg(long)]
    splitting: String,
    #[arg(long, requires = "n")]
    m: Option<String>,
    #[arg(long, requires = "m")]
    n: Option<String>,
    /// Model whose potential is rewritten on the output side.
    #[arg(long)]
    model: Option<PathBuf>,
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand, Debug)]
enum FixturesCommand {
    /// Regenerate fixtures and run their checks (`all`, `aspinwall`, `example62`, `lt:<n>`).
    Run {
        names: Vec<String>,
        #[arg(long, env = "EXOFLOP_THREADS")]
        threads: Option<usize>,
    },
    /// Print a fixture as an input document.
    Export {
        name: String,
        /// Which of the fixture's runs supplies splitting and flags.
        #[arg(long, default_value_t = 0)]
        run: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(args) => commands::analyze(&args),
        Command::Verify { report } => commands::verify(&report),
        Command::Dual { cone, json } => commands::dual(&cone, json),
        Command::Gorenstein { cone, json } => commands::gorenstein(&cone, json),
        Command::Split(args) => commands::split(&args),
        Command::NefPartition(args) => commands::nef_partition(&args),
        Command::Triangulate { file, extend, json } => {
            commands::triangulate(&file, extend.as_deref(), json)
        }
        Command::Fixtures(FixturesCommand::Run { names, threads }) => {
            commands::fixtures_run(&names, threads)
        }
        Command::Fixtures(FixturesCommand::Export { name, run }) => {
            commands::fixtures_export(&name, run)
        }
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
