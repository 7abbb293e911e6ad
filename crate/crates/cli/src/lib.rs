//! Config-driven experiments over the `finvc` core: growth records, VC
//! dimension search, concentration experiments, bounded-differences checks
//! and bound tables.

pub mod config;
pub mod error;
pub mod run;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::{Command, ExperimentConfig, Format};
pub use error::{CliError, Diagnostic};
pub use run::{file_digest, run, Manifest, RunOutput, CURVES_FILE, MANIFEST_FILE, REPORT_FILE};

/// Exit code when a bound or claim is violated beyond sampling error.
pub const EXIT_VIOLATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "finvc", version, about = "Growth functions and concentration bounds on finite domains")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Count the labelings a class induces on a point set.
    Growth(Common),
    /// Search for the largest shattered subset of a point pool.
    VcDim(Common),
    /// Distance from a random function to a class, against its guarantee.
    ApproxConcentration(Common),
    /// Sup-deviation of empirical errors, against its guarantee.
    UniformConvergence(Common),
    /// Bounded-differences checks for the approximation and empirical errors.
    BdCheck(Common),
    /// Growth bounds and the probabilities they imply over a grid of sizes.
    BoundsTable(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// TOML or JSON config; a previous run's manifest.json also works.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; never changes any output byte.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    #[arg(long, value_enum)]
    format: Option<Format>,
}

impl Sub {
    fn split(self) -> (Command, Common) {
        match self {
            Sub::Growth(c) => (Command::Growth, c),
            Sub::VcDim(c) => (Command::VcDim, c),
            Sub::ApproxConcentration(c) => (Command::ApproxConcentration, c),
            Sub::UniformConvergence(c) => (Command::UniformConvergence, c),
            Sub::BdCheck(c) => (Command::BdCheck, c),
            Sub::BoundsTable(c) => (Command::BoundsTable, c),
        }
    }
}

fn prepare(command: Command, args: &Common) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &args.config {
        Some(path) => ExperimentConfig::from_path(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(c) = cfg.command {
        if c != command {
            return Err(CliError::config(vec![Diagnostic::new(
                "command",
                format!("config is for {}, invoked as {}", c.name(), command.name()),
            )]));
        }
    }
    cfg.command = Some(command);
    if args.seed.is_some() {
        cfg.seed = args.seed;
    }
    if let Some(f) = args.format {
        cfg.output.get_or_insert_with(Default::default).format = Some(f);
    }
    Ok(cfg)
}

fn execute(command: Command, args: &Common) -> Result<RunOutput, CliError> {
    let cfg = prepare(command, args)?;
    match args.threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(k).build().map_err(anyhow::Error::from)?;
            pool.install(|| run(cfg, &args.out))
        }
        None => run(cfg, &args.out),
    }
}

/// Parses arguments, runs, prints a summary, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let (command, common) = cli.command.split();
    match execute(command, &common) {
        Ok(out) => {
            println!("{}", out.summary);
            println!("manifest: {}", out.manifest_path.display());
            if out.violated {
                eprintln!("bound violation flagged; see the report");
                EXIT_VIOLATION
            } else {
                0
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
