//! Command-line driver: runs walks described by JSON configs and writes CSV/JSON reports.

mod commands;
mod config;
mod error;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Format, Outcome};
use error::CliError;

#[derive(Parser)]
#[command(
    name = "abelian-walk",
    version,
    about = "Random walks on finite Abelian groups"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config.
    #[arg(long, value_name = "PATH")]
    config: PathBuf,
    /// Directory for output files; without it the main output goes to stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Fiducial seed for coherent-state walks, overriding the config.
    #[arg(long, env = "ABELIAN_WALK_SEED", value_name = "SEED")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Trajectory q^(0..n) with entropy, Gini index and distance to uniform.
    Walk(Common),
    /// Character eigenvalues, e_max and mixing times.
    Spectrum(Common),
    /// Subgroup polytopes A[q^(n); B(G)] along the walk.
    Polytope {
        #[command(flatten)]
        common: Common,
        /// Also count the vertices of the full permutation polytope (length <= 8).
        #[arg(long)]
        full: bool,
    },
    /// Measurement walk: trajectory plus the induced transition matrix.
    Quantum(Common),
    /// Checks the monotonicity and containment properties of the configured walk.
    Verify(Common),
    /// Trajectory, spectrum and polytope summaries in one report.
    Run(Common),
}

fn execute(command: &Command) -> Result<(Outcome, &Common, bool), CliError> {
    let (common, verify) = match command {
        Command::Walk(c) | Command::Spectrum(c) | Command::Quantum(c) | Command::Run(c) => {
            (c, false)
        }
        Command::Verify(c) => (c, true),
        Command::Polytope { common, .. } => (common, false),
    };
    let cfg = config::load(&common.config, common.seed)?;
    let outcome = match command {
        Command::Walk(c) => commands::walk(&cfg, c.format),
        Command::Spectrum(c) => commands::spectrum_cmd(&cfg, c.format),
        Command::Polytope { common, full } => commands::polytope_cmd(&cfg, common.format, *full),
        Command::Quantum(c) => commands::quantum_cmd(&cfg, c.format),
        Command::Verify(c) => commands::verify(&cfg, c.format),
        Command::Run(c) => commands::run(&cfg, c.format),
    }?;
    Ok((outcome, common, verify))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = execute(&cli.command).and_then(|(outcome, common, verify)| {
        if let Some(dir) = &common.out {
            for path in report::write_all(dir, &outcome.artifacts)? {
                eprintln!("wrote {}", path.display());
            }
        }
        if common.out.is_none() || verify {
            std::io::stdout()
                .write_all(&outcome.stdout)
                .map_err(|e| CliError::Io(format!("stdout: {e}")))?;
        }
        if outcome.failed_checks > 0 {
            return Err(CliError::ChecksFailed(outcome.failed_checks));
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("abelian-walk: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
