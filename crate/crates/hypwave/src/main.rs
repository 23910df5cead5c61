use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use hypwave::cli::{
    cmd_bubbling, cmd_convergence, cmd_lambda_critical, cmd_simulate, cmd_verify_morawetz,
    exit_code_for, load_config, RunConfig,
};

/// Equivariant wave maps from the hyperbolic plane: evolution, soliton
/// resolution diagnostics, bubbling detection, and Morawetz certification.
#[derive(Parser)]
#[command(name = "hypwave", version, disable_help_subcommand = true)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evolve a configured Cauchy problem and write time series + checkpoints
    Simulate {
        /// Run configuration file (flat `key = value` lines)
        #[arg(long)]
        config: PathBuf,
        /// Override the configured output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute a certified enclosure of the critical Morawetz endpoint
    #[command(name = "lambda_critical")]
    LambdaCritical {
        /// Enclosure half-width target, in [1e-10, 1e-4]
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        /// Directory for the certificate report
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Scan the pointwise Morawetz inequalities at a fixed lambda
    #[command(name = "verify_morawetz")]
    VerifyMorawetz {
        /// Static map parameter to test
        #[arg(long)]
        lambda: f64,
        /// Assert that the key inequality fails (for lambda past the endpoint)
        #[arg(long, default_value_t = false)]
        expect_fail: bool,
        /// Grid resolution per scan axis
        #[arg(long, default_value_t = 1000)]
        resolution: usize,
        /// Directory for the scan report
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Self-convergence study over successive grid refinements
    Convergence {
        /// Run configuration file
        #[arg(long)]
        config: PathBuf,
        /// Number of refinement levels beyond the base grid (>= 2)
        #[arg(long, default_value_t = 2)]
        refinements: usize,
    },
    /// Sphere-target blow-up run with bubbling diagnostics
    Bubbling {
        /// Run configuration file (must select the sphere target)
        #[arg(long)]
        config: PathBuf,
        /// Override the configured output directory
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run() -> hypwave::Result<i32> {
    let cli = Cli::parse();
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg: RunConfig = load_config(&config)?;
            cmd_simulate(&cfg, out.as_deref())
        }
        Command::LambdaCritical { tol, out } => cmd_lambda_critical(tol, out.as_deref()),
        Command::VerifyMorawetz { lambda, expect_fail, resolution, out } => {
            cmd_verify_morawetz(lambda, expect_fail, resolution, out.as_deref())
        }
        Command::Convergence { config, refinements } => {
            let cfg = load_config(&config)?;
            cmd_convergence(&cfg, refinements)
        }
        Command::Bubbling { config, out } => {
            let cfg = load_config(&config)?;
            cmd_bubbling(&cfg, out.as_deref())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code_for(&e) as u8)
        }
    }
}
