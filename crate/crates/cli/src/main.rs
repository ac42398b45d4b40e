mod commands;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use algco::par::Exec;
use clap::{Parser, Subcommand, ValueEnum};

use commands::{Outcome, Settings};

const EXIT_CODES: &str = "\
Exit codes:
  0  success, every checked identity holds
  1  a checked identity failed (or a verify-all expectation was not met)
  2  input error: unreadable file, schema violation, invalid algebra,
     morphism or representation, bad ALGCO_THREADS
  3  the representation is not flat (d^2 != 0 in its CE complex)
  4  two routes to the same cohomology disagree (kunneth, glue)

Environment:
  ALGCO_THREADS  maximum number of worker threads";

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "algco", version, about = "Exact checks for twisted Lie algebra cohomology", after_help = EXIT_CODES)]
struct Cli {
    /// Tolerance for floating-point checks (overrides input files)
    #[arg(long, global = true)]
    tol: Option<f64>,
    /// RK4 step count (overrides input files, at least 10)
    #[arg(long, global = true)]
    steps: Option<usize>,
    /// Output format
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    /// Include cohomology representatives in the output
    #[arg(long, global = true)]
    representatives: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Chevalley-Eilenberg cohomology of an algebra with coefficients
    Ce {
        /// Algebra file or built-in name (sl2, so3, heisenberg3, abelianN)
        #[arg(long)]
        algebra: String,
        /// Representation file, or `trivial` / `adjoint`; default trivial
        #[arg(long)]
        rep: Option<String>,
    },
    /// Product cohomology, directly and by convolution of the factors
    Kunneth {
        #[arg(long)]
        algebra_a: String,
        #[arg(long)]
        rep_a: Option<String>,
        #[arg(long)]
        algebra_b: String,
        #[arg(long)]
        rep_b: Option<String>,
    },
    /// Total cohomology of the Cech-CE double complex of a cover
    Glue {
        #[arg(long)]
        cover: PathBuf,
    },
    /// Mayer-Vietoris long exact sequence for the two sets of a cover file
    Mv {
        #[arg(long)]
        cover: PathBuf,
    },
    /// Homotopy of Lie algebra morphisms: ODE, triviality and gauge checks
    Homotopy {
        #[arg(long)]
        input: PathBuf,
    },
    /// Flow identities: derivations, bracket invariance, semidirect flows
    Flows {
        #[arg(long)]
        input: PathBuf,
    },
    /// Cylinder complex: the homotopy identity on polynomial forms
    Cylinder {
        #[arg(long)]
        input: PathBuf,
    },
    /// Runs every entry of a fixture manifest and compares exit codes
    VerifyAll {
        /// Manifest listing the runs and their expected exit codes
        #[arg(long, default_value = "fixtures/manifest.json")]
        manifest: PathBuf,
    },
}

fn configure_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("ALGCO_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("ALGCO_THREADS must be a positive integer, got {v:?}"))?;
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    #[cfg(not(feature = "parallel"))]
    let _ = n;
    Ok(())
}

fn run(cli: &Cli, settings: &Settings) -> Outcome {
    let exec = Exec::default();
    match &cli.command {
        Command::Ce { algebra, rep } => commands::cmd_ce(settings, algebra, rep.as_deref()),
        Command::Kunneth { algebra_a, rep_a, algebra_b, rep_b } => {
            commands::cmd_kunneth(settings, algebra_a, rep_a.as_deref(), algebra_b, rep_b.as_deref())
        }
        Command::Glue { cover } => commands::cmd_glue(settings, cover),
        Command::Mv { cover } => commands::cmd_mv(settings, cover),
        Command::Homotopy { input } => commands::cmd_homotopy(settings, input),
        Command::Flows { input } => commands::cmd_flows(settings, input),
        Command::Cylinder { input } => commands::cmd_cylinder(settings, input, exec),
        Command::VerifyAll { manifest } => verify::verify_all(settings, manifest, exec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match configure_threads() {
        Ok(()) => {
            let settings = Settings {
                tol: cli.tol,
                steps: cli.steps,
                representatives: cli.representatives,
                base: PathBuf::new(),
            };
            run(&cli, &settings)
        }
        Err(e) => Outcome::from_error(&algco::Error::InvalidInput(e)),
    };
    let body = match cli.format {
        Format::Json => serde_json::to_string_pretty(&outcome.report).expect("reports serialize"),
        Format::Text => outcome.text.clone(),
    };
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{body}");
    ExitCode::from(outcome.code as u8)
}

/// Parses a manifest entry the same way as the command line.
pub(crate) fn run_args(args: &[String], outer: &Settings) -> Outcome {
    let argv = std::iter::once("algco".to_string()).chain(args.iter().cloned());
    match Cli::try_parse_from(argv) {
        Ok(cli) => {
            let settings = Settings {
                tol: cli.tol.or(outer.tol),
                steps: cli.steps.or(outer.steps),
                representatives: cli.representatives,
                base: outer.base.clone(),
            };
            if matches!(cli.command, Command::VerifyAll { .. }) {
                return Outcome::from_error(&algco::Error::InvalidInput("verify-all cannot be nested".into()));
            }
            run(&cli, &settings)
        }
        Err(e) => Outcome::from_error(&algco::Error::InvalidInput(e.to_string())),
    }
}
