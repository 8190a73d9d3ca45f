//! `rigidity`: universal rigidity certificates for bar frameworks.
//!
//! Exit codes of `check`: 0 universally rigid, 1 not universally rigid,
//! 2 inconclusive. Unreadable or malformed input exits with 64, any other
//! failure with 65.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rigidity::{Budget, Tolerances};

pub const EXIT_INPUT: u8 = 64;
pub const EXIT_FAILURE: u8 = 65;

#[derive(Parser, Debug)]
#[command(name = "rigidity", version, about = "Certify universal and dimensional rigidity of bar frameworks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the full certification cascade and print a report.
    Check {
        #[command(flatten)]
        run: RunArgs,
        /// Only look for the dimensional-rigidity certificate.
        #[arg(long)]
        dimensional: bool,
        /// Write the non-congruent witness framework here, when there is one.
        #[arg(long, value_name = "PATH")]
        witness_out: Option<PathBuf>,
        /// Record wall-clock timings (makes the report non-reproducible).
        #[arg(long)]
        timings: bool,
    },
    /// Distance matrix and projected Gram matrix diagnostics.
    Edm {
        #[command(flatten)]
        run: RunArgs,
        /// Dump D (to PATH, or standard output).
        #[arg(long, value_name = "PATH", num_args = 0..=1)]
        dump: Option<Option<PathBuf>>,
    },
    /// Gale matrix of the configuration.
    Gale {
        #[command(flatten)]
        run: RunArgs,
        /// Dump Z (to PATH, or standard output).
        #[arg(long, value_name = "PATH", num_args = 0..=1)]
        dump_gale: Option<Option<PathBuf>>,
    },
    /// General-position test; lists affinely dependent (r+1)-subsets.
    Genpos {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Quadratic-at-infinity test and affine flex witness.
    Flex {
        #[command(flatten)]
        run: RunArgs,
        /// Also print a basis of all quadrics at infinity.
        #[arg(long)]
        all: bool,
        #[arg(long, value_name = "PATH")]
        witness_out: Option<PathBuf>,
    },
    /// Stress space and a PSD stress of maximal rank.
    Stress {
        #[command(flatten)]
        run: RunArgs,
        /// Build the stress by lateration recognition and purification.
        #[arg(long)]
        lateration: bool,
        #[arg(long, value_name = "PATH", num_args = 0..=1)]
        dump_stress: Option<Option<PathBuf>>,
        /// Dump Psi followed by its missing-pair constraint residuals.
        #[arg(long, value_name = "PATH", num_args = 0..=1)]
        dump_psi: Option<Option<PathBuf>>,
    },
    /// Search for an equivalent but non-congruent framework.
    Falsify {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, value_name = "PATH")]
        witness_out: Option<PathBuf>,
    },
    /// Write the shipped example frameworks into DIR.
    Fixtures { dir: PathBuf },
}

#[derive(Args, Debug, Clone)]
struct RunArgs {
    /// Framework file.
    input: PathBuf,
    /// Random seed; overrides RIGIDITY_SEED, defaults to 0.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = Budget::default().restarts)]
    restarts: usize,
    #[arg(long, default_value_t = Budget::default().iterations)]
    iterations: usize,
    #[arg(long, default_value_t = Budget::default().falsifier_samples)]
    falsifier_samples: usize,
    #[arg(long, value_parser = positive, default_value_t = Tolerances::default().rank_rel)]
    rank_rel: f64,
    #[arg(long, value_parser = positive, default_value_t = Tolerances::default().psd_rel)]
    psd_rel: f64,
    #[arg(long, value_parser = positive, default_value_t = Tolerances::default().verify_rel)]
    verify_rel: f64,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    format: Format,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Human,
    Json,
}

fn positive(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(x) if x > 0.0 && x.is_finite() => Ok(x),
        Ok(_) => Err("must be positive".into()),
        Err(e) => Err(e.to_string()),
    }
}

/// Settings shared by every subcommand that reads a framework.
pub struct RunConfig {
    pub input: PathBuf,
    pub seed: u64,
    pub tol: Tolerances,
    pub budget: Budget,
    pub format: Format,
}

/// A failure with its exit code.
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn input(message: impl Into<String>) -> Self {
        Self { code: EXIT_INPUT, message: message.into() }
    }

    pub fn other(message: impl Into<String>) -> Self {
        Self { code: EXIT_FAILURE, message: message.into() }
    }
}

impl From<rigidity::RigidityError> for Failure {
    fn from(e: rigidity::RigidityError) -> Self {
        Failure::other(e.to_string())
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Failure> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var("RIGIDITY_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Failure::input(format!("RIGIDITY_SEED is not a 64-bit unsigned integer: {v:?}"))),
        Err(_) => Ok(0),
    }
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, Failure> {
        let tol = Tolerances { rank_rel: self.rank_rel, psd_rel: self.psd_rel, verify_rel: self.verify_rel, ..Tolerances::default() };
        let budget =
            Budget { restarts: self.restarts, iterations: self.iterations, falsifier_samples: self.falsifier_samples, ..Budget::default() };
        Ok(RunConfig { input: self.input.clone(), seed: resolve_seed(self.seed)?, tol, budget, format: self.format })
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Check { run, dimensional, witness_out, timings } => {
            commands::check(&run.config()?, dimensional, witness_out.as_deref(), timings)
        }
        Command::Edm { run, dump } => commands::edm(&run.config()?, dump.as_ref()),
        Command::Gale { run, dump_gale } => commands::gale(&run.config()?, dump_gale.as_ref()),
        Command::Genpos { run } => commands::genpos(&run.config()?),
        Command::Flex { run, all, witness_out } => commands::flex(&run.config()?, all, witness_out.as_deref()),
        Command::Stress { run, lateration, dump_stress, dump_psi } => {
            commands::stress(&run.config()?, lateration, dump_stress.as_ref(), dump_psi.as_ref())
        }
        Command::Falsify { run, witness_out } => commands::falsify(&run.config()?, witness_out.as_deref()),
        Command::Fixtures { dir } => commands::fixtures(&dir),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(EXIT_INPUT);
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("rigidity: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
