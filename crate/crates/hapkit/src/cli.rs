use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{self, BuildOptions};
use crate::error::CliResult;
use crate::report::{CertificationReport, DEFAULT_TOL};

#[derive(Debug, Parser)]
#[command(name = "hapkit", version, about = "Blockwise Haagerup-property certification for discrete quantum groups")]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Global {
    /// Numerical tolerance used by every check.
    #[arg(long, global = true, default_value_t = DEFAULT_TOL)]
    pub tol: f64,
    /// Also write the report as JSON to this path.
    #[arg(long, global = true, value_name = "PATH")]
    pub json: Option<PathBuf>,
    /// Do not print the text report.
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Certify a sequence of matrix families against the Haagerup criterion.
    CertifyHap {
        input: PathBuf,
        /// Overrides `eps_decay` from the input file.
        #[arg(long)]
        eps_decay: Option<f64>,
    },
    /// Write the semigroup families e^{-tL} of a generating functional.
    Semigroup {
        generator: PathBuf,
        /// One or more times t ≥ 0.
        #[arg(long = "t", required = true, num_args = 1.., allow_negative_numbers = true)]
        t: Vec<f64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Certify the conditionally free product of two damped sequences.
    Freeprod {
        config: PathBuf,
        /// Overrides `eps_decay` from the config file.
        #[arg(long)]
        eps_decay: Option<f64>,
    },
    /// Check positive definiteness of e^{-t·length} on a ball of a classical group.
    Schoenberg {
        /// Free product of cyclic groups, e.g. `F2`, `Z`, `Z2*Z3`.
        #[arg(long)]
        group: String,
        #[arg(long = "t", allow_negative_numbers = true)]
        t: f64,
        #[arg(long)]
        radius: u64,
    },
    /// Factor a generator into a cocycle and report its exceptional set.
    Cocycle {
        generator: PathBuf,
        /// Properness level.
        #[arg(long = "M", allow_negative_numbers = true)]
        level: f64,
        /// Where to write the cocycle.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build a generating functional Σ β_n (ε − μ_n) from a sequence of states.
    Buildgen {
        input: PathBuf,
        /// Where to write the generator.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also check properness at this level.
        #[arg(long = "M", allow_negative_numbers = true)]
        level: Option<f64>,
        /// Largest acceptable tail bound.
        #[arg(long, default_value_t = 1e-3)]
        tail_max: f64,
    },
}

/// What a run printed and how it ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

fn execute(cli: &Cli) -> CliResult<CertificationReport> {
    let tol = cli.global.tol;
    match &cli.command {
        Command::CertifyHap { input, eps_decay } => commands::certify_hap(input, tol, *eps_decay),
        Command::Semigroup { generator, t, out } => commands::semigroup(generator, t, out, tol),
        Command::Freeprod { config, eps_decay } => commands::freeprod(config, tol, *eps_decay),
        Command::Schoenberg { group, t, radius } => commands::schoenberg(group, *t, *radius, tol),
        Command::Cocycle { generator, level, out } => commands::cocycle(generator, *level, out.as_deref(), tol),
        Command::Buildgen { input, out, level, tail_max } => {
            let opts = BuildOptions { out: out.clone(), level: *level, tail_max: *tail_max };
            commands::buildgen(input, &opts, tol)
        }
    }
}

/// Runs a parsed command line. Never panics on bad input: every failure
/// becomes exit code 2 with a message on stderr.
pub fn run(cli: &Cli) -> Outcome {
    if !(cli.global.tol >= 0.0) || !cli.global.tol.is_finite() {
        return Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: invalid --tol {}\n", cli.global.tol),
        };
    }
    let report = match execute(cli) {
        Ok(r) => r,
        Err(e) => return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {e}\n") },
    };
    if let Some(path) = &cli.global.json {
        if let Err(e) = std::fs::write(path, report.to_json()) {
            return Outcome { code: 2, stdout: String::new(), stderr: format!("error: {}: {e}\n", path.display()) };
        }
    }
    let stdout = if cli.global.quiet { String::new() } else { report.to_text() };
    Outcome { code: if report.pass() { 0 } else { 1 }, stdout, stderr: String::new() }
}
