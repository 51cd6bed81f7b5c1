//! `msmall`: atlases, verification suites, proportion histograms and DOT
//! exports for M-small supersingular curves.
//!
//! Exit codes: 0 pass, 1 assertion failure, 2 usage, 3 envelope exceeded,
//! 4 internal consistency.

mod args;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use args::Cli;

/// Outcome of a failed run, mapped onto the exit-code taxonomy.
#[derive(Debug, thiserror::Error)]
pub enum Failure {
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("usage: {0}")]
    Usage(String),
    #[error("envelope exceeded: {0}")]
    Envelope(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Assertion(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Envelope(_) => 3,
            Failure::Internal(_) => 4,
        }
    }
}

impl From<msmall::Error> for Failure {
    fn from(e: msmall::Error) -> Self {
        use msmall::Error as E;
        let msg = e.to_string();
        match e {
            E::TheoremViolation(_) | E::PartitionConflict { .. } => Failure::Assertion(msg),
            E::CoverageRefused { .. } | E::DiscriminantTooLarge(_) => Failure::Envelope(msg),
            E::UnsupportedModulus(_)
            | E::InvalidPrime(_)
            | E::InvalidDiscriminant(_)
            | E::UnsupportedLevel(_)
            | E::InseparableLevel(_)
            | E::InvalidParameters(_)
            | E::NotApplicable(_)
            | E::Parse(_)
            | E::Io(_) => Failure::Usage(msg),
            _ => Failure::Internal(msg),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("msmall: cannot set thread count: {e}");
            return ExitCode::from(4);
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("msmall: {f}");
            ExitCode::from(f.code())
        }
    }
}
