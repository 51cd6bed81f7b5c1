use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_bigint::BigUint;

#[derive(Debug, Parser)]
#[command(name = "msmall", version, about = "M-small supersingular elliptic curves")]
pub struct Cli {
    /// Worker threads (defaults to the available parallelism).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build the M-small atlas and print per-class counts.
    Atlas {
        #[command(flatten)]
        target: Target,
        /// Write the atlas as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one verification suite; exits 0 iff every assertion passes.
    Verify {
        which: Suite,
        #[command(flatten)]
        target: Target,
        /// Isogeny degrees used for the graph (or walk steps for `quat`).
        #[arg(long, value_delimiter = ',')]
        primes: Option<Vec<u64>>,
        /// Excluded prime for `primeexcl`.
        #[arg(long, default_value_t = 2)]
        l: u64,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Supersingular proportion over consecutive primes, as CSV.
    Histogram {
        /// Start of the range; the first row is the least prime > p.
        #[arg(long, value_parser = parse_start)]
        p: BigUint,
        #[arg(long = "M")]
        m: u64,
        /// Number of consecutive primes.
        #[arg(long)]
        count: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Export the supersingular isogeny graph as DOT.
    Graph {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        primes: Vec<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct Target {
    /// Characteristic, decimal or `2^k+c`.
    #[arg(long, value_parser = parse_p)]
    pub p: BigUint,
    #[arg(long = "M")]
    pub m: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Thm1,
    Primeexcl,
    Quat,
    Counts,
}

fn parse_p(s: &str) -> Result<BigUint, String> {
    let p = msmall::arith::parse_integer(s).map_err(|e| e.to_string())?;
    if p < BigUint::from(5u32) || !msmall::arith::is_probable_prime(&p) {
        return Err(format!("{s} is not a prime ≥ 5"));
    }
    Ok(p)
}

fn parse_start(s: &str) -> Result<BigUint, String> {
    msmall::arith::parse_integer(s).map_err(|e| e.to_string())
}
