use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

mod commands;
mod run;

#[derive(Debug, Parser)]
#[command(name = "unital", version, about = "Clique-free color patterns from Hermitian unital pencils")]
struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Pencil, quality coloring and pattern graphs.
    Build(BuildArgs),
    /// Turánize a pattern and certify K_{k+1}-freeness and α_k evidence.
    Sparsify(SparsifyArgs),
    /// Re-verify a pattern directory, and any sparse graphs in it.
    Verify(VerifyArgs),
    /// Affine-plane semisaturating coloring and its extension property.
    Semisat(SemisatArgs),
    /// Lower-bound table as CSV.
    Bounds(BoundsArgs),
    /// Incidence structure of PG(2, q²) and the pencil summary.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct PencilArgs {
    /// Prime q; the plane is PG(2, q²).
    #[arg(long)]
    pub q: u64,
    /// Number of unitals |Λ| (default ⌊q/2⌋); uses λ = 0..|Λ|−1.
    #[arg(long = "lambda", conflicts_with = "lambda_set")]
    pub lambda_size: Option<usize>,
    /// Explicit λ values, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub lambda_set: Option<Vec<u32>>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ColoringArgs {
    /// Colors per unital.
    #[arg(long, default_value_t = 1)]
    pub c: u32,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Coloring samples before giving up.
    #[arg(long, default_value_t = 1000)]
    pub retries: u32,
    /// Allow c > q and keep the best sample when none meets the size windows.
    #[arg(long)]
    pub relaxed: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, env = "UNITAL_OUT", default_value = "unital-out")]
    #[serde(skip)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BuildArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pencil: PencilArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub coloring: ColoringArgs,
    /// Also enumerate and classify every K_{k+1}.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum AlphaArg {
    Value(f64),
    Named(&'static str),
}

impl FromStr for AlphaArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "paper" {
            return Ok(AlphaArg::Named("paper"));
        }
        s.parse::<f64>()
            .map(AlphaArg::Value)
            .map_err(|_| format!("expected a number in [0, 1] or `paper`, got {s:?}"))
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SparsifyArgs {
    /// Pattern directory from `build`; otherwise the pattern is rebuilt from
    /// the pencil and coloring flags.
    #[arg(long, conflicts_with = "q")]
    pub pattern: Option<PathBuf>,
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long = "lambda")]
    pub lambda_size: Option<usize>,
    #[command(flatten)]
    #[serde(flatten)]
    pub coloring: ColoringArgs,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// Retention probability, or `paper` for the asymptotic formula.
    #[arg(long, default_value = "0.5")]
    pub alpha: AlphaArg,
    /// Colors of the target Ramsey problem (default: number of pattern graphs).
    #[arg(long)]
    pub r: Option<u32>,
    /// Seeds scanned per color for the K_{k+1}-freeness statistics.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// Sparsification seed; attempts use seed, seed+1, ...
    #[arg(long, default_value_t = 0)]
    pub sparsify_seed: u64,
    /// Seeds tried per color before giving up.
    #[arg(long, default_value_t = 200)]
    pub sparsify_retries: u64,
    /// Random subsets tested for an induced K_k.
    #[arg(long, default_value_t = 500)]
    pub subset_samples: usize,
    /// Subset size (default ⌈|L| / r⌉).
    #[arg(long)]
    pub subset_size: Option<usize>,
    /// Test every subset instead of sampling (small graphs only).
    #[arg(long)]
    pub exhaustive: bool,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct VerifyArgs {
    /// Pattern directory to re-verify.
    #[arg(long)]
    pub pattern: PathBuf,
    /// Also enumerate and classify every K_{k+1}.
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct SemisatArgs {
    /// The forced clique is K_{k+1}.
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub r: u32,
    /// Prime order of the affine plane (default: smallest prime in ((k−1)r, 2(k−1)r)).
    #[arg(long)]
    pub q: Option<u64>,
    #[arg(long, default_value_t = 10_000)]
    pub extensions: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct BoundsArgs {
    #[arg(long)]
    pub k: u64,
    #[arg(long, default_value_t = 10)]
    pub rmax: u64,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ExportArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub pencil: PencilArgs,
    #[command(flatten)]
    #[serde(skip)]
    pub out: OutArgs,
}

fn check_k(k: usize) -> Result<()> {
    if k < 3 {
        bail!("degenerate input: k must be at least 3 (got {k})");
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Build(args) => {
            if let Some(k) = args.k {
                check_k(k)?;
            }
            commands::build(&args)
        }
        Command::Sparsify(args) => {
            check_k(args.k)?;
            commands::sparsify(&args)
        }
        Command::Verify(args) => {
            if let Some(k) = args.k {
                check_k(k)?;
            }
            commands::verify(&args)
        }
        Command::Semisat(args) => {
            check_k(args.k as usize)?;
            commands::semisat(&args)
        }
        Command::Bounds(args) => commands::bounds(&args),
        Command::Export(args) => commands::export(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads > 0 {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
