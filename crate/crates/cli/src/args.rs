use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use hmod_core::generate::{CoeffKind, FamilyKind};
use hmod_core::inequality::{Branch, InequalityId, ScalarCombForm};

#[derive(Debug, Parser)]
#[command(
    name = "hmod",
    version,
    about = "Verify Bessel-type inequalities in matrix Hilbert C*-modules"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a seeded verification campaign
    Verify(VerifyArgs),
    /// Evaluate one instance file and print the full report
    Case(CaseArgs),
    /// Search for near-sharp instances
    Search(SearchArgs),
    /// List the supported inequalities
    List(ListArgs),
}

fn parse_branch(s: &str) -> Result<Branch, String> {
    Branch::parse(s).ok_or_else(|| format!("expected 'first' or 'second', got '{s}'"))
}

fn parse_form(s: &str) -> Result<ScalarCombForm, String> {
    ScalarCombForm::parse(s).ok_or_else(|| format!("expected 'squared' or 'as_printed', got '{s}'"))
}

fn parse_tol(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if v > 0.0 && v < 1e-2 {
        Ok(v)
    } else {
        Err(format!("tolerance must lie in (0, 1e-2), got {v}"))
    }
}

fn dim(s: &str) -> Result<usize, String> {
    let v: usize = s.parse().map_err(|e| format!("{e}"))?;
    if (1..=128).contains(&v) {
        Ok(v)
    } else {
        Err(format!("dimension must lie in 1..=128, got {v}"))
    }
}

/// Instance generation flags shared by `verify` and `search`.
#[derive(Debug, Args)]
pub struct GenArgs {
    /// Module rows m
    #[arg(long, value_parser = dim)]
    pub m: Option<usize>,
    /// Algebra size d
    #[arg(long, value_parser = dim)]
    pub d: Option<usize>,
    /// Family length n
    #[arg(long, value_parser = dim)]
    pub n: Option<usize>,
    /// Master seed
    #[arg(long, env = "HMOD_SEED", default_value_t = 0)]
    pub seed: u64,
    /// Override psd_rel_tol
    #[arg(long, value_parser = parse_tol)]
    pub tol: Option<f64>,
    /// Vector family: generic, orthogonal, unit_orthogonal, near_parallel
    #[arg(long)]
    pub family: Option<FamilyKind>,
    /// Coefficients: generic, unitary, scalar_identity, zero
    #[arg(long, default_value = "generic")]
    pub coeffs: CoeffKind,
    /// B_n branch for bn_lemma_3_10 and thm_3_11
    #[arg(long, value_parser = parse_branch)]
    pub branch: Option<Branch>,
    /// Left-side form for scalar_comb_3_7 (as_printed is experimental)
    #[arg(long, value_parser = parse_form)]
    pub form: Option<ScalarCombForm>,
    /// Generate the known equality case
    #[arg(long)]
    pub probe: bool,
    /// Scale of generated vectors
    #[arg(long, default_value_t = 1.0)]
    pub magnitude: f64,
    /// Worker threads (default: available parallelism)
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub jobs: Option<u64>,
    /// Print the JSON report on stdout instead of the summary
    #[arg(long)]
    pub json: bool,
    /// Record wall time in the report (makes it run-dependent)
    #[arg(long)]
    pub timing: bool,
    /// Write the JSON report here
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Inequalities to run, comma separated (default: all)
    #[arg(long, value_delimiter = ',')]
    pub ineq: Vec<InequalityId>,
    /// Trials per inequality and profile
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trials: u64,
    /// Per-trial CSV rows
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[command(flatten)]
    pub gen: GenArgs,
}

#[derive(Debug, Args)]
pub struct CaseArgs {
    /// Instance JSON file
    #[arg(long)]
    pub file: PathBuf,
    /// Override psd_rel_tol
    #[arg(long, value_parser = parse_tol)]
    pub tol: Option<f64>,
    /// Write the report here as well
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SearchArgs {
    /// Inequality to search
    #[arg(long)]
    pub ineq: InequalityId,
    #[arg(long, default_value_t = 32, value_parser = clap::value_parser!(u64).range(1..))]
    pub restarts: u64,
    /// Steps per restart
    #[arg(long, default_value_t = 500, value_parser = clap::value_parser!(u64).range(1..))]
    pub steps: u64,
    #[arg(long, default_value_t = 0.1)]
    pub initial_step: f64,
    #[arg(long, default_value_t = 0.7)]
    pub shrink: f64,
    #[arg(long, default_value_t = 25, value_parser = clap::value_parser!(u64).range(1..))]
    pub patience: u64,
    #[command(flatten)]
    pub gen: GenArgs,
}

#[derive(Debug, Args)]
pub struct ListArgs {
    /// Machine-readable output
    #[arg(long)]
    pub json: bool,
}
