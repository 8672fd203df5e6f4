use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use matvar_core::Theorem;

#[derive(Debug, Parser)]
#[command(name = "matvar", version, about = "Matrix variance bounds for Pearson and Ord families")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the quadratic q from the density or pmf and check the residual.
    InferQ(Common),
    /// Check that the declared quadratic satisfies the defining identity.
    Verify(Common),
    /// Compute the bound matrices and the Loewner-order verdicts.
    Bounds(Common),
    /// Run orders 1..N and tabulate the sandwich of upper and lower bounds.
    Chain(Common),
    /// Re-estimate D, H_k and B_k by Monte Carlo and compare.
    McVerify(Common),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Run configuration (JSON).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Distribution document path, or an inline `name:key=value,...`.
    #[arg(long)]
    pub dist: Option<String>,
    /// Function tuple document path, or inline JSON.
    #[arg(long)]
    pub functions: Option<String>,
    /// Orders n, comma separated. `chain` runs 1..=max.
    #[arg(long, value_delimiter = ',')]
    pub n: Option<Vec<usize>>,
    /// Subset of poincare,bessel.
    #[arg(long, value_delimiter = ',')]
    pub theorems: Option<Vec<Theorem>>,
    #[arg(long)]
    pub quad_nodes: Option<usize>,
    #[arg(long)]
    pub trunc_tol: Option<f64>,
    #[arg(long)]
    pub mc_samples: Option<usize>,
    #[arg(long)]
    pub mc_seed: Option<u64>,
    /// Relative eigenvalue tolerance; for infer-q and verify, the residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out_json: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Suppress the human-readable report.
    #[arg(long)]
    pub quiet: bool,
}
