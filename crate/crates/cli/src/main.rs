//! `graphlap`: batch front-end for graph construction, Dirichlet solves,
//! ball exhaustion, distances, and self-adjointness probes.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use graphlap::ErrorClass;
use serde::Serialize;

#[derive(Parser, Debug)]
#[command(name = "graphlap", version, about = "Weighted graph Laplacians and discrete Schrödinger operators")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Serialize)]
pub struct Common {
    /// Graph-spec JSON file (explicit graph or family record).
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Catalog family id, `name[:key=value,...]`; repeatable for `probe`.
    #[arg(long, global = true)]
    pub family: Vec<String>,
    /// Truncation size for families.
    #[arg(long, global = true)]
    pub n_max: Option<u64>,
    /// Convergence tolerance for iterative procedures.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Write the full report as JSON.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Write series data as CSV files into this directory.
    #[arg(long, global = true)]
    #[serde(skip)]
    pub csv: Option<PathBuf>,
    /// Worker threads for independent family runs.
    #[arg(long, global = true, default_value_t = 1)]
    #[serde(skip)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Summarize a graph and its gauge potential.
    Inspect,
    /// Solve a Dirichlet problem on a finite region.
    Dirichlet {
        /// Region vertices, e.g. `1..5` or `1,2,3,7..9`.
        #[arg(long)]
        region: String,
        /// Boundary data `vertex=value,...`; unlisted boundary vertices get `--boundary-value`.
        #[arg(long)]
        boundary: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        boundary_value: f64,
    },
    /// Build a positive harmonic function by ball exhaustion.
    Harmonic {
        #[arg(long)]
        x0: u64,
        /// Largest ball radius; defaults to the distance to the truncation edge.
        #[arg(long)]
        radius: Option<usize>,
        /// Monitored vertices, comma separated.
        #[arg(long, value_delimiter = ',')]
        monitor: Vec<u64>,
    },
    /// Distances in the metric with edge length `1/sqrt(a)`.
    Distance {
        #[arg(long)]
        from: u64,
        #[arg(long)]
        to: Option<u64>,
        /// Also report the metric ball and cutoff function of this radius.
        #[arg(long)]
        radius: Option<f64>,
    },
    /// Kernel growth, completeness, and form-bound evidence for path families.
    Probe {
        /// Shift `s` in `(H + s) v = 0`; defaults to making `W + s >= 1`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<f64>,
        /// Series length for the completeness and weight-sum classifiers.
        #[arg(long, default_value_t = 1_000_000)]
        classify_n_max: u64,
        /// Also run the Agmon identity and ring estimate on the cutoff of this radius.
        #[arg(long)]
        agmon_radius: Option<f64>,
    },
    /// Built-in families.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CatalogAction {
    /// List built-in families with their recorded expectations.
    List,
    /// Emit a truncation as an explicit graph-spec file (use `--n-max`).
    Emit { id: String },
}

/// A failure with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<graphlap::Error> for Failure {
    fn from(e: graphlap::Error) -> Self {
        let code = match e.class() {
            ErrorClass::Parse => 2,
            ErrorClass::Precondition => 3,
            ErrorClass::Numeric => 4,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    match commands::run(&cli, argv) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
