//! `moduli-rec`: intersection numbers on moduli spaces of curves from the
//! command line.
//!
//! Exit status is 0 on success, 1 when a computation fails (budget, tolerance
//! or a failed check) and 2 on a usage error.

mod cache;
mod commands;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use moduli_core::WittenEngine;

#[derive(Parser)]
#[command(
    name = "moduli-rec",
    version,
    about = "Exact intersection numbers on moduli spaces of stable curves"
)]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Plain, global = true)]
    format: Format,

    /// Correlator cache file, loaded on start and saved on exit.
    #[arg(long, env = "MODULI_REC_CACHE", global = true)]
    cache: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Plain,
    Json,
    Csv,
    Latex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Curve {
    Airy,
    Sine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Wp,
    Hodge,
    Trivial,
}

#[derive(Subcommand)]
pub enum Command {
    /// One ψ correlator <τ_d1 ⋯ τ_dn>_g.
    Witten {
        #[arg(long)]
        g: u32,
        /// Comma-separated ψ exponents.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        d: Vec<u32>,
    },
    /// Every nonzero ψ correlator with 2g - 2 + n <= max-euler.
    WittenTable {
        #[arg(long)]
        max_euler: u32,
    },
    /// Weil-Petersson volume polynomial.
    Wp {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
    },
    /// Kontsevich volume polynomial.
    Kvol {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
    },
    /// Laplace transform of the Kontsevich volume, as coefficients of
    /// Π 1/λ_i^(2d_i+1).
    KvolLaplace {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
    },
    /// Stable graphs of type (g, n).
    Graphs {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
    },
    /// Orbifold Euler characteristic of M_{g,n}.
    Euler {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
    },
    /// Kontsevich's trivalent ribbon graph sum.
    Ribbon {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        /// Also print every graph in cycle notation.
        #[arg(long)]
        list: bool,
        /// Refuse types needing more edges than this.
        #[arg(long, default_value_t = moduli_core::ribbon::DEFAULT_MAX_EDGES)]
        max_edges: usize,
    },
    /// Topological recursion correlators on a local spectral curve.
    Tr {
        #[arg(long, value_enum)]
        curve: Curve,
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
    },
    /// Correlators of a cohomological field theory by Givental's graph sum.
    Cohft {
        /// Built-in theory.
        #[arg(long, value_enum, conflicts_with = "spec", required_unless_present = "spec")]
        cohft: Option<Preset>,
        /// JSON description of the theory.
        #[arg(long)]
        spec: Option<PathBuf>,
        #[arg(long)]
        g: u32,
        /// Comma-separated insertions `d` or `mu:d`.
        #[arg(long, value_delimiter = ',', num_args = 1.., required = true)]
        d: Vec<String>,
    },
    /// Verifies L_n Z = 0 for n = -1..=n-max and the commutation relations.
    VirasoroCheck {
        /// Euler weight to which Z is built.
        #[arg(long, default_value_t = 4)]
        cutoff: u32,
        #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
        n_max: i64,
        /// Check [L_m, L_n] = ħ²(m - n) L_(m+n) literally rather than with
        /// the structure constants of the operators as normalized.
        #[arg(long)]
        literal: bool,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
    },
    /// Ratio of correlators to their large-genus asymptotics.
    Asymptotics {
        /// one-point, top-and-one, top-and-zero or balanced.
        #[arg(long, default_value = "one-point")]
        rule: String,
        #[arg(long, default_value_t = 15)]
        g_max: u32,
        /// Stop after this many seconds and report a partial series.
        #[arg(long)]
        budget_secs: Option<f64>,
    },
    /// Compares the numerical recursion for volumes with the exact volume.
    MirzakhaniCheck {
        #[arg(long)]
        g: u32,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

/// Why a command did not succeed.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    /// A budget ran out or a check failed; partial output may still be shown.
    Compute(String),
}

impl From<moduli_core::Error> for Failure {
    fn from(e: moduli_core::Error) -> Self {
        use moduli_core::Error::*;
        match e {
            InsufficientTruncation { .. } | Budget(_) | Tolerance { .. } => Failure::Compute(e.to_string()),
            Domain(_) | Unstable { .. } | Precondition(_) | Parse(_) => Failure::Usage(e.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let engine = WittenEngine::new();
    if let Some(path) = &cli.cache {
        cache::load(&engine, path);
    }
    let result = commands::run(&engine, &cli.command, cli.format);
    if let Some(path) = &cli.cache {
        if let Err(e) = cache::save(&engine, path) {
            eprintln!("warning: cannot save cache {}: {e}", path.display());
        }
    }
    match result {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err((out, failure)) => {
            print!("{out}");
            let (code, msg) = match failure {
                Failure::Usage(m) => (2, m),
                Failure::Compute(m) => (1, m),
            };
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
