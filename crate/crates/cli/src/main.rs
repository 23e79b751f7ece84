use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_rational::BigRational;
use thiserror::Error;

mod commands;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Parser)]
#[command(name = "sln", version, about = "Exact deformed sl(n) link homology from planar diagrams")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    config: RunConfig,
}

#[derive(Debug, Clone, clap::Args)]
pub struct RunConfig {
    /// Rank n of sl(n), at least 2
    #[arg(long, global = true, default_value_t = 2, value_parser = clap::value_parser!(u32).range(2..))]
    pub n: u32,
    /// Nonzero deformation parameter, an integer or p/q
    #[arg(long, global = true, default_value = "1", value_parser = parse_beta, allow_hyphen_values = true)]
    pub beta: BigRational,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[arg(long, global = true, default_value_t = sln_core::complex::DEFAULT_MAX_CROSSINGS)]
    pub max_crossings: usize,
    /// Bound on n^(thin edges) when enumerating raw states
    #[arg(long, global = true, default_value_t = sln_core::states::DEFAULT_MAX_RAW_STATES)]
    pub max_raw_states: u64,
    /// Seed for the random basis rescalings
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

fn parse_beta(s: &str) -> Result<BigRational, String> {
    let b: BigRational = s.trim().parse().map_err(|_| format!("`{s}` is not a rational number"))?;
    if b == BigRational::from_integer(0.into()) {
        return Err("beta must be nonzero".into());
    }
    Ok(b)
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Homology by exact ranks, compared with the linking-number formula
    Homology {
        /// Diagram file (PD or signed format), or @name for a bundled diagram
        file: String,
    },
    /// Admissible states of one resolution
    States {
        file: String,
        /// One bit per crossing: 0 smooths, 1 makes a thick edge
        #[arg(long)]
        resolution: String,
        #[arg(long)]
        list: bool,
    },
    /// Chain dimensions or differential matrices
    Complex {
        file: String,
        #[arg(long, conflicts_with = "matrices")]
        dims: bool,
        #[arg(long)]
        matrices: bool,
    },
    /// Components, writhe and linking numbers of a diagram
    Diagram { file: String },
    /// Run every verification suite
    Verify {
        #[arg(long, hide = true)]
        inject_sign_flip: bool,
    },
    /// List the bundled diagrams
    Fixtures,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Bound(String),
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Bound(_) => 3,
        }
    }
}

/// Rendered report plus whether every check in it held.
pub struct Outcome {
    pub report: String,
    pub ok: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = &cli.config;
    let result = match &cli.command {
        Command::Homology { file } => commands::homology(file, cfg),
        Command::States { file, resolution, list } => commands::states(file, resolution, *list, cfg),
        Command::Complex { file, matrices, .. } => commands::complex(file, *matrices, cfg),
        Command::Diagram { file } => commands::diagram(file, cfg),
        Command::Verify { inject_sign_flip } => commands::verify(*inject_sign_flip, cfg),
        Command::Fixtures => commands::fixtures(cfg),
    };
    match result {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.report.as_bytes());
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("sln: {e}");
            ExitCode::from(e.code())
        }
    }
}
