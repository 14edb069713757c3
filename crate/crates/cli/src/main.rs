//! `wmink`: solve, verify, radial-demo and admissibility.
//!
//! Exit codes: 0 success, 1 I/O or internal failure, 2 schema or validation
//! error, 3 not converged or verification failed, 4 measure concentrated on a
//! hyperplane, 5 inadmissible weight.

mod commands;
mod config;
mod exit;
mod render;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wmink::measure::WeightKindName;

use crate::config::Overrides;
use crate::exit::CliError;

#[derive(Parser)]
#[command(name = "wmink", version, about = "Weighted Minkowski solver for atomic Monge-Ampère data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an atomic instance and verify it atom by atom.
    Solve {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        max_iters: Option<usize>,
        #[arg(long)]
        quad_order: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Re-check an existing solution.json.
    Verify {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to the directory holding the input.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Radial gaussian example u(x) = r·sqrt(1+|x|²).
    RadialDemo {
        #[arg(long)]
        a: f64,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value = "out")]
        out: PathBuf,
    },
    /// Growth-condition scan for a weight and exponent.
    Admissibility {
        /// JSON file `{"dimension": n, "weight": {...}}`.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum)]
        weight: Option<Kind>,
        #[arg(long)]
        value: Option<f64>,
        /// Profile nodes as `r:g,r:g,...`.
        #[arg(long, value_parser = parse_profile)]
        profile: Option<Profile>,
        #[arg(long)]
        beta: Option<f64>,
        #[arg(long)]
        dimension: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Gaussian,
    Constant,
    RadialProfile,
}

impl From<Kind> for WeightKindName {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Gaussian => WeightKindName::Gaussian,
            Kind::Constant => WeightKindName::Constant,
            Kind::RadialProfile => WeightKindName::RadialProfile,
        }
    }
}

/// One clap value holding every `r:g` node.
#[derive(Clone)]
struct Profile(Vec<[f64; 2]>);

fn parse_profile(s: &str) -> Result<Profile, String> {
    s.split(',')
        .map(|pair| {
            let (r, g) = pair
                .split_once(':')
                .ok_or_else(|| format!("expected r:g, got `{pair}`"))?;
            let r: f64 = r.trim().parse().map_err(|e| format!("`{r}`: {e}"))?;
            let g: f64 = g.trim().parse().map_err(|e| format!("`{g}`: {e}"))?;
            Ok([r, g])
        })
        .collect::<Result<_, _>>()
        .map(Profile)
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Solve {
            input,
            out,
            beta,
            tol,
            max_iters,
            quad_order,
            seed,
        } => commands::solve(
            &input,
            &out,
            &Overrides {
                beta,
                tol,
                max_iters,
                quad_order,
                seed,
            },
        ),
        Command::Verify { input, out } => commands::verify(&input, out.as_deref()),
        Command::RadialDemo { a, n, out } => commands::radial_demo(a, n, &out),
        Command::Admissibility {
            input,
            weight,
            value,
            profile,
            beta,
            dimension,
            out,
        } => commands::admissibility(
            commands::WeightArgs {
                input: input.as_deref(),
                kind: weight.map(Into::into),
                value,
                profile: profile.map(|p| p.0),
                beta,
                dimension,
            },
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            let code = if e.use_stderr() { exit::SCHEMA } else { exit::OK };
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}
