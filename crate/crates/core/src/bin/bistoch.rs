use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bistoch::birkhoff::KatzPartition;
use bistoch::report::{self, RunReport, EQUALITY_TOL};
use bistoch::Error;

#[derive(Parser)]
#[command(name = "bistoch", version, about = "Checks and estimates for H-unistochastic hulls, cut polytopes and self-dual CP maps")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay the 3×3 witness and the trace bound.
    VerifyLambda3 {
        /// Perturb the witness (negative control).
        #[arg(long, hide = true)]
        tamper: bool,
    },
    /// Replay the 4×4 decomposition and the diagonal functional.
    VerifyLambda4,
    /// Decide membership of a real correlation matrix in the cut polytope.
    CutMembership {
        #[arg(long)]
        input: PathBuf,
        /// Replace C by t·C + (1 - t)·I first.
        #[arg(long)]
        shrink: Option<f64>,
        #[arg(long, default_value_t = EQUALITY_TOL)]
        tol: f64,
    },
    /// Bracket the segment constant for one Katz extreme point.
    EstimateLambda {
        #[arg(long)]
        n: usize,
        /// Block sizes, e.g. "3,1".
        #[arg(long)]
        partition: KatzPartition,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-6)]
        resolution: f64,
    },
    /// Build a mixed Hermitian unitary map from a cut certificate of ρC + (1-ρ)I.
    Pipeline {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 0.5)]
        rho: f64,
    },
    /// Properties and Hermitian Kraus form of a map given as Kraus JSON.
    SelfdualCheck {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = EQUALITY_TOL)]
        tol: f64,
    },
    /// Mixed Hermitian unitary form of ½(Φ + Φ*) for a 2×2 unitary or unitary mixture.
    #[command(name = "decompose-2x2")]
    Decompose2x2 {
        #[arg(long)]
        input: PathBuf,
    },
    /// λ_n and ρ_{n,2} brackets side by side.
    CompareConjecture {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 50)]
        samples: usize,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 1e-4)]
        resolution: f64,
    },
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("BISTOCH_SEED") {
        Ok(v) => v.trim().parse().map_err(|_| Error::Input(format!("BISTOCH_SEED={v:?} is not an integer"))),
        Err(_) => Ok(0),
    }
}

fn read(path: &PathBuf) -> Result<String, Error> {
    std::fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))
}

fn run(cmd: Command) -> Result<RunReport, Error> {
    match cmd {
        Command::VerifyLambda3 { tamper } => report::verify_lambda3(tamper),
        Command::VerifyLambda4 => report::verify_lambda4(),
        Command::CutMembership { input, shrink, tol } => {
            let c = report::parse_correlation(&read(&input)?)?;
            report::cut_membership_report(&c, shrink, tol)
        }
        Command::EstimateLambda { n, partition, samples, seed, resolution } => {
            report::estimate_lambda_report(n, &partition, samples, resolve_seed(seed)?, resolution)
        }
        Command::Pipeline { m, q, rho } => report::pipeline_report(m, q, rho),
        Command::SelfdualCheck { input, tol } => {
            let phi = serde_json::from_str(&read(&input)?).map_err(|e| Error::Input(e.to_string()))?;
            report::selfdual_report(&phi, tol)
        }
        Command::Decompose2x2 { input } => report::decompose_2x2_report(&report::parse_2x2_input(&read(&input)?)?),
        Command::CompareConjecture { n, samples, seed, resolution } => {
            report::compare_conjecture_report(n, samples, resolve_seed(seed)?, resolution)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command).and_then(|r| r.to_json().map(|j| (r, j))) {
        Ok((r, json)) => {
            // a closed pipe on stdout is not an error for the report itself
            let _ = writeln!(std::io::stdout(), "{json}");
            eprint!("{}", r.summary());
            ExitCode::from(r.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
