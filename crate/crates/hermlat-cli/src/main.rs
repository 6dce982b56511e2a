//! `hermlat`: compute invariants, densities and enumerations of hermitian
//! lattices from JSON, and run the verification suites.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::Value;

use hermlat_cli::commands::{self, EnumKind};
use hermlat_cli::report::VerifyReport;
use hermlat_cli::suites::{run_suite, Params, SUITES};
use hermlat_cli::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "hermlat", version, about = "Hermitian lattices over a ramified quadratic extension of Q_p")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Fundamental invariants, type, valuation and vertex/self-dual flags.
    Invariants { lattice: PathBuf },
    /// Local Siegel series as a polynomial, or its value at X = q^{-s}.
    Den {
        lattice: PathBuf,
        #[arg(long, conflicts_with = "at")]
        poly: bool,
        #[arg(long, allow_hyphen_values = true)]
        at: Option<i64>,
    },
    /// Derivative of the Siegel series at X = 1.
    Dden { lattice: PathBuf },
    /// Intersection number, computed through the density side.
    Int { lattice: PathBuf },
    /// Integral overlattices, vertex overlattices or the corank-one family.
    Enumerate {
        lattice: PathBuf,
        #[arg(long, value_enum)]
        kind: EnumKind,
        /// Upper bound on δ for --kind corank1; defaults to a_max + 1.
        #[arg(long, allow_hyphen_values = true)]
        delta_max: Option<i64>,
    },
    /// A point outside V^int in the support of the Fourier transform of the
    /// vertical density function of a corank-one lattice.
    FtSupport { lattice: PathBuf },
    /// Run a verification suite and print its report.
    Verify {
        #[arg(long, value_parser = suite_name)]
        suite: String,
        #[arg(long, default_value_t = 3)]
        p: u64,
        #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
        eps0: i64,
        #[arg(long, default_value_t = 4)]
        max_val: i64,
        #[arg(long, env = "HERMLAT_SEED", default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        /// Record wall time in summary.runtime_ms (otherwise 0).
        #[arg(long)]
        timing: bool,
    },
}

fn suite_name(s: &str) -> Result<String, String> {
    if s == "all" || SUITES.contains(&s) {
        Ok(s.to_string())
    } else {
        Err(format!("expected one of {}, all", SUITES.join(", ")))
    }
}

fn load(path: &PathBuf) -> CliResult<hermlat_core::hermlat::HermLattice> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    commands::read_lattice(&text)
}

fn print(v: &Value) {
    println!("{}", serde_json::to_string_pretty(v).expect("plain data"));
}

fn run(cli: Cli) -> CliResult<bool> {
    match cli.command {
        Command::Invariants { lattice } => print(&commands::invariants(&load(&lattice)?)?),
        Command::Den { lattice, at, .. } => print(&commands::den(&load(&lattice)?, at)?),
        Command::Dden { lattice } => print(&commands::dden_cmd(&load(&lattice)?)?),
        Command::Int { lattice } => print(&commands::int_cmd(&load(&lattice)?)?),
        Command::Enumerate { lattice, kind, delta_max } => {
            print(&commands::enumerate(&load(&lattice)?, kind, delta_max)?)
        }
        Command::FtSupport { lattice } => print(&commands::ft_support(&load(&lattice)?)?),
        Command::Verify { suite, p, eps0, max_val, seed, jobs, timing } => {
            let params = Params { p, eps0, max_val, seed };
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .map_err(|e| CliError::Input(e.to_string()))?;
            let start = Instant::now();
            let cases = pool.install(|| run_suite(&suite, &params))?;
            let ms = if timing { start.elapsed().as_millis() as u64 } else { 0 };
            let report = VerifyReport::new(&suite, cases, seed, ms);
            println!("{}", report.to_json_string());
            return Ok(report.all_pass());
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("hermlat: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
