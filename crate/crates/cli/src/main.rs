//! Command line driver: run, verify and sweep.
//!
//! Exit codes: 0 when every check passes, 2 when the configuration cannot be
//! loaded or built, 3 when a check fails or the solve does not converge.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use shockdev::harness::config::SolverConfig;
use shockdev::harness::report::Report;
use shockdev::harness::{self, SweepAxis};

const EXIT_CONFIG: u8 = 2;
const EXIT_FAILED: u8 = 3;

#[derive(Parser, Debug)]
#[command(
    name = "shockdev",
    version,
    about = "Shock development for a barotropic relativistic fluid"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve, evaluate every acceptance check and write the artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; defaults to output.dir of the configuration.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pointwise identities and property suites without the solve.
    Verify {
        #[arg(long)]
        config: PathBuf,
    },
    /// Rerun the solve across several ε or n values.
    Sweep(SweepArgs),
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    config: PathBuf,
    /// Comma separated ε values.
    #[arg(long, value_delimiter = ',', num_args = 0.., conflicts_with = "n", required_unless_present = "n")]
    eps: Option<Vec<f64>>,
    /// Comma separated grid sizes.
    #[arg(long, value_delimiter = ',', num_args = 0..)]
    n: Option<Vec<usize>>,
    /// Print the table as JSON.
    #[arg(long)]
    json: bool,
}

fn load(path: &Path) -> Result<SolverConfig, ExitCode> {
    SolverConfig::load(path).map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_CONFIG)
    })
}

fn print_report(report: &Report) {
    for line in report.summary_lines() {
        println!("{line}");
    }
    for c in report.criteria.iter().chain(&report.suites) {
        for chk in c.failing() {
            let note = chk
                .note
                .as_deref()
                .map(|n| format!(" ({n})"))
                .unwrap_or_default();
            println!(
                "  failed {} measured {:.6e} tolerance {:.1e}{note}",
                chk.id, chk.measured, chk.tolerance
            );
        }
    }
    if let Some(e) = &report.error {
        println!("solve error: {e}");
    }
    println!("overall {}", if report.pass { "PASS" } else { "FAIL" });
}

fn status(pass: bool) -> ExitCode {
    if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_FAILED)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run { config, out } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let outcome = match harness::run_all(&cfg) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            };
            print_report(&outcome.report);
            let dir = out
                .or_else(|| cfg.output.dir.clone())
                .unwrap_or_else(|| PathBuf::from("out"));
            if let Err(e) = outcome.write(&dir) {
                eprintln!("error: cannot write artifacts to {}: {e}", dir.display());
                return ExitCode::from(EXIT_CONFIG);
            }
            println!("artifacts written to {}", dir.display());
            status(outcome.report.pass)
        }
        Command::Verify { config } => {
            let cfg = match load(&config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            match harness::verify(&cfg) {
                Ok(report) => {
                    print_report(&report);
                    status(report.pass)
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        }
        Command::Sweep(args) => {
            let cfg = match load(&args.config) {
                Ok(c) => c,
                Err(code) => return code,
            };
            let axis = match (args.eps, args.n) {
                (Some(e), _) => SweepAxis::Eps(e),
                (None, Some(n)) => SweepAxis::N(n),
                (None, None) => unreachable!("clap requires one axis"),
            };
            match harness::sweep(&cfg, &axis) {
                Ok(table) => {
                    if args.json {
                        println!("{}", table.to_json());
                    } else {
                        print!("{}", table.to_text());
                    }
                    status(table.rows.iter().all(|r| r.error.is_none()))
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    ExitCode::from(EXIT_CONFIG)
                }
            }
        }
    }
}
