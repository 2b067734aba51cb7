//! Thin CLI over the experiment harness: `run`, `validate`, `version`.
//!
//! Exit codes: 0 on success/convergence, 2 on solver stalls, 1 on
//! validation or domain errors (with a machine-readable error JSON on
//! stdout).

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use nctorus::config::ExperimentConfig;
use nctorus::fileio::validate_element_file;
use nctorus::harness::run;

#[derive(Parser)]
#[command(name = "nctorus", about = "Noncommutative 2-torus experiment harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a config file.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Output directory (overrides the config).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
        /// Worker threads (overrides config and NCTORUS_THREADS).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Schema-check an element file and print its norms.
    Validate { element: PathBuf },
    /// Print the version.
    Version,
}

fn error_json(err: &nctorus::Error) -> String {
    serde_json::json!({
        "error": {
            "kind": err.kind(),
            "message": err.to_string(),
        }
    })
    .to_string()
}

fn resolve_threads(flag: Option<usize>, config: Option<usize>) -> Option<usize> {
    flag.or(config).or_else(|| {
        std::env::var("NCTORUS_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run {
            config,
            out,
            seed,
            threads,
        } => {
            let config = match ExperimentConfig::from_file(&config) {
                Ok(c) => c,
                Err(e) => {
                    println!("{}", error_json(&e));
                    return ExitCode::from(e.exit_code() as u8);
                }
            };
            if let Some(n) = resolve_threads(threads, config.threads) {
                // a later duplicate initialization is harmless
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            match run(&config, out, seed) {
                Ok(outcome) => {
                    println!(
                        "{}",
                        serde_json::json!({
                            "report": outcome.report_path,
                            "exit_code": outcome.exit_code,
                        })
                    );
                    ExitCode::from(outcome.exit_code as u8)
                }
                Err(e) => {
                    println!("{}", error_json(&e));
                    ExitCode::from(e.exit_code() as u8)
                }
            }
        }
        Command::Validate { element } => match validate_element_file(&element) {
            Ok(report) => {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("report serializes")
                );
                ExitCode::SUCCESS
            }
            Err(e) => {
                println!("{}", error_json(&e));
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Version => {
            println!("nctorus {}", env!("CARGO_PKG_VERSION"));
            ExitCode::SUCCESS
        }
    }
}
