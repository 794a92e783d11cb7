use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use equilattice_cli::{list_presets, run, ExperimentConfig, OUT_ENV};

#[derive(Parser)]
#[command(name = "equilattice", version, about = "Lattice counting and invariant-form experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config.
    Run {
        config: PathBuf,
        /// Output directory; overrides the config's `out` and $EQUILATTICE_OUT.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: available cores). Results do not depend on it.
        #[arg(long)]
        threads: Option<usize>,
        /// Seed; overrides the config's `seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// List lattice and Lie presets.
    Presets,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Presets => {
            for p in list_presets() {
                println!("{:<8} {:<18} {}", p.category, p.name, p.description);
            }
            ExitCode::SUCCESS
        }
        Command::Run { config, out, threads, seed } => {
            let mut cfg = match ExperimentConfig::load(&config) {
                Ok(c) => c,
                Err(e) => {
                    eprintln!("config error: {e}");
                    return ExitCode::from(1);
                }
            };
            if seed.is_some() {
                cfg.seed = seed;
            }
            if let Some(n) = threads {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("config error: --threads: {e}");
                    return ExitCode::from(1);
                }
            }
            let dir = out
                .or_else(|| cfg.out.clone())
                .or_else(|| std::env::var_os(OUT_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            match run(&cfg, &dir) {
                Ok(report) => {
                    for a in &report.assertions {
                        println!("{} {}: {}", if a.passed { "PASS" } else { "FAIL" }, a.name, a.detail);
                    }
                    println!("wrote {} tables and report.json to {}", report.tables.len(), dir.display());
                    if report.passed() {
                        ExitCode::SUCCESS
                    } else {
                        ExitCode::from(2)
                    }
                }
                Err(e) => {
                    eprintln!("error: {e:#}");
                    ExitCode::from(1)
                }
            }
        }
    }
}
