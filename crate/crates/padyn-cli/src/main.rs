//! Command-line driver: load a job file, run the requested analysis, and
//! emit a report envelope (JSON) plus TSV side files for polygons and
//! valuation traces.
//!
//! Exit codes: 0 success, 1 input/schema error, 2 mathematical failure.

mod catalog;
mod jobs;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "padyn", version, about = "nonarchimedean dynamical systems toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a job file (or, with --batch, every *.json job in a directory).
    Run {
        path: PathBuf,
        /// Directory for report and TSV outputs (defaults to the job's directory).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Treat PATH as a directory of job files and run each one.
        #[arg(long)]
        batch: bool,
    },
    /// List the built-in example pairs, series and field specs.
    Catalog,
    /// Print the artifact version.
    Version,
    /// Re-verify the orbit-product certificates inside a criterion report.
    Reverify { report: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Run { path, out, batch } => {
            if batch {
                run_batch(&path, out.as_deref())
            } else {
                jobs::run_job(&path, out.as_deref())
            }
        }
        Command::Catalog => {
            print!("{}", catalog::render());
            0
        }
        Command::Version => {
            println!("padyn {}", padyn::VERSION);
            0
        }
        Command::Reverify { report } => jobs::reverify(&report),
    };
    ExitCode::from(code)
}

fn run_batch(dir: &std::path::Path, out: Option<&std::path::Path>) -> u8 {
    let entries = match std::fs::read_dir(dir) {
        Ok(e) => e,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", dir.display());
            return 1;
        }
    };
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        eprintln!("error: no job files in {}", dir.display());
        return 1;
    }
    let mut worst = 0u8;
    for p in paths {
        let code = jobs::run_job(&p, out);
        worst = worst.max(code);
    }
    worst
}
