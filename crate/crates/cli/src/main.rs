//! Batch command-line front end for the watset toolkit.
//!
//! Subcommands: `cluster`, `senses`, `sense-graph`, `triframes`, `eval`,
//! and `bench`. Every file format is line-oriented TSV (see the library
//! docs), all randomness flows from `--seed`, and output files are
//! byte-identical across runs regardless of `--workers`.

mod args;
mod bench;
mod commands;

use std::process::ExitCode;

use clap::Parser;

use crate::args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let workers = cli.workers();
    if workers == 0 {
        eprintln!("error: --workers must be >= 1");
        return ExitCode::from(2);
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(workers).build() {
        Ok(pool) => pool,
        Err(error) => {
            eprintln!("error: failed to build worker pool: {error}");
            return ExitCode::FAILURE;
        }
    };

    let result = pool.install(|| match cli.command {
        Command::Cluster(args) => commands::run_cluster(&args),
        Command::Senses(args) => commands::run_senses(&args),
        Command::SenseGraph(args) => commands::run_sense_graph(&args),
        Command::Triframes(args) => commands::run_triframes(&args),
        Command::Eval(args) => commands::run_eval(&args),
        Command::Bench(args) => bench::run_bench(&args, workers),
    });

    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(error) => {
            // Single-line, machine-parseable failure report.
            eprintln!("error: {error:#}");
            ExitCode::FAILURE
        }
    }
}
