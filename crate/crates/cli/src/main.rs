//! `muskat`: solve, verify, sweep and adapt weights from the command line.
//!
//! Exit status: 0 ok, 1 check failure, 2 configuration error, 3 guard halt,
//! 4 I/O error. Relative output directories resolve against
//! `$MUSKAT_OUTPUT_ROOT` when it is set.

mod commands;
mod config;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::Exit;

#[derive(Debug, Parser)]
#[command(name = "muskat", version, about = "Pseudo-spectral Muskat solver and verification harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Integrate one configuration and write its trajectory.
    Solve { config: PathBuf },
    /// Run a check suite: identities, inequalities, convergence or all.
    Verify { suite: String, config: PathBuf },
    /// Run one solve per point of the configured axis.
    Sweep { config: PathBuf },
    /// Build a data-adapted weight from an `x,f` data file.
    PhiAdapt {
        data_file: PathBuf,
        /// Output directory.
        out: PathBuf,
        /// Sobolev order of the adapted norm.
        #[arg(long, default_value_t = 1.5)]
        s: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { Exit::Config } else { Exit::Ok }.into();
        }
    };
    let out = match &cli.command {
        Command::Solve { config } => commands::solve(config),
        Command::Verify { suite, config } => commands::verify(suite, config),
        Command::Sweep { config } => commands::sweep(config),
        Command::PhiAdapt { data_file, out, s } => commands::phi_adapt(data_file, out, *s),
    };
    match out {
        Ok(code) => code.into(),
        Err(e) => {
            eprintln!("muskat: {e}");
            e.exit.into()
        }
    }
}
