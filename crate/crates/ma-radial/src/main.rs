//! Thin command-line front end; all behavior lives in the library's
//! `cli` module.

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use ma_radial::cli;

#[derive(Parser)]
#[command(
    name = "ma-radial",
    version,
    about = "Radial Monge-Ampere solver and origin-smoothness classifier"
)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the configured problem and write the radial profile as CSV.
    Solve {
        /// Problem configuration (key = value lines).
        #[arg(long)]
        config: PathBuf,
        /// Output CSV path.
        #[arg(long)]
        out: PathBuf,
    },
    /// Classify origin smoothness of the configured right-hand side.
    Analyze {
        #[arg(long)]
        config: PathBuf,
    },
    /// Re-check an existing solution CSV against its configuration.
    Verify {
        #[arg(long)]
        config: PathBuf,
        /// Solution CSV produced by `solve`.
        #[arg(long)]
        solution: PathBuf,
    },
    /// Built-in demonstrations.
    Demo {
        #[command(subcommand)]
        family: Demo,
    },
}

#[derive(Subcommand)]
enum Demo {
    /// The family u = c*r^(2+2m/n) solving det D2u = r^(2m).
    Homogeneous {
        /// Dimension.
        #[arg(long)]
        n: u32,
        /// Degree index of the right-hand side r^(2m).
        #[arg(long)]
        m: u32,
    },
}

fn main() {
    let args = Args::parse();
    let code = match args.command {
        Command::Solve { config, out } => cli::run_solve(&config, &out),
        Command::Analyze { config } => cli::run_analyze(&config),
        Command::Verify { config, solution } => cli::run_verify(&config, &solution),
        Command::Demo {
            family: Demo::Homogeneous { n, m },
        } => cli::run_demo_homogeneous(n, m),
    };
    std::process::exit(code);
}
