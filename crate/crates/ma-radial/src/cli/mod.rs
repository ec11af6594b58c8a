//! Command-line pipelines: configuration, CSV serialization, and the
//! subcommand drivers shared by the `ma-radial` binary and the
//! integration tests.

pub mod commands;
pub mod config;
pub mod csv;

pub use commands::{run_analyze, run_demo_homogeneous, run_solve, run_verify, RESIDUAL_BOUND};
pub use config::ConfigFile;
pub use csv::{
    parse_csv, rebuild_solution, render_csv, table_from_solution, SolutionTable, CSV_HEADER,
};
