//! Command-line driver: configuration, orchestration and file formats.

mod cli;
mod config;
mod io;
mod run;

pub use cli::{cli_main, dispatch, error_line, Cli, Command, EXIT_OK, EXIT_RUNTIME, EXIT_USAGE, THREADS_ENV};
pub use config::{PicInit, RawConfig, RunConfig, ScenarioKind, SolverKind, KEYS};
pub use io::*;
pub use run::{execute, RunOutput, CONFIG_ECHO, DUMP_DIR, TIMESERIES};
