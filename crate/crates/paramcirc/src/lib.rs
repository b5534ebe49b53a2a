//! File formats, JSON reports and the `paramcirc` command line on top of
//! `paramcirc-core`.

pub mod cli;
pub mod formats;
pub mod report;

pub use cli::{run, run_args, Cli, Outcome};
