//! File formats, experiment configs, the parallel Monte Carlo driver and the
//! `lassolab` command line, on top of `lassolab-core`.

pub mod cli;
pub mod config;
pub mod driver;
pub mod error;
pub mod io;

pub use error::{CliError, Result};
