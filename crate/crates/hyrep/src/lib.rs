//! Command-line layer over `hyrep-core`: configuration files, sweeps,
//! CSV/JSON output with manifests, oracle checks and the threaded Monte
//! Carlo driver.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod checks;
pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod figures;
pub mod grid;
pub mod manifest;
pub mod output;
pub mod parallel;

pub use error::{CliError, CliResult};
