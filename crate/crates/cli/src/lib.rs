//! Command-line harness for the `sphereflow` laboratory: configuration,
//! persistence of runs, the verification suite, sweeps and plots.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod plot;
pub mod sweep;
pub mod verify;

pub use error::CliError;
