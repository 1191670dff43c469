//! File formats, run configuration and command implementations around
//! `qudit-parity-core`. The `qudit-parity` binary is a thin clap front end
//! over [`commands`].

#![deny(missing_docs)]
// `!(x > 0.0)` style guards are meant to reject NaN as well
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
mod error;
pub mod formats;

pub use error::CliError;
