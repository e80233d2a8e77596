//! Reproducible experiment runner for the `ncdirac` library.
//!
//! The binary is a thin wrapper: [`cli::Cli`] parses flags, [`config`]
//! resolves defaults < file < flags, [`run::execute`] computes a
//! [`run::Payload`], and [`record`] encodes it as CSV or JSON.

pub mod cli;
pub mod config;
pub mod record;
pub mod run;

pub use cli::{invoke, Invocation};
pub use config::{Command, Format, RunConfig};
pub use record::{ErrorKind, ErrorRecord, ResultRecord};
pub use run::{execute, Payload};

#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
mod book_cli {}
