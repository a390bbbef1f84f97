//! Data plumbing and command implementations behind the `asn` binary.

pub mod commands;
pub mod data;
pub mod error;
pub mod summary;

pub use error::{CliError, Result};
