//! Command-line certification of Haagerup-property criteria for discrete
//! quantum groups, on top of [`hapkit_core`].
//!
//! Every command produces a [`report::CertificationReport`]. Exit codes:
//! 0 when every verdict passes, 1 when at least one fails, 2 when the input
//! cannot be used.

pub mod cli;
pub mod commands;
pub mod error;
pub mod format;
pub mod report;

pub use cli::{run, Cli, Outcome};
pub use error::{CliError, CliResult};
