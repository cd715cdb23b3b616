//! Standard-library companion to `cardvote-core`: profile files, report
//! rendering, experiment sweeps, log-log slope fits and the `cardvote` CLI.

pub mod cli;
mod error;
pub mod experiments;
pub mod fit;
pub mod formats;
pub mod output;

pub use error::{Error, Result};
