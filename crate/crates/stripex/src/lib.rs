//! File formats, report emitters, a parallel suite runner and the
//! `stripex` command line on top of `stripex-core`.

pub mod cli;
pub mod error;
pub mod io;
pub mod parallel;
pub mod report;

pub use error::{CliError, Result};
