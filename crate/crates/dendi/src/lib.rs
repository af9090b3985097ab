//! Command-line plumbing around `dendi-core`: CSV ingestion, run
//! configuration, JSON reports and TSV sidecar tables.

pub mod commands;
pub mod config;
pub mod error;
pub mod load;
pub mod output;
pub mod report;

pub use commands::{cmd_analyze, cmd_simulate, run};
pub use config::{Mode, RunConfig};
pub use error::{CliError, Result};
pub use load::load_csv;
pub use report::ReportFile;
