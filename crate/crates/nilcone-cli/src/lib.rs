//! Scenario ingestion, command dispatch and reports for the `nilcone` tool.

pub mod commands;
pub mod fixtures;
pub mod json;
pub mod report;
pub mod scenario;

pub use commands::{run, Command, RunError, RunOptions};
pub use report::Report;
pub use scenario::{ingest, ingest_str, IngestError, Scenario};
