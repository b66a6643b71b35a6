//! Command-line plumbing around `trendforge-core`: argument parsing, report
//! rendering and the end-to-end pipeline.

pub mod commands;
pub mod error;
pub mod output;
pub mod report;

pub use error::{Failure, EXIT_INPUT, EXIT_INVARIANT};
pub use report::{build_report, run_pipeline, ReportSummary, RunConfig, REPORT_FILES};
