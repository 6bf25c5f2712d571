//! Config-driven suites producing JSON verification reports.

pub mod config;
pub mod diff;
pub mod report;
pub mod suites;

use std::time::Instant;

pub use config::ExperimentConfig;
pub use diff::{compare_reports, parse_report, FieldDiff};
pub use report::{Check, Status, VerificationReport};
pub use suites::SUITES;

use crate::error::Result;

/// Runs one suite and assembles its report.
pub fn run(cfg: &ExperimentConfig, suite: &str) -> Result<VerificationReport> {
    let t = Instant::now();
    let checks = suites::run_checks(cfg, suite)?;
    Ok(VerificationReport::new(suite, cfg, checks, t.elapsed().as_millis() as u64))
}
