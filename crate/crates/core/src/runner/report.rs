//! Machine-readable verification reports.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::error::{Error, Result};
use crate::runner::config::ExperimentConfig;

pub const SCHEMA_VERSION: u32 = 1;
pub const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
    pub metrics: Map<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    pub timing_ms: u64,
}

impl Check {
    pub fn new(name: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            status: Status::Pass,
            reason: None,
            metrics: Map::new(),
            witness: None,
            timing_ms: 0,
        }
    }

    pub fn skipped(name: impl Into<String>, reason: impl Into<String>) -> Self {
        Check { status: Status::Skipped, reason: Some(reason.into()), ..Check::new(name) }
    }

    /// Records `key` in the metrics; values that fail to serialize are stored as strings.
    pub fn metric(mut self, key: &str, value: impl Serialize) -> Self {
        let v = serde_json::to_value(&value).unwrap_or_else(|e| Value::String(e.to_string()));
        self.metrics.insert(key.to_string(), v);
        self
    }

    /// Fails the check with `reason` unless `ok`; the first failure wins.
    pub fn require(mut self, ok: bool, reason: impl FnOnce() -> String) -> Self {
        if !ok && self.status != Status::Fail {
            self.status = Status::Fail;
            self.reason = Some(reason());
        }
        self
    }

    pub fn witness(mut self, w: Option<String>) -> Self {
        if self.witness.is_none() {
            self.witness = w;
        }
        self
    }

    /// A check that failed because its inputs could not be built.
    pub fn errored(name: impl Into<String>, e: &Error) -> Self {
        let mut c = Check::new(name);
        c.status = Status::Fail;
        c.reason = Some(e.to_string());
        c.witness = Some(e.to_string());
        c
    }
}

/// Runs `f`, stamping its wall-clock time on the returned check.
pub fn timed(f: impl FnOnce() -> Check) -> Check {
    let t = Instant::now();
    let mut c = f();
    c.timing_ms = t.elapsed().as_millis() as u64;
    c
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema_version: u32,
    pub artifact_version: String,
    pub suite: String,
    pub config: ExperimentConfig,
    pub status: Status,
    pub checks: Vec<Check>,
    pub timing_ms: u64,
}

impl VerificationReport {
    pub fn new(suite: &str, config: &ExperimentConfig, checks: Vec<Check>, timing_ms: u64) -> Self {
        let status = if checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if !checks.is_empty() && checks.iter().all(|c| c.status == Status::Skipped) {
            Status::Skipped
        } else {
            Status::Pass
        };
        VerificationReport {
            schema_version: SCHEMA_VERSION,
            artifact_version: ARTIFACT_VERSION.to_string(),
            suite: suite.to_string(),
            config: config.clone(),
            status,
            checks,
            timing_ms,
        }
    }

    pub fn failed(&self) -> bool {
        self.status == Status::Fail
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }

    pub fn write(&self, path: &std::path::Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// The report with every timing field zeroed.
    pub fn without_timings(&self) -> Self {
        let mut r = self.clone();
        r.timing_ms = 0;
        for c in &mut r.checks {
            c.timing_ms = 0;
        }
        r
    }
}
