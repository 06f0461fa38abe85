//! JSON run reports.
//!
//! Keys are emitted in declaration order and floats through `serde_json`'s
//! shortest round-trip formatting, so the same invocation always produces the
//! same bytes. Wall time is the one exception and is only included on request.

use std::path::PathBuf;

use rlseg::{AccuracyResult, BlockSpec, ExtractStats, FeatureReport};
use serde::Serialize;

use crate::input::InputDescriptor;

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA: &str = "rlseg-run-report/1";

#[derive(Debug, Clone, Serialize)]
pub struct FeatureEntry {
    pub label: &'static str,
    #[serde(flatten)]
    pub report: FeatureReport,
}

impl FeatureEntry {
    pub fn new(label: &'static str, report: FeatureReport) -> Self {
        FeatureEntry { label, report }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AccuracyEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extracted: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truth: Option<PathBuf>,
    #[serde(flatten)]
    pub result: AccuracyResult,
}

impl From<AccuracyResult> for AccuracyEntry {
    fn from(result: AccuracyResult) -> Self {
        AccuracyEntry {
            extracted: None,
            truth: None,
            result,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub schema: &'static str,
    pub command: &'static str,
    pub inputs: Vec<InputDescriptor>,
    pub block: Option<BlockSpec>,
    pub features: Vec<FeatureEntry>,
    pub quadrant: Option<String>,
    pub accuracy: Vec<AccuracyEntry>,
    /// Run-level work done by the extraction.
    pub counters: Option<ExtractStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

impl RunReport {
    pub fn new(command: &'static str) -> Self {
        RunReport {
            schema: SCHEMA,
            command,
            inputs: Vec::new(),
            block: None,
            features: Vec::new(),
            quadrant: None,
            accuracy: Vec::new(),
            counters: None,
            wall_time_ms: None,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }
}
