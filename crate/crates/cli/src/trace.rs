//! The trace format: a versioned JSON document with one record per blow-up
//! and a terminal status. Field order is fixed, so equal runs give equal
//! bytes.

use serde::{Deserialize, Serialize};

use crate::problem::PairSpec;

pub const TRACE_FORMAT: &str = "multires-trace";
pub const TRACE_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceFile {
    pub format: String,
    pub version: u32,
    pub command: String,
    pub ring: String,
    pub vars: Vec<String>,
    /// Input pairs with generators in canonical form.
    pub input: Vec<PairSpec>,
    pub steps: Vec<StepRecord>,
    /// Per-command result lines (empty for resolutions).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub results: Vec<String>,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub index: usize,
    pub phase: String,
    pub level: usize,
    /// Invariant value on the center, with exact fractions.
    pub h: String,
    pub centers: Vec<CenterRecord>,
    /// 1-based positions in `E` of the members containing the center.
    pub center_hyps: Vec<usize>,
    pub changes: Vec<String>,
    pub new_charts: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CenterRecord {
    pub chart: String,
    pub coords: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Status {
    /// `"resolved"`, `"ok"` or `"failed"`.
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub charts: Vec<ChartRecord>,
    /// Final exponent table of a monomial resolution.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub monomial: Vec<String>,
}

/// A chart with the controlled transforms of the pairs on it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChartRecord {
    pub label: String,
    pub vars: Vec<String>,
    pub pairs: Vec<PairSpec>,
}

impl TraceFile {
    pub fn new(command: &str, ring: String, vars: Vec<String>, input: Vec<PairSpec>) -> Self {
        TraceFile {
            format: String::from(TRACE_FORMAT),
            version: TRACE_VERSION,
            command: String::from(command),
            ring,
            vars,
            input,
            steps: Vec::new(),
            results: Vec::new(),
            status: Status { outcome: String::from("ok"), error: None, charts: Vec::new(), monomial: Vec::new() },
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("trace serializes");
        s.push('\n');
        s
    }

    pub fn from_json(src: &str) -> serde_json::Result<Self> {
        serde_json::from_str(src)
    }
}
