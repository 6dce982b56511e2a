//! The verification report and its deterministic serialization.

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Case {
    pub id: String,
    /// sha256 of the compact JSON of the case inputs.
    pub inputs: String,
    pub expected: String,
    pub actual: String,
    pub pass: bool,
}

impl Case {
    /// `pass` is exactly `expected == actual`.
    pub fn new(id: impl Into<String>, inputs: &Value, expected: impl Into<String>, actual: impl Into<String>) -> Self {
        let (expected, actual) = (expected.into(), actual.into());
        Case { id: id.into(), inputs: digest(inputs), pass: expected == actual, expected, actual }
    }
}

pub fn digest(v: &Value) -> String {
    let bytes = serde_json::to_vec(v).expect("plain data");
    Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub seed: u64,
    pub runtime_ms: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub suite: String,
    pub cases: Vec<Case>,
    pub summary: Summary,
}

impl VerifyReport {
    pub fn new(suite: &str, cases: Vec<Case>, seed: u64, runtime_ms: u64) -> Self {
        let passed = cases.iter().filter(|c| c.pass).count();
        let summary = Summary { total: cases.len(), passed, seed, runtime_ms };
        VerifyReport { suite: suite.to_string(), cases, summary }
    }

    pub fn all_pass(&self) -> bool {
        self.summary.passed == self.summary.total
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("plain data")
    }
}

/// Decimal string with 12 significant digits.
pub fn sig12(x: f64) -> String {
    format!("{x:.11e}")
}
