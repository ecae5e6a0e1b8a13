//! Line-oriented and machine-readable verification reports.
//!
//! A suite counts every case it checks and records a failure entry for
//! each mismatch. An empty failure list is the pass condition; the JSON
//! rendering contains nothing time-dependent, so identical seeds and
//! configs produce byte-identical reports.

use serde::Serialize;

#[derive(Debug, Clone, Serialize, PartialEq, Eq)]
pub struct Failure {
    pub case: String,
    pub expected: String,
    pub got: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: String,
    pub checked: u64,
    pub failures: Vec<Failure>,
    /// Free-form findings that are not failures (conformance flags,
    /// errata, resolved ambiguities).
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub notes: Vec<String>,
}

impl Report {
    pub fn new(suite: &str) -> Self {
        Report {
            suite: suite.to_string(),
            checked: 0,
            failures: Vec::new(),
            notes: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Count a case; record a failure when `ok` is false.
    pub fn check(
        &mut self,
        ok: bool,
        case: impl Into<String>,
        expected: impl Into<String>,
        got: impl Into<String>,
    ) {
        self.checked += 1;
        if !ok {
            self.failures.push(Failure {
                case: case.into(),
                expected: expected.into(),
                got: got.into(),
            });
        }
    }

    pub fn note(&mut self, text: impl Into<String>) {
        self.notes.push(text.into());
    }

    /// One human-readable line per report.
    pub fn summary_line(&self) -> String {
        if self.passed() {
            format!("PASS {:<24} checked {}", self.suite, self.checked)
        } else {
            format!(
                "FAIL {:<24} checked {} failures {}",
                self.suite,
                self.checked,
                self.failures.len()
            )
        }
    }
}
