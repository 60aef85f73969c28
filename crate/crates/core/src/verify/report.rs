use serde::Serialize;
use serde_json::Value;

use crate::error::Error;

/// Outcome of one scenario. `equal` is decided on the canonical JSON text
/// of both sides, so two values are equal iff they serialize identically.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub id: String,
    pub kind: String,
    pub lhs: Value,
    pub rhs: Value,
    pub equal: bool,
    pub notes: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

/// Compact JSON text with object keys in sorted order.
pub fn canonical(v: &Value) -> String {
    v.to_string()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Outcome {
    Passed,
    Failed,
    Errored,
}

impl Report {
    pub fn compare(kind: &str, lhs: Value, rhs: Value) -> Report {
        let equal = canonical(&lhs) == canonical(&rhs);
        Report { id: String::new(), kind: kind.to_string(), lhs, rhs, equal, notes: Vec::new(), error: None }
    }

    pub fn errored(id: &str, kind: &str, err: &Error) -> Report {
        let msg = err.to_string();
        Report {
            id: id.to_string(),
            kind: kind.to_string(),
            lhs: Value::Null,
            rhs: Value::Null,
            equal: false,
            notes: vec![msg.clone()],
            error: Some(msg),
        }
    }

    pub fn with_id(mut self, id: &str) -> Report {
        self.id = id.to_string();
        self
    }

    pub fn with_notes(mut self, notes: Vec<String>) -> Report {
        self.notes.extend(notes);
        self
    }

    pub fn outcome(&self) -> Outcome {
        match (&self.error, self.equal) {
            (Some(_), _) => Outcome::Errored,
            (None, true) => Outcome::Passed,
            (None, false) => Outcome::Failed,
        }
    }

    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub passed: usize,
    pub failed: usize,
    pub errored: usize,
}

impl Summary {
    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a Report>) -> Summary {
        let mut s = Summary::default();
        for r in reports {
            match r.outcome() {
                Outcome::Passed => s.passed += 1,
                Outcome::Failed => s.failed += 1,
                Outcome::Errored => s.errored += 1,
            }
        }
        s
    }

    pub fn total(&self) -> usize {
        self.passed + self.failed + self.errored
    }

    pub fn all_passed(&self) -> bool {
        self.failed == 0 && self.errored == 0
    }

    /// `{"summary": {"errored", "failed", "passed"}}`.
    pub fn to_json_line(&self) -> String {
        serde_json::json!({ "summary": self }).to_string()
    }
}
