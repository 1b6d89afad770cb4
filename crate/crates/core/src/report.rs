//! Law outcomes and tallies.

use serde::Serialize;
use serde_json::Value;

/// Failures kept verbatim per law; the rest are only counted.
pub const MAX_RECORDED_FAILURES: usize = 32;

/// Evidence that a law failed on a concrete input.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub message: String,
    pub data: Value,
}

impl Witness {
    pub fn new(message: impl Into<String>, data: Value) -> Self {
        Witness { message: message.into(), data }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Verdict {
    Pass,
    Fail(Witness),
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(w) => Some(w),
        }
    }

    /// Pass iff `lhs == rhs`; otherwise a witness built from `data`.
    pub fn equal<T: PartialEq>(lhs: &T, rhs: &T, message: &str, data: impl FnOnce() -> Value) -> Self {
        if lhs == rhs {
            Verdict::Pass
        } else {
            Verdict::Fail(Witness::new(message, data()))
        }
    }
}

/// Tally of one law over a batch of cases.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LawReport {
    pub law: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub algebra: Option<String>,
    pub cases: u64,
    pub failure_count: u64,
    pub failures: Vec<Witness>,
}

impl LawReport {
    pub fn new(law: impl Into<String>) -> Self {
        LawReport { law: law.into(), algebra: None, cases: 0, failure_count: 0, failures: Vec::new() }
    }

    pub fn for_algebra(law: impl Into<String>, algebra: impl Into<String>) -> Self {
        LawReport { algebra: Some(algebra.into()), ..Self::new(law) }
    }

    pub fn record(&mut self, verdict: Verdict) {
        match verdict {
            Verdict::Pass => self.cases += 1,
            Verdict::Fail(w) => self.fail(w),
        }
    }

    /// Records a case that failed, e.g. because evaluation itself errored.
    pub fn fail(&mut self, w: Witness) {
        self.cases += 1;
        self.failure_count += 1;
        if self.failures.len() < MAX_RECORDED_FAILURES {
            self.failures.push(w);
        }
    }

    pub fn passed(&self) -> bool {
        self.failure_count == 0
    }

    pub fn merge(&mut self, other: LawReport) {
        self.cases += other.cases;
        self.failure_count += other.failure_count;
        for w in other.failures {
            if self.failures.len() < MAX_RECORDED_FAILURES {
                self.failures.push(w);
            }
        }
    }
}
