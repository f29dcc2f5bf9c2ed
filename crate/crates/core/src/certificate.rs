//! Machine-readable verification records.
//!
//! A [`Certificate`] is an ordered list of [`CheckRecord`]s. Each record names
//! the property it checks, carries exact tallies, and lists counterexample
//! witnesses when the property fails. Everything serializes deterministically
//! (ordered maps, no timestamps) so identical inputs give identical bytes.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    /// Recorded for information only; never affects the overall verdict.
    Info,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    /// Stable identifier, e.g. `pencil.tangency_partition`.
    pub check: String,
    /// The property being checked, in words.
    pub property: String,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub tallies: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witnesses: Vec<Value>,
}

impl CheckRecord {
    pub fn new(check: impl Into<String>, property: impl Into<String>, passed: bool) -> Self {
        Self {
            check: check.into(),
            property: property.into(),
            verdict: if passed { Verdict::Pass } else { Verdict::Fail },
            tallies: BTreeMap::new(),
            witnesses: Vec::new(),
        }
    }

    pub fn info(check: impl Into<String>, property: impl Into<String>) -> Self {
        Self {
            verdict: Verdict::Info,
            ..Self::new(check, property, true)
        }
    }

    pub fn tally(mut self, key: impl Into<String>, value: impl Serialize) -> Self {
        self.tallies.insert(
            key.into(),
            serde_json::to_value(value).expect("tallies are plain data"),
        );
        self
    }

    pub fn witness(mut self, value: impl Serialize) -> Self {
        self.witnesses
            .push(serde_json::to_value(value).expect("witnesses are plain data"));
        self
    }

    /// Keeps at most `limit` witnesses, recording how many were dropped.
    pub fn witnesses_capped(mut self, values: impl IntoIterator<Item = Value>, limit: usize) -> Self {
        let mut total = 0usize;
        for v in values {
            if total < limit {
                self.witnesses.push(v);
            }
            total += 1;
        }
        if total > limit {
            self = self.tally("witnesses_omitted", total - limit);
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.verdict != Verdict::Fail
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub checks: Vec<CheckRecord>,
}

impl Certificate {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: CheckRecord) {
        self.checks.push(record);
    }

    pub fn extend(&mut self, other: Certificate) {
        self.checks.extend(other.checks);
    }

    /// No record failed.
    pub fn passed(&self) -> bool {
        self.checks.iter().all(CheckRecord::passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.passed())
    }

    pub fn get(&self, check: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.check == check)
    }
}

impl FromIterator<CheckRecord> for Certificate {
    fn from_iter<I: IntoIterator<Item = CheckRecord>>(iter: I) -> Self {
        Self {
            checks: iter.into_iter().collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn info_records_do_not_fail() {
        let mut c = Certificate::new();
        c.push(CheckRecord::info("a", "informational"));
        c.push(CheckRecord::new("b", "holds", true).tally("n", 3));
        assert!(c.passed());
        c.push(CheckRecord::new("c", "broken", false).witness([1, 2]));
        assert!(!c.passed());
        assert_eq!(c.failures().count(), 1);
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.contains("\"verdict\":\"fail\""));
        let back: Certificate = serde_json::from_str(&json).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn witness_cap() {
        let r = CheckRecord::new("x", "y", false)
            .witnesses_capped((0..10).map(Value::from), 3);
        assert_eq!(r.witnesses.len(), 3);
        assert_eq!(r.tallies["witnesses_omitted"], Value::from(7));
    }
}
