//! Assertion records shared by the verification suites.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub type Location = BTreeMap<String, Value>;

/// One checked assertion with the coordinates it was evaluated at.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub suite: String,
    pub check: String,
    pub location: Location,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Record {
    pub fn new(suite: &str, check: &str, location: Location, passed: bool, detail: impl Into<String>) -> Self {
        Record { suite: suite.into(), check: check.into(), location, passed, detail: detail.into() }
    }

    /// Record comparing two values; the detail names both when they differ.
    pub fn compare<T: PartialEq + std::fmt::Debug>(suite: &str, check: &str, location: Location, got: T, want: T) -> Self {
        let passed = got == want;
        let detail = if passed { String::new() } else { format!("got {got:?}, expected {want:?}") };
        Record::new(suite, check, location, passed, detail)
    }
}

/// Builds a [`Location`] from `key => value` pairs.
#[macro_export]
macro_rules! loc {
    ($($k:literal => $v:expr),* $(,)?) => {{
        #[allow(unused_mut)]
        let mut m = $crate::report::Location::new();
        $( m.insert($k.to_string(), ::serde_json::json!($v)); )*
        m
    }};
}
