//! JSON file formats: target descriptions, basis files, and plain sets.
//!
//! Target file:
//!
//! ```json
//! { "default": 1, "overrides": { "0": 0, "5": "inf" } }
//! ```
//!
//! A basis file records the construction parameters, the final elements,
//! and the full step log so that it can be replayed.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order2::StepRecord;
use crate::policy::PolicyDescriptor;
use crate::sumset::IntegerSet;
use crate::target::{Multiplicity, TargetFunction};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub default: Multiplicity,
    #[serde(default)]
    pub overrides: BTreeMap<i64, Multiplicity>,
}

impl TargetSpec {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("target file: {e}")))
    }

    pub fn validate(&self) -> Result<TargetFunction> {
        TargetFunction::new(self.default, self.overrides.clone())
    }

    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("target spec serializes");
        s.push('\n');
        s
    }
}

impl From<&TargetFunction> for TargetSpec {
    fn from(f: &TargetFunction) -> Self {
        TargetSpec { default: f.default_value(), overrides: f.overrides().clone() }
    }
}

/// Parses and validates a target file.
pub fn parse_target(text: &str) -> Result<TargetFunction> {
    TargetSpec::parse(text)?.validate()
}

/// The replayable part of a [`StepRecord`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepEntry {
    pub k: usize,
    pub i_k: usize,
    pub u: i64,
    pub a: i64,
    pub candidate_rank: usize,
}

impl From<&StepRecord> for StepEntry {
    fn from(s: &StepRecord) -> Self {
        StepEntry { k: s.k, i_k: s.i_k, u: s.u, a: s.a, candidate_rank: s.candidate_rank }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BasisFile {
    pub order: usize,
    pub restricted: bool,
    pub c: i64,
    pub delta: usize,
    pub k: usize,
    pub policy: PolicyDescriptor,
    /// Kept as written so that verification can flag unsorted input.
    pub elements: Vec<i64>,
    pub steps: Vec<StepEntry>,
}

impl BasisFile {
    pub fn parse(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Format(format!("basis file: {e}")))
    }

    /// Pretty JSON with a trailing newline; deterministic for equal inputs.
    pub fn to_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("basis file serializes");
        s.push('\n');
        s
    }
}

/// Parses a set: a JSON array of integers, or any object with an
/// `"elements"` array (so basis files are accepted too).
pub fn parse_set(text: &str) -> Result<IntegerSet> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::Format(format!("set file: {e}")))?;
    let list = match &value {
        serde_json::Value::Array(_) => value,
        serde_json::Value::Object(map) => map
            .get("elements")
            .cloned()
            .ok_or_else(|| Error::Format("set file: object has no \"elements\"".into()))?,
        _ => return Err(Error::Format("set file: expected an array or object".into())),
    };
    let elems: Vec<i64> =
        serde_json::from_value(list).map_err(|e| Error::Format(format!("set file: {e}")))?;
    Ok(IntegerSet::from(elems))
}
