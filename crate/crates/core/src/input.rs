//! JSON problem files read by the command line.
//!
//! ```json
//! {
//!   "p": 2.0,
//!   "sequence": { "carrier": {...}, "breaks": [...], "pieces": [...] },
//!   "limit": { "domain": {...}, "pieces": [...] },
//!   "function": { "domain": {...}, "pieces": [...] },
//!   "witness": { "removed": [ { "lo": 2.0, "hi": {"shift": 2.0, "a": 1.0, "b": -1.0},
//!                               "lo_closed": true, "hi_closed": true } ] }
//! }
//! ```
//!
//! Every field is optional; commands complain about the ones they need.
//! A witness template describes `B_n` as the carrier minus the listed
//! intervals, whose endpoints are slots in `n`.

use std::path::Path;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::convergence::WitnessSequence;
use crate::error::{Error, Result};
use crate::func::{FunctionSequence, FunctionTemplate, PiecewiseFunction, Slot};
use crate::measure::{Domain, Interval, IntervalSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct IntervalTemplate {
    pub lo: Slot,
    pub hi: Slot,
    #[serde(default = "yes")]
    pub lo_closed: bool,
    #[serde(default = "yes")]
    pub hi_closed: bool,
}

fn yes() -> bool {
    true
}

/// `B_n = X \ (removed_1(n) ∪ removed_2(n) ∪ ...)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct WitnessTemplate {
    #[serde(default)]
    pub removed: Vec<IntervalTemplate>,
}

impl WitnessTemplate {
    pub fn set(&self, domain: &Domain, n: u64, p: f64) -> Result<IntervalSet> {
        let mut cut = Vec::new();
        for t in &self.removed {
            let (lo, hi) = (t.lo.value(n, p), t.hi.value(n, p));
            if lo.is_nan() || hi.is_nan() {
                return Err(Error::InvalidTemplate { n, reason: "witness interval endpoint is NaN".into() });
            }
            // an empty interval removes nothing
            if let Ok(iv) = Interval::new(lo, hi, t.lo_closed, t.hi_closed) {
                cut.push(iv);
            }
        }
        let whole = domain.as_set();
        Ok(whole.difference(&IntervalSet::from_intervals(cut)))
    }

    pub fn instantiate(&self, domain: Domain, horizon: u64, p: f64) -> Result<WitnessSequence> {
        WitnessSequence::from_fn(domain, horizon, |n| self.set(&domain, n, p))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub p: Option<f64>,
    #[serde(default)]
    pub sequence: Option<FunctionTemplate>,
    #[serde(default)]
    pub limit: Option<PiecewiseFunction>,
    #[serde(default)]
    pub function: Option<PiecewiseFunction>,
    #[serde(default)]
    pub witness: Option<WitnessTemplate>,
}

/// Reading or validating a problem file failed.
#[derive(Debug)]
pub struct InputError {
    pub path: String,
    pub message: String,
}

impl std::fmt::Display for InputError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl std::error::Error for InputError {}

impl ProblemFile {
    pub fn parse(text: &str) -> std::result::Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn load(path: &Path) -> std::result::Result<Self, InputError> {
        let shown = path.display().to_string();
        let text = std::fs::read_to_string(path)
            .map_err(|e| InputError { path: shown.clone(), message: e.to_string() })?;
        // serde_json reports the line and column of the offending field
        Self::parse(&text).map_err(|e| InputError { path: shown, message: e.to_string() })
    }

    pub fn sequence(&self, p: f64) -> Option<FunctionSequence> {
        self.sequence.clone().map(|t| FunctionSequence::new(t, p))
    }
}
