//! Finite-horizon verdicts for a tendency `a_n -> 0`.
//!
//! A limit cannot be read off finitely many terms, so the rule looks at the
//! top half of the horizon only:
//!
//! * converges when the last term is at most `pass_threshold` and a power law
//!   fitted to `log a_n` against `log n` has negative slope and majorises the
//!   data up to `majorant_factor`;
//! * fails when every term of the top half exceeds `fail_threshold`, or when
//!   any term is a certified divergent integral;
//! * is inconclusive otherwise.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::measure::ext_real;

pub const DEFAULT_PASS_THRESHOLD: f64 = 1e-2;
pub const DEFAULT_FAIL_THRESHOLD: f64 = 1e-2;
pub const DEFAULT_MAJORANT_FACTOR: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub enum Verdict {
    ConvergesAtHorizon,
    FailsAtHorizon,
    Inconclusive,
}

impl Verdict {
    /// Verdict of a conjunction of two tendencies.
    pub fn and(self, other: Verdict) -> Verdict {
        use Verdict::*;
        match (self, other) {
            (FailsAtHorizon, _) | (_, FailsAtHorizon) => FailsAtHorizon,
            (ConvergesAtHorizon, ConvergesAtHorizon) => ConvergesAtHorizon,
            _ => Inconclusive,
        }
    }

    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::ConvergesAtHorizon => 0,
            Verdict::FailsAtHorizon => 1,
            Verdict::Inconclusive => 2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::ConvergesAtHorizon => "ConvergesAtHorizon",
            Verdict::FailsAtHorizon => "FailsAtHorizon",
            Verdict::Inconclusive => "Inconclusive",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct DecisionRule {
    pub pass_threshold: f64,
    pub fail_threshold: f64,
    pub majorant_factor: f64,
}

impl Default for DecisionRule {
    fn default() -> Self {
        Self {
            pass_threshold: DEFAULT_PASS_THRESHOLD,
            fail_threshold: DEFAULT_FAIL_THRESHOLD,
            majorant_factor: DEFAULT_MAJORANT_FACTOR,
        }
    }
}

/// One term of a tendency.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Sample {
    Value(f64),
    Divergent,
    Unknown,
}

/// The rule's parameters together with everything it looked at.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct RuleOutcome {
    pub rule: DecisionRule,
    pub verdict: Verdict,
    pub last_index: u64,
    #[serde(with = "ext_real::opt")]
    #[schemars(with = "Option<ext_real::ExtReal>")]
    pub last_value: Option<f64>,
    /// First index of the top half.
    pub window_start: u64,
    #[serde(with = "ext_real::opt")]
    #[schemars(with = "Option<ext_real::ExtReal>")]
    pub window_min: Option<f64>,
    pub fit_slope: Option<f64>,
    pub fit_intercept: Option<f64>,
    pub majorant_holds: bool,
    pub divergent_indices: Vec<u64>,
    pub unknown_indices: Vec<u64>,
    pub reason: String,
}

impl DecisionRule {
    pub fn new(pass_threshold: f64, fail_threshold: f64) -> Self {
        Self { pass_threshold, fail_threshold, ..Self::default() }
    }

    /// Applies the rule to `(n, a_n)` pairs sorted by `n`.
    pub fn apply(&self, samples: &[(u64, Sample)]) -> RuleOutcome {
        let mut out = RuleOutcome {
            rule: *self,
            verdict: Verdict::Inconclusive,
            last_index: 0,
            last_value: None,
            window_start: 0,
            window_min: None,
            fit_slope: None,
            fit_intercept: None,
            majorant_holds: false,
            divergent_indices: Vec::new(),
            unknown_indices: Vec::new(),
            reason: String::new(),
        };
        let Some(&(last, last_sample)) = samples.last() else {
            out.reason = "no samples".into();
            return out;
        };
        out.last_index = last;
        if let Sample::Value(v) = last_sample {
            out.last_value = Some(v);
        }
        for &(n, s) in samples {
            match s {
                Sample::Divergent => out.divergent_indices.push(n),
                Sample::Unknown => out.unknown_indices.push(n),
                Sample::Value(_) => {}
            }
        }
        let start = last.div_ceil(2).max(samples[0].0);
        out.window_start = start;
        let window: Vec<(u64, Sample)> = samples.iter().copied().filter(|&(n, _)| n >= start).collect();
        let values: Vec<(u64, f64)> = window
            .iter()
            .filter_map(|&(n, s)| match s {
                Sample::Value(v) => Some((n, v)),
                _ => None,
            })
            .collect();
        out.window_min = values.iter().map(|&(_, v)| v).reduce(f64::min);

        if !out.divergent_indices.is_empty() {
            out.verdict = Verdict::FailsAtHorizon;
            out.reason = format!("{} certified divergent term(s)", out.divergent_indices.len());
            return out;
        }
        if values.len() == window.len() && out.window_min.is_some_and(|m| m > self.fail_threshold) {
            out.verdict = Verdict::FailsAtHorizon;
            out.reason = format!(
                "every term from n = {start} on exceeds the fail threshold {:e}",
                self.fail_threshold
            );
            return out;
        }

        let positive: Vec<(f64, f64)> = values
            .iter()
            .filter(|&&(_, v)| v > 0.0 && v.is_finite())
            .map(|&(n, v)| ((n as f64).ln(), v.ln()))
            .collect();
        let all_finite = values.iter().all(|&(_, v)| v.is_finite());
        if let Some((slope, intercept)) = least_squares(&positive) {
            out.fit_slope = Some(slope);
            out.fit_intercept = Some(intercept);
            let bound = self.majorant_factor.ln();
            out.majorant_holds =
                slope < 0.0 && all_finite && positive.iter().all(|&(x, y)| y <= intercept + slope * x + bound);
        } else {
            // zero or one positive term: nothing to fit, decay is trivial
            out.majorant_holds = all_finite;
        }

        if !out.unknown_indices.iter().any(|&n| n >= start)
            && out.last_value.is_some_and(|v| v <= self.pass_threshold)
            && out.majorant_holds
        {
            out.verdict = Verdict::ConvergesAtHorizon;
            out.reason = format!(
                "last term {:e} within the pass threshold with power-law decay",
                out.last_value.unwrap_or(0.0)
            );
        } else {
            out.reason = match out.last_value {
                Some(v) if v > self.pass_threshold => {
                    format!("last term {v:e} above the pass threshold {:e}", self.pass_threshold)
                }
                None => "last term not evaluated".into(),
                _ if !out.majorant_holds => "no decaying power-law majorant over the top half".into(),
                _ => "undetermined terms in the top half".into(),
            };
        }
        out
    }
}

/// Slope and intercept of the least-squares line, if at least two distinct
/// abscissae are present.
fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let k = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / k;
    let my = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}
