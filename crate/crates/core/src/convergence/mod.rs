//! Finite-horizon checks for convergence in measure, asymptotic
//! L_p-convergence and the two Cauchy variants.
//!
//! Every check returns a report holding the per-index evidence and the
//! [`RuleOutcome`] that turned it into a verdict. Per-index work runs in
//! parallel; reports are always assembled in index order.

mod rule;
mod witness;

use std::fmt::Write as _;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

pub use rule::{
    DecisionRule, RuleOutcome, Sample, Verdict, DEFAULT_FAIL_THRESHOLD, DEFAULT_MAJORANT_FACTOR,
    DEFAULT_PASS_THRESHOLD,
};
pub use witness::{synthesize_witness, Truncation, WitnessSequence};

use crate::error::{Error, Result};
use crate::func::{
    split_divergence_test, superlevel_set, FunctionSequence, IntegralValue, PiecewiseFunction, DEFAULT_PIECE_CAP,
};
use crate::measure::ext_real;
use crate::par::par_map;

pub const MIN_HORIZON: u64 = 8;
pub const DEFAULT_PAIR_WINDOW: u64 = 16;
pub const DEFAULT_DELTA_GRID: [f64; 4] = [1.0, 0.1, 0.01, 0.001];

/// Knobs shared by all checks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CheckConfig {
    pub rule: DecisionRule,
    /// Width of the band `m - n in [1, window]` sampled by Cauchy checks.
    pub pair_window: u64,
    pub piece_cap: usize,
}

impl Default for CheckConfig {
    fn default() -> Self {
        Self { rule: DecisionRule::default(), pair_window: DEFAULT_PAIR_WINDOW, piece_cap: DEFAULT_PIECE_CAP }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct InMeasureReport {
    pub delta: f64,
    pub horizon: u64,
    pub indices: Vec<u64>,
    /// `mu(E_n(delta))` for each index; for Cauchy reports the band maximum
    /// `max_m mu(E_{n,m}(delta))`.
    #[serde(with = "ext_real::vec")]
    #[schemars(with = "Vec<ext_real::ExtReal>")]
    pub measures: Vec<f64>,
    pub verdict: Verdict,
    pub decision_rule: RuleOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct AlphaPReport {
    pub p: f64,
    pub horizon: u64,
    pub indices: Vec<u64>,
    /// `mu(B_n^c)` for each index.
    #[serde(with = "ext_real::vec")]
    #[schemars(with = "Vec<ext_real::ExtReal>")]
    pub complement_measures: Vec<f64>,
    /// `int_{B_n} |f_n - f|^p`, or the band maximum for Cauchy reports.
    pub integrals: Vec<IntegralValue>,
    pub witness: WitnessSequence,
    pub complement_rule: RuleOutcome,
    pub integral_rule: RuleOutcome,
    pub verdict: Verdict,
}

fn check_horizon(horizon: u64) -> Result<()> {
    if horizon < MIN_HORIZON {
        return Err(Error::Precondition(format!("horizon must be at least {MIN_HORIZON}, got {horizon}")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    Ok(())
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Precondition(format!("p must be a finite number >= 1, got {p}")));
    }
    Ok(())
}

fn check_witness(witness: &WitnessSequence, seq: &FunctionSequence, horizon: u64) -> Result<()> {
    if witness.len() < horizon {
        return Err(Error::Precondition(format!(
            "witness covers {} indices, the horizon is {horizon}",
            witness.len()
        )));
    }
    if witness.domain != seq.domain() {
        return Err(Error::DomainMismatch);
    }
    for (k, b) in witness.sets.iter().enumerate().take(horizon as usize) {
        if !b.is_within(&witness.domain) {
            return Err(Error::NotContained {
                set: format!("B_{} = {b}", k + 1),
                domain: witness.domain.carrier().to_string(),
            });
        }
    }
    Ok(())
}

fn integral_sample(v: &IntegralValue) -> Sample {
    match v {
        IntegralValue::Finite { value, .. } => Sample::Value(*value),
        IntegralValue::Divergent { .. } => Sample::Divergent,
        IntegralValue::Unknown { .. } => Sample::Unknown,
    }
}

fn value_samples(indices: &[u64], values: &[f64]) -> Vec<(u64, Sample)> {
    indices.iter().zip(values).map(|(&n, &v)| (n, Sample::Value(v))).collect()
}

/// `mu({|f_n - f| >= delta})` for `n = 1..=horizon`.
pub fn check_in_measure(
    seq: &FunctionSequence,
    f: &PiecewiseFunction,
    delta: f64,
    horizon: u64,
    cfg: &CheckConfig,
) -> Result<InMeasureReport> {
    check_delta(delta)?;
    check_horizon(horizon)?;
    let indices: Vec<u64> = (1..=horizon).collect();
    let measures = par_map(&indices, |&n| -> Result<f64> {
        let g = seq.instantiate(n)?.subtract_with_cap(f, cfg.piece_cap)?;
        Ok(superlevel_set(&g, delta)?.measure())
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let decision_rule = cfg.rule.apply(&value_samples(&indices, &measures));
    Ok(InMeasureReport { delta, horizon, indices, verdict: decision_rule.verdict, measures, decision_rule })
}

/// Both tendencies of asymptotic L_p-convergence along `witness`.
pub fn check_alpha_p(
    seq: &FunctionSequence,
    f: &PiecewiseFunction,
    p: f64,
    witness: &WitnessSequence,
    horizon: u64,
    cfg: &CheckConfig,
) -> Result<AlphaPReport> {
    check_p(p)?;
    check_horizon(horizon)?;
    check_witness(witness, seq, horizon)?;
    let domain = seq.domain();
    let indices: Vec<u64> = (1..=horizon).collect();
    let integrals = par_map(&indices, |&n| -> Result<IntegralValue> {
        let g = seq.instantiate(n)?.subtract_with_cap(f, cfg.piece_cap)?;
        split_divergence_test(&g, p, &witness.sets[(n - 1) as usize], &domain)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let complement_measures = witness.complement_measures[..horizon as usize].to_vec();
    Ok(assemble_alpha(p, horizon, indices, complement_measures, integrals, witness, cfg))
}

fn assemble_alpha(
    p: f64,
    horizon: u64,
    indices: Vec<u64>,
    complement_measures: Vec<f64>,
    integrals: Vec<IntegralValue>,
    witness: &WitnessSequence,
    cfg: &CheckConfig,
) -> AlphaPReport {
    let complement_rule = cfg.rule.apply(&value_samples(&indices, &complement_measures));
    let samples: Vec<(u64, Sample)> = indices.iter().zip(&integrals).map(|(&n, v)| (n, integral_sample(v))).collect();
    let integral_rule = cfg.rule.apply(&samples);
    AlphaPReport {
        p,
        horizon,
        verdict: complement_rule.verdict.and(integral_rule.verdict),
        indices,
        complement_measures,
        integrals,
        witness: witness.clone(),
        complement_rule,
        integral_rule,
    }
}

/// Indices `n` at which a band of pairs is examined, thinned evenly so at
/// most `pair_budget` pairs are evaluated. Only indices whose whole band
/// fits below the horizon are used (a clipped band would understate the
/// maximum); the last such index is always kept.
fn band_indices(horizon: u64, window: u64, pair_budget: u64) -> Result<Vec<u64>> {
    if window == 0 {
        return Err(Error::Precondition("pair window must be at least 1".into()));
    }
    if pair_budget < window {
        return Err(Error::Precondition(format!("pair budget {pair_budget} is below one band of {window} pairs")));
    }
    let last = horizon.saturating_sub(window).max(1);
    let stride = (last * window).div_ceil(pair_budget).max(1);
    let mut out: Vec<u64> = (0..).map_while(|i: u64| last.checked_sub(i * stride)).take_while(|&n| n >= 1).collect();
    out.reverse();
    Ok(out)
}

fn band(n: u64, horizon: u64, window: u64) -> impl Iterator<Item = u64> {
    (n + 1)..=(n + window).min(horizon)
}

/// Band maxima of `mu({|f_n - f_m| >= delta})` over `m - n in [1, window]`.
pub fn check_cauchy_in_measure(
    seq: &FunctionSequence,
    delta: f64,
    horizon: u64,
    pair_budget: u64,
    cfg: &CheckConfig,
) -> Result<InMeasureReport> {
    check_delta(delta)?;
    check_horizon(horizon)?;
    let indices = band_indices(horizon, cfg.pair_window, pair_budget)?;
    let measures = par_map(&indices, |&n| -> Result<f64> {
        let fn_ = seq.instantiate(n)?;
        let mut worst: f64 = 0.0;
        for m in band(n, horizon, cfg.pair_window) {
            let g = fn_.subtract_with_cap(&seq.instantiate(m)?, cfg.piece_cap)?;
            worst = worst.max(superlevel_set(&g, delta)?.measure());
        }
        Ok(worst)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let decision_rule = cfg.rule.apply(&value_samples(&indices, &measures));
    Ok(InMeasureReport { delta, horizon, indices, verdict: decision_rule.verdict, measures, decision_rule })
}

/// Band maxima of `int_{B_n ∩ B_m} |f_n - f_m|^p` together with `mu(B_n^c)`.
pub fn check_alpha_p_cauchy(
    seq: &FunctionSequence,
    p: f64,
    witness: &WitnessSequence,
    horizon: u64,
    pair_budget: u64,
    cfg: &CheckConfig,
) -> Result<AlphaPReport> {
    check_p(p)?;
    check_horizon(horizon)?;
    check_witness(witness, seq, horizon)?;
    let domain = seq.domain();
    let indices = band_indices(horizon, cfg.pair_window, pair_budget)?;
    let integrals = par_map(&indices, |&n| -> Result<IntegralValue> {
        let fn_ = seq.instantiate(n)?;
        let bn = &witness.sets[(n - 1) as usize];
        let mut worst = IntegralValue::zero();
        for m in band(n, horizon, cfg.pair_window) {
            let g = fn_.subtract_with_cap(&seq.instantiate(m)?, cfg.piece_cap)?;
            let b = bn.intersect(&witness.sets[(m - 1) as usize]);
            worst = worst.max(split_divergence_test(&g, p, &b, &domain)?);
            if worst.is_divergent() {
                break;
            }
        }
        Ok(worst)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let complement_measures = indices.iter().map(|&n| witness.complement_measures[(n - 1) as usize]).collect();
    Ok(assemble_alpha(p, horizon, indices, complement_measures, integrals, witness, cfg))
}

fn csv_real(v: f64) -> String {
    if v == f64::INFINITY {
        "inf".into()
    } else {
        format!("{v:e}")
    }
}

fn contribution(rule: &RuleOutcome, n: u64, v: Sample) -> &'static str {
    match v {
        Sample::Divergent => "divergent",
        Sample::Unknown => "unknown",
        Sample::Value(_) if n < rule.window_start => "warmup",
        Sample::Value(x) if x > rule.rule.fail_threshold => "above-fail",
        Sample::Value(x) if x > rule.rule.pass_threshold => "between",
        Sample::Value(_) => "below-pass",
    }
}

impl InMeasureReport {
    pub const CSV_HEADER: &'static str = "n,value,err,verdict_contribution,delta";

    /// Rows under [`Self::CSV_HEADER`].
    pub fn csv_rows(&self) -> String {
        let mut s = String::new();
        for (&n, &v) in self.indices.iter().zip(&self.measures) {
            let c = contribution(&self.decision_rule, n, Sample::Value(v));
            let _ = writeln!(s, "{n},{},0,{c},{}", csv_real(v), self.delta);
        }
        s
    }

    pub fn to_csv(&self) -> String {
        format!("{}\n{}", Self::CSV_HEADER, self.csv_rows())
    }
}

impl AlphaPReport {
    /// Columns `n,value,err,verdict_contribution,complement_measure`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,value,err,verdict_contribution,complement_measure\n");
        for ((&n, v), &c) in self.indices.iter().zip(&self.integrals).zip(&self.complement_measures) {
            let (value, err) = match v {
                IntegralValue::Finite { value, err } => (csv_real(*value), csv_real(*err)),
                IntegralValue::Divergent { .. } => ("inf".into(), String::new()),
                IntegralValue::Unknown { .. } => ("nan".into(), String::new()),
            };
            let tag = contribution(&self.integral_rule, n, integral_sample(v));
            let _ = writeln!(s, "{n},{value},{err},{tag},{}", csv_real(c));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{BreakTemplate, FunctionTemplate, PieceTemplate, Slot, SlotTerms, TermTemplate};
    use crate::measure::{Domain, Interval, IntervalSet};

    fn unit() -> Domain {
        Domain::new(Interval::closed(0.0, 1.0).unwrap())
    }

    /// n^{1/p} on [0, 1/n], 0 after.
    fn spikes(p: f64) -> FunctionSequence {
        FunctionSequence::new(
            FunctionTemplate {
                carrier: *unit().carrier(),
                breaks: vec![BreakTemplate { at: Slot::power(1.0, -1.0), closed_left: true }],
                pieces: vec![
                    PieceTemplate::new(vec![TermTemplate::new(Slot::power_over_p(1.0, 1.0), Slot::Const(0.0))]),
                    PieceTemplate::zero(),
                ],
            },
            p,
        )
    }

    fn constant_seq(c: f64, alternate: bool) -> FunctionSequence {
        let coeff = if alternate {
            Slot::law(SlotTerms { a: c, alternate: true, ..Default::default() })
        } else {
            Slot::Const(c)
        };
        FunctionSequence::new(
            FunctionTemplate {
                carrier: *unit().carrier(),
                breaks: vec![],
                pieces: vec![PieceTemplate::new(vec![TermTemplate::new(coeff, Slot::Const(0.0))])],
            },
            1.0,
        )
    }

    #[test]
    fn spikes_converge_in_measure() {
        let zero = PiecewiseFunction::zero(unit());
        let r = check_in_measure(&spikes(2.0), &zero, 0.5, 100, &CheckConfig::default()).unwrap();
        for (n, m) in r.indices.iter().zip(&r.measures) {
            assert!((m - 1.0 / *n as f64).abs() < 1e-15);
        }
        assert_eq!(r.verdict, Verdict::ConvergesAtHorizon);
    }

    #[test]
    fn constant_sequences() {
        let one = PiecewiseFunction::constant(unit(), 1.0).unwrap();
        let same = check_in_measure(&constant_seq(1.0, false), &one, 0.1, 20, &CheckConfig::default()).unwrap();
        assert!(same.measures.iter().all(|&m| m == 0.0));
        assert_eq!(same.verdict, Verdict::ConvergesAtHorizon);
        let zero = PiecewiseFunction::zero(unit());
        let off = check_in_measure(&constant_seq(1.0, false), &zero, 0.5, 20, &CheckConfig::default()).unwrap();
        assert_eq!(off.verdict, Verdict::FailsAtHorizon);
    }

    #[test]
    fn horizon_and_delta_preconditions() {
        let zero = PiecewiseFunction::zero(unit());
        let cfg = CheckConfig::default();
        assert!(check_in_measure(&spikes(2.0), &zero, 0.5, 7, &cfg).is_err());
        assert!(check_in_measure(&spikes(2.0), &zero, 0.0, 50, &cfg).is_err());
    }

    #[test]
    fn disjoint_support_witness() {
        let zero = PiecewiseFunction::zero(unit());
        let w = WitnessSequence::from_fn(unit(), 100, |n| match n {
            1 => Ok(IntervalSet::empty()),
            _ => Ok(IntervalSet::from_interval(Interval::open_closed(1.0 / n as f64, 1.0)?)),
        })
        .unwrap();
        let r = check_alpha_p(&spikes(2.0), &zero, 2.0, &w, 100, &CheckConfig::default()).unwrap();
        assert!(r.integrals.iter().all(|v| v.value() == Some(0.0)));
        assert!((r.complement_measures[9] - 0.1).abs() < 1e-15);
        assert_eq!(r.verdict, Verdict::ConvergesAtHorizon);
        let csv = r.to_csv();
        assert!(csv.starts_with("n,value,err,verdict_contribution,complement_measure\n1,"));
    }

    #[test]
    fn synthesized_spike_witness() {
        let zero = PiecewiseFunction::zero(unit());
        let w = synthesize_witness(&spikes(2.0), &zero, 2.0, 200).unwrap();
        let t = w.thresholds.as_ref().unwrap();
        assert_eq!(&t[..5], &[2, 3, 4, 5, 6]);
        assert!(t.windows(2).all(|p| p[1] > p[0]));
        assert_eq!(w.lambda(1), Some(1.0));
        assert_eq!(w.lambda(10), Some(1.0 / 9.0));
        assert!(w.truncation.is_some());
        for k in 2..=200u64 {
            assert!(w.set(k).unwrap().contains(1.0 / k as f64 + 1e-9));
        }
        let r = check_alpha_p(&spikes(2.0), &zero, 2.0, &w, 200, &CheckConfig::default()).unwrap();
        assert_eq!(r.verdict, Verdict::ConvergesAtHorizon);
    }

    #[test]
    fn synthesized_witness_for_constant_sequence_is_full() {
        let one = PiecewiseFunction::constant(unit(), 1.0).unwrap();
        let w = synthesize_witness(&constant_seq(1.0, false), &one, 1.0, 16).unwrap();
        assert!(w.sets.iter().all(|b| *b == unit().as_set()));
        assert_eq!(w.lambda_schedule.as_ref().unwrap().len(), 16);
    }

    #[test]
    fn cauchy_checks() {
        let cfg = CheckConfig::default();
        let r = check_cauchy_in_measure(&spikes(2.0), 0.5, 256, 10_000, &cfg).unwrap();
        for (&n, &m) in r.indices.iter().zip(&r.measures) {
            assert!(m <= 1.0 / n as f64 + 1e-15);
        }
        assert_eq!(r.verdict, Verdict::ConvergesAtHorizon);
        let osc = check_cauchy_in_measure(&constant_seq(1.0, true), 0.5, 32, 10_000, &cfg).unwrap();
        assert!(osc.measures.iter().all(|&m| m == 1.0));
        assert_eq!(osc.verdict, Verdict::FailsAtHorizon);
        let thin = check_cauchy_in_measure(&spikes(2.0), 0.5, 64, 160, &cfg).unwrap();
        assert!(thin.indices.len() <= 10);
        assert_eq!(*thin.indices.last().unwrap(), 48);
    }

    #[test]
    fn alpha_cauchy_on_full_witness() {
        let seq = constant_seq(2.0, false);
        let w = WitnessSequence::full(unit(), 20);
        let r = check_alpha_p_cauchy(&seq, 2.0, &w, 20, 1000, &CheckConfig::default()).unwrap();
        assert!(r.integrals.iter().all(|v| v.value() == Some(0.0)));
        assert_eq!(r.verdict, Verdict::ConvergesAtHorizon);
    }

    #[test]
    fn report_json_round_trip() {
        let zero = PiecewiseFunction::zero(unit());
        let r = check_in_measure(&spikes(1.0), &zero, 0.5, 10, &CheckConfig::default()).unwrap();
        let back: InMeasureReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
        assert_eq!(back, r);
    }
}
