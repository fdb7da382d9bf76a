//! Weak `L_p` quasinorm, convergence in weak `L_p`, almost-`L_p` membership
//! and the embedding of weak `L_p` into almost-`L_p` on finite measure.
//!
//! The quasinorm is `sup_{delta > 0} F(delta)` with
//! `F(delta) = delta^p mu({|f| >= delta})`. The supremum is located by
//! evaluating `F` at the values `|f|` takes at piece endpoints and interior
//! extrema (where `mu` jumps or kinks), by golden-section search in
//! `log delta` between consecutive such values, and by the limits
//! `delta -> 0+` and `delta -> inf`, which are read off the dominant power
//! of the unbounded and singular pieces.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::convergence::{CheckConfig, RuleOutcome, Sample, Verdict, DEFAULT_DELTA_GRID};
use crate::error::{Error, Result};
use crate::func::{
    lp_integral_on, positive_roots, superlevel_set, FunctionSequence, IntegralValue, PiecewiseFunction,
    TAIL_EXPONENT_TOL,
};
use crate::measure::{ext_real, IntervalSet};
use crate::par::par_map;

const GAP_SAMPLES: usize = 32;
const GOLDEN_ITERS: usize = 120;
/// Search range, in decades, beyond the smallest and largest critical value.
const OPEN_END_DECADES: f64 = 12.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "tag")]
pub enum Quasinorm {
    Finite { value: f64 },
    Infinite { reason: String },
}

impl Quasinorm {
    pub fn value(&self) -> Option<f64> {
        match self {
            Quasinorm::Finite { value } => Some(*value),
            Quasinorm::Infinite { .. } => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Quasinorm::Finite { .. })
    }
}

/// Where the supremum is approached when it is not attained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub enum Approach {
    DeltaToZero,
    DeltaToInfinity,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Probe {
    pub delta: f64,
    #[serde(with = "ext_real")]
    #[schemars(with = "ext_real::ExtReal")]
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WeakLpReport {
    pub p: f64,
    pub quasinorm: Quasinorm,
    /// A `delta` attaining the supremum, when one does.
    pub maximizer_delta: Option<f64>,
    pub approached: Option<Approach>,
    pub probes: Vec<Probe>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WeakConvergenceReport {
    pub p: f64,
    pub horizon: u64,
    pub indices: Vec<u64>,
    /// Quasinorm of `f_n - f` for each index.
    pub per_n: Vec<Quasinorm>,
    pub verdict: Verdict,
    pub decision_rule: RuleOutcome,
}

fn check_p(p: f64) -> Result<()> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Precondition(format!("p must be a finite number >= 1, got {p}")));
    }
    Ok(())
}

fn borderline(beta: f64) -> bool {
    (beta + 1.0).abs() <= TAIL_EXPONENT_TOL
}

/// `delta^p mu({|f| >= delta})`.
pub fn weak_profile(f: &PiecewiseFunction, p: f64, delta: f64) -> Result<f64> {
    let m = superlevel_set(f, delta)?.measure();
    Ok(if m == 0.0 { 0.0 } else { delta.powf(p) * m })
}

/// Values of `|f|` at piece endpoints and at interior critical points.
fn critical_values(f: &PiecewiseFunction) -> Vec<f64> {
    let mut out = Vec::new();
    let mut keep = |v: f64| {
        let v = v.abs();
        if v > 0.0 && v.is_finite() {
            out.push(v);
        }
    };
    for piece in f.pieces() {
        let (iv, expr) = (&piece.interval, &piece.expr);
        if expr.is_zero() {
            continue;
        }
        for x in [iv.lo(), iv.hi()] {
            if x.is_finite() {
                keep(expr.eval(x));
            }
        }
        if iv.is_degenerate() {
            continue;
        }
        if iv.hi() > 0.0 {
            for x in positive_roots(&expr.derivative_terms(), iv.lo().max(0.0), iv.hi()) {
                keep(expr.eval(x));
            }
        }
        if iv.lo() < 0.0 {
            let mirror = expr.reflect();
            for x in positive_roots(&mirror.derivative_terms(), (-iv.hi()).max(0.0), -iv.lo()) {
                keep(mirror.eval(x));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

struct Limits {
    at_zero: Option<f64>,
    at_infinity: Option<f64>,
}

/// `lim F` as `delta -> 0+` and `delta -> inf` where these are non-zero,
/// or the reason the supremum is infinite.
fn asymptotic_limits(f: &PiecewiseFunction, p: f64) -> std::result::Result<Limits, String> {
    let mut lim = Limits { at_zero: None, at_infinity: None };
    for piece in f.pieces() {
        let (iv, expr) = (&piece.interval, &piece.expr);
        if expr.is_zero() {
            continue;
        }
        if iv.hi() == f64::INFINITY {
            let lead = expr.dominant_at_infinity();
            if lead.exponent >= 0.0 {
                return Err(format!(
                    "|f| does not decay on the unbounded piece {iv} (leading power x^{}), so \
                     mu(|f| >= delta) is infinite for small delta",
                    lead.exponent
                ));
            }
            let beta = p * lead.exponent;
            if borderline(beta) {
                lim.at_zero = Some(lead.coeff.abs().powf(p));
            } else if beta > -1.0 {
                return Err(format!(
                    "F(delta) grows like delta^({}) as delta -> 0 on the tail of {iv}",
                    p + 1.0 / lead.exponent
                ));
            }
        }
        if iv.lo() == 0.0 && !iv.lo_closed() {
            let lead = expr.dominant_at_zero();
            if lead.exponent < 0.0 {
                let beta = p * lead.exponent;
                if borderline(beta) {
                    lim.at_infinity = Some(lead.coeff.abs().powf(p));
                } else if beta < -1.0 {
                    return Err(format!(
                        "F(delta) grows like delta^({}) as delta -> inf at the singularity x = 0",
                        p + 1.0 / lead.exponent
                    ));
                }
            }
        }
    }
    Ok(lim)
}

/// Maximum of `F` on `[a, b]` by sampling and golden-section refinement in
/// `log delta`. Returns `(value, delta)`.
fn search_gap(f: &PiecewiseFunction, p: f64, a: f64, b: f64) -> Result<(f64, f64)> {
    let (ua, ub) = (a.ln(), b.ln());
    let eval = |u: f64| -> Result<f64> { weak_profile(f, p, u.exp()) };
    let step = (ub - ua) / (GAP_SAMPLES + 1) as f64;
    let mut best = (f64::NEG_INFINITY, ua);
    for i in 1..=GAP_SAMPLES {
        let u = ua + step * i as f64;
        let v = eval(u)?;
        if v > best.0 {
            best = (v, u);
        }
    }
    let (mut lo, mut hi) = (best.1 - step, best.1 + step);
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let (mut f1, mut f2) = (eval(x1)?, eval(x2)?);
    for _ in 0..GOLDEN_ITERS {
        if hi - lo <= 1e-15 * hi.abs().max(1.0) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = eval(x2)?;
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = eval(x1)?;
        }
    }
    for (v, u) in [(f1, x1), (f2, x2)] {
        if v > best.0 {
            best = (v, u);
        }
    }
    Ok((best.0, best.1.exp()))
}

fn probe_grid() -> impl Iterator<Item = f64> {
    (-10..=10).map(|k| 2f64.powi(k))
}

/// `sup_{delta > 0} delta^p mu({|f| >= delta})`.
pub fn weak_lp_quasinorm(f: &PiecewiseFunction, p: f64) -> Result<WeakLpReport> {
    check_p(p)?;
    let mut probes: Vec<Probe> = Vec::new();
    let probe = |delta: f64, probes: &mut Vec<Probe>| -> Result<f64> {
        let value = weak_profile(f, p, delta)?;
        probes.push(Probe { delta, value });
        Ok(value)
    };
    if f.is_zero() {
        return Ok(WeakLpReport {
            p,
            quasinorm: Quasinorm::Finite { value: 0.0 },
            maximizer_delta: None,
            approached: None,
            probes,
        });
    }
    let limits = match asymptotic_limits(f, p) {
        Ok(l) => l,
        Err(reason) => {
            for d in probe_grid() {
                probe(d, &mut probes)?;
            }
            return Ok(WeakLpReport {
                p,
                quasinorm: Quasinorm::Infinite { reason },
                maximizer_delta: None,
                approached: None,
                probes,
            });
        }
    };

    let crit = critical_values(f);
    let mut best = (0.0f64, None::<f64>);
    let consider = |v: f64, d: f64, best: &mut (f64, Option<f64>)| {
        if v > best.0 {
            *best = (v, Some(d));
        }
    };
    for &c in &crit {
        let v = probe(c, &mut probes)?;
        consider(v, c, &mut best);
    }
    let anchor_lo = crit.first().copied().unwrap_or(1.0);
    let anchor_hi = crit.last().copied().unwrap_or(1.0);
    let mut gaps: Vec<(f64, f64)> = crit.windows(2).map(|w| (w[0], w[1])).collect();
    gaps.push((anchor_lo * 10f64.powf(-OPEN_END_DECADES), anchor_lo));
    gaps.push((anchor_hi, anchor_hi * 10f64.powf(OPEN_END_DECADES)));
    for (a, b) in gaps {
        let (v, d) = search_gap(f, p, a, b)?;
        probes.push(Probe { delta: d, value: v });
        consider(v, d, &mut best);
    }

    let mut approached = None;
    let mut value = best.0;
    let mut maximizer = best.1;
    for (lim, side) in [(limits.at_zero, Approach::DeltaToZero), (limits.at_infinity, Approach::DeltaToInfinity)] {
        if let Some(l) = lim {
            // the gap search approaches the same limit from below; ties go
            // to the exact limit value
            if l >= value * (1.0 - 1e-12) {
                value = l;
                maximizer = None;
                approached = Some(side);
            }
        }
    }
    if value == 0.0 {
        maximizer = None;
    }
    probes.sort_by(|a, b| a.delta.total_cmp(&b.delta));
    Ok(WeakLpReport { p, quasinorm: Quasinorm::Finite { value }, maximizer_delta: maximizer, approached, probes })
}

/// Quasinorm of `f_n - f` for `n = 1..=horizon`, with the horizon decision
/// rule applied to it. An infinite quasinorm fails the check.
pub fn check_weak_lp_convergence(
    seq: &FunctionSequence,
    f: &PiecewiseFunction,
    p: f64,
    horizon: u64,
    cfg: &CheckConfig,
) -> Result<WeakConvergenceReport> {
    check_p(p)?;
    if horizon < crate::convergence::MIN_HORIZON {
        return Err(Error::Precondition(format!("horizon must be at least 8, got {horizon}")));
    }
    let indices: Vec<u64> = (1..=horizon).collect();
    let per_n = par_map(&indices, |&n| -> Result<Quasinorm> {
        let g = seq.instantiate(n)?.subtract_with_cap(f, cfg.piece_cap)?;
        Ok(weak_lp_quasinorm(&g, p)?.quasinorm)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    let samples: Vec<(u64, Sample)> = indices
        .iter()
        .zip(&per_n)
        .map(|(&n, q)| (n, q.value().map_or(Sample::Divergent, Sample::Value)))
        .collect();
    let decision_rule = cfg.rule.apply(&samples);
    Ok(WeakConvergenceReport { p, horizon, indices, per_n, verdict: decision_rule.verdict, decision_rule })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ApEntry {
    pub delta: f64,
    /// `K` with `E_delta = {|f| >= K}`; absent when `E_delta` is empty.
    pub threshold: Option<f64>,
    pub set: IntervalSet,
    pub set_measure: f64,
    /// `int_{E_delta^c} |f|^p`.
    pub integral: IntegralValue,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, JsonSchema)]
pub enum ApStatus {
    Member,
    NotMember,
    Unknown,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct ApCertificate {
    pub p: f64,
    pub status: ApStatus,
    /// `Some(true)` for members, `Some(false)` with an obstruction for
    /// non-members, `None` when the grid could not be certified.
    pub member: Option<bool>,
    pub witness_map: Vec<ApEntry>,
    pub obstruction: Option<String>,
    pub diagnostic: Option<String>,
}

/// Whether `|f|` is unbounded near `x = 0`.
fn singular_at_zero(f: &PiecewiseFunction) -> bool {
    f.pieces().iter().any(|piece| {
        piece.interval.lo() == 0.0
            && !piece.interval.lo_closed()
            && !piece.expr.is_zero()
            && piece.expr.dominant_at_zero().exponent < 0.0
    })
}

/// A tail no finite-measure set can remove.
fn tail_obstruction(f: &PiecewiseFunction, p: f64) -> Option<String> {
    let last = f.pieces().last()?;
    if last.interval.hi() != f64::INFINITY || last.expr.is_zero() {
        return None;
    }
    let beta = p * last.expr.dominant_at_infinity().exponent;
    if beta > -1.0 - TAIL_EXPONENT_TOL {
        let shown = if borderline(beta) { -1.0 } else { beta };
        Some(format!(
            "divergent tail, exponent {shown}: |f|^p decays like x^({shown}) on {}, so its integral over \
             the complement of any set of finite measure is infinite",
            last.interval
        ))
    } else {
        None
    }
}

/// Largest superlevel set `{|f| >= K}` with measure below `delta`, by
/// bisection on `K` in log scale.
fn removal_threshold(f: &PiecewiseFunction, delta: f64) -> std::result::Result<f64, String> {
    let mass = |k: f64| superlevel_set(f, k).map(|s| s.measure()).map_err(|e| e.to_string());
    let mut hi = 1.0f64;
    while mass(hi)? >= delta {
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(format!("no finite K leaves measure below {delta}"));
        }
    }
    let mut lo = hi;
    loop {
        lo *= 0.5;
        if lo < f64::MIN_POSITIVE {
            return Ok(hi);
        }
        if mass(lo)? >= delta {
            break;
        }
        hi = lo;
    }
    for _ in 0..200 {
        let mid = (lo * hi).sqrt();
        if !(mid > lo && mid < hi) || hi / lo - 1.0 < 1e-15 {
            break;
        }
        if mass(mid)? < delta {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Certificate for `f` in the almost-`L_p` space on the probed grid.
pub fn check_ap_membership(f: &PiecewiseFunction, p: f64, delta_grid: &[f64]) -> Result<ApCertificate> {
    check_p(p)?;
    let grid: Vec<f64> = if delta_grid.is_empty() { DEFAULT_DELTA_GRID.to_vec() } else { delta_grid.to_vec() };
    if grid.iter().any(|&d| !(d > 0.0) || !d.is_finite()) || grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Precondition("the delta grid must be positive and strictly decreasing".into()));
    }
    let obstruction = tail_obstruction(f, p);
    let singular = singular_at_zero(f);
    let domain = f.domain();
    let mut entries = Vec::with_capacity(grid.len());
    let mut diagnostic = None;
    for &delta in &grid {
        let (threshold, set) = if singular {
            match removal_threshold(f, delta) {
                Ok(k) => (Some(k), superlevel_set(f, k)?),
                Err(msg) => {
                    diagnostic.get_or_insert(format!("delta = {delta}: {msg}"));
                    continue;
                }
            }
        } else {
            (None, IntervalSet::empty())
        };
        let integral = lp_integral_on(f, p, &set.complement(domain)?)?;
        entries.push(ApEntry { delta, threshold, set_measure: set.measure(), set, integral });
    }
    let all_ok = entries.len() == grid.len() && entries.iter().all(|e| e.integral.is_finite() && e.set_measure < e.delta);
    let (status, member) = if obstruction.is_some() {
        (ApStatus::NotMember, Some(false))
    } else if all_ok {
        (ApStatus::Member, Some(true))
    } else {
        if diagnostic.is_none() {
            diagnostic = entries
                .iter()
                .find(|e| !e.integral.is_finite())
                .map(|e| format!("delta = {}: complement integral {:?}", e.delta, e.integral));
        }
        (ApStatus::Unknown, None)
    };
    Ok(ApCertificate { p, status, member, witness_map: entries, obstruction, diagnostic })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Embedding {
    pub p: f64,
    pub delta: f64,
    /// The weak quasinorm `C` of `f`.
    pub quasinorm: f64,
    /// Least positive integer with `C / K^p < delta`.
    pub k: u64,
    /// `E_delta = {|f| >= K}`.
    pub set: IntervalSet,
    pub set_measure: f64,
    /// `K^p mu(X)`, an upper bound for the complement integral.
    pub bound: f64,
    pub integral: IntegralValue,
}

/// Least positive integer `K` with `c / K^p < delta`.
pub fn least_integer_threshold(c: f64, p: f64, delta: f64) -> Result<u64> {
    let below = |k: u64| c / (k as f64).powf(p) < delta;
    let guess = (c / delta).powf(1.0 / p);
    if !(guess < 1e18) {
        return Err(Error::Precondition(format!("C / delta = {} is too large for an integer K", c / delta)));
    }
    let mut k = (guess.floor() as u64).max(1);
    while k > 1 && below(k - 1) {
        k -= 1;
    }
    while !below(k) {
        k += 1;
    }
    Ok(k)
}

/// The set and bound from the proof that weak `L_p` lies in almost-`L_p`
/// when `mu(X)` is finite.
pub fn weak_to_ap_embedding(f: &PiecewiseFunction, p: f64, delta: f64) -> Result<Embedding> {
    check_p(p)?;
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    let domain = f.domain();
    if !domain.is_finite() {
        return Err(Error::Precondition("the embedding needs a domain of finite measure".into()));
    }
    let c = match weak_lp_quasinorm(f, p)?.quasinorm {
        Quasinorm::Finite { value } => value,
        Quasinorm::Infinite { reason } => {
            return Err(Error::Precondition(format!("f is not in weak L_p: {reason}")));
        }
    };
    let k = least_integer_threshold(c, p, delta)?;
    let kf = k as f64;
    let set = superlevel_set(f, kf)?;
    let set_measure = set.measure();
    let bound = kf.powf(p) * domain.total_measure();
    let integral = lp_integral_on(f, p, &set.complement(domain)?)?;
    if !(set_measure < delta) {
        return Err(Error::Invariant(format!("mu(|f| >= {k}) = {set_measure} is not below delta = {delta}")));
    }
    match integral {
        IntegralValue::Finite { value, err } if value <= bound + err => {}
        _ => {
            return Err(Error::Invariant(format!(
                "complement integral {integral:?} exceeds K^p mu(X) = {bound}"
            )))
        }
    }
    Ok(Embedding { p, delta, quasinorm: c, k, set, set_measure, bound, integral })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{Expr, Piece, PowerTerm};
    use crate::measure::{Domain, Interval};

    fn unit() -> Domain {
        Domain::new(Interval::closed(0.0, 1.0).unwrap())
    }

    fn spike(n: f64, p: f64) -> PiecewiseFunction {
        if n == 1.0 {
            return PiecewiseFunction::constant(unit(), 1.0).unwrap();
        }
        PiecewiseFunction::new(
            unit(),
            vec![
                Piece { interval: Interval::closed(0.0, 1.0 / n).unwrap(), expr: Expr::constant(n.powf(1.0 / p)).unwrap() },
                Piece { interval: Interval::open_closed(1.0 / n, 1.0).unwrap(), expr: Expr::zero() },
            ],
        )
        .unwrap()
    }

    #[test]
    fn spike_quasinorm_is_one() {
        let r = weak_lp_quasinorm(&spike(16.0, 2.0), 2.0).unwrap();
        assert!((r.quasinorm.value().unwrap() - 1.0).abs() < 1e-12);
        assert!((r.maximizer_delta.unwrap() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_function() {
        let r = weak_lp_quasinorm(&PiecewiseFunction::zero(unit()), 3.0).unwrap();
        assert_eq!(r.quasinorm, Quasinorm::Finite { value: 0.0 });
    }

    #[test]
    fn tail_limit() {
        // 0.5 x^{-1/2} on [1, inf), p = 2: F(delta) = 0.25 - delta^2, sup 0.25 as delta -> 0
        let d = Domain::new(Interval::at_least(1.0).unwrap());
        let f = PiecewiseFunction::from_expr(d, Expr::monomial(0.5, -0.5).unwrap()).unwrap();
        let r = weak_lp_quasinorm(&f, 2.0).unwrap();
        assert!((r.quasinorm.value().unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(r.approached, Some(Approach::DeltaToZero));
        assert!(r.maximizer_delta.is_none());
    }

    #[test]
    fn singular_interior_maximum() {
        // x^{-1/2} on (0,1), p = 1: F = delta min(1, delta^{-2}), max 1 at delta = 1
        let d = Domain::new(Interval::open_closed(0.0, 1.0).unwrap());
        let f = PiecewiseFunction::from_expr(d, Expr::monomial(1.0, -0.5).unwrap()).unwrap();
        let r = weak_lp_quasinorm(&f, 1.0).unwrap();
        assert!((r.quasinorm.value().unwrap() - 1.0).abs() < 1e-12);
        // p = 3: F = delta^3 on (0,1], then delta^{3-2} growth -> infinite
        assert!(!weak_lp_quasinorm(&f, 3.0).unwrap().quasinorm.is_finite());
    }

    #[test]
    fn smooth_interior_maximum_found_by_search() {
        // f = x on [0, 1], p = 1: F = delta (1 - delta), max 1/4 at 1/2
        let f = PiecewiseFunction::from_expr(unit(), Expr::monomial(1.0, 1.0).unwrap()).unwrap();
        let r = weak_lp_quasinorm(&f, 1.0).unwrap();
        assert!((r.quasinorm.value().unwrap() - 0.25).abs() < 1e-12);
        assert!((r.maximizer_delta.unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn multi_term_critical_values() {
        // x^2 - x on [0, 3] dips to -1/4 at 1/2
        let d = Domain::new(Interval::closed(0.0, 3.0).unwrap());
        let f = PiecewiseFunction::from_expr(
            d,
            Expr::new([PowerTerm::new(1.0, 2.0), PowerTerm::new(-1.0, 1.0)]).unwrap(),
        )
        .unwrap();
        let c = critical_values(&f);
        assert!(c.iter().any(|&v| (v - 0.25).abs() < 1e-12));
        assert!(c.contains(&6.0));
    }

    #[test]
    fn ap_constant_member() {
        let f = PiecewiseFunction::constant(unit(), 3.0).unwrap();
        let cert = check_ap_membership(&f, 2.0, &[]).unwrap();
        assert_eq!(cert.member, Some(true));
        assert!(cert.witness_map.iter().all(|e| e.set.is_empty()));
    }

    #[test]
    fn ap_rejects_bad_grid() {
        let f = PiecewiseFunction::constant(unit(), 3.0).unwrap();
        assert!(check_ap_membership(&f, 2.0, &[0.1, 0.5]).is_err());
        assert!(check_ap_membership(&f, 2.0, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn embedding_examples() {
        let d = Domain::new(Interval::open(0.0, 1.0).unwrap());
        let f = PiecewiseFunction::from_expr(d, Expr::monomial(1.0, -0.5).unwrap()).unwrap();
        let e = weak_to_ap_embedding(&f, 1.0, 0.1).unwrap();
        assert_eq!(e.k, 11);
        assert!((e.set_measure - 1.0 / 121.0).abs() < 1e-15);
        assert_eq!(e.bound, 11.0);
        let one = spike(1.0, 2.0);
        let e = weak_to_ap_embedding(&one, 2.0, 0.5).unwrap();
        assert_eq!(e.k, 2);
        assert!(e.set.is_empty());
        assert!((e.integral.value().unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(e.bound, 4.0);
    }

    #[test]
    fn least_integer_threshold_matches_scan() {
        for &(c, p, d) in &[(1.0, 1.0, 0.1), (1.0, 2.0, 0.5), (0.0, 2.0, 0.5), (7.3, 1.5, 0.01), (1.0, 1.0, 1.0)] {
            let scan = (1u64..).find(|&k| c / (k as f64).powf(p) < d).unwrap();
            assert_eq!(least_integer_threshold(c, p, d).unwrap(), scan);
        }
    }
}
