//! Restricted integrals `int_B |f|^p` with first-class divergence.
//!
//! Convergence at `+inf` and at `0+` is decided only by the dominant power
//! of the piece (the tail-exponent rule). Numeric quadrature is used for the
//! value of multi-term pieces, never to decide whether an integral diverges.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::quad::{self, QuadFailure};
use super::{positive_roots, pow, Expr, PiecewiseFunction};
use crate::error::{Error, Result};
use crate::measure::{Domain, IntervalSet};

/// `|p*a + 1|` below this counts as the logarithmic borderline `p*a = -1`.
pub const TAIL_EXPONENT_TOL: f64 = 1e-9;

const QUAD_ABS_TOL: f64 = 1e-9;
const QUAD_REL_TOL: f64 = 1e-12;
const QUAD_MAX_SEGMENTS: usize = 4000;

/// Outcome of an integral of a non-negative integrand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "tag")]
pub enum IntegralValue {
    /// `value` with an error bound `err >= 0`.
    Finite { value: f64, err: f64 },
    /// Certified infinite by an analytic argument.
    Divergent { reason: String },
    /// Quadrature could not reach its tolerance.
    Unknown { reason: String },
}

impl IntegralValue {
    pub fn zero() -> Self {
        IntegralValue::Finite { value: 0.0, err: 0.0 }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, IntegralValue::Finite { .. })
    }

    pub fn is_divergent(&self) -> bool {
        matches!(self, IntegralValue::Divergent { .. })
    }

    pub fn value(&self) -> Option<f64> {
        match self {
            IntegralValue::Finite { value, .. } => Some(*value),
            _ => None,
        }
    }

    pub fn err(&self) -> Option<f64> {
        match self {
            IntegralValue::Finite { err, .. } => Some(*err),
            _ => None,
        }
    }

    /// Sum of integrals over disjoint sets. The integrand is non-negative, so
    /// one divergent part makes the whole divergent.
    #[allow(clippy::should_implement_trait)]
    pub fn add(self, other: IntegralValue) -> IntegralValue {
        use IntegralValue::*;
        match (self, other) {
            (d @ Divergent { .. }, _) | (_, d @ Divergent { .. }) => d,
            (u @ Unknown { .. }, _) | (_, u @ Unknown { .. }) => u,
            (Finite { value: v1, err: e1 }, Finite { value: v2, err: e2 }) => {
                Finite { value: v1 + v2, err: e1 + e2 }
            }
        }
    }

    /// Larger of two values in the order Finite < Unknown < Divergent, Finite
    /// compared by `value + err`.
    pub fn max(self, other: IntegralValue) -> IntegralValue {
        use IntegralValue::*;
        match (self, other) {
            (d @ Divergent { .. }, _) | (_, d @ Divergent { .. }) => d,
            (u @ Unknown { .. }, _) | (_, u @ Unknown { .. }) => u,
            (a @ Finite { .. }, b @ Finite { .. }) => {
                let key = |v: &IntegralValue| v.value().unwrap() + v.err().unwrap();
                if key(&b) > key(&a) {
                    b
                } else {
                    a
                }
            }
        }
    }
}

/// `int_B |f|^p dmu`.
pub fn lp_integral_on(f: &PiecewiseFunction, p: f64, b: &IntervalSet) -> Result<IntegralValue> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Precondition(format!("p must be a finite number >= 1, got {p}")));
    }
    if !b.is_within(f.domain()) {
        return Err(Error::NotContained { set: b.to_string(), domain: f.domain().carrier().to_string() });
    }
    let mut total = IntegralValue::zero();
    for piece in f.pieces() {
        if piece.expr.is_zero() {
            continue;
        }
        for part in b.intersect_interval(&piece.interval).parts() {
            if part.is_degenerate() {
                continue;
            }
            total = total.add(integrate_expr(&piece.expr, p, part.lo(), part.hi()));
            if total.is_divergent() {
                return Ok(total);
            }
        }
    }
    Ok(total)
}

/// Proves divergence over `B` by splitting the domain integral.
///
/// If the integral over the whole carrier diverges while the integral over
/// `X \ B` is finite, the integral over `B` must diverge. Otherwise the
/// integral over `B` is computed directly.
pub fn split_divergence_test(
    f: &PiecewiseFunction,
    p: f64,
    b: &IntervalSet,
    x: &Domain,
) -> Result<IntegralValue> {
    if !b.is_within(x) {
        return Err(Error::NotContained { set: b.to_string(), domain: x.carrier().to_string() });
    }
    let whole = lp_integral_on(f, p, &x.as_set())?;
    if let IntegralValue::Divergent { reason } = &whole {
        let rest = lp_integral_on(f, p, &b.complement(x)?)?;
        if let IntegralValue::Finite { value, .. } = rest {
            return Ok(IntegralValue::Divergent {
                reason: format!(
                    "integral over the domain diverges ({reason}) while the integral over the \
                     complement is finite ({value:e})"
                ),
            });
        }
    }
    lp_integral_on(f, p, b)
}

fn borderline(beta: f64) -> bool {
    (beta + 1.0).abs() <= TAIL_EXPONENT_TOL
}

fn tail_divergence(beta: f64) -> IntegralValue {
    IntegralValue::Divergent {
        reason: format!("tail at +inf: |f|^p decays like x^{beta} with exponent >= -1"),
    }
}

fn zero_divergence(beta: f64) -> IntegralValue {
    IntegralValue::Divergent {
        reason: format!("singularity at 0: |f|^p grows like x^{beta} with exponent <= -1"),
    }
}

/// `int_a^b |expr|^p dx` for `a < b`, either endpoint possibly negative or infinite.
fn integrate_expr(expr: &Expr, p: f64, a: f64, b: f64) -> IntegralValue {
    if a < 0.0 {
        // integer exponents here; mirror the negative half onto the positive axis
        let neg = integrate_expr(&expr.reflect(), p, (-b).max(0.0), -a);
        return if b > 0.0 { neg.add(integrate_expr(expr, p, 0.0, b)) } else { neg };
    }
    if let Some(t) = expr.single() {
        return monomial_integral(t.coeff, t.exponent, p, a, b);
    }

    let beta_inf = p * expr.dominant_at_infinity().exponent;
    if b.is_infinite() && (beta_inf > -1.0 || borderline(beta_inf)) {
        return tail_divergence(beta_inf);
    }
    let lowest = expr.dominant_at_zero();
    let beta_zero = p * lowest.exponent;
    let singular_at_zero = a == 0.0 && lowest.exponent < 0.0;
    if singular_at_zero && (beta_zero < -1.0 || borderline(beta_zero)) {
        return zero_divergence(beta_zero);
    }

    // |expr|^p is smooth between sign changes of expr
    let mut cuts = vec![a];
    cuts.extend(positive_roots(&expr.as_pairs(), a, b).into_iter().filter(|&x| x > a && x < b));
    if a == 0.0 && b.is_infinite() && cuts.len() == 1 {
        cuts.push(1.0);
    }
    cuts.push(b);

    let mut total = IntegralValue::zero();
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let part = if u == 0.0 && singular_at_zero {
            if v.is_infinite() {
                unreachable!("split at 1 above")
            }
            singular_head(expr, p, v)
        } else if v.is_infinite() {
            let s = u.max(1.0);
            let head = if s > u { smooth_segment(expr, p, u, s) } else { IntegralValue::zero() };
            head.add(tail(expr, p, s))
        } else {
            smooth_segment(expr, p, u, v)
        };
        total = total.add(part);
    }
    total
}

/// Closed form for `int_a^b |c x^e|^p dx` with `0 <= a < b <= inf`.
fn monomial_integral(c: f64, e: f64, p: f64, a: f64, b: f64) -> IntegralValue {
    let scale = c.abs().powf(p);
    let beta = p * e;
    if e == 0.0 {
        if b.is_infinite() {
            return tail_divergence(0.0);
        }
        let value = scale * (b - a);
        return IntegralValue::Finite { value, err: 4.0 * f64::EPSILON * value };
    }
    if borderline(beta) {
        if b.is_infinite() {
            return tail_divergence(beta);
        }
        if a == 0.0 {
            return zero_divergence(beta);
        }
        let value = scale * (b / a).ln();
        return IntegralValue::Finite { value, err: 8.0 * f64::EPSILON * (value.abs() + scale) };
    }
    let k = beta + 1.0;
    if k < 0.0 {
        if a == 0.0 {
            return zero_divergence(beta);
        }
        let upper = if b.is_infinite() { 0.0 } else { b.powf(k) };
        let lower = a.powf(k);
        let value = scale * (upper - lower) / k;
        let err = 8.0 * f64::EPSILON * scale * (upper.abs() + lower.abs()) / k.abs();
        IntegralValue::Finite { value, err }
    } else {
        if b.is_infinite() {
            return tail_divergence(beta);
        }
        let upper = b.powf(k);
        let lower = if a == 0.0 { 0.0 } else { a.powf(k) };
        let value = scale * (upper - lower) / k;
        let err = 8.0 * f64::EPSILON * scale * (upper.abs() + lower.abs()) / k;
        IntegralValue::Finite { value, err }
    }
}

fn quad_outcome(r: std::result::Result<quad::QuadResult, QuadFailure>, what: &str) -> IntegralValue {
    match r {
        Ok(q) => IntegralValue::Finite { value: q.value, err: q.err },
        Err(QuadFailure::NonFinite(x)) => IntegralValue::Unknown {
            reason: format!("{what}: integrand not finite at {x}"),
        },
        Err(QuadFailure::Budget { segments, err }) => IntegralValue::Unknown {
            reason: format!("{what}: tolerance not reached after {segments} segments (err {err:e})"),
        },
    }
}

fn smooth_segment(expr: &Expr, p: f64, u: f64, v: f64) -> IntegralValue {
    quad_outcome(
        quad::integrate(|x| expr.eval(x).abs().powf(p), u, v, QUAD_ABS_TOL, QUAD_REL_TOL, QUAD_MAX_SEGMENTS),
        "quadrature",
    )
}

/// `(1 + r)^p - 1` without cancellation.
fn rel_power_excess(r: f64, p: f64) -> f64 {
    (p * r.ln_1p()).exp_m1()
}

/// `int_s^inf |expr|^p` for `s >= 1` past the last sign change, `p*a_max < -1`.
///
/// Splits into the leading monomial (closed form) and a correction whose
/// integrand decays strictly faster; the correction is mapped onto `(0, 1]`
/// by `x = s u^{-k}`, which keeps it bounded at `u = 0`.
fn tail(expr: &Expr, p: f64, s: f64) -> IntegralValue {
    let lead = expr.dominant_at_infinity();
    let beta = p * lead.exponent;
    let leading = monomial_integral(lead.coeff, lead.exponent, p, s, f64::INFINITY);
    let rest: Vec<(f64, f64)> = expr.terms()[1..]
        .iter()
        .map(|t| (t.coeff / lead.coeff, t.exponent - lead.exponent))
        .collect();
    let gap = -rest[0].1;
    let scale = lead.coeff.abs().powf(p);
    let k = 1.0 / (gap - beta - 1.0);
    let integrand = |u: f64| {
        let x = s * u.powf(-k);
        if !x.is_finite() {
            return f64::NAN;
        }
        let r: f64 = rest.iter().map(|&(c, e)| c * pow(x, e)).sum();
        scale * pow(x, beta) * rel_power_excess(r, p) * k * s * u.powf(-k - 1.0)
    };
    let correction = quad_outcome(
        quad::integrate(integrand, 0.0, 1.0, QUAD_ABS_TOL, QUAD_REL_TOL, QUAD_MAX_SEGMENTS),
        "tail correction",
    );
    signed_sum(leading, correction)
}

/// `int_0^v |expr|^p` below the first sign change, `-1 < p*a_min < 0`.
fn singular_head(expr: &Expr, p: f64, v: f64) -> IntegralValue {
    let low = expr.dominant_at_zero();
    let beta = p * low.exponent;
    let leading = monomial_integral(low.coeff, low.exponent, p, 0.0, v);
    let n = expr.terms().len();
    let rest: Vec<(f64, f64)> = expr.terms()[..n - 1]
        .iter()
        .map(|t| (t.coeff / low.coeff, t.exponent - low.exponent))
        .collect();
    let gap = rest.last().map(|r| r.1).unwrap_or(1.0);
    let scale = low.coeff.abs().powf(p);
    let power = beta + gap;
    let excess = |x: f64| {
        let r: f64 = rest.iter().map(|&(c, e)| c * pow(x, e)).sum();
        scale * pow(x, beta) * rel_power_excess(r, p)
    };
    let correction = if power >= 0.0 {
        quad::integrate(excess, 0.0, v, QUAD_ABS_TOL, QUAD_REL_TOL, QUAD_MAX_SEGMENTS)
    } else {
        // x = v u^m makes the correction integrand bounded at u = 0
        let m = 1.0 / (power + 1.0);
        let mapped = |u: f64| {
            let x = v * u.powf(m);
            if x == 0.0 {
                return f64::NAN;
            }
            excess(x) * m * v * u.powf(m - 1.0)
        };
        quad::integrate(mapped, 0.0, 1.0, QUAD_ABS_TOL, QUAD_REL_TOL, QUAD_MAX_SEGMENTS)
    };
    signed_sum(leading, quad_outcome(correction, "singular correction"))
}

/// Leading part plus a correction of either sign.
fn signed_sum(leading: IntegralValue, correction: IntegralValue) -> IntegralValue {
    match (leading, correction) {
        (IntegralValue::Finite { value: v1, err: e1 }, IntegralValue::Finite { value: v2, err: e2 }) => {
            IntegralValue::Finite { value: (v1 + v2).max(0.0), err: e1 + e2 }
        }
        (l, c) => l.add(c),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{Piece, PowerTerm};
    use crate::measure::Interval;

    fn unit() -> Domain {
        Domain::new(Interval::closed(0.0, 1.0).unwrap())
    }

    fn half_line() -> Domain {
        Domain::new(Interval::at_least(1.0).unwrap())
    }

    fn spike(n: f64, p: f64) -> PiecewiseFunction {
        PiecewiseFunction::new(
            unit(),
            vec![
                Piece { interval: Interval::closed(0.0, 1.0 / n).unwrap(), expr: Expr::constant(n.powf(1.0 / p)).unwrap() },
                Piece { interval: Interval::open_closed(1.0 / n, 1.0).unwrap(), expr: Expr::zero() },
            ],
        )
        .unwrap()
    }

    fn finite(v: &IntegralValue) -> (f64, f64) {
        (v.value().expect("finite"), v.err().unwrap())
    }

    #[test]
    fn spike_integrals() {
        let f = spike(4.0, 2.0);
        let off = IntervalSet::from_interval(Interval::open_closed(0.25, 1.0).unwrap());
        assert_eq!(lp_integral_on(&f, 2.0, &off).unwrap().value(), Some(0.0));
        for n in [1.0, 3.0, 16.0] {
            let (v, e) = finite(&lp_integral_on(&spike(n + 1.0, 2.0), 2.0, &unit().as_set()).unwrap());
            assert!((v - 1.0).abs() <= e + 1e-15, "n={n}: {v}");
        }
    }

    #[test]
    fn slow_tail_diverges() {
        for p in [1.0, 2.0, 3.0] {
            let f = PiecewiseFunction::from_expr(half_line(), Expr::monomial(3f64.powf(-1.0 / p), -1.0 / p).unwrap()).unwrap();
            assert!(lp_integral_on(&f, p, &half_line().as_set()).unwrap().is_divergent());
        }
    }

    #[test]
    fn fast_tail_converges() {
        let p = 2.0;
        let f = PiecewiseFunction::from_expr(half_line(), Expr::monomial(1.0, -2.0 / p).unwrap()).unwrap();
        let (v, e) = finite(&lp_integral_on(&f, p, &half_line().as_set()).unwrap());
        assert!((v - 1.0).abs() <= e.max(1e-15));
    }

    #[test]
    fn tail_rule_matches_antiderivative() {
        // int_1^T x^b dx stays bounded iff b < -1
        for b in [-2.0, -1.5, -1.0, -0.5] {
            let f = PiecewiseFunction::from_expr(half_line(), Expr::monomial(1.0, b).unwrap()).unwrap();
            let v = lp_integral_on(&f, 1.0, &half_line().as_set()).unwrap();
            let antiderivative_limit = if b == -1.0 { f64::INFINITY } else { -(1.0 / (b + 1.0)) };
            let bounded = b < -1.0 && antiderivative_limit.is_finite();
            assert_eq!(v.is_finite(), bounded, "b = {b}");
            if bounded {
                assert!((v.value().unwrap() - antiderivative_limit).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_singularity_rule() {
        let open = Domain::new(Interval::open(0.0, 1.0).unwrap());
        let f = PiecewiseFunction::from_expr(open, Expr::monomial(1.0, -2.0).unwrap()).unwrap();
        assert!(lp_integral_on(&f, 1.0, &open.as_set()).unwrap().is_divergent());
        let away = IntervalSet::from_interval(Interval::closed_open(0.1, 1.0).unwrap());
        let (v, _) = finite(&lp_integral_on(&f, 1.0, &away).unwrap());
        assert!((v - 9.0).abs() < 1e-12);
        let g = PiecewiseFunction::from_expr(open, Expr::monomial(1.0, -0.5).unwrap()).unwrap();
        let (v, _) = finite(&lp_integral_on(&g, 1.0, &open.as_set()).unwrap());
        assert!((v - 2.0).abs() < 1e-12);
    }

    #[test]
    fn multi_term_finite_segment() {
        // int_0^2 |x^2 - 1| dx = 2/3 + 4/3
        let d = Domain::new(Interval::closed(0.0, 2.0).unwrap());
        let f = PiecewiseFunction::from_expr(
            d,
            Expr::new([PowerTerm::new(1.0, 2.0), PowerTerm::new(-1.0, 0.0)]).unwrap(),
        )
        .unwrap();
        let (v, e) = finite(&lp_integral_on(&f, 1.0, &d.as_set()).unwrap());
        assert!((v - 2.0).abs() <= e + 1e-12, "{v} +- {e}");
    }

    #[test]
    fn multi_term_tail() {
        // int_1^inf (x^-2 + x^-3)^2 dx = 1/3 + 2/4 + 1/5
        let f = PiecewiseFunction::from_expr(
            half_line(),
            Expr::new([PowerTerm::new(1.0, -2.0), PowerTerm::new(1.0, -3.0)]).unwrap(),
        )
        .unwrap();
        let (v, e) = finite(&lp_integral_on(&f, 2.0, &half_line().as_set()).unwrap());
        let want = 1.0 / 3.0 + 0.5 + 0.2;
        assert!((v - want).abs() <= e + 1e-12, "{v} vs {want}");
        // a slow dominant term wins regardless of faster ones
        let g = PiecewiseFunction::from_expr(
            half_line(),
            Expr::new([PowerTerm::new(1.0, -0.5), PowerTerm::new(5.0, -3.0)]).unwrap(),
        )
        .unwrap();
        assert!(lp_integral_on(&g, 2.0, &half_line().as_set()).unwrap().is_divergent());
    }

    #[test]
    fn multi_term_singular_head() {
        // int_0^1 (x^-1/2 + x) dx = 2 + 1/2
        let open = Domain::new(Interval::open_closed(0.0, 1.0).unwrap());
        let f = PiecewiseFunction::from_expr(
            open,
            Expr::new([PowerTerm::new(1.0, 1.0), PowerTerm::new(1.0, -0.5)]).unwrap(),
        )
        .unwrap();
        let (v, e) = finite(&lp_integral_on(&f, 1.0, &open.as_set()).unwrap());
        assert!((v - 2.5).abs() <= e + 1e-12, "{v} +- {e}");
        // int_0^1 (x^-0.4 + 1)^2 = 1/0.2 + 2/0.6 + 1
        let g = PiecewiseFunction::from_expr(
            open,
            Expr::new([PowerTerm::new(1.0, 0.0), PowerTerm::new(1.0, -0.4)]).unwrap(),
        )
        .unwrap();
        let (v, e) = finite(&lp_integral_on(&g, 2.0, &open.as_set()).unwrap());
        let want = 5.0 + 2.0 / 0.6 + 1.0;
        assert!((v - want).abs() <= e + 1e-10, "{v} vs {want}");
    }

    #[test]
    fn negative_axis_polynomial() {
        // int_{-1}^{2} |x|^3 dx = 1/4 + 4
        let d = Domain::new(Interval::closed(-1.0, 2.0).unwrap());
        let f = PiecewiseFunction::from_expr(d, Expr::monomial(1.0, 3.0).unwrap()).unwrap();
        let (v, _) = finite(&lp_integral_on(&f, 1.0, &d.as_set()).unwrap());
        assert!((v - 4.25).abs() < 1e-12);
    }

    #[test]
    fn split_test_examples() {
        // (3x)^{-1/2} on [1, inf) with p = 2, B = [1,inf) \ [2, 2.5]
        let p = 2.0;
        let x = half_line();
        let f = PiecewiseFunction::from_expr(x, Expr::monomial(3f64.powf(-1.0 / p), -1.0 / p).unwrap()).unwrap();
        let hole = IntervalSet::from_interval(Interval::closed(2.0, 2.5).unwrap());
        let b = x.as_set().difference(&hole);
        assert_eq!(b.complement(&x).unwrap().measure(), 0.5);
        let v = split_divergence_test(&f, p, &b, &x).unwrap();
        match v {
            IntegralValue::Divergent { reason } => assert!(reason.contains("complement is finite")),
            other => panic!("expected divergence, got {other:?}"),
        }

        let z = PiecewiseFunction::zero(x);
        assert_eq!(split_divergence_test(&z, p, &b, &x).unwrap(), IntegralValue::zero());

        let g = PiecewiseFunction::from_expr(x, Expr::monomial(1.0, -2.0 / p).unwrap()).unwrap();
        let (v, e) = finite(&split_divergence_test(&g, p, &x.as_set(), &x).unwrap());
        assert!((v - 1.0).abs() <= e.max(1e-15));
    }

    #[test]
    fn rejects_sets_outside_domain() {
        let f = spike(4.0, 2.0);
        let b = IntervalSet::from_interval(Interval::closed(0.5, 2.0).unwrap());
        assert!(lp_integral_on(&f, 2.0, &b).is_err());
        assert!(lp_integral_on(&f, 0.5, &unit().as_set()).is_err());
    }
}
