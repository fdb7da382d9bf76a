//! Piecewise sums of power terms.
//!
//! On each piece a function is `sum_i c_i * x^a_i`. The class is closed under
//! the subtractions `f_n - f` and `f_n - f_m` once the two partitions are
//! refined to a common one, and every function in the example gallery lives
//! in it.

mod integral;
mod level;
mod quad;
mod roots;
mod sequence;

pub use integral::{lp_integral_on, split_divergence_test, IntegralValue, TAIL_EXPONENT_TOL};
pub use level::superlevel_set;
pub use sequence::{BreakTemplate, FunctionSequence, FunctionTemplate, PieceTemplate, Slot, SlotTerms, TermTemplate};

pub(crate) use roots::positive_roots;

use std::fmt;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measure::{Domain, Interval};

/// Maximum number of power terms on one piece.
pub const MAX_TERMS: usize = 8;

/// Default cap on the number of pieces produced by refinement.
pub const DEFAULT_PIECE_CAP: usize = 10_000;

/// `coeff * x^exponent`; exponent 0 encodes a constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PowerTerm {
    pub coeff: f64,
    pub exponent: f64,
}

impl PowerTerm {
    pub fn new(coeff: f64, exponent: f64) -> Self {
        Self { coeff, exponent }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeff * pow(x, self.exponent)
    }
}

/// `x^e`, using exact integer powers where the exponent allows it.
pub(crate) fn pow(x: f64, e: f64) -> f64 {
    if e == 0.0 {
        1.0
    } else if e.fract() == 0.0 && e.abs() <= 64.0 {
        x.powi(e as i32)
    } else {
        x.powf(e)
    }
}

fn is_integer(e: f64) -> bool {
    e.fract() == 0.0
}

#[derive(Deserialize, JsonSchema)]
struct ExprRepr {
    terms: Vec<PowerTerm>,
}

impl TryFrom<ExprRepr> for Expr {
    type Error = Error;
    fn try_from(r: ExprRepr) -> Result<Self> {
        Expr::new(r.terms)
    }
}

/// A canonical sum of power terms: exponents strictly decreasing, no zero
/// coefficients except for the single term of the zero expression.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(try_from = "ExprRepr")]
pub struct Expr {
    terms: Vec<PowerTerm>,
}

impl Expr {
    pub fn new<I: IntoIterator<Item = PowerTerm>>(terms: I) -> Result<Self> {
        let mut terms: Vec<PowerTerm> = terms.into_iter().collect();
        if let Some(t) = terms.iter().find(|t| !t.coeff.is_finite() || !t.exponent.is_finite()) {
            return Err(Error::InvalidExpr(format!("non-finite term {} x^{}", t.coeff, t.exponent)));
        }
        terms.sort_by(|a, b| b.exponent.total_cmp(&a.exponent));
        let mut merged: Vec<PowerTerm> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if last.exponent == t.exponent => last.coeff += t.coeff,
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coeff != 0.0);
        if merged.is_empty() {
            return Ok(Self::zero());
        }
        if merged.len() > MAX_TERMS {
            return Err(Error::InvalidExpr(format!(
                "{} terms after merging (cap {MAX_TERMS})",
                merged.len()
            )));
        }
        Ok(Self { terms: merged })
    }

    pub fn zero() -> Self {
        Self { terms: vec![PowerTerm::new(0.0, 0.0)] }
    }

    pub fn constant(c: f64) -> Result<Self> {
        Self::new([PowerTerm::new(c, 0.0)])
    }

    pub fn monomial(coeff: f64, exponent: f64) -> Result<Self> {
        Self::new([PowerTerm::new(coeff, exponent)])
    }

    pub fn terms(&self) -> &[PowerTerm] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.len() == 1 && self.terms[0].coeff == 0.0
    }

    pub fn single(&self) -> Option<PowerTerm> {
        (self.terms.len() == 1).then(|| self.terms[0])
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.terms.iter().map(|t| t.eval(x)).sum()
    }

    /// Leading term as `x -> +inf`.
    pub fn dominant_at_infinity(&self) -> PowerTerm {
        self.terms[0]
    }

    /// Leading term as `x -> 0+`.
    pub fn dominant_at_zero(&self) -> PowerTerm {
        *self.terms.last().expect("expressions are non-empty")
    }

    /// True when the expression is only defined for `x > 0`.
    pub fn needs_positive_domain(&self) -> bool {
        !self.is_zero() && self.terms.iter().any(|t| t.exponent < 0.0 || !is_integer(t.exponent))
    }

    pub fn sub(&self, other: &Expr) -> Result<Expr> {
        Expr::new(
            self.terms
                .iter()
                .copied()
                .chain(other.terms.iter().map(|t| PowerTerm::new(-t.coeff, t.exponent))),
        )
    }

    pub fn scale(&self, c: f64) -> Result<Expr> {
        Expr::new(self.terms.iter().map(|t| PowerTerm::new(c * t.coeff, t.exponent)))
    }

    /// `e(-x)` written as an expression in `x`; only valid for integer exponents.
    pub(crate) fn reflect(&self) -> Expr {
        debug_assert!(self.terms.iter().all(|t| is_integer(t.exponent)));
        Expr {
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let odd = (t.exponent as i64).rem_euclid(2) == 1;
                    PowerTerm::new(if odd { -t.coeff } else { t.coeff }, t.exponent)
                })
                .collect(),
        }
    }

    /// Terms of the derivative, zero terms dropped.
    pub(crate) fn derivative_terms(&self) -> Vec<(f64, f64)> {
        self.terms
            .iter()
            .filter(|t| t.exponent != 0.0)
            .map(|t| (t.coeff * t.exponent, t.exponent - 1.0))
            .collect()
    }

    pub(crate) fn as_pairs(&self) -> Vec<(f64, f64)> {
        if self.is_zero() {
            return Vec::new();
        }
        self.terms.iter().map(|t| (t.coeff, t.exponent)).collect()
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, t) in self.terms.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if t.exponent == 0.0 {
                write!(f, "{}", t.coeff)?;
            } else {
                write!(f, "{}*x^{}", t.coeff, t.exponent)?;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Piece {
    pub interval: Interval,
    pub expr: Expr,
}

#[derive(Deserialize, JsonSchema)]
struct PiecewiseRepr {
    domain: Domain,
    pieces: Vec<Piece>,
}

impl TryFrom<PiecewiseRepr> for PiecewiseFunction {
    type Error = Error;
    fn try_from(r: PiecewiseRepr) -> Result<Self> {
        PiecewiseFunction::new(r.domain, r.pieces)
    }
}

/// A function on a [`Domain`] given by pieces that partition the carrier.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(try_from = "PiecewiseRepr")]
pub struct PiecewiseFunction {
    domain: Domain,
    pieces: Vec<Piece>,
}

impl PiecewiseFunction {
    pub fn new(domain: Domain, pieces: Vec<Piece>) -> Result<Self> {
        let carrier = domain.carrier();
        if !carrier.lo().is_finite() {
            return Err(Error::InvalidFunction("carrier must be bounded below".into()));
        }
        let (first, last) = match (pieces.first(), pieces.last()) {
            (Some(a), Some(b)) => (a, b),
            _ => return Err(Error::InvalidFunction("no pieces".into())),
        };
        if first.interval.lo() != carrier.lo() || first.interval.lo_closed() != carrier.lo_closed() {
            return Err(Error::InvalidFunction(format!(
                "first piece {} does not start the carrier {carrier}",
                first.interval
            )));
        }
        if last.interval.hi() != carrier.hi() || last.interval.hi_closed() != carrier.hi_closed() {
            return Err(Error::InvalidFunction(format!(
                "last piece {} does not end the carrier {carrier}",
                last.interval
            )));
        }
        for w in pieces.windows(2) {
            let (a, b) = (&w[0].interval, &w[1].interval);
            if a.hi() != b.lo() || a.hi_closed() == b.lo_closed() {
                return Err(Error::InvalidFunction(format!(
                    "pieces {a} and {b} do not tile the carrier"
                )));
            }
        }
        for p in &pieces {
            if p.expr.needs_positive_domain()
                && (p.interval.lo() < 0.0 || (p.interval.lo() == 0.0 && p.interval.lo_closed()))
            {
                return Err(Error::InvalidFunction(format!(
                    "expression {} needs x > 0 but its piece is {}",
                    p.expr, p.interval
                )));
            }
        }
        Ok(Self { domain, pieces })
    }

    pub fn zero(domain: Domain) -> Self {
        Self::from_expr(domain, Expr::zero()).expect("the zero function is valid everywhere")
    }

    pub fn constant(domain: Domain, c: f64) -> Result<Self> {
        Self::from_expr(domain, Expr::constant(c)?)
    }

    /// One expression over the whole carrier.
    pub fn from_expr(domain: Domain, expr: Expr) -> Result<Self> {
        Self::new(domain, vec![Piece { interval: *domain.carrier(), expr }])
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_zero(&self) -> bool {
        self.pieces.iter().all(|p| p.expr.is_zero())
    }

    pub fn evaluate(&self, x: f64) -> Result<f64> {
        let idx = self.pieces.partition_point(|p| {
            let i = &p.interval;
            i.hi() < x || (i.hi() == x && !i.hi_closed())
        });
        match self.pieces.get(idx) {
            Some(p) if p.interval.contains(x) => Ok(p.expr.eval(x)),
            _ => Err(Error::OutsideDomain(x)),
        }
    }

    pub fn subtract(&self, other: &PiecewiseFunction) -> Result<PiecewiseFunction> {
        self.subtract_with_cap(other, DEFAULT_PIECE_CAP)
    }

    /// `self - other` on the common refinement of both partitions.
    pub fn subtract_with_cap(&self, other: &PiecewiseFunction, cap: usize) -> Result<PiecewiseFunction> {
        if self.domain != other.domain {
            return Err(Error::DomainMismatch);
        }
        let (a, b) = (&self.pieces, &other.pieces);
        let (mut i, mut j) = (0, 0);
        let mut out: Vec<Piece> = Vec::with_capacity(a.len() + b.len());
        while i < a.len() && j < b.len() {
            let (pa, pb) = (&a[i], &b[j]);
            if let Some(iv) = pa.interval.intersect(&pb.interval) {
                if out.len() >= cap {
                    return Err(Error::PieceCap { pieces: out.len() + 1, cap });
                }
                out.push(Piece { interval: iv, expr: pa.expr.sub(&pb.expr)? });
            }
            let ahi = (pa.interval.hi(), pa.interval.hi_closed());
            let bhi = (pb.interval.hi(), pb.interval.hi_closed());
            if ahi.0 < bhi.0 || (ahi.0 == bhi.0 && !ahi.1 && bhi.1) {
                i += 1;
            } else if bhi.0 < ahi.0 || (ahi.0 == bhi.0 && ahi.1 && !bhi.1) {
                j += 1;
            } else {
                i += 1;
                j += 1;
            }
        }
        PiecewiseFunction::new(self.domain, coalesce(out))
    }

    pub fn scale(&self, c: f64) -> Result<PiecewiseFunction> {
        let pieces = self
            .pieces
            .iter()
            .map(|p| Ok(Piece { interval: p.interval, expr: p.expr.scale(c)? }))
            .collect::<Result<Vec<_>>>()?;
        PiecewiseFunction::new(self.domain, coalesce(pieces))
    }
}

/// Merges neighbouring pieces that carry the same expression.
fn coalesce(pieces: Vec<Piece>) -> Vec<Piece> {
    let mut out: Vec<Piece> = Vec::with_capacity(pieces.len());
    for p in pieces {
        if let Some(last) = out.last_mut() {
            if last.expr == p.expr {
                last.interval = Interval::new(
                    last.interval.lo(),
                    p.interval.hi(),
                    last.interval.lo_closed(),
                    p.interval.hi_closed(),
                )
                .expect("adjacent pieces form an interval");
                continue;
            }
        }
        out.push(p);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit() -> Domain {
        Domain::new(Interval::closed(0.0, 1.0).unwrap())
    }

    /// n^{1/p} on [0, 1/n], zero on (1/n, 1]
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

    #[test]
    fn expr_canonical_form() {
        let e = Expr::new([
            PowerTerm::new(1.0, 0.0),
            PowerTerm::new(2.0, 2.0),
            PowerTerm::new(-1.0, 0.0),
            PowerTerm::new(3.0, 0.5),
        ])
        .unwrap();
        assert_eq!(e.terms(), &[PowerTerm::new(2.0, 2.0), PowerTerm::new(3.0, 0.5)]);
        let z = e.sub(&e).unwrap();
        assert!(z.is_zero());
        assert!(Expr::new((0..9).map(|k| PowerTerm::new(1.0, k as f64))).is_err());
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(spike(4.0, 2.0).evaluate(0.1).unwrap(), 2.0);
        assert_eq!(spike(4.0, 2.0).evaluate(0.25).unwrap(), 2.0);
        assert_eq!(spike(4.0, 2.0).evaluate(0.2500001).unwrap(), 0.0);
        assert_eq!(PiecewiseFunction::zero(unit()).evaluate(0.7).unwrap(), 0.0);

        let open = Domain::new(Interval::open(0.0, 1.0).unwrap());
        let inv_sq = PiecewiseFunction::from_expr(open, Expr::monomial(1.0, -2.0).unwrap()).unwrap();
        assert_eq!(inv_sq.evaluate(0.5).unwrap(), 4.0);
        assert!(matches!(inv_sq.evaluate(0.0), Err(Error::OutsideDomain(_))));
        assert!(matches!(inv_sq.evaluate(1.5), Err(Error::OutsideDomain(_))));
    }

    #[test]
    fn rejects_negative_powers_at_zero() {
        let closed = Domain::new(Interval::closed(0.0, 1.0).unwrap());
        assert!(PiecewiseFunction::from_expr(closed, Expr::monomial(1.0, -0.5).unwrap()).is_err());
        assert!(PiecewiseFunction::from_expr(closed, Expr::monomial(1.0, 0.5).unwrap()).is_err());
        assert!(PiecewiseFunction::from_expr(closed, Expr::monomial(1.0, 2.0).unwrap()).is_ok());
    }

    #[test]
    fn rejects_gaps_and_overlaps() {
        let gap = vec![
            Piece { interval: Interval::closed_open(0.0, 0.5).unwrap(), expr: Expr::zero() },
            Piece { interval: Interval::open_closed(0.5, 1.0).unwrap(), expr: Expr::zero() },
        ];
        assert!(PiecewiseFunction::new(unit(), gap).is_err());
        let overlap = vec![
            Piece { interval: Interval::closed(0.0, 0.5).unwrap(), expr: Expr::zero() },
            Piece { interval: Interval::closed(0.5, 1.0).unwrap(), expr: Expr::zero() },
        ];
        assert!(PiecewiseFunction::new(unit(), overlap).is_err());
    }

    #[test]
    fn subtract_identity_and_self() {
        let f = spike(4.0, 2.0);
        let z = PiecewiseFunction::zero(unit());
        assert_eq!(f.subtract(&z).unwrap(), f);
        assert_eq!(f.subtract(&f).unwrap(), z);
    }

    #[test]
    fn subtract_refines_partitions() {
        let (f4, f2) = (spike(4.0, 2.0), spike(2.0, 2.0));
        let d = f4.subtract(&f2).unwrap();
        assert_eq!(d.pieces().len(), 3);
        for x in [0.1, 0.3, 0.6] {
            let direct = f4.evaluate(x).unwrap() - f2.evaluate(x).unwrap();
            assert_eq!(d.evaluate(x).unwrap(), direct);
        }
        assert!((d.evaluate(0.1).unwrap() - (2.0 - 2f64.sqrt())).abs() < 1e-15);
        assert!((d.evaluate(0.3).unwrap() + 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn subtract_respects_piece_cap() {
        let (f4, f2) = (spike(4.0, 2.0), spike(2.0, 2.0));
        assert!(matches!(f4.subtract_with_cap(&f2, 2), Err(Error::PieceCap { cap: 2, .. })));
    }

    #[test]
    fn reflect_flips_odd_powers() {
        let e = Expr::new([PowerTerm::new(1.0, 3.0), PowerTerm::new(2.0, 2.0), PowerTerm::new(5.0, 1.0)]).unwrap();
        let r = e.reflect();
        for x in [0.3, 1.7] {
            assert!((r.eval(x) - e.eval(-x)).abs() < 1e-12);
        }
    }

    #[test]
    fn json_round_trip_validates() {
        let f = spike(4.0, 2.0);
        let js = serde_json::to_string(&f).unwrap();
        let back: PiecewiseFunction = serde_json::from_str(&js).unwrap();
        assert_eq!(back, f);
        let broken = js.replace("\"lo_closed\":false", "\"lo_closed\":true");
        assert!(serde_json::from_str::<PiecewiseFunction>(&broken).is_err());
    }
}
