//! Index-parameterised templates of piecewise functions.
//!
//! Every numeric slot (coefficient, exponent, breakpoint) is a power law in
//! the sequence index `n`:
//!
//! ```text
//! value(n) = shift + (a + a_p / p) * n^(b + b_p / p) * (-1)^(n if alternate)
//! ```
//!
//! where `p` is the sequence's exponent. In JSON a slot is either a plain
//! number (a constant) or an object such as `{"a": 1.0, "b": -1.0}`.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use super::{pow, Expr, Piece, PiecewiseFunction, PowerTerm};
use crate::error::{Error, Result};
use crate::measure::{Domain, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct SlotTerms {
    #[serde(default, skip_serializing_if = "is_zero")]
    pub shift: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub a: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub a_p: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub b: f64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub b_p: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub alternate: bool,
}

fn is_zero(x: &f64) -> bool {
    *x == 0.0
}

/// One numeric slot of a template.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(untagged)]
pub enum Slot {
    Const(f64),
    Law(SlotTerms),
}

impl Slot {
    pub fn constant(v: f64) -> Self {
        Slot::Const(v)
    }

    /// `a * n^b`
    pub fn power(a: f64, b: f64) -> Self {
        Slot::Law(SlotTerms { shift: 0.0, a, a_p: 0.0, b, b_p: 0.0, alternate: false })
    }

    /// `a * n^(b_p / p)`
    pub fn power_over_p(a: f64, b_p: f64) -> Self {
        Slot::Law(SlotTerms { shift: 0.0, a, a_p: 0.0, b: 0.0, b_p, alternate: false })
    }

    /// `a_p / p`, independent of `n`
    pub fn over_p(a_p: f64) -> Self {
        Slot::Law(SlotTerms { shift: 0.0, a: 0.0, a_p, b: 0.0, b_p: 0.0, alternate: false })
    }

    pub fn law(terms: SlotTerms) -> Self {
        Slot::Law(terms)
    }

    pub fn value(&self, n: u64, p: f64) -> f64 {
        match *self {
            Slot::Const(v) => v,
            Slot::Law(t) => {
                let e = t.b + t.b_p / p;
                let mut v = (t.a + t.a_p / p) * pow(n as f64, e);
                if t.alternate && n % 2 == 1 {
                    v = -v;
                }
                t.shift + v
            }
        }
    }

    pub fn depends_on_n(&self) -> bool {
        match self {
            Slot::Const(_) => false,
            Slot::Law(t) => t.alternate || ((t.b != 0.0 || t.b_p != 0.0) && (t.a != 0.0 || t.a_p != 0.0)),
        }
    }
}

impl Default for SlotTerms {
    fn default() -> Self {
        Self { shift: 0.0, a: 0.0, a_p: 0.0, b: 0.0, b_p: 0.0, alternate: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct TermTemplate {
    pub coeff: Slot,
    pub exponent: Slot,
}

impl TermTemplate {
    pub fn new(coeff: Slot, exponent: Slot) -> Self {
        Self { coeff, exponent }
    }

    pub fn constant(c: f64) -> Self {
        Self { coeff: Slot::Const(c), exponent: Slot::Const(0.0) }
    }
}

/// A breakpoint; `closed_left` puts the point itself in the piece on its left.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct BreakTemplate {
    pub at: Slot,
    pub closed_left: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct PieceTemplate {
    pub terms: Vec<TermTemplate>,
}

impl PieceTemplate {
    pub fn new(terms: Vec<TermTemplate>) -> Self {
        Self { terms }
    }

    pub fn zero() -> Self {
        Self { terms: Vec::new() }
    }
}

/// Pieces separated by breakpoints; `pieces.len() == breaks.len() + 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FunctionTemplate {
    pub carrier: Interval,
    #[serde(default)]
    pub breaks: Vec<BreakTemplate>,
    pub pieces: Vec<PieceTemplate>,
}

impl FunctionTemplate {
    /// Template with constant slots reproducing `f`.
    pub fn from_function(f: &PiecewiseFunction) -> Self {
        let pieces = f.pieces();
        let breaks = pieces[..pieces.len() - 1]
            .iter()
            .map(|p| BreakTemplate { at: Slot::Const(p.interval.hi()), closed_left: p.interval.hi_closed() })
            .collect();
        let pieces = pieces
            .iter()
            .map(|p| {
                let terms = if p.expr.is_zero() {
                    Vec::new()
                } else {
                    p.expr
                        .terms()
                        .iter()
                        .map(|t| TermTemplate::new(Slot::Const(t.coeff), Slot::Const(t.exponent)))
                        .collect()
                };
                PieceTemplate { terms }
            })
            .collect();
        Self { carrier: *f.domain().carrier(), breaks, pieces }
    }

    pub fn depends_on_n(&self) -> bool {
        self.breaks.iter().any(|b| b.at.depends_on_n())
            || self.pieces.iter().flat_map(|p| &p.terms).any(|t| t.coeff.depends_on_n() || t.exponent.depends_on_n())
    }

    pub fn instantiate(&self, n: u64, p: f64) -> Result<PiecewiseFunction> {
        let bad = |reason: String| Error::InvalidTemplate { n, reason };
        if self.pieces.len() != self.breaks.len() + 1 {
            return Err(bad(format!(
                "{} pieces need {} breakpoints, found {}",
                self.pieces.len(),
                self.pieces.len().saturating_sub(1),
                self.breaks.len()
            )));
        }
        let carrier = self.carrier;
        let domain = Domain::new(carrier);
        let mut cuts = Vec::with_capacity(self.breaks.len());
        for br in &self.breaks {
            let x = br.at.value(n, p);
            if !(x >= carrier.lo() && x <= carrier.hi()) {
                return Err(bad(format!("breakpoint {x} escapes the carrier {carrier}")));
            }
            if cuts.last().is_some_and(|&(prev, _)| x < prev) {
                return Err(bad(format!("breakpoints out of order at {x}")));
            }
            cuts.push((x, br.closed_left));
        }

        let mut pieces = Vec::with_capacity(self.pieces.len());
        let mut left = (carrier.lo(), carrier.lo_closed());
        for (k, pt) in self.pieces.iter().enumerate() {
            let right = match cuts.get(k) {
                Some(&(x, closed_left)) => (x, closed_left && (x < carrier.hi() || carrier.hi_closed())),
                None => (carrier.hi(), carrier.hi_closed()),
            };
            let lo_closed = left.1 && (left.0 > carrier.lo() || carrier.lo_closed());
            if let Ok(interval) = Interval::new(left.0, right.0, lo_closed, right.1) {
                let terms = pt
                    .terms
                    .iter()
                    .map(|t| PowerTerm::new(t.coeff.value(n, p), t.exponent.value(n, p)));
                let expr = Expr::new(terms).map_err(|e| bad(e.to_string()))?;
                pieces.push(Piece { interval, expr });
            }
            if let Some(&(x, closed_left)) = cuts.get(k) {
                left = (x, !closed_left);
            }
        }
        PiecewiseFunction::new(domain, pieces).map_err(|e| bad(e.to_string()))
    }
}

/// A sequence `(f_n)` given by a template and the exponent `p` its slots use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct FunctionSequence {
    pub template: FunctionTemplate,
    pub p: f64,
}

impl FunctionSequence {
    pub fn new(template: FunctionTemplate, p: f64) -> Self {
        Self { template, p }
    }

    /// The constant sequence `f_n = f`.
    pub fn constant(f: &PiecewiseFunction) -> Self {
        Self { template: FunctionTemplate::from_function(f), p: 1.0 }
    }

    pub fn domain(&self) -> Domain {
        Domain::new(self.template.carrier)
    }

    pub fn instantiate(&self, n: u64) -> Result<PiecewiseFunction> {
        if n == 0 {
            return Err(Error::Precondition("sequence indices start at 1".into()));
        }
        self.template.instantiate(n, self.p)
    }
}
