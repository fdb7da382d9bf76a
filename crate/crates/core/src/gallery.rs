//! The four reference examples with their closed-form quantities.
//!
//! * `E1`: `f_n = n^{1/p}` on `[0, 1/n]`, zero on `(1/n, 1]`; converges in
//!   measure and asymptotically in `L_p`, but not in weak `L_p`.
//! * `E2`: `f_n(x) = (n x)^{-1/p}` on `[1, inf)`; converges in weak `L_p`
//!   but not asymptotically in `L_p`.
//! * `E3`: `f(x) = x^{-2}` on `(0, 1)`; almost in `L_p`, not in weak `L_p`.
//! * `E4`: `f(x) = x^{-1/p}` on `[1, inf)`; in weak `L_p`, not almost in `L_p`.

use std::fmt;
use std::str::FromStr;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::{
    BreakTemplate, Expr, FunctionSequence, FunctionTemplate, PieceTemplate, PiecewiseFunction, Slot, TermTemplate,
};
use crate::measure::{Domain, Interval};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, JsonSchema)]
pub enum GalleryId {
    E1,
    E2,
    E3,
    E4,
}

impl GalleryId {
    pub const ALL: [GalleryId; 4] = [GalleryId::E1, GalleryId::E2, GalleryId::E3, GalleryId::E4];

    pub fn is_sequence(self) -> bool {
        matches!(self, GalleryId::E1 | GalleryId::E2)
    }
}

impl fmt::Display for GalleryId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

impl FromStr for GalleryId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "E1" => Ok(GalleryId::E1),
            "E2" => Ok(GalleryId::E2),
            "E3" => Ok(GalleryId::E3),
            "E4" => Ok(GalleryId::E4),
            _ => Err(Error::UnknownGallery(s.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(tag = "kind", content = "value")]
pub enum GalleryObject {
    Sequence(FunctionSequence),
    Function(PiecewiseFunction),
}

/// Known answers for an item.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Expected {
    /// Closed form of `F_n(delta) = delta^p mu({|f_n| >= delta})`.
    pub profile: String,
    /// Quasinorm of `f_n` (sequences) or `f`; `None` when infinite.
    pub quasinorm: Option<String>,
    pub in_measure_to_zero: Option<bool>,
    pub alpha_p_to_zero: Option<bool>,
    pub weak_lp_to_zero: Option<bool>,
    pub in_weak_lp: Option<bool>,
    pub in_almost_lp: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GalleryItem {
    pub id: GalleryId,
    pub p: f64,
    pub object: GalleryObject,
    pub expected: Expected,
}

impl GalleryItem {
    pub fn sequence(&self) -> Option<&FunctionSequence> {
        match &self.object {
            GalleryObject::Sequence(s) => Some(s),
            GalleryObject::Function(_) => None,
        }
    }

    pub fn function(&self) -> Option<&PiecewiseFunction> {
        match &self.object {
            GalleryObject::Function(f) => Some(f),
            GalleryObject::Sequence(_) => None,
        }
    }

    pub fn domain(&self) -> Domain {
        match &self.object {
            GalleryObject::Sequence(s) => s.domain(),
            GalleryObject::Function(f) => *f.domain(),
        }
    }

    /// The limit the examples are compared against: zero.
    pub fn limit(&self) -> PiecewiseFunction {
        PiecewiseFunction::zero(self.domain())
    }

    /// `f_n` for sequences, `f` itself for single functions.
    pub fn instance(&self, n: u64) -> Result<PiecewiseFunction> {
        match &self.object {
            GalleryObject::Sequence(s) => s.instantiate(n),
            GalleryObject::Function(f) => Ok(f.clone()),
        }
    }
}

fn interval(i: std::result::Result<Interval, Error>) -> Interval {
    i.expect("gallery intervals are valid")
}

pub fn build(id: GalleryId, p: f64) -> Result<GalleryItem> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Precondition(format!("p must be a finite number >= 1, got {p}")));
    }
    let (object, expected) = match id {
        GalleryId::E1 => {
            let template = FunctionTemplate {
                carrier: interval(Interval::closed(0.0, 1.0)),
                breaks: vec![BreakTemplate { at: Slot::power(1.0, -1.0), closed_left: true }],
                pieces: vec![
                    PieceTemplate::new(vec![TermTemplate::new(Slot::power_over_p(1.0, 1.0), Slot::Const(0.0))]),
                    PieceTemplate::zero(),
                ],
            };
            (
                GalleryObject::Sequence(FunctionSequence::new(template, p)),
                Expected {
                    profile: "delta^p / n for delta <= n^(1/p), else 0".into(),
                    quasinorm: Some("1".into()),
                    in_measure_to_zero: Some(true),
                    alpha_p_to_zero: Some(true),
                    weak_lp_to_zero: Some(false),
                    in_weak_lp: None,
                    in_almost_lp: None,
                },
            )
        }
        GalleryId::E2 => {
            let template = FunctionTemplate {
                carrier: interval(Interval::at_least(1.0)),
                breaks: vec![],
                pieces: vec![PieceTemplate::new(vec![TermTemplate::new(
                    Slot::power_over_p(1.0, -1.0),
                    Slot::over_p(-1.0),
                )])],
            };
            (
                GalleryObject::Sequence(FunctionSequence::new(template, p)),
                Expected {
                    profile: "(1 - n delta^p) / n for delta <= n^(-1/p), else 0".into(),
                    quasinorm: Some("1/n".into()),
                    in_measure_to_zero: Some(true),
                    alpha_p_to_zero: Some(false),
                    weak_lp_to_zero: Some(true),
                    in_weak_lp: None,
                    in_almost_lp: None,
                },
            )
        }
        GalleryId::E3 => {
            let d = Domain::new(interval(Interval::open(0.0, 1.0)));
            (
                GalleryObject::Function(PiecewiseFunction::from_expr(d, Expr::monomial(1.0, -2.0)?)?),
                Expected {
                    profile: "delta^(p - 1/2) for delta >= 1, delta^p for delta < 1".into(),
                    quasinorm: None,
                    in_measure_to_zero: None,
                    alpha_p_to_zero: None,
                    weak_lp_to_zero: None,
                    in_weak_lp: Some(false),
                    in_almost_lp: Some(true),
                },
            )
        }
        GalleryId::E4 => {
            let d = Domain::new(interval(Interval::at_least(1.0)));
            (
                GalleryObject::Function(PiecewiseFunction::from_expr(d, Expr::monomial(1.0, -1.0 / p)?)?),
                Expected {
                    profile: "1 - delta^p for delta <= 1, else 0".into(),
                    quasinorm: Some("1".into()),
                    in_measure_to_zero: None,
                    alpha_p_to_zero: None,
                    weak_lp_to_zero: None,
                    in_weak_lp: Some(true),
                    in_almost_lp: Some(false),
                },
            )
        }
    };
    Ok(GalleryItem { id, p, object, expected })
}

/// Closed form of `delta^p mu({|f_n| >= delta})` for `E1` and `E2`.
#[allow(non_snake_case)]
pub fn expected_F(item: &GalleryItem, n: u64, delta: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::Precondition("sequence indices start at 1".into()));
    }
    if !(delta > 0.0) {
        return Err(Error::Precondition(format!("delta must be positive, got {delta}")));
    }
    let (nf, p) = (n as f64, item.p);
    let dp = delta.powf(p);
    match item.id {
        GalleryId::E1 => Ok(if delta <= nf.powf(1.0 / p) { dp / nf } else { 0.0 }),
        GalleryId::E2 => Ok(if delta <= nf.powf(-1.0 / p) { (1.0 - nf * dp) / nf } else { 0.0 }),
        other => Err(Error::NoClosedForm(other.to_string())),
    }
}

/// Closed-form profile of the single functions `E3` and `E4`.
pub fn expected_profile(item: &GalleryItem, delta: f64) -> Result<f64> {
    let p = item.p;
    match item.id {
        GalleryId::E3 => Ok(if delta >= 1.0 { delta.powf(p - 0.5) } else { delta.powf(p) }),
        GalleryId::E4 => Ok(if delta <= 1.0 { 1.0 - delta.powf(p) } else { 0.0 }),
        other => Err(Error::NoClosedForm(other.to_string())),
    }
}
