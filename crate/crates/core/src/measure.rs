//! Intervals, finite unions of intervals and their Lebesgue measure.
//!
//! Every [`IntervalSet`] is kept in canonical form: parts sorted by their
//! lower endpoint, pairwise disjoint, and never mergeable. Two sets that
//! describe the same points therefore compare equal with `==`.
//!
//! Endpoint closedness is tracked exactly because superlevel sets are
//! defined by a closed condition (`|f| >= delta`) and their complements are
//! used as witness sets. [`IntervalSet::measure`] ignores closedness.

use std::cmp::Ordering;
use std::fmt;

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Serde helpers encoding `f64::INFINITY` as the string `"inf"` and
/// `f64::NEG_INFINITY` as `"-inf"`. Finite values are plain JSON numbers.
pub mod ext_real {
    use schemars::JsonSchema;
    use serde::de::{self, Deserializer, Visitor};
    use serde::Serializer;
    use std::fmt;

    /// Schema stand-in for an extended real.
    #[derive(JsonSchema)]
    #[serde(untagged)]
    #[allow(dead_code)]
    pub enum ExtReal {
        Finite(f64),
        Infinite(InfiniteTag),
    }

    #[derive(JsonSchema)]
    #[allow(dead_code)]
    pub enum InfiniteTag {
        #[serde(rename = "inf")]
        Positive,
        #[serde(rename = "-inf")]
        Negative,
    }

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_nan() {
            Err(serde::ser::Error::custom("NaN is not an extended real"))
        } else if *v == f64::INFINITY {
            s.serialize_str("inf")
        } else if *v == f64::NEG_INFINITY {
            s.serialize_str("-inf")
        } else {
            s.serialize_f64(*v)
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        struct ExtVisitor;
        impl Visitor<'_> for ExtVisitor {
            type Value = f64;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or one of \"inf\", \"-inf\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<f64, E> {
                Ok(v)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<f64, E> {
                Ok(v as f64)
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<f64, E> {
                match v {
                    "inf" | "+inf" => Ok(f64::INFINITY),
                    "-inf" => Ok(f64::NEG_INFINITY),
                    other => Err(E::custom(format!("unrecognised extended real {other:?}"))),
                }
            }
        }
        d.deserialize_any(ExtVisitor)
    }

    /// Same encoding for a list of extended reals.
    pub mod vec {
        use serde::ser::SerializeSeq;
        use serde::{Deserialize, Deserializer, Serializer};

        #[derive(serde::Serialize, Deserialize)]
        #[serde(transparent)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(v.len()))?;
            for x in v {
                seq.serialize_element(&Wrap(*x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
            let raw: Vec<Wrap> = Vec::deserialize(d)?;
            Ok(raw.into_iter().map(|w| w.0).collect())
        }
    }

    /// Same encoding for an optional extended real (`null` when absent).
    pub mod opt {
        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        #[derive(Serialize, Deserialize)]
        #[serde(transparent)]
        struct Wrap(#[serde(with = "super")] f64);

        pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
            v.map(Wrap).serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
            Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
        }
    }
}

#[derive(Deserialize, JsonSchema)]
struct IntervalRepr {
    #[serde(with = "ext_real")]
    #[schemars(with = "ext_real::ExtReal")]
    lo: f64,
    #[serde(with = "ext_real")]
    #[schemars(with = "ext_real::ExtReal")]
    hi: f64,
    lo_closed: bool,
    hi_closed: bool,
}

impl TryFrom<IntervalRepr> for Interval {
    type Error = Error;
    fn try_from(r: IntervalRepr) -> Result<Self> {
        Interval::new(r.lo, r.hi, r.lo_closed, r.hi_closed)
    }
}

/// A non-empty interval of the extended real line.
///
/// A degenerate interval `[a, a]` is allowed and has measure zero. Infinite
/// endpoints are always open.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(try_from = "IntervalRepr")]
pub struct Interval {
    #[serde(with = "ext_real")]
    #[schemars(with = "ext_real::ExtReal")]
    lo: f64,
    #[serde(with = "ext_real")]
    #[schemars(with = "ext_real::ExtReal")]
    hi: f64,
    lo_closed: bool,
    hi_closed: bool,
}

impl Interval {
    pub fn new(lo: f64, hi: f64, lo_closed: bool, hi_closed: bool) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() {
            return Err(Error::InvalidInterval("NaN endpoint".into()));
        }
        if (lo.is_infinite() && lo_closed) || (hi.is_infinite() && hi_closed) {
            return Err(Error::InvalidInterval(format!(
                "infinite endpoint must be open (lo = {lo}, hi = {hi})"
            )));
        }
        if lo == f64::INFINITY || hi == f64::NEG_INFINITY {
            return Err(Error::InvalidInterval(format!("empty interval ({lo}, {hi})")));
        }
        match lo.partial_cmp(&hi) {
            Some(Ordering::Less) => {}
            Some(Ordering::Equal) if lo_closed && hi_closed => {}
            _ => {
                return Err(Error::InvalidInterval(format!(
                    "empty interval {}{lo}, {hi}{}",
                    if lo_closed { '[' } else { '(' },
                    if hi_closed { ']' } else { ')' }
                )))
            }
        }
        // normalise -0.0 so structural equality matches point-set equality
        Ok(Self { lo: lo + 0.0, hi: hi + 0.0, lo_closed, hi_closed })
    }

    pub fn closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    pub fn open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, false)
    }

    pub fn closed_open(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, true, false)
    }

    pub fn open_closed(lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, false, true)
    }

    pub fn point(x: f64) -> Result<Self> {
        Self::new(x, x, true, true)
    }

    /// `[lo, +inf)`
    pub fn at_least(lo: f64) -> Result<Self> {
        Self::new(lo, f64::INFINITY, true, false)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn lo_closed(&self) -> bool {
        self.lo_closed
    }

    pub fn hi_closed(&self) -> bool {
        self.hi_closed
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite()
    }

    pub fn is_degenerate(&self) -> bool {
        self.lo == self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn contains(&self, x: f64) -> bool {
        let above = if self.lo_closed { x >= self.lo } else { x > self.lo };
        let below = if self.hi_closed { x <= self.hi } else { x < self.hi };
        above && below
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lo, lo_closed) = match self.lo.partial_cmp(&other.lo) {
            Some(Ordering::Greater) => (self.lo, self.lo_closed),
            Some(Ordering::Less) => (other.lo, other.lo_closed),
            _ => (self.lo, self.lo_closed && other.lo_closed),
        };
        let (hi, hi_closed) = match self.hi.partial_cmp(&other.hi) {
            Some(Ordering::Less) => (self.hi, self.hi_closed),
            Some(Ordering::Greater) => (other.hi, other.hi_closed),
            _ => (self.hi, self.hi_closed && other.hi_closed),
        };
        Interval::new(lo, hi, lo_closed, hi_closed).ok()
    }

    pub fn is_subset_of(&self, other: &Interval) -> bool {
        self.intersect(other).as_ref() == Some(self)
    }

    /// Order by lower endpoint, closed lower endpoints first.
    fn cmp_lo(&self, other: &Interval) -> Ordering {
        self.lo
            .partial_cmp(&other.lo)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.lo_closed.cmp(&self.lo_closed))
    }

    /// Order by upper endpoint, open upper endpoints first.
    fn cmp_hi(&self, other: &Interval) -> Ordering {
        self.hi
            .partial_cmp(&other.hi)
            .unwrap_or(Ordering::Equal)
            .then_with(|| self.hi_closed.cmp(&other.hi_closed))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}{}, {}{}",
            if self.lo_closed { '[' } else { '(' },
            self.lo,
            self.hi,
            if self.hi_closed { ']' } else { ')' }
        )
    }
}

#[derive(Deserialize, JsonSchema)]
struct IntervalSetRepr {
    parts: Vec<Interval>,
}

impl From<IntervalSetRepr> for IntervalSet {
    fn from(r: IntervalSetRepr) -> Self {
        IntervalSet::from_intervals(r.parts)
    }
}

/// A finite union of intervals in canonical form.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(from = "IntervalSetRepr")]
pub struct IntervalSet {
    parts: Vec<Interval>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self { parts: Vec::new() }
    }

    pub fn from_interval(i: Interval) -> Self {
        Self { parts: vec![i] }
    }

    /// Builds the canonical union of arbitrary (possibly overlapping) intervals.
    pub fn from_intervals<I: IntoIterator<Item = Interval>>(items: I) -> Self {
        let mut items: Vec<Interval> = items.into_iter().collect();
        items.sort_by(Interval::cmp_lo);
        let mut parts: Vec<Interval> = Vec::with_capacity(items.len());
        for next in items {
            match parts.last_mut() {
                Some(cur)
                    if next.lo < cur.hi
                        || (next.lo == cur.hi && (cur.hi_closed || next.lo_closed)) =>
                {
                    if next.cmp_hi(cur) == Ordering::Greater {
                        cur.hi = next.hi;
                        cur.hi_closed = next.hi_closed;
                    }
                }
                _ => parts.push(next),
            }
        }
        Self { parts }
    }

    pub fn parts(&self) -> &[Interval] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_bounded(&self) -> bool {
        self.parts.iter().all(Interval::is_bounded)
    }

    /// Lebesgue measure; `+inf` when any part is unbounded.
    pub fn measure(&self) -> f64 {
        self.parts.iter().map(Interval::length).sum()
    }

    pub fn contains(&self, x: f64) -> bool {
        self.parts.iter().any(|i| i.contains(x))
    }

    /// Number of finite endpoints, counting a degenerate part once.
    pub fn boundary_points(&self) -> usize {
        self.parts
            .iter()
            .map(|i| {
                if i.is_degenerate() {
                    1
                } else {
                    usize::from(i.lo.is_finite()) + usize::from(i.hi.is_finite())
                }
            })
            .sum()
    }

    pub fn intersect(&self, other: &IntervalSet) -> IntervalSet {
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < self.parts.len() && j < other.parts.len() {
            let (a, b) = (&self.parts[i], &other.parts[j]);
            if let Some(c) = a.intersect(b) {
                out.push(c);
            }
            if a.cmp_hi(b) == Ordering::Greater {
                j += 1;
            } else {
                i += 1;
            }
        }
        IntervalSet::from_intervals(out)
    }

    pub fn intersect_interval(&self, other: &Interval) -> IntervalSet {
        self.intersect(&IntervalSet::from_interval(*other))
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        IntervalSet::from_intervals(self.parts.iter().chain(other.parts.iter()).copied())
    }

    /// Complement relative to the whole real line.
    pub fn complement_in_line(&self) -> IntervalSet {
        let mut out = Vec::with_capacity(self.parts.len() + 1);
        let mut prev = (f64::NEG_INFINITY, false);
        for p in &self.parts {
            if let Ok(gap) = Interval::new(prev.0, p.lo, !prev.1 && prev.0.is_finite(), !p.lo_closed)
            {
                out.push(gap);
            }
            prev = (p.hi, p.hi_closed);
        }
        if let Ok(gap) = Interval::new(prev.0, f64::INFINITY, !prev.1 && prev.0.is_finite(), false) {
            out.push(gap);
        }
        IntervalSet { parts: out }
    }

    /// `self \ other`
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        self.intersect(&other.complement_in_line())
    }

    pub fn is_subset_of(&self, other: &IntervalSet) -> bool {
        self.intersect(other) == *self
    }

    pub fn is_within(&self, domain: &Domain) -> bool {
        self.is_subset_of(&IntervalSet::from_interval(domain.carrier))
    }

    /// Complement relative to `within`; rejects sets that leave the domain.
    pub fn complement(&self, within: &Domain) -> Result<IntervalSet> {
        if !self.is_within(within) {
            return Err(Error::NotContained {
                set: self.to_string(),
                domain: within.carrier.to_string(),
            });
        }
        Ok(self.complement_in_line().intersect_interval(&within.carrier))
    }
}

impl From<Interval> for IntervalSet {
    fn from(i: Interval) -> Self {
        IntervalSet::from_interval(i)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.parts.is_empty() {
            return f.write_str("{}");
        }
        for (k, p) in self.parts.iter().enumerate() {
            if k > 0 {
                f.write_str(" U ")?;
            }
            write!(f, "{p}")?;
        }
        Ok(())
    }
}

#[derive(Deserialize, JsonSchema)]
struct DomainRepr {
    carrier: Interval,
}

impl From<DomainRepr> for Domain {
    fn from(r: DomainRepr) -> Self {
        Domain::new(r.carrier)
    }
}

/// The ambient space: an interval with Lebesgue measure.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
#[serde(from = "DomainRepr")]
pub struct Domain {
    carrier: Interval,
    #[serde(with = "ext_real")]
    #[schemars(with = "ext_real::ExtReal")]
    total_measure: f64,
}

impl Domain {
    pub fn new(carrier: Interval) -> Self {
        Self { carrier, total_measure: carrier.length() }
    }

    pub fn carrier(&self) -> &Interval {
        &self.carrier
    }

    pub fn total_measure(&self) -> f64 {
        self.total_measure
    }

    pub fn is_finite(&self) -> bool {
        self.total_measure.is_finite()
    }

    pub fn as_set(&self) -> IntervalSet {
        IntervalSet::from_interval(self.carrier)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(parts: &[Interval]) -> IntervalSet {
        IntervalSet::from_intervals(parts.iter().copied())
    }

    #[test]
    fn measure_examples() {
        assert_eq!(set(&[Interval::open(0.0, 1.0).unwrap()]).measure(), 1.0);
        let two = set(&[Interval::open(0.0, 0.5).unwrap(), Interval::open(0.75, 1.0).unwrap()]);
        assert_eq!(two.measure(), 0.75);
        assert_eq!(set(&[Interval::at_least(1.0).unwrap()]).measure(), f64::INFINITY);
        assert_eq!(IntervalSet::empty().measure(), 0.0);
    }

    #[test]
    fn rejects_bad_intervals() {
        assert!(Interval::new(1.0, 0.0, true, true).is_err());
        assert!(Interval::new(0.5, 0.5, true, false).is_err());
        assert!(Interval::new(0.0, f64::INFINITY, true, true).is_err());
        assert!(Interval::new(f64::NAN, 1.0, true, true).is_err());
        assert!(Interval::point(0.5).is_ok());
    }

    #[test]
    fn complement_examples() {
        let x = Domain::new(Interval::closed(0.0, 1.0).unwrap());
        let s = set(&[Interval::open_closed(0.25, 1.0).unwrap()]);
        assert_eq!(s.complement(&x).unwrap(), set(&[Interval::closed(0.0, 0.25).unwrap()]));
        assert_eq!(x.as_set().complement(&x).unwrap(), IntervalSet::empty());

        let half_line = Domain::new(Interval::at_least(1.0).unwrap());
        assert_eq!(IntervalSet::empty().complement(&half_line).unwrap(), half_line.as_set());
    }

    #[test]
    fn complement_rejects_escaping_sets() {
        let x = Domain::new(Interval::closed(0.0, 1.0).unwrap());
        let s = set(&[Interval::closed(0.5, 2.0).unwrap()]);
        assert!(matches!(s.complement(&x), Err(Error::NotContained { .. })));
    }

    #[test]
    fn intersect_examples() {
        let a = set(&[Interval::closed(0.0, 0.5).unwrap()]);
        let b = set(&[Interval::closed(0.25, 1.0).unwrap()]);
        assert_eq!(a.intersect(&b), set(&[Interval::closed(0.25, 0.5).unwrap()]));
        assert_eq!(a.intersect(&IntervalSet::empty()), IntervalSet::empty());

        let c = set(&[Interval::closed(0.0, 0.25).unwrap()]);
        let d = set(&[Interval::open_closed(0.25, 1.0).unwrap()]);
        assert!(c.intersect(&d).is_empty());
    }

    #[test]
    fn canonical_merging() {
        // [0,1) and [1,2] touch at a closed endpoint: one part
        let s = set(&[Interval::closed_open(0.0, 1.0).unwrap(), Interval::closed(1.0, 2.0).unwrap()]);
        assert_eq!(s.parts().len(), 1);
        // (0,1) and (1,2) leave the point 1 out: two parts
        let t = set(&[Interval::open(0.0, 1.0).unwrap(), Interval::open(1.0, 2.0).unwrap()]);
        assert_eq!(t.parts().len(), 2);
        // a point filling the gap merges everything
        let u = t.union(&set(&[Interval::point(1.0).unwrap()]));
        assert_eq!(u, set(&[Interval::open(0.0, 2.0).unwrap()]));
    }

    #[test]
    fn punctured_complement_is_a_point() {
        let x = Domain::new(Interval::closed(0.0, 2.0).unwrap());
        let t = set(&[Interval::closed_open(0.0, 1.0).unwrap(), Interval::open_closed(1.0, 2.0).unwrap()]);
        assert_eq!(t.complement(&x).unwrap(), set(&[Interval::point(1.0).unwrap()]));
    }

    #[test]
    fn json_encoding_uses_inf_strings() {
        let s = set(&[Interval::at_least(1.0).unwrap()]);
        let js = serde_json::to_string(&s).unwrap();
        assert_eq!(js, r#"{"parts":[{"lo":1.0,"hi":"inf","lo_closed":true,"hi_closed":false}]}"#);
        let back: IntervalSet = serde_json::from_str(&js).unwrap();
        assert_eq!(back, s);

        let parsed: IntervalSet = serde_json::from_str(
            r#"{"parts":[{"lo":0,"hi":0.25,"lo_closed":true,"hi_closed":true}]}"#,
        )
        .unwrap();
        assert_eq!(parsed, set(&[Interval::closed(0.0, 0.25).unwrap()]));

        let bad = serde_json::from_str::<IntervalSet>(
            r#"{"parts":[{"lo":0,"hi":"inf","lo_closed":true,"hi_closed":true}]}"#,
        );
        assert!(bad.is_err());
    }
}
