use super::{positive_roots, Expr, PiecewiseFunction};
use crate::error::{Error, Result};
use crate::measure::{Interval, IntervalSet};

/// `{x : |f(x)| >= delta}` as a canonical interval set.
///
/// Pieces on which `|f| = delta` identically are included whole.
pub fn superlevel_set(f: &PiecewiseFunction, delta: f64) -> Result<IntervalSet> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::Precondition(format!("superlevel threshold must be positive, got {delta}")));
    }
    let mut parts = Vec::new();
    for piece in f.pieces() {
        piece_superlevel(&piece.interval, &piece.expr, delta, &mut parts);
    }
    Ok(IntervalSet::from_intervals(parts))
}

pub(crate) fn piece_superlevel(iv: &Interval, expr: &Expr, delta: f64, out: &mut Vec<Interval>) {
    if expr.is_zero() {
        return;
    }
    if iv.is_degenerate() {
        if expr.eval(iv.lo()).abs() >= delta {
            out.push(*iv);
        }
        return;
    }
    if let Some(t) = expr.single() {
        if t.exponent == 0.0 {
            if t.coeff.abs() >= delta {
                out.push(*iv);
            }
            return;
        }
        if iv.lo() >= 0.0 {
            // |c| x^a >= delta  <=>  x >= s (a > 0)  or  x <= s (a < 0)
            let s = (delta / t.coeff.abs()).powf(1.0 / t.exponent);
            let half_line = if t.exponent > 0.0 {
                Interval::new(s, f64::INFINITY, true, false)
            } else {
                Interval::new(f64::NEG_INFINITY, s, false, true)
            };
            if let Some(hit) = half_line.ok().and_then(|h| h.intersect(iv)) {
                out.push(hit);
            }
            return;
        }
    }

    // Negative half of the piece, through x -> -x (integer exponents only).
    if iv.lo() < 0.0 {
        let neg_hi = iv.hi().min(0.0);
        let neg_hi_closed = if iv.hi() <= 0.0 { iv.hi_closed() } else { true };
        if let Ok(mirror) = Interval::new(-neg_hi, -iv.lo(), neg_hi_closed, iv.lo_closed()) {
            let mut mirrored = Vec::new();
            positive_superlevel(&mirror, &expr.reflect(), delta, &mut mirrored);
            for m in mirrored {
                out.push(
                    Interval::new(-m.hi(), -m.lo(), m.hi_closed(), m.lo_closed())
                        .expect("reflection of a valid interval"),
                );
            }
        }
    }
    if iv.hi() > 0.0 || (iv.hi() == 0.0 && iv.lo() >= 0.0) {
        let pos = if iv.lo() < 0.0 {
            Interval::new(0.0, iv.hi(), true, iv.hi_closed()).ok()
        } else {
            Some(*iv)
        };
        if let Some(pos) = pos {
            positive_superlevel(&pos, expr, delta, out);
        }
    }
}

/// General case on an interval inside `[0, inf)`.
fn positive_superlevel(iv: &Interval, expr: &Expr, delta: f64, out: &mut Vec<Interval>) {
    if iv.is_degenerate() {
        if expr.eval(iv.lo()).abs() >= delta {
            out.push(*iv);
        }
        return;
    }
    let (lo, hi) = (iv.lo(), iv.hi());
    let mut terms = expr.as_pairs();
    terms.push((-delta, 0.0));
    let mut cuts = positive_roots(&terms, lo, hi);
    terms.pop();
    terms.push((delta, 0.0));
    cuts.extend(positive_roots(&terms, lo, hi));
    cuts.retain(|&x| x > lo && x < hi);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();

    let mut bounds = Vec::with_capacity(cuts.len() + 2);
    bounds.push(lo);
    bounds.extend(cuts);
    bounds.push(hi);
    for w in bounds.windows(2) {
        let (u, v) = (w[0], w[1]);
        let probe = if v.is_finite() { 0.5 * (u + v) } else { (2.0 * u).max(u + 1.0) };
        if expr.eval(probe).abs() >= delta {
            let seg = Interval::new(u, v, true, v.is_finite()).expect("ordered cut points");
            if let Some(hit) = seg.intersect(iv) {
                out.push(hit);
            }
        }
    }
}
