//! Positive roots of generalized polynomials `g(x) = sum c_i x^a_i`.
//!
//! Dividing by the lowest power and differentiating removes one term, so the
//! critical points of `x^{-a_0} g` are the roots of a generalized polynomial
//! with one term fewer. Between consecutive critical points the function is
//! monotone and holds at most one root, which bisection then isolates. Outside
//! `[r, R]` a single term dominates the rest and no root exists.

use super::pow;

fn eval(terms: &[(f64, f64)], x: f64) -> f64 {
    terms.iter().map(|&(c, a)| c * pow(x, a)).sum()
}

fn scale(terms: &[(f64, f64)], x: f64) -> f64 {
    terms.iter().map(|&(c, a)| (c * pow(x, a)).abs()).sum()
}

/// Zero up to rounding of the individual terms.
fn vanishes(terms: &[(f64, f64)], x: f64) -> bool {
    eval(terms, x).abs() <= 64.0 * f64::EPSILON * scale(terms, x)
}

fn normalize(terms: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut t: Vec<(f64, f64)> = terms.iter().copied().filter(|&(c, _)| c != 0.0).collect();
    t.sort_by(|a, b| a.1.total_cmp(&b.1));
    let mut out: Vec<(f64, f64)> = Vec::with_capacity(t.len());
    for (c, a) in t {
        match out.last_mut() {
            Some(last) if last.1 == a => last.0 += c,
            _ => out.push((c, a)),
        }
    }
    out.retain(|&(c, _)| c != 0.0);
    out
}

/// Interval `[r, R]` outside of which one term outweighs all others combined.
fn dominance_window(t: &[(f64, f64)]) -> (f64, f64) {
    let k = (t.len() - 1) as f64;
    let (c0, a0) = t[0];
    let (cm, am) = t[t.len() - 1];
    let mut r = f64::INFINITY;
    for &(c, a) in &t[1..] {
        r = r.min((c0.abs() / (2.0 * k * c.abs())).powf(1.0 / (a - a0)));
    }
    let mut big_r: f64 = 0.0;
    for &(c, a) in &t[..t.len() - 1] {
        big_r = big_r.max((2.0 * k * c.abs() / cm.abs()).powf(1.0 / (am - a)));
    }
    (r, big_r)
}

fn bisect(terms: &[(f64, f64)], mut lo: f64, mut hi: f64, f_lo: f64) -> f64 {
    let lo_neg = f_lo < 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = eval(terms, mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_neg {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Sorted roots of `sum c x^a` in `[lo, hi]`, where `0 <= lo < hi <= inf`.
///
/// An identically zero input has no isolated roots and returns nothing.
pub(crate) fn positive_roots(terms: &[(f64, f64)], lo: f64, hi: f64) -> Vec<f64> {
    let t = normalize(terms);
    if t.len() < 2 || !(lo < hi) {
        return Vec::new();
    }
    let (r, big_r) = dominance_window(&t);
    let a = lo.max(r);
    let b = hi.min(big_r);
    if !(a <= b) || !b.is_finite() {
        return Vec::new();
    }
    if a == b {
        return if vanishes(&t, a) { vec![a] } else { Vec::new() };
    }

    let a0 = t[0].1;
    let deriv: Vec<(f64, f64)> = t[1..].iter().map(|&(c, e)| (c * (e - a0), e - a0 - 1.0)).collect();
    let mut cuts = vec![a];
    cuts.extend(positive_roots(&deriv, a, b).into_iter().filter(|&x| x > a && x < b));
    cuts.push(b);

    let mut roots: Vec<f64> = Vec::new();
    let push = |x: f64, roots: &mut Vec<f64>| {
        if roots.last().is_none_or(|&last| x > last) {
            roots.push(x);
        }
    };
    for w in cuts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let (fu, fv) = (eval(&t, u), eval(&t, v));
        if vanishes(&t, u) {
            push(u, &mut roots);
        } else if !vanishes(&t, v) && (fu < 0.0) != (fv < 0.0) {
            push(bisect(&t, u, v, fu), &mut roots);
        }
    }
    if vanishes(&t, b) {
        push(b, &mut roots);
    }
    roots
}
