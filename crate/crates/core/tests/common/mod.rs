//! Random problem generators shared by the integration tests.
#![allow(dead_code)]

use convlab::func::{
    BreakTemplate, Expr, FunctionSequence, FunctionTemplate, Piece, PieceTemplate, PiecewiseFunction, PowerTerm, Slot,
    TermTemplate,
};
use convlab::measure::{Domain, Interval, IntervalSet};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Increasing cut points strictly inside `(lo, hi)`, at least `gap` apart.
fn cuts(rng: &mut ChaCha8Rng, lo: f64, hi: f64, count: usize, gap: f64) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..count).map(|_| rng.random_range(lo + gap..hi - gap)).collect();
        v.sort_by(f64::total_cmp);
        if v.windows(2).all(|w| w[1] - w[0] >= gap) {
            return v;
        }
    }
}

fn intervals(carrier: Interval, cuts: &[f64]) -> Vec<Interval> {
    let mut out = Vec::new();
    let mut lo = (carrier.lo(), carrier.lo_closed());
    for &c in cuts {
        out.push(Interval::new(lo.0, c, lo.1, true).unwrap());
        lo = (c, false);
    }
    out.push(Interval::new(lo.0, carrier.hi(), lo.1, carrier.hi_closed()).unwrap());
    out
}

/// A convergent-ish step sequence on `[0, 1]`:
/// `f_n = f + c n^s` on a window of length `L n^-r`, plus `eps n^-t` everywhere.
pub struct StepSequence {
    pub seq: FunctionSequence,
    pub limit: PiecewiseFunction,
    pub p: f64,
    /// Whether `f_n -> f` in measure by construction.
    pub converges: bool,
}

pub fn step_sequence(rng: &mut ChaCha8Rng, converging: bool) -> StepSequence {
    let p = [1.0, 1.5, 2.0, 3.0][rng.random_range(0..4)];
    let carrier = Interval::closed(0.0, 1.0).unwrap();
    let k = rng.random_range(1..=3usize);
    let limit_cuts = cuts(rng, 0.0, 1.0, k - 1, 0.15);
    let pieces = intervals(carrier, &limit_cuts);

    // limit terms per piece: a constant and maybe g x^e
    let limit_terms: Vec<Vec<(f64, f64)>> = (0..k)
        .map(|_| {
            let mut t = vec![(rng.random_range(-2.0..2.0), 0.0)];
            if rng.random_bool(0.5) {
                t.push((rng.random_range(-1.0..1.0), rng.random_range(1..=3) as f64));
            }
            t
        })
        .collect();
    let limit = PiecewiseFunction::new(
        Domain::new(carrier),
        pieces
            .iter()
            .zip(&limit_terms)
            .map(|(iv, t)| Piece {
                interval: *iv,
                expr: Expr::new(t.iter().map(|&(c, e)| PowerTerm::new(c, e))).unwrap(),
            })
            .collect(),
    )
    .unwrap();

    let j = rng.random_range(0..k);
    let (plo, phi) = (pieces[j].lo(), pieces[j].hi());
    let a0 = rng.random_range(plo + 0.01..plo + (phi - plo) * 0.5);
    let len = rng.random_range(0.01..(phi - a0 - 0.005).min(0.2));
    let c = rng.random_range(1.0..5.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
    let s = rng.random_range(0.0..1.0);
    let r = if converging { rng.random_range(1.0..2.0) } else { rng.random_range(0.0..2.0) };
    let uniform = rng.random_bool(0.5).then(|| {
        let t = if converging { rng.random_range(1.0..2.0) } else { rng.random_range(0.0..2.0) };
        (rng.random_range(0.01..0.5), t)
    });
    let converges = r > 0.0 && uniform.is_none_or(|(_, t)| t > 0.0);

    let base = |i: usize| -> Vec<TermTemplate> {
        let mut v: Vec<TermTemplate> =
            limit_terms[i].iter().map(|&(c, e)| TermTemplate::new(Slot::Const(c), Slot::Const(e))).collect();
        if let Some((eps, t)) = uniform {
            v.push(TermTemplate::new(Slot::power(eps, -t), Slot::Const(0.0)));
        }
        v
    };
    let mut breaks = Vec::new();
    let mut tpieces = Vec::new();
    for i in 0..k {
        if i == j {
            tpieces.push(PieceTemplate::new(base(i)));
            breaks.push(BreakTemplate { at: Slot::Const(a0), closed_left: false });
            let mut spike = base(i);
            spike.push(TermTemplate::new(Slot::power(c, s), Slot::Const(0.0)));
            tpieces.push(PieceTemplate::new(spike));
            breaks.push(BreakTemplate {
                at: Slot::law(convlab::func::SlotTerms { shift: a0, a: len, b: -r, ..Default::default() }),
                closed_left: true,
            });
        }
        tpieces.push(PieceTemplate::new(base(i)));
        if let Some(&cut) = limit_cuts.get(i) {
            breaks.push(BreakTemplate { at: Slot::Const(cut), closed_left: true });
        }
    }
    let template = FunctionTemplate { carrier, breaks, pieces: tpieces };
    StepSequence { seq: FunctionSequence::new(template, p), limit, p, converges }
}

/// A bounded piecewise function on a bounded carrier inside `[0, 5]`.
pub fn bounded_function(rng: &mut ChaCha8Rng) -> PiecewiseFunction {
    let a = rng.random_range(0.0..2.0);
    let w = rng.random_range(0.5..3.0);
    let carrier = match rng.random_range(0..3) {
        0 => Interval::closed(a, a + w),
        1 => Interval::open_closed(a, a + w),
        _ => Interval::closed_open(a, a + w),
    }
    .unwrap();
    let k = rng.random_range(1..=4usize);
    let pieces = intervals(carrier, &cuts(rng, a, a + w, k - 1, w / 10.0));
    let pieces = pieces
        .into_iter()
        .map(|iv| {
            let terms = (0..rng.random_range(1..=3))
                .map(|_| {
                    let e = match rng.random_range(0..4) {
                        0 => 0.0,
                        1 => 1.0,
                        2 => 2.0,
                        _ => rng.random_range(0.0..3.0),
                    };
                    PowerTerm::new(rng.random_range(-3.0..3.0), e)
                })
                .collect::<Vec<_>>();
            Piece { interval: iv, expr: Expr::new(terms).unwrap() }
        })
        .collect();
    PiecewiseFunction::new(Domain::new(carrier), pieces).unwrap()
}

/// A function on `(0, w]` in weak `L_p`: bounded pieces, sometimes led by
/// a singular term `g x^(-u/p)` with `0 < u <= 1`.
pub fn weak_lp_function(rng: &mut ChaCha8Rng, p: f64) -> PiecewiseFunction {
    let w = rng.random_range(0.5..3.0);
    let carrier = Interval::open_closed(0.0, w).unwrap();
    let k = rng.random_range(1..=3usize);
    let pieces = intervals(carrier, &cuts(rng, 0.0, w, k - 1, w / 10.0));
    let singular = rng.random_bool(0.6);
    let pieces = pieces
        .into_iter()
        .enumerate()
        .map(|(i, iv)| {
            let mut terms = vec![PowerTerm::new(rng.random_range(-3.0..3.0), 0.0)];
            if rng.random_bool(0.5) {
                terms.push(PowerTerm::new(rng.random_range(-2.0..2.0), rng.random_range(0.5..2.0)));
            }
            if i == 0 && singular {
                let u = rng.random_range(0.2..=1.0);
                terms.push(PowerTerm::new(rng.random_range(0.5..3.0), -u / p));
            }
            Piece { interval: iv, expr: Expr::new(terms).unwrap() }
        })
        .collect();
    PiecewiseFunction::new(Domain::new(carrier), pieces).unwrap()
}

/// A union of up to three random subintervals of the (bounded) carrier.
pub fn random_subset(rng: &mut ChaCha8Rng, domain: &Domain) -> IntervalSet {
    let (lo, hi) = (domain.carrier().lo(), domain.carrier().hi());
    if rng.random_bool(0.25) {
        return domain.as_set();
    }
    let parts = (0..rng.random_range(1..=3)).map(|_| {
        let a = rng.random_range(lo..hi);
        let b = rng.random_range(a..=hi);
        Interval::new(a, b, rng.random_bool(0.5), rng.random_bool(0.5)).unwrap_or(Interval::point(a).unwrap())
    });
    IntervalSet::from_intervals(parts).intersect(&domain.as_set())
}
