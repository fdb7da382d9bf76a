//! Brute-force estimators used to cross-check the analytic paths in tests
//! and from the command line. Nothing in the checkers depends on them.
//!
//! The Monte-Carlo stream is ChaCha8 seeded from a 64-bit seed. Samples are
//! drawn in fixed chunks, chunk `i` reading ChaCha stream `i`, so the
//! estimate is the same whatever the number of threads.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::PiecewiseFunction;
use crate::measure::{Interval, IntervalSet};
use crate::par::par_map;

pub const MIN_GRID_CELLS: u64 = 1000;
pub const MIN_MC_SAMPLES: u64 = 10_000;
const MC_CHUNK: u64 = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct GridEstimate {
    pub value: f64,
    /// Cell width.
    pub resolution: f64,
    pub cells: u64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct McEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: u64,
    pub seed: u64,
}

/// Measure of `{|f| >= delta}` inside `window` from a midpoint grid.
pub fn grid_measure(f: &PiecewiseFunction, delta: f64, cells: u64, window: &Interval) -> Result<GridEstimate> {
    if !window.is_bounded() {
        return Err(Error::Precondition(format!("grid window {window} must be bounded")));
    }
    if cells < MIN_GRID_CELLS {
        return Err(Error::Precondition(format!("at least {MIN_GRID_CELLS} cells are required, got {cells}")));
    }
    let h = window.length() / cells as f64;
    let mut hits = 0u64;
    for i in 0..cells {
        let x = window.lo() + (i as f64 + 0.5) * h;
        if f.evaluate(x)?.abs() >= delta {
            hits += 1;
        }
    }
    Ok(GridEstimate { value: hits as f64 * h, resolution: h, cells })
}

/// `int_B |f|^p` by uniform sampling over the bounded set `B`.
pub fn mc_integral(f: &PiecewiseFunction, p: f64, b: &IntervalSet, samples: u64, seed: u64) -> Result<McEstimate> {
    if !b.is_bounded() {
        return Err(Error::Precondition("the Monte-Carlo oracle only integrates over bounded sets".into()));
    }
    if samples < MIN_MC_SAMPLES {
        return Err(Error::Precondition(format!("at least {MIN_MC_SAMPLES} samples are required, got {samples}")));
    }
    if !b.is_within(f.domain()) {
        return Err(Error::NotContained { set: b.to_string(), domain: f.domain().carrier().to_string() });
    }
    let total = b.measure();
    if total == 0.0 {
        return Ok(McEstimate { value: 0.0, stderr: 0.0, samples, seed });
    }
    let parts: Vec<Interval> = b.parts().iter().copied().filter(|i| !i.is_degenerate()).collect();
    let mut cumulative = Vec::with_capacity(parts.len());
    let mut acc = 0.0;
    for part in &parts {
        acc += part.length();
        cumulative.push(acc);
    }

    let chunks: Vec<u64> = (0..samples.div_ceil(MC_CHUNK)).collect();
    let sums = par_map(&chunks, |&c| -> Result<(f64, f64)> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(c);
        let count = MC_CHUNK.min(samples - c * MC_CHUNK);
        let (mut s1, mut s2) = (0.0, 0.0);
        for _ in 0..count {
            let x = loop {
                let t = rng.random::<f64>() * acc;
                let i = cumulative.partition_point(|&c| c <= t).min(parts.len() - 1);
                let part = &parts[i];
                let x = part.lo() + rng.random::<f64>() * part.length();
                if part.contains(x) {
                    break x;
                }
            };
            let y = f.evaluate(x)?.abs().powf(p);
            s1 += y;
            s2 += y * y;
        }
        Ok((s1, s2))
    });
    let (mut s1, mut s2) = (0.0, 0.0);
    for r in sums {
        let (a, b) = r?;
        s1 += a;
        s2 += b;
    }
    let n = samples as f64;
    let mean = s1 / n;
    let var = ((s2 / n - mean * mean) * n / (n - 1.0)).max(0.0);
    Ok(McEstimate { value: total * mean, stderr: total * (var / n).sqrt(), samples, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::{Expr, Piece};
    use crate::measure::Domain;

    fn unit() -> Domain {
        Domain::new(Interval::closed(0.0, 1.0).unwrap())
    }

    fn spike4() -> PiecewiseFunction {
        PiecewiseFunction::new(
            unit(),
            vec![
                Piece { interval: Interval::closed(0.0, 0.25).unwrap(), expr: Expr::constant(2.0).unwrap() },
                Piece { interval: Interval::open_closed(0.25, 1.0).unwrap(), expr: Expr::zero() },
            ],
        )
        .unwrap()
    }

    #[test]
    fn grid_examples() {
        let w = Interval::closed(0.0, 1.0).unwrap();
        let g = grid_measure(&spike4(), 1.0, 100_000, &w).unwrap();
        assert!((g.value - 0.25).abs() <= 2e-5);
        assert_eq!(grid_measure(&PiecewiseFunction::zero(unit()), 0.5, 1000, &w).unwrap().value, 0.0);
        assert!(grid_measure(&spike4(), 1.0, 999, &w).is_err());
    }

    #[test]
    fn mc_examples() {
        let all = unit().as_set();
        let r = mc_integral(&spike4(), 2.0, &all, 1_000_000, 7).unwrap();
        assert!((r.value - 1.0).abs() <= 3.0 * r.stderr, "{r:?}");
        let z = mc_integral(&PiecewiseFunction::zero(unit()), 2.0, &all, 10_000, 7).unwrap();
        assert_eq!((z.value, z.stderr), (0.0, 0.0));
        let x = PiecewiseFunction::from_expr(unit(), Expr::monomial(1.0, 1.0).unwrap()).unwrap();
        let r = mc_integral(&x, 1.0, &all, 100_000, 1).unwrap();
        assert!((r.value - 0.5).abs() <= 3.0 * r.stderr);
    }

    #[test]
    fn mc_is_deterministic() {
        let all = unit().as_set();
        let a = mc_integral(&spike4(), 1.5, &all, 200_000, 42).unwrap();
        let b = mc_integral(&spike4(), 1.5, &all, 200_000, 42).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        let c = mc_integral(&spike4(), 1.5, &all, 200_000, 43).unwrap();
        assert_ne!(a.value, c.value);
    }

    #[test]
    fn mc_rejects_unbounded() {
        let d = Domain::new(Interval::at_least(1.0).unwrap());
        let f = PiecewiseFunction::constant(d, 1.0).unwrap();
        assert!(mc_integral(&f, 1.0, &d.as_set(), 10_000, 0).is_err());
    }
}
