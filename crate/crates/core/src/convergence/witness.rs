//! Witness sets `B_k` for asymptotic L_p-convergence.

use schemars::JsonSchema;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::{lp_integral_on, superlevel_set, FunctionSequence, PiecewiseFunction};
use crate::measure::{ext_real, Domain, IntervalSet};
use crate::par::par_map;

/// Marks a synthesized schedule that stopped before the horizon ran out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct Truncation {
    /// The level `n` for which no threshold `N_n` was found.
    pub level: u64,
    pub reason: String,
}

/// Sets `B_1, ..., B_H`; `sets[k - 1]` is `B_k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, JsonSchema)]
pub struct WitnessSequence {
    pub domain: Domain,
    pub sets: Vec<IntervalSet>,
    #[serde(with = "ext_real::vec")]
    #[schemars(with = "Vec<ext_real::ExtReal>")]
    pub complement_measures: Vec<f64>,
    /// `lambda_schedule[k - 1] = lambda_k`, present when synthesized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda_schedule: Option<Vec<f64>>,
    /// `thresholds[n - 1] = N_n`, present when synthesized.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thresholds: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truncation: Option<Truncation>,
}

impl WitnessSequence {
    pub fn from_sets(domain: Domain, sets: Vec<IntervalSet>) -> Result<Self> {
        let complement_measures = sets
            .iter()
            .map(|b| b.complement(&domain).map(|c| c.measure()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { domain, sets, complement_measures, lambda_schedule: None, thresholds: None, truncation: None })
    }

    /// `B_k = make(k)` for `k = 1..=horizon`.
    pub fn from_fn(domain: Domain, horizon: u64, make: impl Fn(u64) -> Result<IntervalSet>) -> Result<Self> {
        let sets = (1..=horizon).map(make).collect::<Result<Vec<_>>>()?;
        Self::from_sets(domain, sets)
    }

    /// `B_k = X` for every `k`.
    pub fn full(domain: Domain, horizon: u64) -> Self {
        let whole = domain.as_set();
        Self::from_sets(domain, vec![whole; horizon as usize]).expect("the carrier lies in its own domain")
    }

    pub fn len(&self) -> u64 {
        self.sets.len() as u64
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// `B_k`, for `1 <= k <= len`.
    pub fn set(&self, k: u64) -> Option<&IntervalSet> {
        k.checked_sub(1).and_then(|i| self.sets.get(i as usize))
    }

    pub fn complement_measure(&self, k: u64) -> Option<f64> {
        k.checked_sub(1).and_then(|i| self.complement_measures.get(i as usize)).copied()
    }

    pub fn lambda(&self, k: u64) -> Option<f64> {
        let i = k.checked_sub(1)? as usize;
        self.lambda_schedule.as_ref()?.get(i).copied()
    }

    /// The level `n` with `k` in `[N_n, N_{n+1})`, or `None` before `N_1`.
    pub fn level_of(&self, k: u64) -> Option<u64> {
        level_of(self.thresholds.as_ref()?, k)
    }
}

/// Builds `B_k = E_k(lambda_k)^c` with `lambda_k = 1/n` on `[N_n, N_{n+1})`.
///
/// `N_n` is the least index after `N_{n-1}` such that
/// `mu(E_k(1/n)) < 1/n` for every `k` in `[N_n, horizon]`. Before `N_1` the
/// schedule uses `lambda_k = 1`. When some level has no threshold inside the
/// horizon the schedule stops there and carries a [`Truncation`].
pub fn synthesize_witness(
    seq: &FunctionSequence,
    f: &PiecewiseFunction,
    p: f64,
    horizon: u64,
) -> Result<WitnessSequence> {
    let domain = seq.domain();
    if !domain.is_finite() {
        return Err(Error::Precondition("witness synthesis needs a domain of finite measure".into()));
    }
    if horizon < 8 {
        return Err(Error::Precondition(format!("horizon must be at least 8, got {horizon}")));
    }
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::Precondition(format!("p must be a finite number >= 1, got {p}")));
    }
    if *f.domain() != domain {
        return Err(Error::DomainMismatch);
    }
    let indices: Vec<u64> = (1..=horizon).collect();
    let diffs = par_map(&indices, |&k| seq.instantiate(k).and_then(|fk| fk.subtract(f)))
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let level_measure = |k: u64, lambda: f64| -> Result<f64> {
        Ok(superlevel_set(&diffs[(k - 1) as usize], lambda)?.measure())
    };

    let mut thresholds: Vec<u64> = Vec::new();
    let mut truncation = None;
    let mut prev = 0u64;
    for n in 1u64.. {
        let lambda = 1.0 / n as f64;
        // scan downwards: the first violation fixes N_n just above it
        let mut candidate = prev + 1;
        for k in (prev + 1..=horizon).rev() {
            if level_measure(k, lambda)? >= lambda {
                candidate = k + 1;
                break;
            }
        }
        if candidate > horizon {
            truncation = Some(Truncation {
                level: n,
                reason: format!("no N_{n} <= {horizon} with mu(E_k(1/{n})) < 1/{n} for all later k"),
            });
            break;
        }
        thresholds.push(candidate);
        prev = candidate;
        if prev == horizon {
            truncation = Some(Truncation {
                level: n + 1,
                reason: format!("the horizon {horizon} is exhausted after level {n}"),
            });
            break;
        }
    }
    log::debug!("witness thresholds {:?}", thresholds);

    let mut lambdas = Vec::with_capacity(horizon as usize);
    let mut level = 0usize;
    for k in 1..=horizon {
        while level < thresholds.len() && thresholds[level] <= k {
            level += 1;
        }
        lambdas.push(if level == 0 { 1.0 } else { 1.0 / level as f64 });
    }
    let sets = indices
        .iter()
        .map(|&k| superlevel_set(&diffs[(k - 1) as usize], lambdas[(k - 1) as usize])?.complement(&domain))
        .collect::<Result<Vec<_>>>()?;
    let mut witness = WitnessSequence::from_sets(domain, sets)?;

    let total = witness.domain.total_measure();
    let bound_checks = par_map(&indices, |&k| -> Result<()> {
        let i = (k - 1) as usize;
        let lambda = lambdas[i];
        if level_of(&thresholds, k).is_some() && !(witness.complement_measures[i] < lambda) {
            return Err(Error::Invariant(format!(
                "mu(B_{k}^c) = {} is not below lambda_{k} = {lambda}",
                witness.complement_measures[i]
            )));
        }
        let integral = lp_integral_on(&diffs[i], p, &witness.sets[i])?;
        let cap = lambda.powf(p) * total;
        match integral.value() {
            Some(v) if v <= cap + integral.err().unwrap_or(0.0) + 1e-12 * cap => Ok(()),
            _ => Err(Error::Invariant(format!("integral over B_{k} is {integral:?}, above lambda_k^p mu(X) = {cap}"))),
        }
    });
    bound_checks.into_iter().collect::<Result<Vec<()>>>()?;

    witness.lambda_schedule = Some(lambdas);
    witness.thresholds = Some(thresholds);
    witness.truncation = truncation;
    Ok(witness)
}

fn level_of(thresholds: &[u64], k: u64) -> Option<u64> {
    let idx = thresholds.partition_point(|&n_k| n_k <= k);
    (idx > 0).then_some(idx as u64)
}
