//! Non-adaptive support-size estimation over a doubling size grid.
//!
//! The whole query plan — for every set size `k = 2, 4, ..., n`, `m_rep`
//! uniformly random k-subsets — is a pure function of `(n, seed)` and is
//! materialized before the oracle is touched, which enforces non-adaptivity
//! structurally. For each size in increasing order, the conditional
//! distribution on each planned set runs the collision uniformity test;
//! the first size whose reject count exceeds `theta * m_rep` yields the
//! estimate `n / k`, and if no size trips the answer is `n`.
//!
//! Sets that miss the support entirely answer with exactly uniform samples
//! (zero-mass convention), so sizes well below `n / omega` pass; once sets
//! start hitting the support, the conditional mass concentrates on the few
//! support elements inside and the tester rejects. Intended for
//! distributions uniform over their support.

use std::collections::HashMap;

use rand::Rng;

use crate::error::CondError;
use crate::oracle::CondOracle;
use crate::query::QuerySet;
use crate::seed::{derive_seed2, rng_from_seed};

use super::{collision_uniformity_test, EstimatePath, SupportConfig, SupportEstimate, Verdict};

/// A committed list of query sets: `sets[i]` holds `m_rep` sorted id lists
/// of size `ks[i]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NonAdaptivePlan {
    pub n: u64,
    pub seed: u64,
    pub m_rep: u32,
    pub ks: Vec<u64>,
    pub sets: Vec<Vec<Vec<u64>>>,
}

impl NonAdaptivePlan {
    /// Order-sensitive hash of every planned id, for before/after identity
    /// checks.
    pub fn fingerprint(&self) -> u64 {
        let mut h = 0xcbf2_9ce4_8422_2325u64; // FNV-1a offset basis
        let mut mix = |v: u64| {
            for b in v.to_le_bytes() {
                h ^= b as u64;
                h = h.wrapping_mul(0x0000_0100_0000_01b3);
            }
        };
        mix(self.n);
        mix(self.m_rep as u64);
        for (k, group) in self.ks.iter().zip(&self.sets) {
            mix(*k);
            for ids in group {
                for &id in ids {
                    mix(id);
                }
            }
        }
        h
    }
}

/// Uniformly random k-subset of `[n]`, sampled without replacement by a
/// sparse partial Fisher-Yates shuffle. Returned sorted.
pub fn sample_without_replacement(n: u64, k: u64, seed: u64) -> Vec<u64> {
    assert!(k <= n, "cannot draw {k} distinct ids from [{n}]");
    let mut rng = rng_from_seed(seed);
    let mut swapped: HashMap<u64, u64> = HashMap::new();
    let mut out = Vec::with_capacity(k as usize);
    for i in 0..k {
        let j = rng.random_range(i..n);
        let vi = *swapped.get(&i).unwrap_or(&i);
        let vj = *swapped.get(&j).unwrap_or(&j);
        out.push(vj + 1);
        swapped.insert(j, vi);
        swapped.insert(i, vj);
    }
    out.sort_unstable();
    out
}

/// The doubling size grid: powers of two up to `n`, with `n` appended when
/// it is not itself a power of two.
pub fn size_grid(n: u64) -> Vec<u64> {
    let mut ks = Vec::new();
    let mut k = 2u64;
    while k <= n {
        ks.push(k);
        match k.checked_mul(2) {
            Some(next) => k = next,
            None => break,
        }
    }
    if *ks.last().unwrap_or(&0) != n && n >= 2 {
        ks.push(n);
    }
    ks
}

/// Materializes the full committed query plan from `(n, seed)`.
pub fn nonadaptive_query_plan(n: u64, seed: u64, m_rep: u32) -> NonAdaptivePlan {
    let ks = size_grid(n);
    let sets = ks
        .iter()
        .map(|&k| {
            (0..m_rep)
                .map(|rep| sample_without_replacement(n, k, derive_seed2(seed, k, rep as u64)))
                .collect()
        })
        .collect();
    NonAdaptivePlan {
        n,
        seed,
        m_rep,
        ks,
        sets,
    }
}

/// Runs the committed plan against the oracle.
pub fn estimate_support_nonadaptive(
    oracle: &mut CondOracle,
    plan: &NonAdaptivePlan,
    theta: f64,
    cfg: &SupportConfig,
) -> Result<SupportEstimate, CondError> {
    if !(0.0..1.0).contains(&theta) {
        return Err(CondError::param(format!(
            "theta must lie in [0, 1), got {theta}"
        )));
    }
    if plan.n != oracle.distribution().n() {
        return Err(CondError::DomainMismatch {
            left: plan.n,
            right: oracle.distribution().n(),
        });
    }
    let start = oracle.query_count();
    for (&k, group) in plan.ks.iter().zip(&plan.sets) {
        let mut rejects = 0u32;
        for ids in group {
            let set = QuerySet::explicit(ids.clone())?;
            if collision_uniformity_test(oracle, &set, cfg.na_eps, cfg.na_delta, cfg)?
                == Verdict::Reject
            {
                rejects += 1;
            }
        }
        if rejects as f64 > theta * plan.m_rep as f64 {
            return Ok(SupportEstimate {
                value: plan.n as f64 / k as f64,
                queries_used: oracle.query_count() - start,
                path: EstimatePath::NonAdaptive { tripped_at: Some(k) },
                contract_void: false,
            });
        }
    }
    Ok(SupportEstimate {
        value: plan.n as f64,
        queries_used: oracle.query_count() - start,
        path: EstimatePath::NonAdaptive { tripped_at: None },
        contract_void: false,
    })
}

/// Repetitions per size: `ceil(c_na * log2 log2 n)`.
pub fn nonadaptive_repetitions(n: u64, cfg: &SupportConfig) -> u32 {
    (cfg.c_na * (n as f64).log2().log2()).ceil().max(1.0) as u32
}
