//! Collision-based uniformity test for a conditional distribution.
//!
//! Draws `m = ceil(c_u * sqrt(|S|) * log2(1/delta) / eps^2)` samples from
//! `D_S` and accepts iff the pairwise collision rate is at most
//! `(1 + eps^2)/|S|`. Under `D_S = U_S` the rate concentrates at `1/|S|`;
//! at total variation `eps` from uniform it is at least `(1 + 4 eps^2)/|S|`,
//! so the threshold separates the cases with probability `1 - delta` each
//! way.

use std::collections::HashMap;

use crate::error::CondError;
use crate::oracle::CondOracle;
use crate::query::QuerySet;

use super::{validate_delta, SupportConfig, Verdict};

pub fn collision_uniformity_test(
    oracle: &mut CondOracle,
    set: &QuerySet,
    eps: f64,
    delta: f64,
    cfg: &SupportConfig,
) -> Result<Verdict, CondError> {
    let size = match set {
        QuerySet::Explicit(ids) => ids.len() as u64,
        _ => {
            return Err(CondError::UnsupportedRepresentation(
                "uniformity testing needs an explicit set",
            ))
        }
    };
    if size < 2 {
        return Err(CondError::param(format!(
            "uniformity testing needs at least 2 ids, got {size}"
        )));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(CondError::param(format!(
            "eps must lie in (0, 1), got {eps}"
        )));
    }
    validate_delta(delta)?;
    let m = (cfg.c_u * (size as f64).sqrt() * (1.0 / delta).log2() / (eps * eps))
        .ceil()
        .max(2.0) as u64;
    let samples = oracle.cond_sample_many(set, m)?;
    let mut counts: HashMap<u64, u64> = HashMap::new();
    for s in samples {
        *counts.entry(s).or_insert(0) += 1;
    }
    let colliding_pairs: u64 = counts.values().map(|&c| c * (c - 1) / 2).sum();
    let total_pairs = m * (m - 1) / 2;
    let rate = colliding_pairs as f64 / total_pairs as f64;
    Ok(if rate <= (1.0 + eps * eps) / size as f64 {
        Verdict::Accept
    } else {
        Verdict::Reject
    })
}
