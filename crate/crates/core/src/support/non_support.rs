//! Non-support reference acquisition.
//!
//! Given an upper bound `m < n` on the support size, draws
//! `k = ceil(log2(2/delta) / log2(n/m))` uniform ids — enough that at least
//! one misses the support with probability `1 - delta/2` — orders them by
//! approximate mass with pairwise Compare calls, and returns a minimal one.
//! With probability at least `1 - delta` the returned id has mass zero.
//! The contract is void (not detected) if `m` is not actually an upper
//! bound.

use crate::error::CondError;
use crate::oracle::CondOracle;

use super::{pairwise_minimal, validate_delta, SupportConfig};

/// `k = ceil(log2(2/delta) / log2(n/m))`, the number of uniform candidates.
pub fn non_support_sample_count(n: u64, m: u64, delta: f64) -> u64 {
    ((2.0 / delta).log2() / ((n as f64 / m as f64).log2()))
        .ceil()
        .max(1.0) as u64
}

pub fn get_non_support(
    oracle: &mut CondOracle,
    m: u64,
    delta: f64,
    cfg: &SupportConfig,
) -> Result<u64, CondError> {
    validate_delta(delta)?;
    let n = oracle.distribution().n();
    if m >= n {
        return Err(CondError::param(format!(
            "support bound m = {m} must be strictly below n = {n}"
        )));
    }
    if m == 0 {
        return Err(CondError::param("support bound m must be positive"));
    }
    let k = non_support_sample_count(n, m, delta);
    let candidates: Vec<u64> = (0..k).map(|_| oracle.uniform_id()).collect();
    let delta_each = delta / (2 * k * k) as f64;
    let idx = pairwise_minimal(oracle, &candidates, delta_each, cfg.c_cmp)?;
    Ok(candidates[idx])
}
