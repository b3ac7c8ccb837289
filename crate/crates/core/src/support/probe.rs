//! Threshold probing: is a candidate size at most the support size?
//!
//! One round draws a set `S` by including every id independently with
//! probability `1/sigma`, samples `x` from `D_S`, and checks `x` against the
//! non-support reference `r` with `Compare({x}, {r}, eta = 1/2, K = 1)`. If
//! `S` hit the support, `x` is a support element and Compare answers `Low`
//! (a HIT); if `S` missed it, both masses are zero, samples are uniform on
//! `{x, r}`, and Compare returns a ratio near 1 (a MISS). The exact miss
//! probability is `p = (1 - 1/sigma)^omega`, so with
//! `alpha = (1 - 1/sigma)^sigma` and `tau = alpha (alpha^(-eps/2) - 1)`:
//! `p <= alpha` when `sigma <= omega` and `p > alpha + tau` when
//! `sigma > (1 + eps) omega`. The inner loop runs `ceil(c_probe / tau^2)`
//! rounds and answers Yes when the miss count stays below
//! `m_inner (alpha + tau/2)`; an outer majority vote amplifies to `1 - delta`.

use crate::compare::{compare_with, CompareResult};
use crate::error::CondError;
use crate::oracle::CondOracle;
use crate::query::QuerySet;

use super::{majority_rounds, validate_delta, validate_eps, SupportConfig};

/// Probe verdict: Yes means "sigma is at most the support size".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProbeVerdict {
    Yes,
    No,
}

/// `(alpha, tau)` for a probe at size `sigma` and accuracy `eps`:
/// `alpha = (1 - 1/sigma)^sigma` (in `[1/4, 1/e]` for `sigma >= 2`) and
/// `tau = alpha (alpha^(-eps/2) - 1)`, the separation between the two cases.
pub fn probe_params(sigma: f64, eps: f64) -> (f64, f64) {
    let alpha = (1.0 - 1.0 / sigma).powf(sigma);
    let tau = alpha * (alpha.powf(-eps / 2.0) - 1.0);
    (alpha, tau)
}

pub fn is_at_most_support_size(
    oracle: &mut CondOracle,
    sigma: f64,
    reference: u64,
    eps: f64,
    delta: f64,
    cfg: &SupportConfig,
) -> Result<ProbeVerdict, CondError> {
    validate_eps(eps)?;
    validate_delta(delta)?;
    if !(sigma >= 2.0) {
        return Err(CondError::param(format!(
            "sigma must be at least 2, got {sigma}"
        )));
    }
    let n = oracle.distribution().n();
    if reference == 0 || reference > n {
        return Err(CondError::IdOutOfRange { id: reference, n });
    }
    let (alpha, tau) = probe_params(sigma, eps);
    let m_inner = (cfg.c_probe / (tau * tau)).ceil() as u64;
    let threshold = m_inner as f64 * (alpha + tau / 2.0);
    let delta_cmp = 1.0 / (100.0 * m_inner as f64);
    let rounds = majority_rounds(delta);
    let mut yes_votes = 0u32;
    for _ in 0..rounds {
        let mut misses = 0u64;
        for _ in 0..m_inner {
            let set = QuerySet::bernoulli(1.0 / sigma, oracle.fresh_seed())?;
            let x = oracle.cond_sample(&set)?;
            if x == reference {
                // only possible when the set missed the support entirely
                misses += 1;
                continue;
            }
            match compare_with(oracle, &[x], &[reference], 0.5, 1.0, delta_cmp, cfg.c_cmp)? {
                CompareResult::Ratio(_) => misses += 1,
                CompareResult::Low => {}
                // anomalous with a mass-zero reference; counted as a hit
                CompareResult::High => {}
            }
        }
        if (misses as f64) < threshold {
            yes_votes += 1;
        }
    }
    Ok(if 2 * yes_votes > rounds {
        ProbeVerdict::Yes
    } else {
        ProbeVerdict::No
    })
}
