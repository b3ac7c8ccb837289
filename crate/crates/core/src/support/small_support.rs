//! Dense-support detection.
//!
//! Accepts (w.p. `1 - delta`) when the support covers at least a
//! `1 - eps/2` fraction of the domain, rejects (w.p. `1 - delta`) when it
//! covers at most `1 - eps`; anything between is unconstrained. Requires the
//! minimum-mass promise: every support element has mass at least `tau/n`.
//!
//! One round draws `m = ceil(64/eps^2)` uniform ids and `k = ceil(10/tau)`
//! samples from the distribution itself, orders the latter by approximate
//! mass with pairwise Compare calls, keeps the lightest `t`, and marks a
//! uniform id as support when Compare of `{t}` against it returns High or a
//! ratio at least 1/2 at `K = 2/tau`. The round accepts when at least a
//! `1 - 3 eps/4` fraction is marked; rounds are amplified by majority vote.
//! When `tau >= 2` the support can cover at most half the domain and the
//! call rejects outright, without queries.

use num_traits::{Signed, ToPrimitive};

use crate::compare::{compare_with, CompareResult};
use crate::dist::rational_to_f64;
use crate::error::CondError;
use crate::oracle::CondOracle;
use crate::query::QuerySet;
use crate::Rational;

use super::{majority_rounds, pairwise_minimal, validate_delta, validate_eps, SupportConfig, Verdict};

pub fn test_small_support(
    oracle: &mut CondOracle,
    eps: f64,
    tau: &Rational,
    delta: f64,
    cfg: &SupportConfig,
) -> Result<Verdict, CondError> {
    validate_eps(eps)?;
    validate_delta(delta)?;
    if !tau.is_positive() {
        return Err(CondError::param("tau must be positive"));
    }
    if *tau >= Rational::from_integer(2.into()) {
        // support size at most n/2 < (1 - eps)n; no queries needed
        return Ok(Verdict::Reject);
    }
    let rounds = majority_rounds(delta);
    let mut accepts = 0u32;
    for _ in 0..rounds {
        if one_round(oracle, eps, tau, cfg)? {
            accepts += 1;
        }
    }
    Ok(if 2 * accepts > rounds {
        Verdict::Accept
    } else {
        Verdict::Reject
    })
}

fn one_round(
    oracle: &mut CondOracle,
    eps: f64,
    tau: &Rational,
    cfg: &SupportConfig,
) -> Result<bool, CondError> {
    let m = (64.0 / (eps * eps)).ceil() as u64;
    let k = (Rational::from_integer(10.into()) / tau)
        .ceil()
        .to_integer()
        .to_u64()
        .ok_or_else(|| CondError::param("tau too small"))?
        .max(1);

    let uniform_ids: Vec<u64> = (0..m).map(|_| oracle.uniform_id()).collect();
    let mut d_samples = Vec::with_capacity(k as usize);
    for _ in 0..k {
        d_samples.push(oracle.cond_sample(&QuerySet::FullDomain)?);
    }
    let lightest =
        d_samples[pairwise_minimal(oracle, &d_samples, 1.0 / (4 * k * k) as f64, cfg.c_cmp)?];

    let k_factor = rational_to_f64(&(Rational::from_integer(2.into()) / tau)).max(1.0);
    let delta_mark = 1.0 / (4 * m) as f64;
    let mut marked = 0u64;
    for &sj in &uniform_ids {
        if sj == lightest {
            // the lightest candidate is a sample from D, hence in the support
            marked += 1;
            continue;
        }
        match compare_with(oracle, &[lightest], &[sj], 0.5, k_factor, delta_mark, cfg.c_cmp)? {
            CompareResult::High => marked += 1,
            CompareResult::Ratio(rho) if rho >= 0.5 => marked += 1,
            _ => {}
        }
    }
    Ok(marked as f64 >= (1.0 - 0.75 * eps) * m as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::PiecewiseDistribution;
    use crate::ratio;
    use std::sync::Arc;

    #[test]
    fn tau_at_least_two_rejects_without_queries() {
        let d = Arc::new(PiecewiseDistribution::uniform(1024).unwrap());
        let mut o = CondOracle::new(d, 1);
        let v = test_small_support(&mut o, 0.25, &ratio(2, 1), 0.1, &SupportConfig::default())
            .unwrap();
        assert_eq!(v, Verdict::Reject);
        assert_eq!(o.query_count(), 0);
    }

    #[test]
    fn eps_out_of_range_is_an_error() {
        let d = Arc::new(PiecewiseDistribution::uniform(16).unwrap());
        let mut o = CondOracle::new(d, 1);
        assert!(
            test_small_support(&mut o, 0.5, &ratio(1, 1), 0.1, &SupportConfig::default()).is_err()
        );
        assert!(
            test_small_support(&mut o, 0.0, &ratio(1, 1), 0.1, &SupportConfig::default()).is_err()
        );
    }

    #[test]
    fn accepts_full_support_and_rejects_half_support() {
        let cfg = SupportConfig::default();
        let n = 1u64 << 10;
        let full = Arc::new(PiecewiseDistribution::uniform(n).unwrap());
        let half = Arc::new(PiecewiseDistribution::uniform_on(n, n / 2, None).unwrap());
        let mut accept_full = 0;
        let mut reject_half = 0;
        let trials = 30;
        for seed in 0..trials {
            let mut o = CondOracle::new(full.clone(), seed);
            if test_small_support(&mut o, 0.25, &ratio(1, 1), 0.1, &cfg).unwrap()
                == Verdict::Accept
            {
                accept_full += 1;
            }
            let mut o = CondOracle::new(half.clone(), 1000 + seed);
            if test_small_support(&mut o, 0.25, &ratio(1, 1), 0.1, &cfg).unwrap()
                == Verdict::Reject
            {
                reject_half += 1;
            }
        }
        assert!(accept_full >= 27, "accepted {accept_full}/{trials}");
        assert!(reject_half >= 27, "rejected {reject_half}/{trials}");
    }
}
