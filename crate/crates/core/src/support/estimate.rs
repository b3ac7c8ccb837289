//! The adaptive support-size estimator.
//!
//! With probability at least 2/3 the returned value lies within a
//! multiplicative `1 + eps` of the true support size, using
//! `O~((log log n) / eps^3)` conditional samples, provided every support
//! element has mass at least `tau/n`:
//!
//! 1. dense-support test at failure budget 1/10; on accept, return
//!    `(1 - eps^2) n` (the shortcut is `(1+eps)`-correct whenever the support
//!    exceeds `(1 - eps) n`, since `(1 - eps^2)/(1 + eps) = 1 - eps`);
//! 2. otherwise acquire a non-support reference with bound `(1 - eps/2) n`;
//! 3. probe `sigma_j = (1+eps)^((1+eps)^j)` for growing `j` (budget
//!    `1/(100 (j+1)^2)` each) until a probe answers No;
//! 4. binary-search integer exponents in
//!    `{ceil((1+eps)^(j-1)), ..., ceil((1+eps)^j)}` for the smallest `i >= 2`
//!    refuted at budget `1/(10 (j+1))` and return `(1+eps)^(i-1)`.
//!
//! If no probe ever answers No the degenerate answer is `n`.

use crate::dist::PiecewiseDistribution;
use crate::error::CondError;
use crate::oracle::CondOracle;
use crate::Rational;

use super::{
    get_non_support, is_at_most_support_size, test_small_support, validate_eps, EstimatePath,
    ProbeVerdict, SupportConfig, SupportEstimate, Verdict,
};

pub fn estimate_support(
    oracle: &mut CondOracle,
    eps: f64,
    tau: &Rational,
    cfg: &SupportConfig,
) -> Result<SupportEstimate, CondError> {
    validate_eps(eps)?;
    let start = oracle.query_count();
    let n = oracle.distribution().n();

    if test_small_support(oracle, eps, tau, 0.1, cfg)? == Verdict::Accept {
        return Ok(SupportEstimate {
            value: (1.0 - eps * eps) * n as f64,
            queries_used: oracle.query_count() - start,
            path: EstimatePath::DenseShortcut,
            contract_void: false,
        });
    }

    let bound = (((1.0 - eps / 2.0) * n as f64).floor() as u64).clamp(1, n - 1);
    let reference = get_non_support(oracle, bound, 0.1, cfg)?;

    let base = 1.0 + eps;
    let log_base = base.ln();
    let j_max = (((n as f64).ln() / log_base).ln() / log_base).ceil().max(0.0) as u32;
    for j in 0..=j_max {
        let exponent = base.powi(j as i32);
        let sigma = base.powf(exponent).clamp(2.0, n as f64);
        let delta_j = 1.0 / (100.0 * ((j + 1) * (j + 1)) as f64);
        if is_at_most_support_size(oracle, sigma, reference, eps, delta_j, cfg)?
            == ProbeVerdict::No
        {
            let lo0 = if j == 0 {
                1u64
            } else {
                base.powi(j as i32 - 1).ceil() as u64
            };
            let hi0 = base.powi(j as i32).ceil() as u64;
            let mut lo = lo0.max(2);
            let mut hi = hi0.max(lo);
            let delta_bs = 1.0 / (10.0 * (j + 1) as f64);
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                let sigma_mid = base.powf(mid as f64).clamp(2.0, n as f64);
                match is_at_most_support_size(oracle, sigma_mid, reference, eps, delta_bs, cfg)? {
                    ProbeVerdict::No => hi = mid,
                    ProbeVerdict::Yes => lo = mid + 1,
                }
            }
            let i_star = lo;
            return Ok(SupportEstimate {
                value: base.powf((i_star - 1) as f64),
                queries_used: oracle.query_count() - start,
                path: EstimatePath::BinarySearch { j, i_star },
                contract_void: false,
            });
        }
    }

    Ok(SupportEstimate {
        value: n as f64,
        queries_used: oracle.query_count() - start,
        path: EstimatePath::Exhausted,
        contract_void: false,
    })
}

/// Like [`estimate_support`], but checks the minimum-mass promise against
/// the ground-truth distribution and flags the estimate as contract-void
/// when it fails. The estimator itself cannot detect the violation; only a
/// harness holding the true distribution can.
pub fn estimate_support_checked(
    ground_truth: &PiecewiseDistribution,
    oracle: &mut CondOracle,
    eps: f64,
    tau: &Rational,
    cfg: &SupportConfig,
) -> Result<SupportEstimate, CondError> {
    let mut est = estimate_support(oracle, eps, tau, cfg)?;
    est.contract_void = !ground_truth.min_mass_promise_holds(tau);
    Ok(est)
}
