//! Support-size estimation from conditional samples.
//!
//! The adaptive estimator follows a guess-and-check strategy: test whether
//! the support is already dense (shortcut answer), otherwise acquire a
//! reference element outside the support by ordering uniform candidates with
//! Compare, then probe candidate sizes `(1+eps)^((1+eps)^j)` double
//! exponentially, refining the first "too big" verdict by binary search on
//! the exponent. A non-adaptive variant commits to a doubling grid of random
//! query sets up front and looks for the first size whose conditional
//! distribution fails a collision-based uniformity test.

mod collision;
mod estimate;
mod non_support;
mod nonadaptive;
mod probe;
mod small_support;

pub use collision::collision_uniformity_test;
pub use estimate::{estimate_support, estimate_support_checked};
pub use non_support::{get_non_support, non_support_sample_count};
pub use nonadaptive::{
    estimate_support_nonadaptive, nonadaptive_query_plan, nonadaptive_repetitions,
    sample_without_replacement, NonAdaptivePlan,
};
pub use probe::{is_at_most_support_size, probe_params, ProbeVerdict};
pub use small_support::test_small_support;

use crate::compare::{compare_with, CompareResult};
use crate::error::CondError;
use crate::oracle::CondOracle;

/// Accept/reject outcome of the dense-support and uniformity tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Accept,
    Reject,
}

/// Which exit produced a support estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatePath {
    /// The dense-support test accepted; the answer is `(1 - eps^2) * n`.
    DenseShortcut,
    /// Double-exponential probing found a "too big" size at stage `j` and
    /// binary search pinned the smallest refuted exponent `i_star`.
    BinarySearch { j: u32, i_star: u64 },
    /// Every probe said "at least the support size"; the degenerate answer
    /// is `n`.
    Exhausted,
    /// Non-adaptive doubling grid tripped at set size `k` (`None` when no
    /// size tripped and the answer is `n`).
    NonAdaptive { tripped_at: Option<u64> },
}

/// A support-size estimate with its query accounting.
#[derive(Debug, Clone)]
pub struct SupportEstimate {
    pub value: f64,
    /// Oracle-counter delta across the call.
    pub queries_used: u64,
    pub path: EstimatePath,
    /// Set by the checked entry points when the bound distribution violates
    /// the declared minimum-mass promise, voiding the estimate's contract.
    pub contract_void: bool,
}

/// Tunable constants, all surfaced in experiment configs.
#[derive(Debug, Clone, Copy)]
pub struct SupportConfig {
    /// Compare sample-count constant.
    pub c_cmp: f64,
    /// Probe inner-round constant (`m_inner = ceil(c_probe / tau^2)`).
    pub c_probe: f64,
    /// Collision-tester sample constant.
    pub c_u: f64,
    /// Non-adaptive repetition constant (`m_rep = ceil(c_na * log2 log2 n)`).
    pub c_na: f64,
    /// Non-adaptive trip threshold: a size wins when more than
    /// `theta * m_rep` of its repetitions reject uniformity.
    pub theta: f64,
    /// Distance parameter handed to the collision tester by the non-adaptive
    /// estimator (calibrated stand-in; no principled constant exists).
    pub na_eps: f64,
    /// Failure budget per collision test in the non-adaptive estimator.
    pub na_delta: f64,
}

impl Default for SupportConfig {
    fn default() -> Self {
        SupportConfig {
            c_cmp: crate::compare::DEFAULT_C_CMP,
            c_probe: 32.0,
            c_u: 8.0,
            c_na: 2.0,
            theta: 0.5,
            na_eps: 0.5,
            na_delta: 0.1,
        }
    }
}

/// Majority-vote repetition count `ceil(12 ln(1/delta))`, rounded up to odd
/// so ties are impossible.
pub fn majority_rounds(delta: f64) -> u32 {
    let v = (12.0 * (1.0 / delta).ln()).ceil().max(1.0) as u32;
    if v % 2 == 0 {
        v + 1
    } else {
        v
    }
}

fn validate_eps(eps: f64) -> Result<(), CondError> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(CondError::param(format!(
            "eps must lie in (0, 1/2), got {eps}"
        )));
    }
    Ok(())
}

fn validate_delta(delta: f64) -> Result<(), CondError> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(CondError::param(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    Ok(())
}

/// Orders `elems` by approximate mass with pairwise Compare calls and
/// returns the index of a minimal element: one with no recorded strict
/// predecessor (fewest, under noise). `Low` on the pair `(i, j)` means
/// element `j` is strictly lighter; `High` or a ratio records `i` as
/// weakly-no-heavier. Equal ids get no edge.
fn pairwise_minimal(
    oracle: &mut CondOracle,
    elems: &[u64],
    delta_each: f64,
    c_cmp: f64,
) -> Result<usize, CondError> {
    let k = elems.len();
    let mut strict_preds = vec![0u32; k];
    for i in 0..k {
        for j in (i + 1)..k {
            if elems[i] == elems[j] {
                continue;
            }
            match compare_with(
                oracle,
                &[elems[i]],
                &[elems[j]],
                0.5,
                2.0,
                delta_each,
                c_cmp,
            )? {
                CompareResult::Low => strict_preds[i] += 1,
                CompareResult::High | CompareResult::Ratio(_) => {}
            }
        }
    }
    Ok(strict_preds
        .iter()
        .enumerate()
        .min_by_key(|(_, &p)| p)
        .map(|(i, _)| i)
        .expect("nonempty candidate list"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn majority_rounds_are_odd() {
        assert_eq!(majority_rounds(0.1), 29); // ceil(12 ln 10) = 28, bumped odd
        assert_eq!(majority_rounds(0.05), 37);
        for d in [0.3, 0.1, 0.01, 0.001] {
            assert_eq!(majority_rounds(d) % 2, 1);
        }
    }
}
