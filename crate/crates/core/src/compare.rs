//! The Compare primitive: estimate the ratio `D(Y)/D(X)` of two disjoint
//! small sets from conditional samples on `X ∪ Y`.
//!
//! Draws `m = ceil(c_cmp * (K+1) * log2(2/delta) / eta^2)` samples, takes
//! `rho_hat = p_hat / (1 - p_hat)` for the fraction `p_hat` landing in `Y`,
//! and reports `High` above `2K`, `Low` below `1/(2K)`, and `Ratio(rho_hat)`
//! in between. With probability at least `1 - delta`:
//!
//! * if `D(Y)/K <= D(X) <= K * D(Y)` the result is a `Ratio` within
//!   `[1-eta, 1+eta] * D(Y)/D(X)`;
//! * if `D(Y) > K * D(X)` the result is `High` or a `Ratio` in that window;
//! * if `D(Y) < D(X)/K` the result is `Low` or a `Ratio` in that window.
//!
//! When `D(X) = D(Y) = 0` every sample is uniform on `X ∪ Y`, so the ratio
//! concentrates near `|Y|/|X|`.

use crate::error::CondError;
use crate::oracle::CondOracle;

/// Default sample-count constant, chosen so the three-case contract holds
/// with margin at the suite's parameters.
pub const DEFAULT_C_CMP: f64 = 16.0;

/// Three-way outcome of a Compare call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CompareResult {
    /// `D(Y)` is far below `D(X)` (estimate under `1/(2K)`).
    Low,
    /// `D(Y)` is far above `D(X)` (estimate over `2K`).
    High,
    /// Two-sided estimate of `D(Y)/D(X)`, strictly positive and finite.
    Ratio(f64),
}

impl CompareResult {
    pub fn is_low(&self) -> bool {
        matches!(self, CompareResult::Low)
    }

    pub fn is_ratio(&self) -> bool {
        matches!(self, CompareResult::Ratio(_))
    }
}

/// Number of conditional samples one Compare call makes.
pub fn compare_sample_count(eta: f64, k_factor: f64, delta: f64, c_cmp: f64) -> u64 {
    (c_cmp * (k_factor + 1.0) * (2.0 / delta).log2() / (eta * eta)).ceil() as u64
}

fn validate_params(eta: f64, k_factor: f64, delta: f64) -> Result<(), CondError> {
    if !(eta > 0.0 && eta <= 1.0) {
        return Err(CondError::param(format!("eta must lie in (0, 1], got {eta}")));
    }
    if !(k_factor >= 1.0) {
        return Err(CondError::param(format!("K must be at least 1, got {k_factor}")));
    }
    if !(delta > 0.0 && delta <= 0.5) {
        return Err(CondError::param(format!(
            "delta must lie in (0, 1/2], got {delta}"
        )));
    }
    Ok(())
}

/// Compare with the default sample-count constant.
pub fn compare(
    oracle: &mut CondOracle,
    x: &[u64],
    y: &[u64],
    eta: f64,
    k_factor: f64,
    delta: f64,
) -> Result<CompareResult, CondError> {
    compare_with(oracle, x, y, eta, k_factor, delta, DEFAULT_C_CMP)
}

/// Compare with an explicit sample-count constant (surfaced in experiment
/// configs).
pub fn compare_with(
    oracle: &mut CondOracle,
    x: &[u64],
    y: &[u64],
    eta: f64,
    k_factor: f64,
    delta: f64,
    c_cmp: f64,
) -> Result<CompareResult, CondError> {
    validate_params(eta, k_factor, delta)?;
    let m = compare_sample_count(eta, k_factor, delta, c_cmp);
    let in_y = oracle.sample_count_in(x, y, m)?;
    Ok(classify(in_y, m, k_factor))
}

fn classify(in_y: u64, m: u64, k_factor: f64) -> CompareResult {
    let in_x = m - in_y;
    if in_x == 0 {
        return CompareResult::High;
    }
    let rho = in_y as f64 / in_x as f64;
    if rho > 2.0 * k_factor {
        CompareResult::High
    } else if rho < 1.0 / (2.0 * k_factor) {
        CompareResult::Low
    } else {
        CompareResult::Ratio(rho)
    }
}
