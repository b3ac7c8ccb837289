//! Size predicates for the paired-bucket construction, in the log domain.
//!
//! A query-set size is *small* when a random set of that size misses even
//! the largest bucket in expectation, *large* when it hits many bucket pairs,
//! and *alpha-stable* when for every bucket the expected intersection
//! `size * b * rho^j / n` stays outside `[1/alpha, alpha]`. A size vector is
//! *(alpha, tau)-incomparable* when, additionally, the expected joint mass of
//! the union stays a factor `tau` away from every single-element mass.
//!
//! `count_bad_scalings` enumerates every scale exponent `k_b` exhaustively
//! and counts, per property, how many scales violate it; the counts verify
//! that each property can fail for at most logarithmically many scales.
//! All arithmetic runs on exponents (log2), so nominal `n` up to `2^4096`
//! needs no big integers.

/// Fixed construction parameters for one predicate evaluation.
#[derive(Debug, Clone, Copy)]
pub struct ScalingParams {
    pub log2_n: f64,
    pub log2_rho: f64,
    pub r: u32,
    /// Scale exponent: `b = 2^(k_b)` so `log2 b = k_b`.
    pub log2_b: f64,
}

impl ScalingParams {
    /// `log2` of the critical scale `n / (b * rho^j)` for bucket `j`.
    fn log2_critical(&self, j: u32) -> f64 {
        self.log2_n - self.log2_b - j as f64 * self.log2_rho
    }
}

/// Analysis parameter pack derived from the query budget `q`:
/// `alpha = q^7`, `phi = q^(5/2)`, `gamma = 1/phi = q^(-5/2)`.
#[derive(Debug, Clone, Copy)]
pub struct AnalysisParams {
    pub q: u32,
}

impl AnalysisParams {
    pub fn new(q: u32) -> Self {
        AnalysisParams { q }
    }

    pub fn alpha(&self) -> f64 {
        (self.q as f64).powi(7)
    }

    pub fn phi(&self) -> f64 {
        (self.q as f64).powf(2.5)
    }

    /// Accuracy parameter; represented as the exact reciprocal of `phi`.
    pub fn gamma(&self) -> f64 {
        1.0 / self.phi()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeClass {
    Small,
    Large,
    Neither,
}

/// Small: `size < n / (b * rho^(2r))`. Large: `size >= n / (b * rho^(2r - 2*phi))`.
pub fn classify_size(log2_size: f64, params: &ScalingParams, phi: f64) -> SizeClass {
    let two_r = 2.0 * params.r as f64;
    let small_bound = params.log2_n - params.log2_b - two_r * params.log2_rho;
    let large_bound = small_bound + 2.0 * phi * params.log2_rho;
    if log2_size < small_bound {
        SizeClass::Small
    } else if log2_size >= large_bound {
        SizeClass::Large
    } else {
        SizeClass::Neither
    }
}

/// Alpha-stable: for every bucket `j` in `[2r]`, the size avoids the closed
/// window `[n / (alpha * b * rho^j), alpha * n / (b * rho^j)]`; equivalently
/// the expected bucket intersection avoids `[1/alpha, alpha]`.
pub fn is_alpha_stable(log2_size: f64, params: &ScalingParams, log2_alpha: f64) -> bool {
    for j in 1..=(2 * params.r) {
        if (log2_size - params.log2_critical(j)).abs() <= log2_alpha {
            return false;
        }
    }
    true
}

/// Incomparable: the vector is alpha-stable and the expected joint mass
/// `(1/(2rn)) * sum_j size_j * delta_j` avoids the window
/// `[1/(tau * 2r * nu * rho^i), tau / (2r * nu * rho^i)]` for every `i`,
/// where `delta_j` counts the buckets that concentrate over a random set of
/// size `size_j`.
pub fn is_incomparable(
    log2_sizes: &[f64],
    log2_alpha: f64,
    log2_tau: f64,
    log2_nu: f64,
    params: &ScalingParams,
) -> bool {
    if log2_sizes
        .iter()
        .any(|&s| !is_alpha_stable(s, params, log2_alpha))
    {
        return false;
    }
    let deltas: Vec<u32> = log2_sizes
        .iter()
        .map(|&s| concentration_count(s, log2_nu, log2_alpha, params))
        .collect();
    // log2 of sum_j size_j * delta_j, via a shifted sum so huge exponents
    // never materialize
    let mut max_exp = f64::NEG_INFINITY;
    for (&s, &d) in log2_sizes.iter().zip(&deltas) {
        if d > 0 {
            max_exp = max_exp.max(s + (d as f64).log2());
        }
    }
    if max_exp == f64::NEG_INFINITY {
        // zero joint expectation: below every window
        return true;
    }
    let mut acc = 0.0f64;
    for (&s, &d) in log2_sizes.iter().zip(&deltas) {
        if d > 0 {
            acc += 2f64.powf(s + (d as f64).log2() - max_exp);
        }
    }
    let log2_weighted = max_exp + acc.log2();
    for i in 1..=(2 * params.r) {
        let center = -(log2_nu + i as f64 * params.log2_rho);
        let lhs = log2_weighted - params.log2_n;
        if (lhs - center).abs() <= log2_tau {
            return false;
        }
    }
    true
}

/// `delta_j`: the minimum `delta` in `{0, ..., 2r}` such that
/// `size * nu * rho^(2r - delta) / n <= 1/alpha`, or `2r` if none.
pub fn concentration_count(
    log2_size: f64,
    log2_nu: f64,
    log2_alpha: f64,
    params: &ScalingParams,
) -> u32 {
    let two_r = 2 * params.r;
    for delta in 0..=two_r {
        let log2_expect =
            log2_size + log2_nu + (two_r - delta) as f64 * params.log2_rho - params.log2_n;
        if log2_expect <= -log2_alpha {
            return delta;
        }
    }
    two_r
}

/// Exhaustive per-scale violation counts for one size.
#[derive(Debug, Clone)]
pub struct BadScalingCounts {
    /// Scales for which the size is neither small nor large.
    pub neither: u64,
    /// Scales violating alpha-stability at bucket `j` (index `j - 1`).
    pub not_stable_per_j: Vec<u64>,
    /// Sum over `j` (union-bound form).
    pub not_stable_total: u64,
    /// Number of scales enumerated: `k_b` in `{0, ..., floor(log2(n)/2)}`.
    pub scales_enumerated: u64,
}

/// Enumerates every scale exponent `k_b` and counts violations of the
/// small/large dichotomy and of per-bucket alpha-stability.
pub fn count_bad_scalings(
    log2_size: f64,
    log2_n: f64,
    log2_rho: f64,
    r: u32,
    phi: f64,
    log2_alpha: f64,
) -> BadScalingCounts {
    let k_b_max = (log2_n / 2.0).floor() as u64;
    let mut neither = 0u64;
    let mut not_stable_per_j = vec![0u64; 2 * r as usize];
    for k_b in 0..=k_b_max {
        let params = ScalingParams {
            log2_n,
            log2_rho,
            r,
            log2_b: k_b as f64,
        };
        if classify_size(log2_size, &params, phi) == SizeClass::Neither {
            neither += 1;
        }
        for j in 1..=(2 * r) {
            if (log2_size - params.log2_critical(j)).abs() <= log2_alpha {
                not_stable_per_j[(j - 1) as usize] += 1;
            }
        }
    }
    BadScalingCounts {
        neither,
        not_stable_total: not_stable_per_j.iter().sum(),
        not_stable_per_j,
        scales_enumerated: k_b_max + 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(log2_b: f64) -> ScalingParams {
        // log n = 4096, rho = 2^64, r = 8
        ScalingParams {
            log2_n: 4096.0,
            log2_rho: 64.0,
            r: 8,
            log2_b,
        }
    }

    #[test]
    fn tiny_size_is_small() {
        let p = params(10.0);
        assert_eq!(
            classify_size(0.0, &p, AnalysisParams::new(3).phi()),
            SizeClass::Small
        );
    }

    #[test]
    fn critical_size_is_not_stable_for_any_alpha() {
        // size = n / (b * rho^j): the window midpoint, excluded for alpha >= 1
        let p = params(12.0);
        for j in 1..=16 {
            let size = p.log2_critical(j);
            assert!(!is_alpha_stable(size, &p, 0.0)); // alpha = 1
            assert!(!is_alpha_stable(size, &p, (2187f64).log2()));
        }
    }

    #[test]
    fn far_size_is_stable() {
        let p = params(12.0);
        // halfway between two critical scales, 32 factors from each
        let size = p.log2_critical(3) - 32.0;
        assert!(is_alpha_stable(size, &p, (2187f64).log2()));
    }

    #[test]
    fn neither_window_count_is_bounded() {
        let a = AnalysisParams::new(3);
        let phi = a.phi();
        let counts = count_bad_scalings(2048.0, 4096.0, 64.0, 8, phi, a.alpha().log2());
        assert!(counts.neither as f64 <= 2.0 * phi * 64.0 + 2.0);
    }

    #[test]
    fn per_bucket_stability_count_is_bounded() {
        let a = AnalysisParams::new(3);
        let log2_alpha = a.alpha().log2();
        // provable bound for the closed window of endpoint ratio alpha^2:
        // at most floor(2 log2 alpha) + 1 scales per bucket
        let bound = (2.0 * log2_alpha).floor() as u64 + 1;
        for size in [100.0, 1000.0, 2048.0, 3000.5] {
            let counts = count_bad_scalings(size, 4096.0, 64.0, 8, a.phi(), log2_alpha);
            for (j, &c) in counts.not_stable_per_j.iter().enumerate() {
                assert!(c <= bound, "bucket {j}: {c} > {bound}");
            }
            assert!(counts.not_stable_total <= 16 * bound);
        }
    }

    #[test]
    fn analysis_params_identities() {
        let a = AnalysisParams::new(3);
        assert_eq!(a.alpha(), 2187.0);
        assert!((a.phi() - 15.588457268119896).abs() < 1e-12);
        // gamma is represented as the exact reciprocal of phi
        assert_eq!(a.gamma(), 1.0 / a.phi());
    }

    #[test]
    fn incomparable_zero_expectation_vector() {
        let p = params(0.0);
        let a = AnalysisParams::new(3);
        // one tiny stable size: all deltas hit zero expectation
        let size = p.log2_critical(16) - 40.0 - 2.0 * p.log2_rho;
        assert!(is_incomparable(
            &[size],
            a.alpha().log2(),
            2.0 * (3f64).log2(), // tau = q^2
            p.log2_b,
            &p
        ));
    }
}
