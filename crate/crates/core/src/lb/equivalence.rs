//! Paired-bucket equivalence instances.
//!
//! The support `{1, ..., m}` with `m = b * floor(n^(1/4))` and random scale
//! `b = 2^(k_b)` is split into `2r` geometric buckets, `|B_i| ~ b * rho^i`.
//! `D1` gives every bucket mass exactly `1/(2r)`. A no-instance `D2` keeps
//! the bucket partition but repartitions the mass of each consecutive bucket
//! pair: one bucket gets `1/(4r)`, the other `3/(4r)`, by a fair coin per
//! pair. Both distributions are pushed through one shared random relabeling
//! of `[n]`. A yes-instance is `(D1, D1)`.
//!
//! Whatever the bucket-size rounding does, the pair masses are fixed
//! rationals, so a no-instance has total variation distance exactly 1/4 and
//! every pair keeps joint mass exactly `1/r` under both distributions.

use std::sync::Arc;

use rand::Rng;

use crate::dist::{Piece, PiecewiseDistribution, Relabel};
use crate::error::CondError;
use crate::seed::{derive_seed, rng_from_seed};
use crate::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceKind {
    Yes,
    No,
}

/// A generated equivalence instance with its construction parameters.
#[derive(Debug, Clone)]
pub struct EquivalenceInstance {
    pub n: u64,
    pub kind: InstanceKind,
    pub seed: u64,
    /// Random scale exponent, uniform over {0, ..., floor(log2(n)/2)}.
    pub k_b: u32,
    pub b: u64,
    /// Effective support size `b * floor(n^(1/4))`.
    pub m: u64,
    pub rho: f64,
    pub r: u32,
    pub bucket_sizes: Vec<u64>,
    /// Per-pair coin flips; empty for yes-instances.
    pub pair_flips: Vec<bool>,
    pub relabel_seed: u64,
    pub d1: Arc<PiecewiseDistribution>,
    pub d2: Arc<PiecewiseDistribution>,
}

impl EquivalenceInstance {
    /// Ids of bucket `i` (1-based), after relabeling.
    pub fn bucket_ids(&self, i: usize) -> Vec<u64> {
        assert!(i >= 1 && i <= self.bucket_sizes.len());
        let start: u64 = self.bucket_sizes[..i - 1].iter().sum();
        let end = start + self.bucket_sizes[i - 1];
        (start..end).map(|pre| self.d1.id_of_pre(pre)).collect()
    }
}

/// Bucket count parameter: `r = max(2, floor(sqrt(log2 n) / 8))`.
pub fn bucket_pair_count(n: u64) -> u32 {
    (((n as f64).log2().sqrt() / 8.0).floor() as u32).max(2)
}

/// Geometric bucket ratio: `rho = 2^(log2(n) / (8r))`, so the `2r` buckets
/// fill `n^(1/4)` up to rounding.
pub fn bucket_ratio(n: u64, r: u32) -> f64 {
    2f64.powf((n as f64).log2() / (8.0 * r as f64))
}

fn floor_fourth_root(n: u64) -> u64 {
    let mut x = (n as f64).powf(0.25).floor() as u64;
    while (x + 1).checked_pow(4).map_or(false, |v| v <= n) {
        x += 1;
    }
    while x > 0 && x.pow(4) > n {
        x -= 1;
    }
    x
}

/// Bucket sizes `max(1, floor(b * rho^i))` for `i = 1..2r-1`, with the last
/// bucket absorbing the residual so they sum to exactly `m`.
fn bucket_sizes(b: u64, rho: f64, r: u32, m: u64) -> Result<Vec<u64>, CondError> {
    let total = 2 * r as usize;
    let mut sizes = Vec::with_capacity(total);
    let mut used = 0u64;
    for i in 1..total {
        let raw = (b as f64 * rho.powi(i as i32)).floor() as u64;
        let size = raw.max(1);
        sizes.push(size);
        used += size;
    }
    if used + 1 > m {
        return Err(CondError::param(format!(
            "bucket sizes do not fit the effective support (used {used} of {m})"
        )));
    }
    sizes.push(m - used);
    Ok(sizes)
}

/// Generates a paired-bucket instance. Requires `n >= 2^16` so the rounded
/// parameters stay non-degenerate (`r >= 2`, every bucket nonempty).
pub fn gen_equivalence_instance(
    n: u64,
    kind: InstanceKind,
    seed: u64,
) -> Result<EquivalenceInstance, CondError> {
    if n < (1 << 16) {
        return Err(CondError::param(format!(
            "equivalence instances need n >= 2^16, got {n}"
        )));
    }
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let k_b_max = ((n as f64).log2() / 2.0).floor() as u32;
    let k_b = rng.random_range(0..=k_b_max);
    let b = 1u64 << k_b;
    let m = b * floor_fourth_root(n);
    let r = bucket_pair_count(n);
    let rho = bucket_ratio(n, r);
    let sizes = bucket_sizes(b, rho, r, m)?;

    let relabel_seed = derive_seed(seed, 1);
    let relabel = Arc::new(Relabel::generate(n, relabel_seed)?);

    let two_r = Rational::from_integer((2 * r as u64).into());
    let four_r = Rational::from_integer((4 * r as u64).into());
    let d1_pieces: Vec<Piece> = sizes
        .iter()
        .map(|&sz| {
            Piece::new(
                sz,
                Rational::from_integer(1.into()) / (&two_r * Rational::from_integer(sz.into())),
            )
        })
        .collect();
    // minimum positive per-element mass is 1/(4r * max bucket); declare the
    // matching promise tau = n * min_mass
    let max_bucket = *sizes.iter().max().unwrap();
    let tau = Rational::from_integer(n.into())
        / (&four_r * Rational::from_integer(max_bucket.into()));
    let d1 = Arc::new(PiecewiseDistribution::new(
        n,
        d1_pieces,
        Some(relabel.clone()),
        tau.clone(),
    )?);

    let (d2, pair_flips) = match kind {
        InstanceKind::Yes => (d1.clone(), Vec::new()),
        InstanceKind::No => {
            let flips: Vec<bool> = (0..r).map(|_| rng.random_bool(0.5)).collect();
            let mut pieces = Vec::with_capacity(sizes.len());
            for (pair, &flip) in flips.iter().enumerate() {
                let (first, second) = if flip { (3u64, 1u64) } else { (1u64, 3u64) };
                for (offset, num) in [(0, first), (1, second)] {
                    let sz = sizes[2 * pair + offset];
                    pieces.push(Piece::new(
                        sz,
                        Rational::from_integer(num.into())
                            / (&four_r * Rational::from_integer(sz.into())),
                    ));
                }
            }
            let d2 = Arc::new(PiecewiseDistribution::new(
                n,
                pieces,
                Some(relabel.clone()),
                tau,
            )?);
            (d2, flips)
        }
    };

    Ok(EquivalenceInstance {
        n,
        kind,
        seed,
        k_b,
        b,
        m,
        rho,
        r,
        bucket_sizes: sizes,
        pair_flips,
        relabel_seed,
        d1,
        d2,
    })
}
