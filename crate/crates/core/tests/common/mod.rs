//! Shared generators for the integration and acceptance suites.

use std::sync::Arc;

use cond_core::dist::{Piece, PiecewiseDistribution};
use cond_core::seed::rng_from_seed;
use cond_core::Rational;
use num_traits::{One, Zero};
use rand::Rng;

/// Exact rational from an integer pair.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// A distribution with dense support and an exact minimum-mass promise:
/// support at least `(1 - eps) n`, every support element at least `tau/n`,
/// a few elements bumped to `2/n` and optionally above it, total mass
/// exactly 1. Returns `(distribution, eps, tau)`.
pub fn dense_support_distribution(seed: u64) -> (Arc<PiecewiseDistribution>, Rational, Rational) {
    let mut rng = rng_from_seed(seed);
    let n: u64 = rng.random_range(512..=4096);
    let eps = rat(rng.random_range(1..=49), 100);
    let n_rat = Rational::from_integer(n.into());

    // support size w >= (1 - eps) n
    let min_w = ((Rational::one() - &eps) * &n_rat).ceil().to_integer();
    let min_w = u64::try_from(min_w).unwrap();
    let w = rng.random_range(min_w..=n);
    let w_rat = Rational::from_integer(w.into());

    // tau strictly inside (0, min(2, n/w))
    let tau = loop {
        let t = rat(rng.random_range(1..=127), 64);
        if t < rat(2, 1) && &t * &w_rat < n_rat {
            break t;
        }
    };

    let per = &tau / &n_rat; // minimum mass
    let two_over_n = rat(2, 1) / &n_rat;
    let four_over_n = rat(4, 1) / &n_rat;

    let residual = Rational::one() - &per * &w_rat;
    assert!(residual > Rational::zero());

    // heavy elements above the light window
    let heavy_cap = (&residual / (&four_over_n - &per)).floor().to_integer();
    let heavy_cap = u64::try_from(heavy_cap).unwrap().min(w / 8);
    let h4 = if heavy_cap > 0 && rng.random_bool(0.5) {
        rng.random_range(0..=heavy_cap)
    } else {
        0
    };
    let after_heavy = residual - (&four_over_n - &per) * Rational::from_integer(h4.into());

    // elements bumped to exactly 2/n (top of the light window)
    let bump_cap = (&after_heavy / (&two_over_n - &per)).floor().to_integer();
    let bump_cap = u64::try_from(bump_cap).unwrap();
    let h2 = bump_cap.min(w - h4 - 1);
    let after_bump = after_heavy - (&two_over_n - &per) * Rational::from_integer(h2.into());

    // one element absorbs the exact remainder
    let partial = &per + &after_bump;

    let mut pieces = Vec::new();
    if h4 > 0 {
        pieces.push(Piece::new(h4, four_over_n));
    }
    if h2 > 0 {
        pieces.push(Piece::new(h2, two_over_n));
    }
    pieces.push(Piece::new(1, partial));
    let rest = w - h4 - h2 - 1;
    if rest > 0 {
        pieces.push(Piece::new(rest, per));
    }

    let d = PiecewiseDistribution::new(n, pieces, None, tau.clone())
        .expect("constructed distribution is valid");
    (Arc::new(d), eps, tau)
}
