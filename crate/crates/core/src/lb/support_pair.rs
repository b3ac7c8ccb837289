//! Uniform support-pair instances.
//!
//! Draw a grid index `k` uniformly, set `s = floor(beta^k * floor(n^(1/4)))`
//! with `beta = gamma^2`, and let `D1` be uniform on a random id set of size
//! `s`. A no-instance's `D2` is uniform on an independent random id set of
//! size `floor(beta * s)`; a yes-instance reuses `D1`. The grid keeps
//! `s` within `[n^(1/4), n^(3/4)]`.

use std::sync::Arc;

use rand::Rng;

use crate::dist::{PiecewiseDistribution, Relabel};
use crate::error::CondError;
use crate::lb::equivalence::InstanceKind;
use crate::seed::{derive_seed, rng_from_seed};

/// A generated support-pair instance with its construction parameters.
#[derive(Debug, Clone)]
pub struct SupportPairInstance {
    pub n: u64,
    pub kind: InstanceKind,
    pub seed: u64,
    pub gamma: f64,
    /// Support ratio `beta = gamma^2`.
    pub beta: f64,
    pub grid_index: u32,
    /// Support size of `D1`.
    pub s: u64,
    /// Support size of `D2` (`floor(beta * s)` for no-instances, `s` otherwise).
    pub s2: u64,
    pub d1: Arc<PiecewiseDistribution>,
    pub d2: Arc<PiecewiseDistribution>,
}

/// Number of valid grid indices: `k` ranges over `{0, ..., floor(log2(n) / (2 log2 beta))}`.
pub fn grid_index_bound(n: u64, beta: f64) -> u32 {
    ((n as f64).log2() / (2.0 * beta.log2())).floor() as u32
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

/// Generates a support-pair instance. Requires `gamma >= sqrt(2)` and
/// `floor(n^(1/4)) >= 2`.
pub fn gen_support_pair(
    n: u64,
    gamma: f64,
    kind: InstanceKind,
    seed: u64,
) -> Result<SupportPairInstance, CondError> {
    if !(gamma >= std::f64::consts::SQRT_2) {
        return Err(CondError::param(format!(
            "gamma must be at least sqrt(2), got {gamma}"
        )));
    }
    let root4 = floor_fourth_root(n);
    if root4 < 2 {
        return Err(CondError::param(format!(
            "domain too small: floor(n^(1/4)) = {root4} < 2"
        )));
    }
    let beta = gamma * gamma;
    let mut rng = rng_from_seed(derive_seed(seed, 0));
    let grid_index = rng.random_range(0..=grid_index_bound(n, beta));
    let s = (beta.powi(grid_index as i32) * root4 as f64).floor() as u64;
    let s = s.min(n);
    let s2 = match kind {
        InstanceKind::Yes => s,
        InstanceKind::No => {
            let s2 = (beta * s as f64).floor() as u64;
            if s2 > n {
                return Err(CondError::param(format!(
                    "scaled support {s2} exceeds the domain {n}"
                )));
            }
            s2
        }
    };

    let relabel1 = Arc::new(Relabel::generate(n, derive_seed(seed, 1))?);
    let d1 = Arc::new(PiecewiseDistribution::uniform_on(n, s, Some(relabel1))?);
    let d2 = match kind {
        InstanceKind::Yes => d1.clone(),
        InstanceKind::No => {
            let relabel2 = Arc::new(Relabel::generate(n, derive_seed(seed, 2))?);
            Arc::new(PiecewiseDistribution::uniform_on(n, s2, Some(relabel2))?)
        }
    };

    Ok(SupportPairInstance {
        n,
        kind,
        seed,
        gamma,
        beta,
        grid_index,
        s,
        s2,
        d1,
        d2,
    })
}
