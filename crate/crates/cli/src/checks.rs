//! Built-in checker suites behind `cond check <name>`.
//!
//! Each suite runs a named family of assertions with documented default
//! parameters and reports pass/fail per assertion group; the command exits
//! nonzero when any assertion fails.

use std::sync::Arc;

use cond_core::dist::{tv_distance, Piece, PiecewiseDistribution};
use cond_core::lb::atoms::{atoms, Atom, AtomPartition};
use cond_core::lb::equivalence::{gen_equivalence_instance, InstanceKind};
use cond_core::lb::hitting::hitting_fraction;
use cond_core::lb::measure::{s_c_measure, NeighborSide};
use cond_core::lb::predicates::{count_bad_scalings, AnalysisParams};
use cond_core::seed::{derive_seed2, rng_from_seed};
use cond_core::Rational;
use num_traits::{One, Zero};
use rand::Rng;

pub struct CheckOutcome {
    pub passed: bool,
    pub lines: Vec<String>,
}

impl CheckOutcome {
    fn new() -> Self {
        CheckOutcome {
            passed: true,
            lines: Vec::new(),
        }
    }

    fn record(&mut self, ok: bool, line: String) {
        self.passed &= ok;
        self.lines
            .push(format!("{} {line}", if ok { "ok  " } else { "FAIL" }));
    }
}

fn rat(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// Exact total variation of generated equivalence instances: every
/// no-instance at 1/4, every yes-instance at 0.
pub fn check_tv(n: u64, count: u64, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new();
    let quarter = rat(1, 4);
    let mut bad_no = 0u64;
    let mut bad_yes = 0u64;
    for s in 0..count {
        let inst = gen_equivalence_instance(n, InstanceKind::No, derive_seed2(seed, 0, s))
            .expect("instance generation");
        if tv_distance(&inst.d1, &inst.d2).unwrap() != quarter {
            bad_no += 1;
        }
        let inst = gen_equivalence_instance(n, InstanceKind::Yes, derive_seed2(seed, 1, s))
            .expect("instance generation");
        if !tv_distance(&inst.d1, &inst.d2).unwrap().is_zero() {
            bad_yes += 1;
        }
    }
    out.record(
        bad_no == 0,
        format!("{}/{count} no-instances at exactly 1/4 (n = {n})", count - bad_no),
    );
    out.record(
        bad_yes == 0,
        format!("{}/{count} yes-instances at exactly 0", count - bad_yes),
    );
    out
}

/// Adversarial geometric size vectors against the support grid: the
/// fraction of non-resonant grid points must reach 99/100 for every vector.
pub fn check_hitting(
    log2_n: f64,
    beta: f64,
    q: usize,
    vectors: u64,
    ratio_threshold: f64,
    seed: u64,
) -> CheckOutcome {
    let mut out = CheckOutcome::new();
    let mut min_fraction = 1.0f64;
    let mut failures = 0u64;
    for v in 0..vectors {
        let sizes = adversarial_log_sizes(seed, v, q, log2_n);
        let report = hitting_fraction(&sizes, log2_n, beta, ratio_threshold);
        min_fraction = min_fraction.min(report.fraction);
        if report.fraction < 0.99 {
            failures += 1;
        }
    }
    out.record(
        failures == 0,
        format!(
            "{}/{vectors} vectors with grid fraction ≥ 99/100 (min {min_fraction:.5}, threshold {ratio_threshold})",
            vectors - failures
        ),
    );
    out
}

pub fn adversarial_log_sizes(seed: u64, v: u64, q: usize, log2_n: f64) -> Vec<f64> {
    let mut rng = rng_from_seed(derive_seed2(seed, 0x9e, v));
    let grid_lo = log2_n / 4.0;
    let grid_hi = 3.0 * log2_n / 4.0;
    let anchor = rng.random_range(grid_lo..grid_hi);
    let positions: Vec<f64> = match v % 5 {
        0 => {
            let step = 2f64.powf(rng.random_range(-1.5f64..6.0));
            (0..q).map(|i| anchor + step * i as f64).collect()
        }
        1 => {
            let step = rng.random_range(0.005..0.1);
            (0..q).map(|i| anchor + step * i as f64).collect()
        }
        2 => {
            let second = rng.random_range(grid_lo..grid_hi);
            let step = rng.random_range(0.01..2.0);
            (0..q)
                .map(|i| {
                    let base = if i % 2 == 0 { anchor } else { second };
                    base + step * (i / 2) as f64
                })
                .collect()
        }
        3 => (0..q)
            .map(|_| {
                let grid_point = rng.random_range(grid_lo as u64..grid_hi as u64) as f64;
                let side = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                grid_point + side * rng.random_range(0.05..0.45)
            })
            .collect(),
        _ => (0..q).map(|_| rng.random_range(0.0..log2_n)).collect(),
    };
    positions
        .into_iter()
        .map(|a_prime| (log2_n - a_prime).clamp(0.0, log2_n))
        .collect()
}

/// Brute-force grid measurement of the neighbor-distance exceptional set
/// against its `2cq` bound.
pub fn check_lemma_a1(sets: u64, resolution: u64, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new();
    let l = 100.0;
    let grid_err = 2.0 * l / resolution as f64;
    let mut violations = 0u64;
    for s in 0..sets {
        let mut rng = rng_from_seed(derive_seed2(seed, 0xa1, s));
        let q = rng.random_range(1..=64usize);
        let mut points: Vec<f64> = (0..q).map(|_| rng.random_range(0.0..l)).collect();
        points.sort_by(|a, b| a.partial_cmp(b).unwrap());
        points.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let c = if s % 2 == 0 { 0.5 } else { 0.25 };
        let measured = s_c_measure(&points, c, l, resolution, NeighborSide::Both).unwrap();
        if measured > 2.0 * c * points.len() as f64 + grid_err {
            violations += 1;
        }
    }
    out.record(
        violations == 0,
        format!("{}/{sets} point sets within 2cq + {grid_err}", sets - violations),
    );
    out
}

/// Exhaustive scale-exponent enumeration against the counting bounds for
/// the small/large dichotomy and per-bucket stability.
pub fn check_counting(samples: u64, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new();
    let a = AnalysisParams::new(3);
    let log2_alpha = a.alpha().log2();
    let phi = a.phi();
    let neither_bound = 2.0 * phi * 64.0 + 2.0;
    let per_j_bound = (4.0 * a.alpha() * a.alpha()).log2().ceil() as u64;
    let mut rng = rng_from_seed(derive_seed2(seed, 0xcc, 0));
    let mut bad_neither = 0u64;
    let mut bad_stability = 0u64;
    let mut max_neither = 0u64;
    let mut max_per_j = 0u64;
    for _ in 0..samples {
        let log2_size = rng.random_range(0.0..4096.0);
        let counts = count_bad_scalings(log2_size, 4096.0, 64.0, 8, phi, log2_alpha);
        max_neither = max_neither.max(counts.neither);
        if counts.neither as f64 > neither_bound {
            bad_neither += 1;
        }
        let worst = counts.not_stable_per_j.iter().copied().max().unwrap_or(0);
        max_per_j = max_per_j.max(worst);
        if worst > per_j_bound || counts.not_stable_total > 16 * per_j_bound {
            bad_stability += 1;
        }
    }
    out.record(
        bad_neither == 0,
        format!("neither-count ≤ {neither_bound:.1} for all {samples} sizes (max {max_neither})"),
    );
    out.record(
        bad_stability == 0,
        format!("per-bucket stability violations ≤ {per_j_bound} (max {max_per_j})"),
    );
    out
}

fn atoms_naive(sets: &[Vec<u64>], n: u64) -> AtomPartition {
    let t = sets.len();
    let mut result = Vec::new();
    for signature in 0u32..(1 << t) {
        let ids: Vec<u64> = (1..=n)
            .filter(|id| {
                sets.iter()
                    .enumerate()
                    .all(|(r, set)| set.contains(id) == (signature >> r & 1 == 1))
            })
            .collect();
        if !ids.is_empty() {
            result.push(Atom { signature, ids });
        }
    }
    AtomPartition { atoms: result }
}

/// Atom partitions against full signature enumeration.
pub fn check_atoms(cases: u64, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new();
    let mut rng = rng_from_seed(derive_seed2(seed, 0xad, 0));
    let mut mismatches = 0u64;
    for _ in 0..cases {
        let n = rng.random_range(1..=20u64);
        let t = rng.random_range(1..=5usize);
        let sets: Vec<Vec<u64>> = (0..t)
            .map(|_| (1..=n).filter(|_| rng.random_bool(0.4)).collect())
            .collect();
        let fast = atoms(&sets, n).unwrap();
        if fast != atoms_naive(&sets, n) || fast.len() > 1 << t {
            mismatches += 1;
        }
    }
    out.record(
        mismatches == 0,
        format!("{}/{cases} partitions equal naive enumeration", cases - mismatches),
    );
    out
}

/// Light-set cardinality and mass bounds on constructed dense-support
/// distributions with an exact minimum-mass promise.
pub fn check_fact54(cases: u64, seed: u64) -> CheckOutcome {
    let mut out = CheckOutcome::new();
    let mut violations = 0u64;
    for s in 0..cases {
        let (d, eps, tau) = dense_support_distribution(derive_seed2(seed, 0x54, s));
        let (card, mass) = d.light_set_size(&tau).unwrap();
        let n_rat = Rational::from_integer(d.n().into());
        let bound = (rat(1, 2) - &eps) * &n_rat;
        if Rational::from_integer(card.into()) < bound || mass < (rat(1, 2) - &eps) * &tau {
            violations += 1;
        }
    }
    out.record(
        violations == 0,
        format!("{}/{cases} dense distributions meet the light-set bounds", cases - violations),
    );
    out
}

/// Distribution with support at least `(1-eps) n`, every support element at
/// least `tau/n`, total mass exactly one.
pub fn dense_support_distribution(seed: u64) -> (Arc<PiecewiseDistribution>, Rational, Rational) {
    let mut rng = rng_from_seed(seed);
    let n: u64 = rng.random_range(512..=4096);
    let eps = rat(rng.random_range(1..=49), 100);
    let n_rat = Rational::from_integer(n.into());
    let min_w = ((Rational::one() - &eps) * &n_rat).ceil().to_integer();
    let min_w = u64::try_from(min_w).unwrap();
    let w = rng.random_range(min_w..=n);
    let w_rat = Rational::from_integer(w.into());
    let tau = loop {
        let t = rat(rng.random_range(1..=127), 64);
        if t < rat(2, 1) && &t * &w_rat < n_rat {
            break t;
        }
    };
    let per = &tau / &n_rat;
    let two_over_n = rat(2, 1) / &n_rat;
    let four_over_n = rat(4, 1) / &n_rat;
    let residual = Rational::one() - &per * &w_rat;
    let heavy_cap = (&residual / (&four_over_n - &per)).floor().to_integer();
    let heavy_cap = u64::try_from(heavy_cap).unwrap().min(w / 8);
    let h4 = if heavy_cap > 0 && rng.random_bool(0.5) {
        rng.random_range(0..=heavy_cap)
    } else {
        0
    };
    let after_heavy = residual - (&four_over_n - &per) * Rational::from_integer(h4.into());
    let bump_cap = (&after_heavy / (&two_over_n - &per)).floor().to_integer();
    let bump_cap = u64::try_from(bump_cap).unwrap();
    let h2 = bump_cap.min(w - h4 - 1);
    let after_bump = after_heavy - (&two_over_n - &per) * Rational::from_integer(h2.into());
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
    let d = PiecewiseDistribution::new(n, pieces, None, tau.clone()).expect("valid construction");
    (Arc::new(d), eps, tau)
}
