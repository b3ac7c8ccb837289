//! The COND oracle: a seeded sampling handle bound to one distribution.
//!
//! Given a query set `S` with `D(S) > 0` the oracle returns `i ∈ S` with
//! probability `D(i)/D(S)`, independently across calls; when `D(S) = 0` it
//! returns a uniformly random element of `S`. Every call advances the query
//! counter, and replaying with the same seed reproduces the same transcript.
//!
//! Oracles are single-threaded handles; run concurrent trials on independent
//! oracles with derived seeds, never by sharing one.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};

use crate::dist::PiecewiseDistribution;
use crate::error::CondError;
use crate::query::{QuerySet, SetDescriptor};
use crate::seed::{derive_seed, rng_from_seed, SplitMix64};

/// Identifier written into experiment metadata alongside every seed.
pub const RNG_ALGORITHM: &str =
    "chacha8 (rand_chacha 0.9, seed_from_u64); implicit-set materialization: splitmix64";

pub type TranscriptEntry = (SetDescriptor, u64);

/// Ordered record of (query-set descriptor, returned id) pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Transcript {
    pub entries: Vec<TranscriptEntry>,
}

/// Transcripts of a two-oracle session, one per distribution.
#[derive(Debug, Clone)]
pub struct PairTranscript {
    pub first: Transcript,
    pub second: Transcript,
}

impl PairTranscript {
    /// Collects both logs; errors if either oracle was run without logging
    /// or used batched counting (so lengths no longer match the counters).
    pub fn from_oracles(a: &CondOracle, b: &CondOracle) -> Result<Self, CondError> {
        let first = a
            .transcript()
            .ok_or_else(|| CondError::param("first oracle has no transcript log"))?;
        let second = b
            .transcript()
            .ok_or_else(|| CondError::param("second oracle has no transcript log"))?;
        if first.entries.len() as u64 != a.query_count()
            || second.entries.len() as u64 != b.query_count()
        {
            return Err(CondError::param(
                "transcript length does not match the query counter",
            ));
        }
        Ok(PairTranscript { first, second })
    }

    /// Total length; equals the sum of the two oracles' query counts.
    pub fn len(&self) -> usize {
        self.first.entries.len() + self.second.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// A seeded conditional-sampling handle with query accounting.
pub struct CondOracle {
    dist: Arc<PiecewiseDistribution>,
    rng: ChaCha8Rng,
    seed: u64,
    query_count: u64,
    log: Option<Vec<TranscriptEntry>>,
    /// Counter handing out sub-seeds for implicitly sampled sets.
    derived: u64,
    /// Reusable binomial samplers keyed by (count, p); the estimators hit the
    /// same handful of parameters millions of times.
    binom: BinomialCache,
    scratch_hits: Vec<u64>,
}

#[derive(Default)]
struct BinomialCache {
    entries: Vec<(u64, u64, Binomial)>,
}

impl BinomialCache {
    fn draw<R: rand::RngCore>(&mut self, rng: &mut R, n: u64, p: f64) -> u64 {
        if n == 0 || p <= 0.0 {
            return 0;
        }
        if p >= 1.0 {
            return n;
        }
        let bits = p.to_bits();
        if let Some((_, _, b)) = self
            .entries
            .iter()
            .find(|(en, ep, _)| *en == n && *ep == bits)
        {
            return b.sample(rng);
        }
        let b = Binomial::new(n, p).expect("validated binomial parameters");
        if self.entries.len() >= 64 {
            self.entries.clear();
        }
        self.entries.push((n, bits, b));
        b.sample(rng)
    }
}

impl CondOracle {
    pub fn new(dist: Arc<PiecewiseDistribution>, seed: u64) -> Self {
        CondOracle {
            dist,
            rng: rng_from_seed(seed),
            seed,
            query_count: 0,
            log: None,
            derived: 0,
            binom: BinomialCache::default(),
            scratch_hits: Vec::new(),
        }
    }

    /// Oracle that records a transcript of every sample.
    pub fn with_log(dist: Arc<PiecewiseDistribution>, seed: u64) -> Self {
        let mut o = Self::new(dist, seed);
        o.log = Some(Vec::new());
        o
    }

    pub fn distribution(&self) -> &Arc<PiecewiseDistribution> {
        &self.dist
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn query_count(&self) -> u64 {
        self.query_count
    }

    pub fn transcript(&self) -> Option<Transcript> {
        self.log.as_ref().map(|entries| Transcript {
            entries: entries.clone(),
        })
    }

    /// Tester-side uniform id from the oracle's stream. Not an oracle query;
    /// does not advance the counter.
    pub fn uniform_id(&mut self) -> u64 {
        self.rng.random_range(1..=self.dist.n())
    }

    /// Fresh sub-seed for an implicitly sampled set or a nested generator.
    /// Not an oracle query.
    pub fn fresh_seed(&mut self) -> u64 {
        self.derived += 1;
        derive_seed(self.seed, self.derived)
    }

    /// Direct access to the seeded stream for tester-side coin flips.
    pub fn rng(&mut self) -> &mut ChaCha8Rng {
        &mut self.rng
    }

    fn log_sample(&mut self, set: &QuerySet, id: u64) {
        if let Some(log) = &mut self.log {
            log.push((set.descriptor(), id));
        }
    }

    /// One conditional sample.
    pub fn cond_sample(&mut self, set: &QuerySet) -> Result<u64, CondError> {
        let id = match set {
            QuerySet::Explicit(ids) => {
                self.validate_ids(ids)?;
                self.query_count += 1;
                self.sample_explicit(ids)
            }
            QuerySet::FullDomain => {
                self.query_count += 1;
                self.sample_full_domain()
            }
            QuerySet::BernoulliImplicit { p, seed, .. } => {
                set.consume()?;
                self.query_count += 1;
                self.sample_implicit(*p, *seed)
            }
        };
        self.log_sample(set, id);
        Ok(id)
    }

    /// `m` conditional samples from one explicit set, with the per-id weight
    /// table built once. Advances the counter by `m`.
    pub fn cond_sample_many(&mut self, set: &QuerySet, m: u64) -> Result<Vec<u64>, CondError> {
        let ids = match set {
            QuerySet::Explicit(ids) => ids,
            _ => {
                return Err(CondError::UnsupportedRepresentation(
                    "batched sampling needs an explicit set",
                ))
            }
        };
        self.validate_ids(ids)?;
        let cum = self.cumulative_weights(ids);
        let total = *cum.last().unwrap();
        let mut out = Vec::with_capacity(m as usize);
        for _ in 0..m {
            let id = if total > 0.0 {
                ids[pick_from_cumulative(&cum, self.rng.random_range(0.0..total))]
            } else {
                ids[self.rng.random_range(0..ids.len())]
            };
            out.push(id);
        }
        self.query_count += m;
        if self.log.is_some() {
            for &id in &out {
                self.log_sample(set, id);
            }
        }
        Ok(out)
    }

    /// Draws `m` conditional samples from `X ∪ Y` and returns how many landed
    /// in `Y`, as a single binomial count (identical in distribution to `m`
    /// individual draws). Advances the counter by `m`.
    ///
    /// The binomial is drawn for the lexicographically larger of the two
    /// sets, so swapping `X` and `Y` under the same seed complements the
    /// count exactly.
    pub fn sample_count_in(
        &mut self,
        x: &[u64],
        y: &[u64],
        m: u64,
    ) -> Result<u64, CondError> {
        self.validate_ids(x)?;
        self.validate_ids(y)?;
        if let Some(&id) = intersect_sorted(x, y).first() {
            return Err(CondError::OverlappingSets { id });
        }
        let mass_x: f64 = x.iter().map(|&id| self.dist.mass_f64_of_id(id)).sum();
        let mass_y: f64 = y.iter().map(|&id| self.dist.mass_f64_of_id(id)).sum();
        let total = mass_x + mass_y;
        let p_y = if total > 0.0 {
            mass_y / total
        } else {
            // zero-mass convention: uniform over X ∪ Y
            y.len() as f64 / (x.len() + y.len()) as f64
        };
        let y_is_canonical = y > x;
        let p_canonical = if y_is_canonical { p_y } else { 1.0 - p_y };
        let hits = self.binom.draw(&mut self.rng, m, p_canonical);
        self.query_count += m;
        Ok(if y_is_canonical { hits } else { m - hits })
    }

    fn validate_ids(&self, ids: &[u64]) -> Result<(), CondError> {
        if ids.is_empty() {
            return Err(CondError::EmptyQuerySet);
        }
        let n = self.dist.n();
        for &id in ids {
            if id == 0 || id > n {
                return Err(CondError::IdOutOfRange { id, n });
            }
        }
        Ok(())
    }

    fn cumulative_weights(&self, ids: &[u64]) -> Vec<f64> {
        let mut cum = Vec::with_capacity(ids.len());
        let mut acc = 0.0;
        for &id in ids {
            acc += self.dist.mass_f64_of_id(id);
            cum.push(acc);
        }
        cum
    }

    fn sample_explicit(&mut self, ids: &[u64]) -> u64 {
        let cum = self.cumulative_weights(ids);
        let total = *cum.last().unwrap();
        if total > 0.0 {
            ids[pick_from_cumulative(&cum, self.rng.random_range(0.0..total))]
        } else {
            ids[self.rng.random_range(0..ids.len())]
        }
    }

    fn sample_full_domain(&mut self) -> u64 {
        let cum = self.dist.cum_mass_f64();
        let total = *cum.last().unwrap();
        let u = self.rng.random_range(0.0..total);
        let piece = cum.partition_point(|&c| c <= u).saturating_sub(1);
        let piece = piece.min(self.dist.pieces().len() - 1);
        let (lo, hi) = self.dist.piece_bounds(piece);
        let pre = self.rng.random_range(lo..hi);
        self.dist.id_of_pre(pre)
    }

    /// Lazily samples from `D_S` where `S` includes each id independently
    /// with probability `p`, without materializing `S`: per piece `j` draw a
    /// binomial hit count `H_j`, plus one for the zero-mass tail. If the set
    /// carries positive mass, pick a piece with probability proportional to
    /// `H_j * mass_j` and a uniform id inside it (exact by exchangeability,
    /// because each implicit set is used once); if all hits are on zero-mass
    /// ids, pick uniformly among the hits; if the realized set is empty,
    /// redraw the whole set from a derived sub-seed and count one extra call.
    fn sample_implicit(&mut self, p: f64, seed: u64) -> u64 {
        let mut hits = std::mem::take(&mut self.scratch_hits);
        let id = 'found: {
            for attempt in 0u64.. {
                let mut set_rng = SplitMix64::new(derive_seed(seed, attempt));
                let pieces_len = self.dist.pieces().len();
                hits.clear();
                let mut positive = 0.0f64;
                let mut total_hits = 0u64;
                for j in 0..pieces_len {
                    let count = self.dist.pieces()[j].count;
                    let h = self.binom.draw(&mut set_rng, count, p);
                    hits.push(h);
                    positive += h as f64 * self.dist.piece_mass_f64(j);
                    total_hits += h;
                }
                let tail = self.dist.n() - self.dist.covered_count();
                let tail_hits = self.binom.draw(&mut set_rng, tail, p);
                total_hits += tail_hits;

                if positive > 0.0 {
                    // weighted piece pick over hit-count * mass
                    let u = self.rng.random_range(0.0..positive);
                    let mut acc = 0.0;
                    let mut pick = pieces_len - 1;
                    for j in 0..pieces_len {
                        acc += hits[j] as f64 * self.dist.piece_mass_f64(j);
                        if acc > u {
                            pick = j;
                            break;
                        }
                    }
                    let (lo, hi) = self.dist.piece_bounds(pick);
                    let pre = self.rng.random_range(lo..hi);
                    break 'found self.dist.id_of_pre(pre);
                }

                if total_hits > 0 {
                    // zero-mass convention: uniform among the hit ids
                    let mut u = self.rng.random_range(0..total_hits);
                    let mut pre = None;
                    for (j, &h) in hits.iter().enumerate() {
                        if u < h {
                            let (lo, hi) = self.dist.piece_bounds(j);
                            pre = Some(self.rng.random_range(lo..hi));
                            break;
                        }
                        u -= h;
                    }
                    let pre = pre.unwrap_or_else(|| {
                        self.rng
                            .random_range(self.dist.covered_count()..self.dist.n())
                    });
                    break 'found self.dist.id_of_pre(pre);
                }

                // realized set was empty: redraw, one extra oracle call
                self.query_count += 1;
            }
            unreachable!("redraw loop always terminates for p > 0")
        };
        self.scratch_hits = hits;
        id
    }
}

#[inline]
fn pick_from_cumulative(cum: &[f64], u: f64) -> usize {
    cum.partition_point(|&c| c <= u).min(cum.len() - 1)
}

fn intersect_sorted(a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut out = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::Piece;
    use crate::ratio;

    fn arc(d: PiecewiseDistribution) -> Arc<PiecewiseDistribution> {
        Arc::new(d)
    }

    #[test]
    fn singleton_set_returns_its_element() {
        let d = arc(PiecewiseDistribution::uniform(4).unwrap());
        let mut o = CondOracle::new(d, 1);
        let s = QuerySet::explicit(vec![2]).unwrap();
        for _ in 0..100 {
            assert_eq!(o.cond_sample(&s).unwrap(), 2);
        }
        assert_eq!(o.query_count(), 100);
    }

    #[test]
    fn zero_mass_set_is_uniform() {
        // D supported on {1, 2}; query {3, 4}
        let d = arc(
            PiecewiseDistribution::new(4, vec![Piece::new(2, ratio(1, 2))], None, ratio(0, 1))
                .unwrap(),
        );
        let mut o = CondOracle::new(d, 7);
        let s = QuerySet::explicit(vec![3, 4]).unwrap();
        let trials = 100_000;
        let mut hits3 = 0u64;
        for _ in 0..trials {
            match o.cond_sample(&s).unwrap() {
                3 => hits3 += 1,
                4 => {}
                other => panic!("sample {other} outside the query set"),
            }
        }
        let freq = hits3 as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.01, "freq = {freq}");
    }

    #[test]
    fn conditional_frequencies_match_exact_ratio() {
        // D(1) = 3/4, D(2) = 1/4: sampling {1, 2} returns 1 with freq ~ 0.75
        let d = arc(
            PiecewiseDistribution::new(
                2,
                vec![Piece::new(1, ratio(3, 4)), Piece::new(1, ratio(1, 4))],
                None,
                ratio(0, 1),
            )
            .unwrap(),
        );
        let mut o = CondOracle::new(d, 3);
        let s = QuerySet::explicit(vec![1, 2]).unwrap();
        let trials = 100_000;
        let ones = (0..trials)
            .filter(|_| o.cond_sample(&s).unwrap() == 1)
            .count();
        let freq = ones as f64 / trials as f64;
        assert!((freq - 0.75).abs() < 0.01, "freq = {freq}");
    }

    #[test]
    fn empty_explicit_set_errors() {
        let d = arc(PiecewiseDistribution::uniform(4).unwrap());
        let mut o = CondOracle::new(d, 1);
        assert!(o.cond_sample(&QuerySet::Explicit(vec![])).is_err());
        assert!(matches!(
            o.cond_sample(&QuerySet::Explicit(vec![9])),
            Err(CondError::IdOutOfRange { .. })
        ));
    }

    #[test]
    fn implicit_set_is_single_use() {
        let d = arc(PiecewiseDistribution::uniform(64).unwrap());
        let mut o = CondOracle::new(d, 1);
        let s = QuerySet::bernoulli(0.25, 99).unwrap();
        o.cond_sample(&s).unwrap();
        assert!(matches!(
            o.cond_sample(&s),
            Err(CondError::ConsumedImplicitSet)
        ));
    }

    #[test]
    fn same_seed_same_transcript() {
        let d = arc(PiecewiseDistribution::uniform_on(256, 64, None).unwrap());
        let mut a = CondOracle::with_log(d.clone(), 42);
        let mut b = CondOracle::with_log(d, 42);
        let sets = vec![
            QuerySet::FullDomain,
            QuerySet::explicit((1..=32).collect()).unwrap(),
            QuerySet::bernoulli(0.1, 5).unwrap(),
            QuerySet::explicit(vec![100, 200]).unwrap(),
        ];
        for s in &sets {
            let sa = a.cond_sample(&s.clone()).unwrap();
            let sb = b.cond_sample(&s.clone()).unwrap();
            assert_eq!(sa, sb);
        }
        assert_eq!(a.transcript(), b.transcript());
        assert_eq!(a.query_count(), b.query_count());
    }

    #[test]
    fn pair_transcript_length_is_sum_of_counts() {
        let d = arc(PiecewiseDistribution::uniform(16).unwrap());
        let mut a = CondOracle::with_log(d.clone(), 1);
        let mut b = CondOracle::with_log(d, 2);
        let s = QuerySet::explicit(vec![1, 2, 3]).unwrap();
        for _ in 0..5 {
            a.cond_sample(&s).unwrap();
        }
        for _ in 0..3 {
            b.cond_sample(&s).unwrap();
        }
        let t = PairTranscript::from_oracles(&a, &b).unwrap();
        assert_eq!(t.len() as u64, a.query_count() + b.query_count());
    }

    #[test]
    fn batched_count_matches_capacity_and_counter() {
        let d = arc(PiecewiseDistribution::uniform(8).unwrap());
        let mut o = CondOracle::new(d, 11);
        let h = o.sample_count_in(&[1], &[2], 1000).unwrap();
        assert!(h <= 1000);
        assert_eq!(o.query_count(), 1000);
        assert!(matches!(
            o.sample_count_in(&[1, 2], &[2, 3], 10),
            Err(CondError::OverlappingSets { id: 2 })
        ));
    }

    #[test]
    fn batched_count_complements_under_swap() {
        let d = arc(
            PiecewiseDistribution::new(
                8,
                vec![Piece::new(2, ratio(1, 4)), Piece::new(4, ratio(1, 8))],
                None,
                ratio(0, 1),
            )
            .unwrap(),
        );
        for (x, y) in [
            (vec![1u64], vec![3u64]),
            (vec![1, 2], vec![3, 4, 5]),
            (vec![7], vec![8]), // both mass zero: p = 1/2 boundary
        ] {
            let mut o1 = CondOracle::new(d.clone(), 5);
            let mut o2 = CondOracle::new(d.clone(), 5);
            let m = 501;
            let h_y = o1.sample_count_in(&x, &y, m).unwrap();
            let h_x = o2.sample_count_in(&y, &x, m).unwrap();
            assert_eq!(h_y + h_x, m, "swap must complement the count exactly");
        }
    }
}
