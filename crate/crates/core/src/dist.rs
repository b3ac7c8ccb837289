//! Exact piecewise distributions over `[n] = {1, ..., n}`.
//!
//! A distribution is a list of pieces, each occupying a contiguous run of
//! pre-relabel indices and assigning the same exact rational mass to every
//! index in the run. Indices beyond the pieces carry mass exactly zero. An
//! optional relabel bijection maps pre-relabel indices to domain ids, so a
//! "random subset" support is just a uniform permutation in front of a
//! contiguous layout.

use std::sync::Arc;

use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;

use crate::error::CondError;
use crate::query::QuerySet;
use crate::seed::rng_from_seed;
use crate::Rational;

/// Desk-scale cap on materialized relabel bijections.
pub const MAX_RELABEL_N: u64 = 1 << 24;

/// A run of `count` consecutive pre-relabel indices, each with mass `mass`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Piece {
    pub count: u64,
    /// Per-element mass, exact.
    pub mass: Rational,
}

impl Piece {
    pub fn new(count: u64, mass: Rational) -> Self {
        Piece { count, mass }
    }
}

/// A bijection on `[n]`: a pure function of `(n, seed)`, materialized as
/// explicit forward and inverse arrays on first use.
#[derive(Debug)]
pub struct Relabel {
    n: u64,
    pub seed: u64,
    arrays: std::sync::OnceLock<RelabelArrays>,
}

#[derive(Debug)]
struct RelabelArrays {
    /// `forward[pre] = id - 1` for 0-based `pre`.
    forward: Vec<u32>,
    /// `inverse[id - 1] = pre`.
    inverse: Vec<u32>,
}

impl Relabel {
    /// Uniformly random bijection on `[n]` (seeded Fisher-Yates, run lazily).
    pub fn generate(n: u64, seed: u64) -> Result<Self, CondError> {
        if n > MAX_RELABEL_N {
            return Err(CondError::RelabelTooLarge { n });
        }
        Ok(Relabel {
            n,
            seed,
            arrays: std::sync::OnceLock::new(),
        })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    fn arrays(&self) -> &RelabelArrays {
        self.arrays.get_or_init(|| {
            let mut forward: Vec<u32> = (0..self.n as u32).collect();
            forward.shuffle(&mut rng_from_seed(self.seed));
            let mut inverse = vec![0u32; self.n as usize];
            for (pre, &id0) in forward.iter().enumerate() {
                inverse[id0 as usize] = pre as u32;
            }
            RelabelArrays { forward, inverse }
        })
    }

    #[inline]
    pub fn id_of_pre(&self, pre: u64) -> u64 {
        self.arrays().forward[pre as usize] as u64 + 1
    }

    #[inline]
    pub fn pre_of_id(&self, id: u64) -> u64 {
        self.arrays().inverse[(id - 1) as usize] as u64
    }

    /// Checks that forward and inverse really are mutually inverse.
    pub fn is_bijection(&self) -> bool {
        let arrays = self.arrays();
        arrays.forward.len() == arrays.inverse.len()
            && arrays
                .forward
                .iter()
                .enumerate()
                .all(|(pre, &id0)| arrays.inverse[id0 as usize] as usize == pre)
    }
}

/// An exact, bucketed probability distribution over `[n]`.
#[derive(Debug, Clone)]
pub struct PiecewiseDistribution {
    n: u64,
    pieces: Vec<Piece>,
    relabel: Option<Arc<Relabel>>,
    /// Declared minimum-mass fraction: every support element has mass >= tau/n.
    /// Zero when unknown.
    tau: Rational,
    /// prefix_counts[i] = total count of pieces 0..i.
    prefix_counts: Vec<u64>,
    /// Cumulative piece mass (count * per-element mass) as f64, for sampling.
    cum_mass_f64: Vec<f64>,
    mass_f64: Vec<f64>,
}

impl PiecewiseDistribution {
    /// Builds and validates a distribution.
    ///
    /// Invariants enforced: counts positive, masses nonnegative, total mass
    /// exactly 1, counts fit in `[n]`, and every positive per-element mass is
    /// at least `tau/n` when `tau > 0`.
    pub fn new(
        n: u64,
        pieces: Vec<Piece>,
        relabel: Option<Arc<Relabel>>,
        tau: Rational,
    ) -> Result<Self, CondError> {
        if n == 0 {
            return Err(CondError::EmptyDomain);
        }
        let mut total_count: u64 = 0;
        let mut total_mass = Rational::zero();
        for (index, p) in pieces.iter().enumerate() {
            if p.count == 0 {
                return Err(CondError::ZeroCount { index });
            }
            if p.mass.is_negative() {
                return Err(CondError::NegativeMass { index });
            }
            total_count = total_count
                .checked_add(p.count)
                .ok_or(CondError::TooManyElements { total: u64::MAX, n })?;
            total_mass += p.mass.clone() * Rational::from_integer(p.count.into());
        }
        if total_count > n {
            return Err(CondError::TooManyElements {
                total: total_count,
                n,
            });
        }
        if !total_mass.is_one() {
            return Err(CondError::NotNormalized {
                got: total_mass.to_string(),
            });
        }
        if tau.is_negative() {
            return Err(CondError::param("tau must be nonnegative"));
        }
        if tau.is_positive() {
            let min = tau.clone() / Rational::from_integer(n.into());
            for p in &pieces {
                if p.mass.is_positive() && p.mass < min {
                    return Err(CondError::BelowMinMass {
                        mass: p.mass.to_string(),
                        min: min.to_string(),
                    });
                }
            }
        }
        if let Some(r) = &relabel {
            if r.n() != n {
                return Err(CondError::param(format!(
                    "relabel domain {} does not match n = {n}",
                    r.n()
                )));
            }
        }
        let mut prefix_counts = Vec::with_capacity(pieces.len() + 1);
        let mut cum_mass_f64 = Vec::with_capacity(pieces.len() + 1);
        let mut mass_f64 = Vec::with_capacity(pieces.len());
        let mut c = 0u64;
        let mut acc = 0f64;
        prefix_counts.push(0);
        cum_mass_f64.push(0.0);
        for p in &pieces {
            c += p.count;
            let m = rational_to_f64(&p.mass);
            acc += m * p.count as f64;
            prefix_counts.push(c);
            cum_mass_f64.push(acc);
            mass_f64.push(m);
        }
        Ok(PiecewiseDistribution {
            n,
            pieces,
            relabel,
            tau,
            prefix_counts,
            cum_mass_f64,
            mass_f64,
        })
    }

    /// Uniform distribution over the first `support` ids (optionally relabeled).
    pub fn uniform_on(
        n: u64,
        support: u64,
        relabel: Option<Arc<Relabel>>,
    ) -> Result<Self, CondError> {
        if support == 0 || support > n {
            return Err(CondError::param(format!(
                "support {support} out of range for n = {n}"
            )));
        }
        let pieces = vec![Piece::new(support, Rational::new(1.into(), support.into()))];
        // every support element has mass 1/support = (n/support)/n
        let tau = Rational::new(n.into(), support.into());
        Self::new(n, pieces, relabel, tau)
    }

    /// Uniform distribution over all of `[n]`.
    pub fn uniform(n: u64) -> Result<Self, CondError> {
        Self::uniform_on(n, n, None)
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn relabel(&self) -> Option<&Arc<Relabel>> {
        self.relabel.as_ref()
    }

    pub fn tau(&self) -> &Rational {
        &self.tau
    }

    /// Total count covered by pieces (indices beyond carry mass zero).
    pub fn covered_count(&self) -> u64 {
        *self.prefix_counts.last().unwrap()
    }

    /// Piece index containing a pre-relabel index, if any.
    #[inline]
    pub fn piece_of_pre(&self, pre: u64) -> Option<usize> {
        if pre >= self.covered_count() {
            return None;
        }
        // prefix_counts is strictly increasing; find the run containing pre.
        let idx = self.prefix_counts.partition_point(|&c| c <= pre);
        Some(idx - 1)
    }

    #[inline]
    pub fn pre_of_id(&self, id: u64) -> u64 {
        match &self.relabel {
            Some(r) => r.pre_of_id(id),
            None => id - 1,
        }
    }

    #[inline]
    pub fn id_of_pre(&self, pre: u64) -> u64 {
        match &self.relabel {
            Some(r) => r.id_of_pre(pre),
            None => pre + 1,
        }
    }

    /// Exact mass of a single id.
    pub fn mass_of_id(&self, id: u64) -> Result<Rational, CondError> {
        if id == 0 || id > self.n {
            return Err(CondError::IdOutOfRange { id, n: self.n });
        }
        Ok(match self.piece_of_pre(self.pre_of_id(id)) {
            Some(i) => self.pieces[i].mass.clone(),
            None => Rational::zero(),
        })
    }

    /// Mass of a single id at sampling precision.
    #[inline]
    pub fn mass_f64_of_id(&self, id: u64) -> f64 {
        match self.piece_of_pre(self.pre_of_id(id)) {
            Some(i) => self.mass_f64[i],
            None => 0.0,
        }
    }

    pub(crate) fn cum_mass_f64(&self) -> &[f64] {
        &self.cum_mass_f64
    }

    #[inline]
    pub(crate) fn piece_mass_f64(&self, i: usize) -> f64 {
        self.mass_f64[i]
    }

    pub(crate) fn piece_bounds(&self, i: usize) -> (u64, u64) {
        (self.prefix_counts[i], self.prefix_counts[i + 1])
    }

    /// Exact mass `D(S)` of an explicit or full-domain query set.
    ///
    /// Implicitly sampled sets have no deterministic mass; asking for one is
    /// an unsupported-representation error.
    pub fn mass_of(&self, set: &QuerySet) -> Result<Rational, CondError> {
        match set {
            QuerySet::FullDomain => Ok(Rational::one()),
            QuerySet::Explicit(ids) => {
                let mut total = Rational::zero();
                for &id in ids.iter() {
                    total += self.mass_of_id(id)?;
                }
                Ok(total)
            }
            QuerySet::BernoulliImplicit { .. } => Err(CondError::UnsupportedRepresentation(
                "mass of an implicitly sampled set is a random variable",
            )),
        }
    }

    /// Number of ids with strictly positive mass. Ground truth for the
    /// harness; estimators never see it.
    pub fn support_size(&self) -> u64 {
        self.pieces
            .iter()
            .filter(|p| p.mass.is_positive())
            .map(|p| p.count)
            .sum()
    }

    /// Cardinality and exact mass of the light set
    /// `{x : D(x) in [tau/n, 2/n]}`.
    pub fn light_set_size(&self, tau: &Rational) -> Result<(u64, Rational), CondError> {
        if !tau.is_positive() {
            return Err(CondError::param("tau must be positive"));
        }
        let n = Rational::from_integer(self.n.into());
        let lo = tau / &n;
        let hi = Rational::new(2.into(), self.n.into());
        let mut card = 0u64;
        let mut mass = Rational::zero();
        for p in &self.pieces {
            if p.mass >= lo && p.mass <= hi {
                card += p.count;
                mass += p.mass.clone() * Rational::from_integer(p.count.into());
            }
        }
        Ok((card, mass))
    }

    /// Does every support element carry mass at least `tau/n`?
    pub fn min_mass_promise_holds(&self, tau: &Rational) -> bool {
        if !tau.is_positive() {
            return true;
        }
        let min = tau / Rational::from_integer(self.n.into());
        self.pieces
            .iter()
            .all(|p| !p.mass.is_positive() || p.mass >= min)
    }
}

/// Exact-to-float conversion used only at the sampling boundary.
pub fn rational_to_f64(r: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    r.to_f64().unwrap_or_else(|| {
        // Fall back through a scaled division; masses here are in [0, 1].
        let scaled = (r * Rational::from_integer((1u64 << 62).into())).trunc();
        scaled.to_integer().to_f64().unwrap_or(0.0) / (1u64 << 62) as f64
    })
}

/// Exact total variation distance `(1/2) * sum_x |d1(x) - d2(x)|`.
///
/// Computed on the common refinement of the two piece partitions after
/// applying relabels: when both distributions carry the same bijection (or
/// none), the refinement walks the piece runs directly; otherwise ids are
/// bucketed by their (piece-in-d1, piece-in-d2) pair in one O(n) pass.
pub fn tv_distance(
    d1: &PiecewiseDistribution,
    d2: &PiecewiseDistribution,
) -> Result<Rational, CondError> {
    if d1.n != d2.n {
        return Err(CondError::DomainMismatch {
            left: d1.n,
            right: d2.n,
        });
    }
    // a relabel is a pure function of (n, seed), so equal seeds over equal
    // domains mean the same bijection without materializing it
    let same_relabel = match (&d1.relabel, &d2.relabel) {
        (None, None) => true,
        (Some(a), Some(b)) => Arc::ptr_eq(a, b) || a.seed == b.seed && a.n() == b.n(),
        _ => false,
    };
    let two = Rational::from_integer(2.into());
    if same_relabel {
        // Walk the two piece runs over the shared pre-relabel axis.
        let mut total = Rational::zero();
        let mut i = 0usize;
        let mut j = 0usize;
        let mut pos = 0u64;
        let zero = Rational::zero();
        while pos < d1.n {
            let (m1, end1) = if i < d1.pieces.len() {
                (&d1.pieces[i].mass, d1.prefix_counts[i + 1])
            } else {
                (&zero, d1.n)
            };
            let (m2, end2) = if j < d2.pieces.len() {
                (&d2.pieces[j].mass, d2.prefix_counts[j + 1])
            } else {
                (&zero, d2.n)
            };
            let end = end1.min(end2);
            let run = end - pos;
            if m1 != m2 {
                let diff = (m1 - m2).abs();
                total += diff * Rational::from_integer(run.into());
            }
            pos = end;
            if pos == end1 && i < d1.pieces.len() {
                i += 1;
            }
            if pos == end2 && j < d2.pieces.len() {
                j += 1;
            }
        }
        return Ok(total / two);
    }
    // General case: count ids per (piece1, piece2) cell. Index p == piece
    // count means "beyond the pieces" (mass zero).
    let p1 = d1.pieces.len();
    let p2 = d2.pieces.len();
    let mut cells = vec![0u64; (p1 + 1) * (p2 + 1)];
    for id in 1..=d1.n {
        let a = d1.piece_of_pre(d1.pre_of_id(id)).unwrap_or(p1);
        let b = d2.piece_of_pre(d2.pre_of_id(id)).unwrap_or(p2);
        cells[a * (p2 + 1) + b] += 1;
    }
    let zero = Rational::zero();
    let mut total = Rational::zero();
    for a in 0..=p1 {
        let m1 = if a < p1 { &d1.pieces[a].mass } else { &zero };
        for b in 0..=p2 {
            let count = cells[a * (p2 + 1) + b];
            if count == 0 {
                continue;
            }
            let m2 = if b < p2 { &d2.pieces[b].mass } else { &zero };
            if m1 != m2 {
                total += (m1 - m2).abs() * Rational::from_integer(count.into());
            }
        }
    }
    Ok(total / two)
}
