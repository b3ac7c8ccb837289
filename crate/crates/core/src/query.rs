//! Query sets: the inputs handed to a COND oracle.

use std::sync::atomic::{AtomicBool, Ordering};

use crate::error::CondError;

/// A conditioning set.
///
/// Explicit sets are sorted distinct ids. `BernoulliImplicit` describes a set
/// drawn by including every id independently with probability `p`; it is
/// realized lazily by the oracle (per-piece binomial hit counts) and is
/// single-use, because answering a second query consistently would require
/// materializing the realized set.
#[derive(Debug)]
pub enum QuerySet {
    Explicit(Vec<u64>),
    FullDomain,
    BernoulliImplicit {
        p: f64,
        seed: u64,
        consumed: AtomicBool,
    },
}

impl QuerySet {
    /// Validated explicit set: nonempty, strictly increasing ids >= 1.
    /// (The upper bound is checked against the oracle's domain at query time.)
    pub fn explicit(ids: Vec<u64>) -> Result<Self, CondError> {
        if ids.is_empty() {
            return Err(CondError::EmptyQuerySet);
        }
        if ids[0] == 0 {
            return Err(CondError::IdOutOfRange { id: 0, n: 0 });
        }
        if ids.windows(2).any(|w| w[0] >= w[1]) {
            return Err(CondError::UnsortedQuerySet);
        }
        Ok(QuerySet::Explicit(ids))
    }

    /// Explicit set from unsorted ids (sorts and deduplicates).
    pub fn from_ids(mut ids: Vec<u64>) -> Result<Self, CondError> {
        ids.sort_unstable();
        ids.dedup();
        Self::explicit(ids)
    }

    pub fn bernoulli(p: f64, seed: u64) -> Result<Self, CondError> {
        if !(p > 0.0 && p <= 1.0) {
            return Err(CondError::param(format!(
                "inclusion probability must lie in (0, 1], got {p}"
            )));
        }
        Ok(QuerySet::BernoulliImplicit {
            p,
            seed,
            consumed: AtomicBool::new(false),
        })
    }

    pub fn len_explicit(&self) -> Option<usize> {
        match self {
            QuerySet::Explicit(ids) => Some(ids.len()),
            _ => None,
        }
    }

    /// Marks an implicit set consumed; errors if it already was.
    pub(crate) fn consume(&self) -> Result<(), CondError> {
        match self {
            QuerySet::BernoulliImplicit { consumed, .. } => {
                if consumed.swap(true, Ordering::SeqCst) {
                    Err(CondError::ConsumedImplicitSet)
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn descriptor(&self) -> SetDescriptor {
        match self {
            QuerySet::Explicit(ids) => SetDescriptor::Explicit(ids.clone()),
            QuerySet::FullDomain => SetDescriptor::FullDomain,
            QuerySet::BernoulliImplicit { p, seed, .. } => SetDescriptor::Bernoulli {
                p: *p,
                seed: *seed,
            },
        }
    }
}

impl Clone for QuerySet {
    fn clone(&self) -> Self {
        match self {
            QuerySet::Explicit(ids) => QuerySet::Explicit(ids.clone()),
            QuerySet::FullDomain => QuerySet::FullDomain,
            QuerySet::BernoulliImplicit { p, seed, consumed } => QuerySet::BernoulliImplicit {
                p: *p,
                seed: *seed,
                consumed: AtomicBool::new(consumed.load(Ordering::SeqCst)),
            },
        }
    }
}

/// Compact description of a query set, recorded in transcripts.
#[derive(Debug, Clone, PartialEq)]
pub enum SetDescriptor {
    Explicit(Vec<u64>),
    FullDomain,
    Bernoulli { p: f64, seed: u64 },
}
