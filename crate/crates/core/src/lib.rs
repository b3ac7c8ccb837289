//! Conditional-sampling (COND) distribution-testing toolkit.
//!
//! The crate models an exact, rational-mass probability distribution over
//! `[n] = {1, ..., n}` together with a seeded COND oracle: a sampling handle
//! that, given a query set `S`, returns `i ∈ S` with probability
//! `D(i)/D(S)` (or a uniform element of `S` when `D(S) = 0`). On top of the
//! oracle it implements
//!
//! * the `Compare` primitive estimating the mass ratio of two disjoint sets,
//! * adaptive support-size estimation (dense-support test, non-support
//!   reference acquisition, threshold probing, doubly-exponential search),
//! * a non-adaptive support-size estimator backed by a collision-based
//!   uniformity tester,
//! * generators for two families of hard yes/no instance pairs (paired-bucket
//!   equivalence instances with exact total-variation distance 1/4, and
//!   uniform support-pair instances), and
//! * brute-force / Monte-Carlo checkers for the combinatorial facts those
//!   constructions rest on (hit-count profiles over geometric grids,
//!   neighbor-distance measure bounds, scaling predicates with exhaustive
//!   counting, atom partitions and sample configurations).
//!
//! All stored masses are exact rationals; floating point enters only at the
//! sampling boundary. Everything is deterministic given a seed.

pub mod compare;
pub mod dist;
pub mod error;
pub mod io;
pub mod lb;
pub mod oracle;
pub mod query;
pub mod seed;
pub mod support;

pub use compare::{compare, compare_sample_count, CompareResult};
pub use dist::{Piece, PiecewiseDistribution, Relabel};
pub use error::CondError;
pub use oracle::{CondOracle, PairTranscript, Transcript, TranscriptEntry, RNG_ALGORITHM};
pub use query::{QuerySet, SetDescriptor};

/// Exact rational used for all stored masses.
pub type Rational = num_rational::BigRational;

/// Convenience constructor for a rational from an integer pair.
pub fn ratio(num: i64, den: i64) -> Rational {
    use num_bigint::BigInt;
    Rational::new(BigInt::from(num), BigInt::from(den))
}
