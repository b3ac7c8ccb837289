//! Hard-instance generators and the combinatorial checkers behind them.
//!
//! Two instance families: paired-bucket equivalence pairs whose no-instances
//! have total variation distance exactly 1/4, and uniform support pairs whose
//! no-instance supports differ by an exact factor. The checkers validate the
//! counting facts the constructions rely on: hit-count profiles of query
//! sizes over geometric support grids, neighbor-distance measure bounds,
//! small/large/stable size predicates with exhaustive scaling enumeration,
//! and atom partitions / sample configurations.

pub mod atoms;
pub mod equivalence;
pub mod hitting;
pub mod measure;
pub mod predicates;
pub mod support_pair;

pub use atoms::{atoms, configuration, Atom, AtomPartition, Configuration};
pub use equivalence::{gen_equivalence_instance, EquivalenceInstance, InstanceKind};
pub use hitting::{hit_profile, hitting_fraction, HitProfile, HittingReport, RATIO_THRESHOLD};
pub use measure::{s_c_measure, NeighborSide};
pub use predicates::{
    classify_size, count_bad_scalings, is_alpha_stable, is_incomparable, AnalysisParams,
    BadScalingCounts, ScalingParams, SizeClass,
};
pub use support_pair::{gen_support_pair, SupportPairInstance};
