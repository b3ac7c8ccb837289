use thiserror::Error;

/// Errors surfaced by distribution construction, oracle queries and the
/// algorithms built on top of them.
#[derive(Debug, Error)]
pub enum CondError {
    #[error("masses must sum to exactly 1, got {got}")]
    NotNormalized { got: String },
    #[error("piece counts sum to {total} which exceeds the domain size {n}")]
    TooManyElements { total: u64, n: u64 },
    #[error("domain size must be positive")]
    EmptyDomain,
    #[error("piece {index} has negative mass")]
    NegativeMass { index: usize },
    #[error("piece {index} has zero count")]
    ZeroCount { index: usize },
    #[error("positive mass {mass} below the declared minimum {min} (= tau/n)")]
    BelowMinMass { mass: String, min: String },
    #[error("relabel bijections are materialized arrays; n = {n} exceeds the 2^24 desk-scale cap")]
    RelabelTooLarge { n: u64 },
    #[error("query set is empty")]
    EmptyQuerySet,
    #[error("query set id {id} outside domain [1, {n}]")]
    IdOutOfRange { id: u64, n: u64 },
    #[error("explicit query sets must be strictly increasing")]
    UnsortedQuerySet,
    #[error("implicitly sampled query sets are single-use and this one was already consumed")]
    ConsumedImplicitSet,
    #[error("operation not supported for this query-set representation: {0}")]
    UnsupportedRepresentation(&'static str),
    #[error("distributions have mismatched domain sizes {left} and {right}")]
    DomainMismatch { left: u64, right: u64 },
    #[error("sets passed to compare must be disjoint (both contain {id})")]
    OverlappingSets { id: u64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sample {sample} does not lie in its query set (index {index})")]
    SampleOutsideSet { sample: u64, index: usize },
    #[error("mass {num}/{den} does not fit the on-disk integer format")]
    MassNotRepresentable { num: String, den: String },
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CondError {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        CondError::InvalidParameter(msg.into())
    }
}
