//! Crate-wide error type.

use thiserror::Error;

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Failures reported by library operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("basis state {0} is not present in the target basis")]
    MissingBasisState(String),
    #[error("truncation overflow: image of {0} leaves the declared space")]
    TruncationOverflow(String),
    #[error("invalid mode layout: {0}")]
    InvalidLayout(String),
    #[error("basis too large: {0}")]
    CapacityOverflow(String),
    #[error("state {0} lies outside the operator's domain")]
    OutOfDomain(String),
    #[error("operators do not commute (max commutator norm {max_norm:e})")]
    NonCommutingOperators { max_norm: f64 },
    #[error("subspace is not invariant under {name} (residual {residual:e})")]
    NotInvariant { name: String, residual: f64 },
    #[error("joint unity eigenspace is empty")]
    EmptyEigenspace,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("Knill-Laflamme condition violated (residual {residual:e})")]
    KlViolation { residual: f64 },
    #[error("state is not parity-definite under {scheme}: {detail}")]
    IndefiniteParity { scheme: String, detail: String },
    #[error("unknown syndrome {0}")]
    UnknownSyndrome(String),
    #[error("unknown name: {0}")]
    UnknownName(String),
    #[error("search cap exceeded: {0}")]
    SearchCapExceeded(String),
    #[error("parse error: {0}")]
    Parse(String),
}
