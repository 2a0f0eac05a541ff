use thiserror::Error;

/// Errors raised by the laboratory.
///
/// Domain violations carry enough context to tell the caller which
/// parameter was out of range; numerical failures describe where the
/// computation broke down.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error(
        "tensor is not symmetric: |h[{alpha}][{i}][{j}] - h[{alpha}][{j}][{i}]| = {deviation:.3e}"
    )]
    NotSymmetric {
        alpha: usize,
        i: usize,
        j: usize,
        deviation: f64,
    },

    #[error("non-finite value in {what}")]
    NonFinite { what: &'static str },

    #[error("time {t} is past the extinction time {extinction}")]
    PastExtinction { t: f64, extinction: f64 },

    #[error("degenerate mesh: spacing {spacing:.3e} at node {node}")]
    MeshFailure { node: usize, spacing: f64 },

    #[error("ODE solver failure: {0}")]
    Solver(String),

    #[error("mismatched parameters: {0}")]
    Mismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
