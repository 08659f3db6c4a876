use thiserror::Error;

/// Errors raised by the numeric and combinatorial routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LabError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// The Jacobi sweep budget ran out before the off-diagonal norm dropped below tolerance.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    Convergence { sweeps: usize, off_norm: f64 },

    /// An enumeration or exact-arithmetic guard was exceeded.
    #[error("size guard: {what} = {value} exceeds the limit {limit}")]
    SizeGuard {
        what: &'static str,
        value: u64,
        limit: u64,
    },
}

impl LabError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LabError::Domain(msg.into())
    }

    /// True for failures that are numerical rather than caused by bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, LabError::Convergence { .. } | LabError::SizeGuard { .. })
    }
}

pub type Result<T> = std::result::Result<T, LabError>;
