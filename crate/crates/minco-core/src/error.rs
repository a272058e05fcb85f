use thiserror::Error;

/// Errors raised by trajectory construction, evaluation and gradient
/// propagation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MincoError {
    /// A piece duration was zero or negative.
    #[error("piece {index} has non-positive duration {value}")]
    NonPositiveDuration { index: usize, value: f64 },

    /// A pivot underflowed during the banded PLU factorization. The mapping
    /// matrix is nonsingular for any positive durations, so this signals
    /// degenerate input (e.g. durations below numerical resolution).
    #[error("banded PLU pivot underflow at row {row} (|pivot| = {magnitude:.3e})")]
    SingularSystem { row: usize, magnitude: f64 },

    /// Evaluation time outside the trajectory domain.
    #[error("time {t} outside trajectory domain [0, {total}]")]
    OutOfDomain { t: f64, total: f64 },

    /// Gradient arrays do not match the trajectory shape.
    #[error("gradient shape mismatch: expected {expected} entries, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
}
