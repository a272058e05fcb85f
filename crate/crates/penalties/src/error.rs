use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PenaltyError {
    /// Weight or limit outside its valid range.
    #[error("invalid penalty configuration: {0}")]
    InvalidWeights(String),

    /// A peer trajectory's start timestamp lies beyond the entire own
    /// trajectory, which no plausible message ordering produces; the clocks
    /// have diverged.
    #[error("peer {peer} trajectory starts {offset:.3}s after the own trajectory ends")]
    ClockSkew { peer: u16, offset: f64 },
}
