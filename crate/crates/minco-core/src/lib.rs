//! Minimum-control polynomial trajectories parameterized by waypoints and
//! piece durations (the MINCO trajectory class).
//!
//! A trajectory with `M` pieces is represented by intermediate waypoints
//! `q ∈ R^{3(M-1)}` and piece durations `T ∈ R^M_{>0}`. For a triple
//! integrator (jerk control) the unique minimum-jerk quintic spline through
//! the waypoints is recovered from a banded linear system `M(T) c = b(q)`,
//! solved by banded PLU factorization in O(M) time. The same factorization
//! is reused to back-propagate gradients of any cost `F(c, T)` to `(q, T)`.

mod banded;
mod error;
mod mapping;
mod trajectory;

pub use banded::BandedSystem;
pub use error::MincoError;
pub use mapping::{assemble_dense, solve_mapping, MincoJerk};
pub use trajectory::{
    basis, BoundaryCondition, CoeffMatrix, Piece, PiecewisePolynomial, BasisVector, COEFFS_PER_PIECE,
    DEGREE, DIMS, ORDER_S,
};
