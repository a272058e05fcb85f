use nalgebra::{SMatrix, SVector, Vector3};

use crate::MincoError;

/// Spatial dimension of all trajectories.
pub const DIMS: usize = 3;
/// Integrator chain order: jerk control, minimum-jerk splines.
pub const ORDER_S: usize = 3;
/// Polynomial degree per piece, `2s - 1`.
pub const DEGREE: usize = 2 * ORDER_S - 1;
/// Coefficients per piece and dimension, `2s`.
pub const COEFFS_PER_PIECE: usize = 2 * ORDER_S;

/// Per-piece coefficient matrix: row k holds the coefficient of `t^k` for
/// (x, y, z).
pub type CoeffMatrix = SMatrix<f64, COEFFS_PER_PIECE, DIMS>;
/// Natural basis vector `[1, t, ..., t^5]` or one of its derivatives.
pub type BasisVector = SVector<f64, COEFFS_PER_PIECE>;

/// Natural basis `β(t) = [1, t, ..., t^5]` differentiated `deriv` times.
///
/// Entries are `k!/(k-deriv)! · t^(k-deriv)` for `k ≥ deriv`; any derivative
/// beyond the polynomial degree is identically zero.
pub fn basis(t: f64, deriv: usize) -> BasisVector {
    let mut b = BasisVector::zeros();
    if deriv >= COEFFS_PER_PIECE {
        return b;
    }
    let mut power = 1.0;
    for k in deriv..COEFFS_PER_PIECE {
        let mut coef = 1.0;
        for f in (k - deriv + 1)..=k {
            coef *= f as f64;
        }
        b[k] = coef * power;
        power *= t;
    }
    b
}

/// Position, velocity and acceleration fixed at one trajectory endpoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryCondition {
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
}

impl BoundaryCondition {
    pub fn new(position: Vector3<f64>, velocity: Vector3<f64>, acceleration: Vector3<f64>) -> Self {
        Self {
            position,
            velocity,
            acceleration,
        }
    }

    /// Resting endpoint: fixed position, zero velocity and acceleration.
    pub fn rest(position: Vector3<f64>) -> Self {
        Self::new(position, Vector3::zeros(), Vector3::zeros())
    }
}

/// One quintic piece: coefficients and duration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub coeffs: CoeffMatrix,
    pub duration: f64,
}

impl Piece {
    /// Evaluate the piece (or one of its derivatives) at local time `t`.
    pub fn eval(&self, t: f64, deriv: usize) -> Vector3<f64> {
        self.coeffs.tr_mul(&basis(t, deriv)).into()
    }
}

/// A piecewise quintic polynomial: the executable trajectory.
///
/// Constructed by [`crate::solve_mapping`], in which case derivatives up to
/// order 4 are continuous at every junction; direct construction only checks
/// durations.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewisePolynomial {
    pieces: Vec<Piece>,
    /// Cumulative start time of each piece, plus the total at the end.
    knots: Vec<f64>,
}

impl PiecewisePolynomial {
    /// Clamp tolerance at the domain boundaries [s].
    pub const DOMAIN_TOL: f64 = 1e-9;

    pub fn new(pieces: Vec<Piece>) -> Result<Self, MincoError> {
        let mut knots = Vec::with_capacity(pieces.len() + 1);
        let mut t = 0.0;
        knots.push(0.0);
        for (index, piece) in pieces.iter().enumerate() {
            if !(piece.duration > 0.0) {
                return Err(MincoError::NonPositiveDuration {
                    index,
                    value: piece.duration,
                });
            }
            t += piece.duration;
            knots.push(t);
        }
        Ok(Self { pieces, knots })
    }

    pub fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn piece(&self, i: usize) -> &Piece {
        &self.pieces[i]
    }

    pub fn durations(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().map(|p| p.duration)
    }

    pub fn total_duration(&self) -> f64 {
        *self.knots.last().unwrap_or(&0.0)
    }

    /// Start time of piece `i`.
    pub fn piece_start(&self, i: usize) -> f64 {
        self.knots[i]
    }

    /// Piece index and local time for a global time `t`.
    ///
    /// Interior junctions resolve to the right piece at local time 0.
    pub fn locate(&self, t: f64) -> Result<(usize, f64), MincoError> {
        let total = self.total_duration();
        if t < -Self::DOMAIN_TOL || t > total + Self::DOMAIN_TOL {
            return Err(MincoError::OutOfDomain { t, total });
        }
        let t = t.clamp(0.0, total);
        // knots is sorted; find the piece whose [start, end) contains t.
        let idx = match self
            .knots
            .binary_search_by(|k| k.partial_cmp(&t).expect("knots are finite"))
        {
            Ok(i) => i,
            Err(i) => i - 1,
        };
        let idx = idx.min(self.pieces.len() - 1);
        Ok((idx, t - self.knots[idx]))
    }

    /// Evaluate the trajectory derivative of order `deriv` at time `t`.
    pub fn evaluate(&self, t: f64, deriv: usize) -> Result<Vector3<f64>, MincoError> {
        let (idx, local) = self.locate(t)?;
        Ok(self.pieces[idx].eval(local, deriv))
    }

    pub fn position(&self, t: f64) -> Result<Vector3<f64>, MincoError> {
        self.evaluate(t, 0)
    }

    pub fn velocity(&self, t: f64) -> Result<Vector3<f64>, MincoError> {
        self.evaluate(t, 1)
    }

    pub fn acceleration(&self, t: f64) -> Result<Vector3<f64>, MincoError> {
        self.evaluate(t, 2)
    }

    /// Terminal state of the trajectory.
    pub fn terminal(&self) -> BoundaryCondition {
        let t = self.total_duration();
        BoundaryCondition::new(
            self.evaluate(t, 0).expect("t in domain"),
            self.evaluate(t, 1).expect("t in domain"),
            self.evaluate(t, 2).expect("t in domain"),
        )
    }
}
