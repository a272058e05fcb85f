use minco_core::{CoeffMatrix, PiecewisePolynomial};
use nalgebra::Vector3;

use crate::PenaltyError;

/// Accumulator for `∂F/∂c` and the direct partial `∂F/∂T` of a cost
/// `F(c, T)`. Every penalty term adds its weighted contribution here.
#[derive(Debug, Clone)]
pub struct CostGradient {
    pub coeffs: Vec<CoeffMatrix>,
    pub durations: Vec<f64>,
}

impl CostGradient {
    pub fn zeros(piece_count: usize) -> Self {
        Self {
            coeffs: vec![CoeffMatrix::zeros(); piece_count],
            durations: vec![0.0; piece_count],
        }
    }

    pub fn reset(&mut self) {
        for c in &mut self.coeffs {
            c.fill(0.0);
        }
        self.durations.fill(0.0);
    }
}

/// A plane-like obstacle record: point `s` on an obstacle surface and unit
/// direction `v` toward free space. The signed distance of a point `p` to
/// the modeled obstacle plane is `(p - s)·v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafePair {
    pub point: Vector3<f64>,
    pub direction: Vector3<f64>,
}

impl SafePair {
    /// Unit-norm tolerance on the safe direction.
    pub const UNIT_TOL: f64 = 1e-9;

    /// Build a pair from a surface point and a (not necessarily unit)
    /// direction; fails for near-zero directions.
    pub fn new(point: Vector3<f64>, direction: Vector3<f64>) -> Option<Self> {
        let norm = direction.norm();
        if norm < 1e-9 {
            return None;
        }
        Some(Self {
            point,
            direction: direction / norm,
        })
    }

    /// Signed distance of `p` from the obstacle plane, positive toward free
    /// space.
    pub fn distance(&self, p: &Vector3<f64>) -> f64 {
        (p - self.point).dot(&self.direction)
    }
}

/// A sampled point on piece `piece` at fraction `sample/κ` of its duration,
/// with the trajectory derivatives evaluated there and any obstacle records
/// attached to it.
#[derive(Debug, Clone)]
pub struct ConstraintPoint {
    pub piece: usize,
    pub sample: usize,
    /// Time relative to the piece start [s].
    pub time: f64,
    pub position: Vector3<f64>,
    pub velocity: Vector3<f64>,
    pub acceleration: Vector3<f64>,
    pub jerk: Vector3<f64>,
    pub pairs: Vec<SafePair>,
}

/// Sample all constraint points of a trajectory, `κ + 1` per piece.
///
/// The last point of piece `i` coincides spatially with the first point of
/// piece `i + 1`; both are emitted since piecewise quadratures weight them
/// separately.
pub fn sample_constraint_points(traj: &PiecewisePolynomial, kappa: usize) -> Vec<ConstraintPoint> {
    assert!(kappa >= 2, "at least two samples per piece");
    let mut points = Vec::with_capacity(traj.piece_count() * (kappa + 1));
    for (i, piece) in traj.pieces().iter().enumerate() {
        for j in 0..=kappa {
            let t = piece.duration * j as f64 / kappa as f64;
            points.push(ConstraintPoint {
                piece: i,
                sample: j,
                time: t,
                position: piece.eval(t, 0),
                velocity: piece.eval(t, 1),
                acceleration: piece.eval(t, 2),
                jerk: piece.eval(t, 3),
                pairs: Vec::new(),
            });
        }
    }
    points
}

/// Objective weights, dynamic limits, clearances and sampling resolution for
/// the full planning objective.
///
/// The per-constraint cubic penalty weight χ is folded into the family
/// weight λ, one scalar per term.
#[derive(Debug, Clone, PartialEq)]
pub struct PenaltyWeights {
    /// Control (jerk) effort weight λ_e.
    pub lambda_effort: f64,
    /// Total execution time weight λ_t.
    pub lambda_time: f64,
    /// Dynamic feasibility penalty weight λ_d.
    pub lambda_feasibility: f64,
    /// Static obstacle penalty weight λ_o.
    pub lambda_obstacle: f64,
    /// Reciprocal (swarm) avoidance penalty weight λ_w.
    pub lambda_swarm: f64,
    /// Constraint-point uniform distribution weight λ_u.
    pub lambda_uniform: f64,
    /// Maximum speed v_m [m/s].
    pub v_max: f64,
    /// Maximum acceleration a_m [m/s²].
    pub a_max: f64,
    /// Maximum jerk j_m [m/s³].
    pub j_max: f64,
    /// Obstacle clearance C_o [m].
    pub clearance_obstacle: f64,
    /// Inter-agent clearance C_w [m], measured in ellipsoidal distance.
    pub clearance_swarm: f64,
    /// Downwash coefficient c > 1: the z-axis of the separation ellipsoid is
    /// stretched by √c.
    pub downwash: f64,
    /// Samples per piece κ.
    pub samples_per_piece: usize,
}

impl Default for PenaltyWeights {
    fn default() -> Self {
        Self {
            lambda_effort: 1.0,
            lambda_time: 20.0,
            lambda_feasibility: 1e4,
            lambda_obstacle: 1e4,
            lambda_swarm: 1e4,
            lambda_uniform: 1e2,
            v_max: 1.7,
            a_max: 6.0,
            j_max: 20.0,
            clearance_obstacle: 0.25,
            clearance_swarm: 0.5,
            downwash: 2.0,
            samples_per_piece: 8,
        }
    }
}

impl PenaltyWeights {
    pub fn validate(&self) -> Result<(), PenaltyError> {
        let nonneg = [
            ("lambda_effort", self.lambda_effort),
            ("lambda_time", self.lambda_time),
            ("lambda_feasibility", self.lambda_feasibility),
            ("lambda_obstacle", self.lambda_obstacle),
            ("lambda_swarm", self.lambda_swarm),
            ("lambda_uniform", self.lambda_uniform),
        ];
        for (name, v) in nonneg {
            if !(v >= 0.0) {
                return Err(PenaltyError::InvalidWeights(format!("{name} = {v} < 0")));
            }
        }
        let positive = [
            ("v_max", self.v_max),
            ("a_max", self.a_max),
            ("j_max", self.j_max),
            ("clearance_obstacle", self.clearance_obstacle),
            ("clearance_swarm", self.clearance_swarm),
        ];
        for (name, v) in positive {
            if !(v > 0.0) {
                return Err(PenaltyError::InvalidWeights(format!("{name} = {v} <= 0")));
            }
        }
        if !(self.downwash > 1.0) {
            return Err(PenaltyError::InvalidWeights(format!(
                "downwash = {} must exceed 1",
                self.downwash
            )));
        }
        if self.samples_per_piece < 2 {
            return Err(PenaltyError::InvalidWeights(format!(
                "samples_per_piece = {} < 2",
                self.samples_per_piece
            )));
        }
        Ok(())
    }
}
