//! Cost and penalty terms over piecewise polynomial trajectories, with
//! analytic gradients with respect to coefficients and piece durations.
//!
//! Continuous-time constraints are transcribed into finite sums by sampling
//! each piece at `κ + 1` constraint points and applying a trapezoidal
//! quadrature of the cubic penalty `max(G, 0)³`, which keeps the objective
//! twice continuously differentiable. The gradients produced here feed
//! [`minco_core::MincoJerk::propagate_gradient`] to reach waypoint/duration
//! space.

mod effort;
mod error;
mod feasibility;
mod obstacle;
mod quadrature;
mod swarm;
mod time;
mod types;
mod uniform;

pub use effort::control_effort;
pub use error::PenaltyError;
pub use feasibility::{dynamic_feasibility, DynamicLimits};
pub use obstacle::{obstacle_penalty, ObstacleRecords};
pub use quadrature::{quadrature_penalty, trapezoid_weight, ConstraintEval};
pub use swarm::{ellipsoidal_distance_sq, swarm_penalty, swarm_penalty_clamped, PeerTrajectory};
pub use time::{backward_time_grad, execution_time, forward_time_map, VIRTUAL_TIME_LIMIT};
pub use types::{sample_constraint_points, ConstraintPoint, CostGradient, PenaltyWeights, SafePair};
pub use uniform::uniform_distribution_penalty;
