use minco_core::{basis, PiecewisePolynomial};
use nalgebra::Vector3;

use crate::{trapezoid_weight, CostGradient, PenaltyError};

/// Another agent's broadcast trajectory, pinned to a global start timestamp.
#[derive(Debug, Clone)]
pub struct PeerTrajectory {
    pub id: u16,
    /// Global start timestamp [s].
    pub start_time: f64,
    pub trajectory: PiecewisePolynomial,
}

impl PeerTrajectory {
    /// Position and velocity at a global timestamp, clamped to the initial
    /// state before the start and the terminal hover state after the end
    /// (position held, derivatives zero).
    pub fn state_at(&self, global_time: f64) -> (Vector3<f64>, Vector3<f64>) {
        let local = global_time - self.start_time;
        let total = self.trajectory.total_duration();
        if local <= 0.0 {
            (self.trajectory.evaluate(0.0, 0).unwrap(), Vector3::zeros())
        } else if local >= total {
            (
                self.trajectory.evaluate(total, 0).unwrap(),
                Vector3::zeros(),
            )
        } else {
            (
                self.trajectory.evaluate(local, 0).unwrap(),
                self.trajectory.evaluate(local, 1).unwrap(),
            )
        }
    }

    pub fn position_at(&self, global_time: f64) -> Vector3<f64> {
        self.state_at(global_time).0
    }
}

/// Squared ellipsoidal distance between two points: the z separation is
/// shrunk by the downwash coefficient, enlarging the vertical keep-out.
pub fn ellipsoidal_distance_sq(a: &Vector3<f64>, b: &Vector3<f64>, downwash: f64) -> f64 {
    let d = a - b;
    d.x * d.x + d.y * d.y + d.z * d.z / downwash
}

/// Reciprocal avoidance penalty `J_w` against already-known peer
/// trajectories, validating peer timestamps first: a peer whose trajectory
/// starts after the own trajectory ends signals clock divergence.
pub fn swarm_penalty(
    traj: &PiecewisePolynomial,
    own_start: f64,
    peers: &[PeerTrajectory],
    clearance: f64,
    downwash: f64,
    kappa: usize,
    weight: f64,
    grad: &mut CostGradient,
) -> Result<f64, PenaltyError> {
    let own_end = own_start + traj.total_duration();
    for peer in peers {
        if peer.start_time > own_end + 1e-9 {
            return Err(PenaltyError::ClockSkew {
                peer: peer.id,
                offset: peer.start_time - own_end,
            });
        }
    }
    Ok(swarm_penalty_clamped(
        traj, own_start, peers, clearance, downwash, kappa, weight, grad,
    ))
}

/// Core of [`swarm_penalty`] without timestamp validation; peer queries
/// outside a peer's horizon clamp to its boundary states.
///
/// The constraint at sample `j` of piece `i` is
/// `G = C_w² - d²(p(t), p_k(τ))` with `t = (j/κ) Tᵢ` relative to the piece
/// and `τ = T₁ + … + Tᵢ₋₁ + t` absolute, so `∂J_w/∂T_l` picks up a
/// contribution from every piece at or after `l`: the peer query time shifts
/// by the full preceding durations (`∂τ/∂T_l = 1` for `l < i`, `j/κ` for
/// `l = i`).
#[allow(clippy::too_many_arguments)]
pub fn swarm_penalty_clamped(
    traj: &PiecewisePolynomial,
    own_start: f64,
    peers: &[PeerTrajectory],
    clearance: f64,
    downwash: f64,
    kappa: usize,
    weight: f64,
    grad: &mut CostGradient,
) -> f64 {
    assert!(kappa >= 2);
    let clearance_sq = clearance * clearance;
    let mut cost = 0.0;
    let mut preceding = 0.0;
    for (i, piece) in traj.pieces().iter().enumerate() {
        let step = piece.duration / kappa as f64;
        let mut piece_cost = 0.0;
        for j in 0..=kappa {
            let fraction = j as f64 / kappa as f64;
            let t = piece.duration * fraction;
            let global = own_start + preceding + t;
            let position = piece.eval(t, 0);
            let velocity = piece.eval(t, 1);
            let w = step * trapezoid_weight(j, kappa);
            for peer in peers {
                let (peer_pos, peer_vel) = peer.state_at(global);
                let diff = position - peer_pos;
                // Gradient of d² w.r.t. the separation: E·diff with
                // E = diag(1, 1, 1/c).
                let ediff = Vector3::new(diff.x, diff.y, diff.z / downwash);
                let value = clearance_sq - diff.dot(&ediff);
                if value <= 0.0 {
                    continue;
                }
                let v2 = value * value;
                piece_cost += w * weight * v2 * value;
                let common = 3.0 * w * weight * v2;
                grad.coeffs[i] -= common * 2.0 * basis(t, 0) * ediff.transpose();
                let dg_dt = -2.0 * ediff.dot(&velocity);
                let dg_dtau = 2.0 * ediff.dot(&peer_vel);
                grad.durations[i] += common * (dg_dt + dg_dtau) * fraction;
                for l in 0..i {
                    grad.durations[l] += common * dg_dtau;
                }
            }
        }
        if piece.duration > 0.0 {
            grad.durations[i] += piece_cost / piece.duration;
        }
        cost += piece_cost;
        preceding += piece.duration;
    }
    cost
}
