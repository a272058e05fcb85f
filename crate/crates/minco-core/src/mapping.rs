use nalgebra::Vector3;

use crate::banded::BandedSystem;
use crate::trajectory::{
    basis, BoundaryCondition, CoeffMatrix, Piece, PiecewisePolynomial, COEFFS_PER_PIECE, ORDER_S,
};
use crate::MincoError;

const BW: usize = 2 * ORDER_S; // lower and upper bandwidth of the mapping matrix
const D: usize = COEFFS_PER_PIECE;

/// Write the mapping rows into any matrix-shaped sink. Shared between the
/// banded production path and the dense oracle used in tests.
///
/// Row layout, per spatial dimension: 3 initial conditions, then per junction
/// continuity of jerk and snap, the waypoint passage condition and continuity
/// of position, velocity, acceleration, then 3 terminal conditions. This
/// interleaving keeps both bandwidths at `2s` and every pivot nonzero without
/// row exchanges.
fn assemble_rows<S: FnMut(usize, usize, f64)>(
    waypoints: &[Vector3<f64>],
    durations: &[f64],
    bc0: &BoundaryCondition,
    bcf: &BoundaryCondition,
    mut set: S,
    rhs: &mut [Vector3<f64>],
) {
    let m = durations.len();
    let n = D * m;
    debug_assert_eq!(rhs.len(), n);

    // Initial conditions on piece 0 at t = 0.
    for (d, value) in [bc0.position, bc0.velocity, bc0.acceleration]
        .into_iter()
        .enumerate()
    {
        set(d, d, basis(0.0, d)[d]);
        rhs[d] = value;
    }

    for i in 0..(m - 1) {
        let t = durations[i];
        let base = D * i + ORDER_S;
        let col = D * i;

        // Jerk continuity: β⁽³⁾(Tᵢ)ᵀ cᵢ - β⁽³⁾(0)ᵀ cᵢ₊₁ = 0.
        let b3 = basis(t, 3);
        for k in 3..D {
            set(base, col + k, b3[k]);
        }
        set(base, col + D + 3, -basis(0.0, 3)[3]);

        // Snap continuity.
        let b4 = basis(t, 4);
        for k in 4..D {
            set(base + 1, col + k, b4[k]);
        }
        set(base + 1, col + D + 4, -basis(0.0, 4)[4]);

        // Waypoint passage: β(Tᵢ)ᵀ cᵢ = qᵢ.
        let b0 = basis(t, 0);
        for k in 0..D {
            set(base + 2, col + k, b0[k]);
        }
        rhs[base + 2] = waypoints[i];

        // Position, velocity, acceleration continuity.
        for d in 0..ORDER_S {
            let bd = basis(t, d);
            for k in d..D {
                set(base + 3 + d, col + k, bd[k]);
            }
            set(base + 3 + d, col + D + d, -basis(0.0, d)[d]);
        }
    }

    // Terminal conditions on the last piece at t = T_{M-1}.
    let t = durations[m - 1];
    let col = D * (m - 1);
    for (d, value) in [bcf.position, bcf.velocity, bcf.acceleration]
        .into_iter()
        .enumerate()
    {
        let row = n - ORDER_S + d;
        let bd = basis(t, d);
        for k in d..D {
            set(row, col + k, bd[k]);
        }
        rhs[row] = value;
    }
}

fn validate_durations(durations: &[f64]) -> Result<(), MincoError> {
    for (index, &t) in durations.iter().enumerate() {
        if !(t > 0.0) || !t.is_finite() {
            return Err(MincoError::NonPositiveDuration { index, value: t });
        }
    }
    Ok(())
}

/// Assemble the mapping system densely. Oracle path for tests: same rows as
/// the banded solver, to be solved by an independent dense factorization.
pub fn assemble_dense(
    waypoints: &[Vector3<f64>],
    durations: &[f64],
    bc0: &BoundaryCondition,
    bcf: &BoundaryCondition,
) -> Result<(nalgebra::DMatrix<f64>, Vec<Vector3<f64>>), MincoError> {
    let m = durations.len();
    assert!(m >= 1, "at least one piece");
    assert_eq!(waypoints.len(), m - 1, "M pieces need M-1 waypoints");
    validate_durations(durations)?;
    let n = D * m;
    let mut dense = nalgebra::DMatrix::zeros(n, n);
    let mut rhs = vec![Vector3::zeros(); n];
    assemble_rows(
        waypoints,
        durations,
        bc0,
        bcf,
        |i, j, v| dense[(i, j)] = v,
        &mut rhs,
    );
    Ok((dense, rhs))
}

/// The waypoint/duration → coefficient mapping for minimum-jerk splines,
/// with the factorized system retained for gradient back-propagation.
#[derive(Debug, Clone)]
pub struct MincoJerk {
    band: BandedSystem,
    coeffs: Vec<CoeffMatrix>,
    durations: Vec<f64>,
}

impl MincoJerk {
    /// Build and solve the mapping for `M = durations.len()` pieces through
    /// `M - 1` intermediate waypoints.
    pub fn solve(
        waypoints: &[Vector3<f64>],
        durations: &[f64],
        bc0: &BoundaryCondition,
        bcf: &BoundaryCondition,
    ) -> Result<Self, MincoError> {
        let m = durations.len();
        assert!(m >= 1, "at least one piece");
        assert_eq!(waypoints.len(), m - 1, "M pieces need M-1 waypoints");
        validate_durations(durations)?;

        let n = D * m;
        let mut band = BandedSystem::new(n, BW, BW);
        let mut rhs = vec![Vector3::zeros(); n];
        assemble_rows(
            waypoints,
            durations,
            bc0,
            bcf,
            |i, j, v| band.set(i, j, v),
            &mut rhs,
        );

        band.factorize()?;
        band.solve(&mut rhs);

        let coeffs = (0..m)
            .map(|i| {
                let mut c = CoeffMatrix::zeros();
                for k in 0..D {
                    c.set_row(k, &rhs[D * i + k].transpose());
                }
                c
            })
            .collect();

        Ok(Self {
            band,
            coeffs,
            durations: durations.to_vec(),
        })
    }

    pub fn piece_count(&self) -> usize {
        self.durations.len()
    }

    pub fn coeffs(&self) -> &[CoeffMatrix] {
        &self.coeffs
    }

    pub fn durations(&self) -> &[f64] {
        &self.durations
    }

    /// The solved trajectory.
    pub fn trajectory(&self) -> PiecewisePolynomial {
        let pieces = self
            .coeffs
            .iter()
            .zip(&self.durations)
            .map(|(&coeffs, &duration)| Piece { coeffs, duration })
            .collect();
        PiecewisePolynomial::new(pieces).expect("durations validated at solve time")
    }

    /// Residual `‖M c - b‖_∞` of the solved system; diagnostic for tests.
    pub fn residual(
        &self,
        waypoints: &[Vector3<f64>],
        bc0: &BoundaryCondition,
        bcf: &BoundaryCondition,
    ) -> f64 {
        let traj = self.trajectory();
        let mut r: f64 = 0.0;
        let inf = |v: Vector3<f64>| v.abs().max();
        r = r.max(inf(traj.piece(0).eval(0.0, 0) - bc0.position));
        r = r.max(inf(traj.piece(0).eval(0.0, 1) - bc0.velocity));
        r = r.max(inf(traj.piece(0).eval(0.0, 2) - bc0.acceleration));
        for (i, &q) in waypoints.iter().enumerate() {
            let end = traj.piece(i).eval(self.durations[i], 0);
            r = r.max(inf(end - q));
            for d in 0..=(2 * ORDER_S - 2) {
                let left = traj.piece(i).eval(self.durations[i], d);
                let right = traj.piece(i + 1).eval(0.0, d);
                r = r.max(inf(left - right));
            }
        }
        let last = self.piece_count() - 1;
        let t = self.durations[last];
        r = r.max(inf(traj.piece(last).eval(t, 0) - bcf.position));
        r = r.max(inf(traj.piece(last).eval(t, 1) - bcf.velocity));
        r = r.max(inf(traj.piece(last).eval(t, 2) - bcf.acceleration));
        r
    }

    /// Back-propagate a cost gradient from coefficients to waypoints and
    /// durations.
    ///
    /// Given `∂F/∂c` and the direct partial `∂F/∂T` of a cost `F(c, T)`,
    /// returns the total gradient of `H(q, T) = F(c(q, T), T)`: the adjoint
    /// banded system `M(T)ᵀ G = ∂F/∂c` is solved with the retained factors,
    /// waypoint gradients are the G-rows of the passage conditions, and each
    /// duration gradient subtracts `⟨G, (∂M/∂Tᵢ) c⟩`, which touches only the
    /// rows evaluating piece `i` at its end time.
    pub fn propagate_gradient(
        &self,
        grad_coeffs: &[CoeffMatrix],
        grad_durations: &[f64],
    ) -> Result<(Vec<Vector3<f64>>, Vec<f64>), MincoError> {
        let m = self.piece_count();
        if grad_coeffs.len() != m {
            return Err(MincoError::ShapeMismatch {
                expected: m,
                got: grad_coeffs.len(),
            });
        }
        if grad_durations.len() != m {
            return Err(MincoError::ShapeMismatch {
                expected: m,
                got: grad_durations.len(),
            });
        }

        let n = D * m;
        let mut adj = vec![Vector3::zeros(); n];
        for (i, g) in grad_coeffs.iter().enumerate() {
            for k in 0..D {
                adj[D * i + k] = g.row(k).transpose().into();
            }
        }
        self.band.solve_transposed(&mut adj);

        let mut grad_q = Vec::with_capacity(m.saturating_sub(1));
        for i in 0..(m - 1) {
            grad_q.push(adj[D * i + ORDER_S + 2]);
        }

        let mut grad_t = grad_durations.to_vec();
        for i in 0..m {
            let t = self.durations[i];
            let piece = Piece {
                coeffs: self.coeffs[i],
                duration: t,
            };
            if i + 1 < m {
                // Junction rows for piece i: d/dTᵢ of each row functional is
                // the next-higher trajectory derivative at the piece end.
                let base = D * i + ORDER_S;
                let row_derivs = [4, 5, 1, 1, 2, 3];
                for (r, &d) in row_derivs.iter().enumerate() {
                    grad_t[i] -= adj[base + r].dot(&piece.eval(t, d));
                }
            } else {
                for d in 0..ORDER_S {
                    grad_t[i] -= adj[n - ORDER_S + d].dot(&piece.eval(t, d + 1));
                }
            }
        }

        Ok((grad_q, grad_t))
    }
}

/// Solve the minimum-jerk mapping and return just the trajectory.
pub fn solve_mapping(
    waypoints: &[Vector3<f64>],
    durations: &[f64],
    bc0: &BoundaryCondition,
    bcf: &BoundaryCondition,
) -> Result<PiecewisePolynomial, MincoError> {
    MincoJerk::solve(waypoints, durations, bc0, bcf).map(|m| m.trajectory())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn single_piece_recovers_unit_quintic() {
        // Rest-to-rest displacement over one piece: 6t⁵ - 15t⁴ + 10t³.
        let bc0 = BoundaryCondition::rest(Vector3::zeros());
        let bcf = BoundaryCondition::rest(Vector3::new(1.0, 0.0, 0.0));
        let sys = MincoJerk::solve(&[], &[1.0], &bc0, &bcf).unwrap();
        let expected = [0.0, 0.0, 0.0, 10.0, -15.0, 6.0];
        for k in 0..6 {
            assert_relative_eq!(sys.coeffs()[0][(k, 0)], expected[k], epsilon = 1e-9);
            assert_relative_eq!(sys.coeffs()[0][(k, 1)], 0.0, epsilon = 1e-9);
            assert_relative_eq!(sys.coeffs()[0][(k, 2)], 0.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn symmetric_two_piece_is_point_symmetric() {
        let bc0 = BoundaryCondition::rest(Vector3::zeros());
        let bcf = BoundaryCondition::rest(Vector3::new(2.0, 0.0, 0.0));
        let traj = solve_mapping(
            &[Vector3::new(1.0, 0.0, 0.0)],
            &[1.0, 1.0],
            &bc0,
            &bcf,
        )
        .unwrap();
        for k in 0..=20 {
            let delta = k as f64 / 20.0;
            let a = traj.evaluate(1.0 - delta, 0).unwrap().x;
            let b = traj.evaluate(1.0 + delta, 0).unwrap().x;
            assert_relative_eq!(a + b, 2.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn zero_cost_gradient_propagates_to_zero() {
        let bc0 = BoundaryCondition::rest(Vector3::zeros());
        let bcf = BoundaryCondition::rest(Vector3::new(1.0, 2.0, 0.5));
        let sys = MincoJerk::solve(
            &[Vector3::new(0.3, 0.9, 0.1), Vector3::new(0.7, 1.4, 0.3)],
            &[0.8, 1.1, 0.9],
            &bc0,
            &bcf,
        )
        .unwrap();
        let zeros_c = vec![CoeffMatrix::zeros(); 3];
        let (gq, gt) = sys.propagate_gradient(&zeros_c, &[0.0; 3]).unwrap();
        assert!(gq.iter().all(|g| g.norm() == 0.0));
        assert!(gt.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn gradient_shape_mismatch_rejected() {
        let bc0 = BoundaryCondition::rest(Vector3::zeros());
        let bcf = BoundaryCondition::rest(Vector3::new(1.0, 0.0, 0.0));
        let sys = MincoJerk::solve(&[], &[1.0], &bc0, &bcf).unwrap();
        let err = sys
            .propagate_gradient(&[CoeffMatrix::zeros(); 2], &[0.0, 0.0])
            .unwrap_err();
        assert!(matches!(err, MincoError::ShapeMismatch { expected: 1, got: 2 }));
    }

    #[test]
    fn rejects_non_positive_duration() {
        let bc0 = BoundaryCondition::rest(Vector3::zeros());
        let bcf = BoundaryCondition::rest(Vector3::new(1.0, 0.0, 0.0));
        let err = solve_mapping(&[Vector3::zeros()], &[1.0, -0.5], &bc0, &bcf).unwrap_err();
        assert!(matches!(
            err,
            MincoError::NonPositiveDuration { index: 1, .. }
        ));
    }
}
