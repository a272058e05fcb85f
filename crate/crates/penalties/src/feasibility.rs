use minco_core::{basis, PiecewisePolynomial};

use crate::{quadrature_penalty, ConstraintEval, CostGradient};

/// Maximum speed, acceleration and jerk magnitudes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DynamicLimits {
    pub v_max: f64,
    pub a_max: f64,
    pub j_max: f64,
}

/// Dynamic feasibility penalty `J_d`: squared-norm violations
/// `G_n = ‖p⁽ⁿ⁾(t)‖² - limit²` for n = 1, 2, 3, transcribed by the cubic
/// quadrature penalty. Returns the weighted cost.
pub fn dynamic_feasibility(
    traj: &PiecewisePolynomial,
    limits: &DynamicLimits,
    kappa: usize,
    weight: f64,
    grad: &mut CostGradient,
) -> f64 {
    let mut cost = 0.0;
    let bounds = [limits.v_max, limits.a_max, limits.j_max];
    for (i, piece) in traj.pieces().iter().enumerate() {
        cost += quadrature_penalty(
            piece,
            kappa,
            weight,
            |t, _, evals| {
                for (n, &bound) in bounds.iter().enumerate() {
                    let order = n + 1;
                    let deriv = piece.eval(t, order);
                    let value = deriv.norm_squared() - bound * bound;
                    if value > 0.0 {
                        evals.push(ConstraintEval {
                            value,
                            grad_coeffs: 2.0 * basis(t, order) * deriv.transpose(),
                            grad_time: 2.0 * piece.eval(t, order + 1).dot(&deriv),
                        });
                    }
                }
            },
            &mut grad.coeffs[i],
            &mut grad.durations[i],
        );
    }
    cost
}
