use minco_core::{PiecewisePolynomial, COEFFS_PER_PIECE, ORDER_S};
use nalgebra::SMatrix;

use crate::CostGradient;

/// Gram matrix `∫₀ᵗ β⁽³⁾(τ) β⁽³⁾(τ)ᵀ dτ` of the jerk basis, integrated in
/// closed form.
fn jerk_gram(t: f64) -> SMatrix<f64, COEFFS_PER_PIECE, COEFFS_PER_PIECE> {
    let mut g = SMatrix::zeros();
    for r in ORDER_S..COEFFS_PER_PIECE {
        // k!/(k-3)! for the r-th basis entry differentiated three times.
        let fr: f64 = ((r - 2)..=r).product::<usize>() as f64;
        for c in ORDER_S..COEFFS_PER_PIECE {
            let fc: f64 = ((c - 2)..=c).product::<usize>() as f64;
            let pow = (r - ORDER_S) + (c - ORDER_S) + 1;
            g[(r, c)] = fr * fc * t.powi(pow as i32) / pow as f64;
        }
    }
    g
}

/// Control effort `J_e = Σᵢ ∫ ‖p⁽³⁾(t)‖² dt`, exact for quintics.
///
/// Adds `weight`-scaled gradients: `∂J_e/∂cᵢ = 2 Q(Tᵢ) cᵢ` and
/// `∂J_e/∂Tᵢ = ‖p⁽³⁾(Tᵢ)‖²`. Returns the weighted cost.
pub fn control_effort(traj: &PiecewisePolynomial, weight: f64, grad: &mut CostGradient) -> f64 {
    let mut cost = 0.0;
    for (i, piece) in traj.pieces().iter().enumerate() {
        let gram = jerk_gram(piece.duration);
        let gc = gram * piece.coeffs;
        cost += (piece.coeffs.transpose() * &gc).trace();
        grad.coeffs[i] += weight * 2.0 * gc;
        grad.durations[i] += weight * piece.eval(piece.duration, 3).norm_squared();
    }
    weight * cost
}
