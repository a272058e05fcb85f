use minco_core::{basis, PiecewisePolynomial};
use nalgebra::Vector3;

use crate::CostGradient;

/// Uniform distribution penalty `J_u`: the variance of squared gaps between
/// consecutive constraint points,
/// `J_u = E[D²] - E[D]²` with `D_k = ‖p̊_k - p̊_{k-1}‖²`.
///
/// Keeps samples from bunching up, which would let thin obstacles slip
/// between key points and lets pieces collapse toward zero duration.
/// Interior junction points are attributed to the earlier piece. Returns the
/// weighted cost.
pub fn uniform_distribution_penalty(
    traj: &PiecewisePolynomial,
    kappa: usize,
    weight: f64,
    grad: &mut CostGradient,
) -> f64 {
    assert!(kappa >= 2);
    let m = traj.piece_count();
    let gap_count = m * kappa; // N_c
    debug_assert!(gap_count >= 2);

    // Point k: k = 0 is the trajectory start; otherwise piece (k-1)/κ at
    // sample k - piece·κ ∈ 1..=κ.
    let point = |k: usize| -> (usize, usize, f64) {
        if k == 0 {
            return (0, 0, 0.0);
        }
        let piece = (k - 1) / kappa;
        let sample = k - piece * kappa;
        let t = traj.piece(piece).duration * sample as f64 / kappa as f64;
        (piece, sample, t)
    };

    let positions: Vec<Vector3<f64>> = (0..=gap_count)
        .map(|k| {
            let (piece, _, t) = point(k);
            traj.piece(piece).eval(t, 0)
        })
        .collect();
    let gaps: Vec<f64> = (1..=gap_count)
        .map(|k| (positions[k] - positions[k - 1]).norm_squared())
        .collect();

    let n = gap_count as f64;
    let sum: f64 = gaps.iter().sum();
    let sum_sq: f64 = gaps.iter().map(|d| d * d).sum();
    let cost = sum_sq / n - (sum / n) * (sum / n);

    // ∂J_u/∂D_k, then chain to the two endpoint positions of each gap.
    let mean = sum / n;
    let grad_gap = |k: usize| 2.0 * (gaps[k - 1] - mean) / n;
    for k in 0..=gap_count {
        let mut g_point = Vector3::zeros();
        if k >= 1 {
            g_point += grad_gap(k) * 2.0 * (positions[k] - positions[k - 1]);
        }
        if k < gap_count {
            g_point -= grad_gap(k + 1) * 2.0 * (positions[k + 1] - positions[k]);
        }
        let (piece, sample, t) = point(k);
        grad.coeffs[piece] += weight * basis(t, 0) * g_point.transpose();
        if sample > 0 {
            let velocity = traj.piece(piece).eval(t, 1);
            grad.durations[piece] +=
                weight * (sample as f64 / kappa as f64) * g_point.dot(&velocity);
        }
    }
    weight * cost
}
