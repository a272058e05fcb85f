use minco_core::{CoeffMatrix, Piece};

/// Trapezoidal quadrature coefficient ω̄_j for sample `j` of `κ + 1`.
#[inline]
pub fn trapezoid_weight(j: usize, kappa: usize) -> f64 {
    if j == 0 || j == kappa {
        0.5
    } else {
        1.0
    }
}

/// One constraint evaluated at a sample: its value and the gradients with
/// respect to the piece coefficients and the sample time.
#[derive(Debug, Clone)]
pub struct ConstraintEval {
    pub value: f64,
    pub grad_coeffs: CoeffMatrix,
    pub grad_time: f64,
}

/// Time-integral penalty of one piece:
///
/// `J = (T/κ) Σ_j ω̄_j χ max(G(t_j), 0)³` over samples `t_j = (j/κ) T`.
///
/// `constraint` receives `(t_j, j)` and pushes one [`ConstraintEval`] per
/// active constraint; evaluations with non-positive value are ignored, so
/// callers may skip them. Gradients accumulate into `grad_coeffs` and
/// `grad_duration`, scaled by χ; the chain rule through the sample time uses
/// `∂t_j/∂T = j/κ` and the quadrature prefactor contributes `J/T`.
pub fn quadrature_penalty<F>(
    piece: &Piece,
    kappa: usize,
    chi: f64,
    mut constraint: F,
    grad_coeffs: &mut CoeffMatrix,
    grad_duration: &mut f64,
) -> f64
where
    F: FnMut(f64, usize, &mut Vec<ConstraintEval>),
{
    assert!(kappa >= 2, "at least two samples per piece");
    let duration = piece.duration;
    let step = duration / kappa as f64;
    let mut cost = 0.0;
    let mut evals: Vec<ConstraintEval> = Vec::new();
    for j in 0..=kappa {
        let fraction = j as f64 / kappa as f64;
        let t = duration * fraction;
        evals.clear();
        constraint(t, j, &mut evals);
        let w = step * trapezoid_weight(j, kappa);
        for e in &evals {
            if e.value <= 0.0 {
                continue;
            }
            let v2 = e.value * e.value;
            cost += w * chi * v2 * e.value;
            let common = 3.0 * w * chi * v2;
            *grad_coeffs += common * e.grad_coeffs;
            *grad_duration += common * e.grad_time * fraction;
        }
    }
    if duration > 0.0 {
        *grad_duration += cost / duration;
    }
    cost
}
