use crate::CostGradient;

/// Clamp magnitude for virtual times; `e^{±20}` spans ~2e-9 s to ~4.8e8 s,
/// far beyond any sane piece duration.
pub const VIRTUAL_TIME_LIMIT: f64 = 20.0;

/// Total execution time `J_t = Σ Tᵢ`; gradient w.r.t. coefficients is zero,
/// w.r.t. each duration it is one. Returns the weighted cost.
pub fn execution_time(durations: &[f64], weight: f64, grad: &mut CostGradient) -> f64 {
    for g in &mut grad.durations {
        *g += weight;
    }
    weight * durations.iter().sum::<f64>()
}

/// Map unconstrained virtual times to positive durations, `Tᵢ = e^{τᵢ}`.
///
/// Virtual times beyond ±[`VIRTUAL_TIME_LIMIT`] are clamped with a warning;
/// reaching the clamp signals a runaway line search upstream.
pub fn forward_time_map(tau: &[f64]) -> Vec<f64> {
    tau.iter()
        .map(|&t| {
            if t.abs() > VIRTUAL_TIME_LIMIT {
                log::warn!("virtual time {t:.2} clamped to ±{VIRTUAL_TIME_LIMIT}");
            }
            t.clamp(-VIRTUAL_TIME_LIMIT, VIRTUAL_TIME_LIMIT).exp()
        })
        .collect()
}

/// Chain duration gradients back to virtual times: `∂J/∂τᵢ = (∂J/∂Tᵢ) e^{τᵢ}`.
///
/// The clamped magnitude is used beyond the limit so the gradient keeps
/// pointing back into the usable range instead of flattening out.
pub fn backward_time_grad(grad_durations: &[f64], tau: &[f64]) -> Vec<f64> {
    assert_eq!(grad_durations.len(), tau.len());
    grad_durations
        .iter()
        .zip(tau)
        .map(|(&g, &t)| g * t.clamp(-VIRTUAL_TIME_LIMIT, VIRTUAL_TIME_LIMIT).exp())
        .collect()
}
