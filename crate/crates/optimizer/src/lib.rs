//! Limited-memory quasi-Newton minimization of smooth unconstrained
//! objectives, sized for many small solves under a real-time budget.
//!
//! The iterate sequence is fully deterministic for identical inputs and
//! options: no randomness, and the optional wall-clock budget only decides
//! when to stop, never which step to take.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use nalgebra::DVector;

/// Why the solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Gradient infinity norm reached the tolerance.
    Converged,
    /// Iteration cap reached.
    MaxIterations,
    /// The line search could not find an acceptable step; the best iterate
    /// found so far is returned. Usually a sign of badly scaled weights.
    LineSearchFail,
    /// Wall-clock budget exhausted.
    TimeBudget,
}

#[derive(Debug, Clone)]
pub struct MinimizeOptions {
    pub max_iterations: usize,
    /// Convergence threshold on ‖∇f‖_∞.
    pub grad_tolerance: f64,
    /// Number of curvature pairs kept for the inverse-Hessian estimate.
    pub memory: usize,
    /// Optional wall-clock budget. Leave unset where reproducibility of the
    /// result matters more than the latency bound; the budget makes the
    /// stopping point machine-dependent.
    pub time_budget: Option<Duration>,
    /// Sufficient-decrease constant of the Wolfe conditions.
    pub armijo_c1: f64,
    /// Curvature constant of the Wolfe conditions.
    pub curvature_c2: f64,
    /// Evaluation cap per line search (bracketing plus bisection).
    pub max_line_search_steps: usize,
}

impl Default for MinimizeOptions {
    fn default() -> Self {
        Self {
            max_iterations: 60,
            grad_tolerance: 1e-4,
            memory: 8,
            time_budget: None,
            armijo_c1: 1e-4,
            curvature_c2: 0.9,
            max_line_search_steps: 30,
        }
    }
}

/// Outcome summary of one [`minimize`] call.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub final_cost: f64,
    /// Gradient infinity norm at the returned point.
    pub grad_inf_norm: f64,
    pub iterations: usize,
    /// Objective evaluations, line search included.
    pub evaluations: usize,
    pub wall_time: Duration,
    pub termination: Termination,
    /// Cost at the start plus after every accepted step; non-increasing.
    pub cost_history: Vec<f64>,
}

struct Evaluator<'a, F> {
    objective: &'a mut F,
    evaluations: usize,
}

impl<F: FnMut(&DVector<f64>, &mut DVector<f64>) -> f64> Evaluator<'_, F> {
    fn eval(&mut self, x: &DVector<f64>, grad: &mut DVector<f64>) -> f64 {
        self.evaluations += 1;
        (self.objective)(x, grad)
    }
}

/// Minimize `objective` starting from `x0`.
///
/// The objective writes its gradient into the second argument and returns
/// the cost. Accepted costs are non-increasing; the best iterate seen is
/// returned even when the line search gives up.
pub fn minimize<F>(
    mut objective: F,
    x0: DVector<f64>,
    opts: &MinimizeOptions,
) -> (DVector<f64>, SolveReport)
where
    F: FnMut(&DVector<f64>, &mut DVector<f64>) -> f64,
{
    let start = Instant::now();
    let n = x0.len();
    let mut ev = Evaluator {
        objective: &mut objective,
        evaluations: 0,
    };

    let mut x = x0;
    let mut grad = DVector::zeros(n);
    let mut cost = ev.eval(&x, &mut grad);
    let mut history: VecDeque<(DVector<f64>, DVector<f64>, f64)> =
        VecDeque::with_capacity(opts.memory);
    let mut cost_history = vec![cost];

    let mut iterations = 0;
    let termination = loop {
        if grad.amax() <= opts.grad_tolerance {
            break Termination::Converged;
        }
        if iterations >= opts.max_iterations {
            break Termination::MaxIterations;
        }
        if let Some(budget) = opts.time_budget {
            if start.elapsed() >= budget {
                break Termination::TimeBudget;
            }
        }

        // Two-loop recursion for d = -H·∇f.
        let mut d = -&grad;
        let mut alphas = Vec::with_capacity(history.len());
        for (s, y, rho) in history.iter().rev() {
            let a = rho * s.dot(&d);
            d.axpy(-a, y, 1.0);
            alphas.push(a);
        }
        if let Some((s, y, _)) = history.back() {
            let scale = s.dot(y) / y.dot(y);
            d *= scale;
        }
        for ((s, y, rho), a) in history.iter().zip(alphas.into_iter().rev()) {
            let b = rho * y.dot(&d);
            d.axpy(a - b, s, 1.0);
        }

        let mut slope = grad.dot(&d);
        if slope >= 0.0 {
            // Stale curvature produced a non-descent direction; restart from
            // steepest descent.
            history.clear();
            d = -&grad;
            slope = grad.dot(&d);
        }

        let alpha0 = if history.is_empty() {
            (1.0 / grad.norm().max(1.0)).min(1.0)
        } else {
            1.0
        };
        match wolfe_search(&mut ev, &x, cost, &grad, &d, slope, alpha0, opts) {
            Some(found) => {
                let s = &found.x - &x;
                let y = &found.grad - &grad;
                let sy = s.dot(&y);
                if sy > 1e-12 * s.norm() * y.norm() {
                    if history.len() == opts.memory {
                        history.pop_front();
                    }
                    history.push_back((s, y, 1.0 / sy));
                }
                x = found.x;
                grad = found.grad;
                cost = found.cost;
                iterations += 1;
                cost_history.push(cost);
            }
            None => break Termination::LineSearchFail,
        }
    };

    let report = SolveReport {
        final_cost: cost,
        grad_inf_norm: grad.amax(),
        iterations,
        evaluations: ev.evaluations,
        wall_time: start.elapsed(),
        termination,
        cost_history,
    };
    (x, report)
}

struct LinePoint {
    x: DVector<f64>,
    grad: DVector<f64>,
    cost: f64,
}

/// Strong Wolfe line search: bracketing with doubling steps, then bisection.
/// Returns a point satisfying both conditions, or a sufficient-decrease
/// point as a fallback, or `None` when no decrease is found at all.
#[allow(clippy::too_many_arguments)]
fn wolfe_search<F>(
    ev: &mut Evaluator<'_, F>,
    x: &DVector<f64>,
    f0: f64,
    g0: &DVector<f64>,
    d: &DVector<f64>,
    slope0: f64,
    alpha0: f64,
    opts: &MinimizeOptions,
) -> Option<LinePoint>
where
    F: FnMut(&DVector<f64>, &mut DVector<f64>) -> f64,
{
    debug_assert!(slope0 < 0.0);
    let _ = g0;
    let c1 = opts.armijo_c1;
    let c2 = opts.curvature_c2;
    let mut steps = 0;

    let mut probe = |alpha: f64, steps: &mut usize| -> (LinePoint, f64) {
        *steps += 1;
        let xt = x + d * alpha;
        let mut gt = DVector::zeros(x.len());
        let ft = ev.eval(&xt, &mut gt);
        let st = gt.dot(d);
        (
            LinePoint {
                x: xt,
                grad: gt,
                cost: ft,
            },
            st,
        )
    };

    // Fallback: the best Armijo-satisfying point seen, in case the curvature
    // condition stays out of reach within the evaluation budget.
    let mut best_armijo: Option<LinePoint> = None;
    let consider = |alpha: f64, pt: LinePoint, best: &mut Option<LinePoint>| {
        if pt.cost <= f0 + c1 * alpha * slope0
            && best.as_ref().map_or(true, |b| pt.cost < b.cost)
        {
            *best = Some(pt);
        }
    };

    // Bracketing phase.
    let mut alpha_prev = 0.0;
    let mut f_prev = f0;
    let mut alpha = alpha0;
    let mut bracket: Option<(f64, f64, f64, f64)> = None; // (lo, f_lo, slope_lo, hi)
    let mut first = true;
    while steps < opts.max_line_search_steps {
        let (pt, slope) = probe(alpha, &mut steps);
        let armijo_fail = pt.cost > f0 + c1 * alpha * slope0;
        if armijo_fail || (!first && pt.cost >= f_prev) {
            bracket = Some((alpha_prev, f_prev, slope0, alpha));
            break;
        }
        if slope.abs() <= -c2 * slope0 {
            return Some(pt);
        }
        let cost = pt.cost;
        consider(alpha, pt, &mut best_armijo);
        if slope >= 0.0 {
            bracket = Some((alpha, f_prev, slope, alpha_prev));
            break;
        }
        alpha_prev = alpha;
        f_prev = cost;
        alpha *= 2.0;
        first = false;
        if alpha > 1e6 {
            break;
        }
    }

    // Bisection phase inside the bracket.
    if let Some((mut lo, mut f_lo, _slope_lo, mut hi)) = bracket {
        while steps < opts.max_line_search_steps {
            let mid = 0.5 * (lo + hi);
            let (pt, slope) = probe(mid, &mut steps);
            if pt.cost > f0 + c1 * mid * slope0 || pt.cost >= f_lo {
                hi = mid;
            } else {
                if slope.abs() <= -c2 * slope0 {
                    return Some(pt);
                }
                let cost = pt.cost;
                consider(mid, pt, &mut best_armijo);
                if slope * (hi - lo) >= 0.0 {
                    hi = lo;
                }
                lo = mid;
                f_lo = cost;
            }
            if (hi - lo).abs() < 1e-16 {
                break;
            }
        }
    }

    best_armijo
}
