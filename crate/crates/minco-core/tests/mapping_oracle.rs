//! Oracle checks for the waypoint/duration → coefficient mapping: the banded
//! solve against an independent dense LU on the identical system, spline
//! invariants, and gradient propagation against finite differences.

use minco_core::{
    assemble_dense, basis, solve_mapping, BoundaryCondition, CoeffMatrix, MincoJerk,
    PiecewisePolynomial, ORDER_S,
};
use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_instance(
    m: usize,
    rng: &mut ChaCha8Rng,
) -> (Vec<Vector3<f64>>, Vec<f64>, BoundaryCondition, BoundaryCondition) {
    let waypoints: Vec<Vector3<f64>> = (0..m.saturating_sub(1))
        .map(|i| {
            Vector3::new(
                i as f64 + rng.random_range(-0.4..0.4),
                rng.random_range(-2.0..2.0),
                rng.random_range(-1.0..1.0),
            )
        })
        .collect();
    let durations: Vec<f64> = (0..m).map(|_| rng.random_range(0.5..2.0)).collect();
    let bc0 = BoundaryCondition::new(
        Vector3::new(-1.0, 0.0, 0.0),
        Vector3::new(rng.random_range(-1.0..1.0), 0.0, 0.0),
        Vector3::zeros(),
    );
    let bcf = BoundaryCondition::new(
        Vector3::new(m as f64, 1.0, 0.0),
        Vector3::zeros(),
        Vector3::new(0.0, rng.random_range(-1.0..1.0), 0.0),
    );
    (waypoints, durations, bc0, bcf)
}

fn solve_dense_oracle(
    waypoints: &[Vector3<f64>],
    durations: &[f64],
    bc0: &BoundaryCondition,
    bcf: &BoundaryCondition,
) -> Vec<Vector3<f64>> {
    let (dense, rhs) = assemble_dense(waypoints, durations, bc0, bcf).unwrap();
    let n = dense.nrows();
    let lu = dense.lu();
    let mut cols: Vec<DVector<f64>> = Vec::new();
    for col in 0..3 {
        let b = DVector::from_iterator(n, rhs.iter().map(|v| v[col]));
        cols.push(lu.solve(&b).expect("dense system is nonsingular"));
    }
    (0..n)
        .map(|i| Vector3::new(cols[0][i], cols[1][i], cols[2][i]))
        .collect()
}

#[test]
fn banded_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for &m in &[1usize, 2, 3, 7, 12, 20] {
        let (q, t, bc0, bcf) = random_instance(m, &mut rng);
        let sys = MincoJerk::solve(&q, &t, &bc0, &bcf).unwrap();
        let oracle = solve_dense_oracle(&q, &t, &bc0, &bcf);
        for i in 0..m {
            for k in 0..6 {
                let got = sys.coeffs()[i].row(k).transpose();
                let want = oracle[6 * i + k];
                let err = (got - want).abs().max();
                assert!(err < 1e-9, "M={m} piece {i} row {k}: err {err:.3e}");
            }
        }
        assert!(sys.residual(&q, &bc0, &bcf) < 1e-9);
    }
}

#[test]
fn reconstruction_and_continuity() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (q, t, bc0, bcf) = random_instance(9, &mut rng);
    let traj = solve_mapping(&q, &t, &bc0, &bcf).unwrap();

    // Passes through every waypoint at its cumulative time.
    let mut cum = 0.0;
    for (i, wp) in q.iter().enumerate() {
        cum += t[i];
        let p = traj.evaluate(cum, 0).unwrap();
        assert!((p - wp).abs().max() < 1e-9, "waypoint {i}");
    }

    // Derivatives 0..2s-2 continuous at junctions (evaluated per piece).
    for i in 0..(traj.piece_count() - 1) {
        for d in 0..=(2 * ORDER_S - 2) {
            let left = traj.piece(i).eval(t[i], d);
            let right = traj.piece(i + 1).eval(0.0, d);
            assert!(
                (left - right).abs().max() < 1e-9,
                "junction {i} derivative {d}"
            );
        }
    }

    // Boundary conditions exact.
    assert!((traj.evaluate(0.0, 1).unwrap() - bc0.velocity).abs().max() < 1e-9);
    let total = traj.total_duration();
    assert!((traj.evaluate(total, 0).unwrap() - bcf.position).abs().max() < 1e-9);
}

/// Jerk energy of a trajectory via closed-form polynomial integration; the
/// independent cost used by the gradient and optimality checks below.
fn jerk_energy(traj: &PiecewisePolynomial) -> f64 {
    traj.pieces()
        .iter()
        .map(|p| {
            // ∫‖p⁽³⁾‖² over the piece with 200-node Simpson-grade sampling
            // would do, but the Gram form is exact for quintics.
            let t = p.duration;
            let gram = {
                let mut g = nalgebra::SMatrix::<f64, 6, 6>::zeros();
                for r in 3..6 {
                    for c in 3..6 {
                        let pow = (r - 3) + (c - 3) + 1;
                        let fr: f64 = (1..=r).rev().take(3).product::<usize>() as f64;
                        let fc: f64 = (1..=c).rev().take(3).product::<usize>() as f64;
                        g[(r, c)] = fr * fc * t.powi(pow as i32) / pow as f64;
                    }
                }
                g
            };
            (p.coeffs.transpose() * gram * p.coeffs).trace()
        })
        .sum()
}

#[test]
fn waypoint_gradient_of_junction_norms_is_exact() {
    // F = Σ ‖p(tᵢ)‖² over junctions equals Σ ‖qᵢ‖², so dH/dq = 2q and
    // dH/dT = 0 exactly. Exercises the adjoint solve and the ∂M/∂T terms,
    // which must cancel the direct ∂F/∂T partial.
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let (q, t, bc0, bcf) = random_instance(6, &mut rng);
    let sys = MincoJerk::solve(&q, &t, &bc0, &bcf).unwrap();

    let mut grad_c = vec![CoeffMatrix::zeros(); 6];
    let mut grad_t = vec![0.0; 6];
    for i in 0..5 {
        let dur = sys.durations()[i];
        let b0 = basis(dur, 0);
        let end: Vector3<f64> = sys.coeffs()[i].tr_mul(&b0).into();
        let vel: Vector3<f64> = sys.coeffs()[i].tr_mul(&basis(dur, 1)).into();
        grad_c[i] += 2.0 * b0 * end.transpose();
        grad_t[i] += 2.0 * end.dot(&vel);
    }
    let (gq, gt) = sys.propagate_gradient(&grad_c, &grad_t).unwrap();
    for i in 0..5 {
        assert!((gq[i] - 2.0 * q[i]).abs().max() < 1e-8, "dH/dq_{i}");
    }
    for (i, g) in gt.iter().enumerate() {
        assert!(g.abs() < 1e-8, "dH/dT_{i} = {g:.3e} should vanish");
    }
}

#[test]
fn gradient_matches_finite_differences() {
    // F = jerk energy, the control-effort cost: analytic ∂F/∂c and ∂F/∂T fed
    // through propagate_gradient vs central differences of the full pipeline.
    let mut rng = ChaCha8Rng::seed_from_u64(29);
    let m = 5;
    let (q, t, bc0, bcf) = random_instance(m, &mut rng);

    let objective = |q: &[Vector3<f64>], t: &[f64]| -> f64 {
        jerk_energy(&solve_mapping(q, t, &bc0, &bcf).unwrap())
    };

    let sys = MincoJerk::solve(&q, &t, &bc0, &bcf).unwrap();
    let mut grad_c = vec![CoeffMatrix::zeros(); m];
    let mut grad_t = vec![0.0; m];
    for i in 0..m {
        let dur = sys.durations()[i];
        let gram = {
            let mut g = nalgebra::SMatrix::<f64, 6, 6>::zeros();
            for r in 3..6 {
                for c in 3..6 {
                    let pow = (r - 3) + (c - 3) + 1;
                    let fr: f64 = (1..=r).rev().take(3).product::<usize>() as f64;
                    let fc: f64 = (1..=c).rev().take(3).product::<usize>() as f64;
                    g[(r, c)] = fr * fc * dur.powi(pow as i32) / pow as f64;
                }
            }
            g
        };
        grad_c[i] = 2.0 * gram * sys.coeffs()[i];
        let jerk_end: Vector3<f64> = sys.coeffs()[i].tr_mul(&basis(dur, 3)).into();
        grad_t[i] = jerk_end.norm_squared();
    }
    let (gq, gt) = sys.propagate_gradient(&grad_c, &grad_t).unwrap();

    let h = 1e-6;
    for i in 0..(m - 1) {
        for d in 0..3 {
            let mut qp = q.clone();
            let mut qm = q.clone();
            qp[i][d] += h;
            qm[i][d] -= h;
            let fd = (objective(&qp, &t) - objective(&qm, &t)) / (2.0 * h);
            let rel = (gq[i][d] - fd).abs() / fd.abs().max(1e-8);
            assert!(rel < 1e-5, "dH/dq[{i}][{d}]: analytic {} fd {}", gq[i][d], fd);
        }
    }
    for i in 0..m {
        let mut tp = t.clone();
        let mut tm = t.clone();
        tp[i] += h;
        tm[i] -= h;
        let fd = (objective(&q, &tp) - objective(&q, &tm)) / (2.0 * h);
        let rel = (gt[i] - fd).abs() / fd.abs().max(1e-8);
        assert!(rel < 1e-5, "dH/dT[{i}]: analytic {} fd {}", gt[i], fd);
    }
}

#[test]
fn minimum_control_certificate() {
    // For fixed (q, T), the solved spline minimizes jerk energy among all
    // quintic splines meeting the boundary conditions, waypoint passage and
    // C² continuity. Perturb along random directions in the null space of
    // those constraints: energy must not decrease.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let m = 4;
    let (q, t, bc0, bcf) = random_instance(m, &mut rng);
    let sys = MincoJerk::solve(&q, &t, &bc0, &bcf).unwrap();
    let base_energy = jerk_energy(&sys.trajectory());

    // Relaxed constraint matrix per dimension: boundary (6 rows) plus per
    // junction [end passage, start passage, velocity cont, acceleration cont].
    let n = 6 * m;
    let rows = 6 + 4 * (m - 1);
    let mut a = DMatrix::<f64>::zeros(rows, n);
    let mut r = 0;
    for d in 0..3 {
        a[(r, d)] = basis(0.0, d)[d];
        r += 1;
    }
    for i in 0..(m - 1) {
        let dur = t[i];
        for k in 0..6 {
            a[(r, 6 * i + k)] = basis(dur, 0)[k];
        }
        r += 1;
        a[(r, 6 * (i + 1))] = 1.0;
        r += 1;
        for d in 1..3 {
            for k in 0..6 {
                a[(r, 6 * i + k)] = basis(dur, d)[k];
            }
            a[(r, 6 * (i + 1) + d)] = -basis(0.0, d)[d];
            r += 1;
        }
    }
    for d in 0..3 {
        for k in 0..6 {
            a[(r, 6 * (m - 1) + k)] = basis(t[m - 1], d)[k];
        }
        r += 1;
    }
    assert_eq!(r, rows);

    // Project random directions onto null(A): z - Aᵀ(AAᵀ)⁻¹Az. A has full
    // row rank, so AAᵀ is invertible and the feasible set has 2(M-1) degrees
    // of freedom per dimension.
    let gram_lu = (&a * a.transpose()).lu();
    let mut projected_any = false;
    for trial in 0..40 {
        let z = DVector::<f64>::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        let row_component = a.transpose() * gram_lu.solve(&(&a * &z)).unwrap();
        let mut dir = z - row_component;
        if dir.norm() < 1e-9 {
            continue;
        }
        dir /= dir.norm();
        assert!((&a * &dir).abs().max() < 1e-9, "direction not feasible");
        projected_any = true;
        let eps = 1e-4;
        // Apply the perturbation to a random spatial dimension.
        let dim = trial % 3;
        let mut pieces = sys.trajectory().pieces().to_vec();
        for i in 0..m {
            for k in 0..6 {
                pieces[i].coeffs[(k, dim)] += eps * dir[6 * i + k];
            }
        }
        let perturbed = PiecewisePolynomial::new(pieces).unwrap();
        let energy = jerk_energy(&perturbed);
        assert!(
            energy >= base_energy - 1e-10,
            "feasible perturbation decreased energy: {energy} < {base_energy}"
        );
    }
    assert!(projected_any, "no usable perturbation direction generated");
}
