use minco_core::{basis, PiecewisePolynomial};

use crate::{trapezoid_weight, CostGradient, SafePair};

/// Obstacle records per key point, indexed by `(piece, sample)` with samples
/// `1..=κ` — the first sample of each piece is not a key point, interior
/// junctions being attributed to the earlier piece. Pairs accumulate across
/// replanning rounds and are never overwritten.
#[derive(Debug, Clone)]
pub struct ObstacleRecords {
    kappa: usize,
    slots: Vec<Vec<SafePair>>,
}

impl ObstacleRecords {
    pub fn new(piece_count: usize, kappa: usize) -> Self {
        assert!(kappa >= 2);
        Self {
            kappa,
            slots: vec![Vec::new(); piece_count * kappa],
        }
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn piece_count(&self) -> usize {
        self.slots.len() / self.kappa
    }

    #[inline]
    fn slot(&self, piece: usize, sample: usize) -> usize {
        debug_assert!(sample >= 1 && sample <= self.kappa, "not a key point");
        piece * self.kappa + sample - 1
    }

    pub fn add_pair(&mut self, piece: usize, sample: usize, pair: SafePair) {
        let idx = self.slot(piece, sample);
        self.slots[idx].push(pair);
    }

    pub fn pairs(&self, piece: usize, sample: usize) -> &[SafePair] {
        &self.slots[self.slot(piece, sample)]
    }

    pub fn total_pairs(&self) -> usize {
        self.slots.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.iter().all(Vec::is_empty)
    }
}

/// Static obstacle penalty `J_o`: for every key point and each of its
/// recorded {s, v} pairs, penalize clearance shortfall
/// `G = C_o - (p(t) - s)·v` with the cubic quadrature. Returns the weighted
/// cost.
pub fn obstacle_penalty(
    traj: &PiecewisePolynomial,
    records: &ObstacleRecords,
    clearance: f64,
    weight: f64,
    grad: &mut CostGradient,
) -> f64 {
    assert_eq!(records.piece_count(), traj.piece_count());
    let kappa = records.kappa();
    let mut cost = 0.0;
    for (i, piece) in traj.pieces().iter().enumerate() {
        let step = piece.duration / kappa as f64;
        let mut piece_cost = 0.0;
        for j in 1..=kappa {
            let pairs = records.pairs(i, j);
            if pairs.is_empty() {
                continue;
            }
            let fraction = j as f64 / kappa as f64;
            let t = piece.duration * fraction;
            let position = piece.eval(t, 0);
            let velocity = piece.eval(t, 1);
            let w = step * trapezoid_weight(j, kappa);
            for pair in pairs {
                let value = clearance - pair.distance(&position);
                if value <= 0.0 {
                    continue;
                }
                let v2 = value * value;
                piece_cost += w * weight * v2 * value;
                let common = 3.0 * w * weight * v2;
                grad.coeffs[i] -= common * basis(t, 0) * pair.direction.transpose();
                grad.durations[i] -= common * pair.direction.dot(&velocity) * fraction;
            }
        }
        if piece.duration > 0.0 {
            grad.durations[i] += piece_cost / piece.duration;
        }
        cost += piece_cost;
    }
    cost
}
