use nalgebra::Vector3;

use crate::MincoError;

/// Pivot magnitude below which the factorization reports a singular system
/// instead of propagating NaNs.
const PIVOT_GUARD: f64 = 1e-12;

/// A square banded matrix in compact row-major band storage with an in-place
/// PLU factorization (no pivoting: the mapping construction keeps pivots
/// well-scaled for any positive durations).
///
/// Entry `(i, j)` is stored at `data[i * width + (j + lower - i)]` for
/// `i - lower <= j <= i + upper`.
#[derive(Debug, Clone)]
pub struct BandedSystem {
    n: usize,
    lower: usize,
    upper: usize,
    width: usize,
    data: Vec<f64>,
    factorized: bool,
}

impl BandedSystem {
    pub fn new(n: usize, lower: usize, upper: usize) -> Self {
        let width = lower + upper + 1;
        Self {
            n,
            lower,
            upper,
            width,
            data: vec![0.0; n * width],
            factorized: false,
        }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn reset(&mut self) {
        self.data.fill(0.0);
        self.factorized = false;
    }

    #[inline]
    fn offset(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.n && j < self.n);
        debug_assert!(j + self.lower >= i && j <= i + self.upper, "({i},{j}) outside band");
        i * self.width + (j + self.lower - i)
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[self.offset(i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        let o = self.offset(i, j);
        self.data[o] = value;
    }

    /// Dense copy of the matrix; intended for small oracle checks.
    pub fn to_dense(&self) -> nalgebra::DMatrix<f64> {
        assert!(!self.factorized, "to_dense on factorized storage");
        let mut dense = nalgebra::DMatrix::zeros(self.n, self.n);
        for i in 0..self.n {
            let lo = i.saturating_sub(self.lower);
            let hi = (i + self.upper).min(self.n - 1);
            for j in lo..=hi {
                dense[(i, j)] = self.get(i, j);
            }
        }
        dense
    }

    /// In-place PLU factorization without pivoting.
    ///
    /// L (unit diagonal) overwrites the sub-diagonal band, U the rest.
    pub fn factorize(&mut self) -> Result<(), MincoError> {
        assert!(!self.factorized, "factorize called twice");
        for k in 0..self.n {
            let pivot = self.get(k, k);
            if pivot.abs() <= PIVOT_GUARD {
                return Err(MincoError::SingularSystem {
                    row: k,
                    magnitude: pivot.abs(),
                });
            }
            let i_hi = (k + self.lower).min(self.n - 1);
            for i in (k + 1)..=i_hi {
                let l = self.get(i, k) / pivot;
                self.set(i, k, l);
                if l != 0.0 {
                    let j_hi = (k + self.upper).min(self.n - 1);
                    for j in (k + 1)..=j_hi {
                        let v = self.get(i, j) - l * self.get(k, j);
                        self.set(i, j, v);
                    }
                }
            }
        }
        self.factorized = true;
        Ok(())
    }

    /// Solve `M x = rhs` in place for a 3-column right-hand side.
    pub fn solve(&self, rhs: &mut [Vector3<f64>]) {
        assert!(self.factorized, "solve before factorize");
        assert_eq!(rhs.len(), self.n);
        // Forward: L y = rhs (unit diagonal).
        for i in 0..self.n {
            let lo = i.saturating_sub(self.lower);
            let mut acc = rhs[i];
            for j in lo..i {
                acc -= rhs[j] * self.get(i, j);
            }
            rhs[i] = acc;
        }
        // Backward: U x = y.
        for i in (0..self.n).rev() {
            let hi = (i + self.upper).min(self.n - 1);
            let mut acc = rhs[i];
            for j in (i + 1)..=hi {
                acc -= rhs[j] * self.get(i, j);
            }
            rhs[i] = acc / self.get(i, i);
        }
    }

    /// Solve the adjoint system `Mᵀ x = rhs` in place, reusing the factors:
    /// `Mᵀ = Uᵀ Lᵀ`.
    pub fn solve_transposed(&self, rhs: &mut [Vector3<f64>]) {
        assert!(self.factorized, "solve before factorize");
        assert_eq!(rhs.len(), self.n);
        // Forward: Uᵀ y = rhs. Uᵀ is lower triangular, Uᵀ(i,j) = U(j,i).
        for i in 0..self.n {
            let lo = i.saturating_sub(self.upper);
            let mut acc = rhs[i];
            for j in lo..i {
                acc -= rhs[j] * self.get(j, i);
            }
            rhs[i] = acc / self.get(i, i);
        }
        // Backward: Lᵀ x = y. Lᵀ is upper triangular with unit diagonal.
        for i in (0..self.n).rev() {
            let hi = (i + self.lower).min(self.n - 1);
            let mut acc = rhs[i];
            for j in (i + 1)..=hi {
                acc -= rhs[j] * self.get(j, i);
            }
            rhs[i] = acc;
        }
    }
}
