//! LU factorization with row pivoting.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::norm::fro_norm;
use crate::error::{Error, Result};

/// Pivots smaller than `PIVOT_TOL · ‖A‖_F` mark the matrix as singular.
pub const PIVOT_TOL: f64 = 1e-13;

/// `PA = LU` stored compactly: unit-lower `L` below the diagonal, `U` on and above.
#[derive(Debug, Clone)]
pub struct Lu {
    factors: ComplexMatrix,
    perm: Vec<usize>,
}

impl Lu {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        let n = a.dim();
        let threshold = PIVOT_TOL * fro_norm(a);
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();

        for k in 0..n {
            let (p, pivot_abs) = (k..n)
                .map(|i| (i, lu[(i, k)].norm()))
                .fold((k, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
            if !(pivot_abs > threshold) {
                return Err(Error::Singular {
                    column: k,
                    pivot: pivot_abs,
                });
            }
            if p != k {
                perm.swap(p, k);
                let data = lu.data_mut();
                for j in 0..n {
                    data.swap(p * n + j, k * n + j);
                }
            }
            let pivot = lu[(k, k)];
            for i in k + 1..n {
                let factor = lu[(i, k)] / pivot;
                lu[(i, k)] = factor;
                if factor.re == 0.0 && factor.im == 0.0 {
                    continue;
                }
                for j in k + 1..n {
                    let u = lu[(k, j)];
                    lu[(i, j)] -= factor * u;
                }
            }
        }
        Ok(Self { factors: lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.factors.dim()
    }

    /// Solves `A x = b` for a single right-hand side.
    pub fn solve_vec(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        assert_eq!(b.len(), n, "right-hand side length mismatch");
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.factors[(i, j)] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.factors[(i, j)] * x[j];
            }
            x[i] = s / self.factors[(i, i)];
        }
        x
    }

    /// Solves `A X = B`.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.dim();
        if b.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.dim(),
            });
        }
        let mut x = ComplexMatrix::zeros(n);
        let mut col = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..n {
            for (i, c) in col.iter_mut().enumerate() {
                *c = b[(i, j)];
            }
            let sol = self.solve_vec(&col);
            for (i, v) in sol.into_iter().enumerate() {
                x[(i, j)] = v;
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> ComplexMatrix {
        self.solve(&ComplexMatrix::identity(self.dim()))
            .expect("identity has matching dimension")
    }
}

/// Solves `A X = B` with row-pivoted Gaussian elimination.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.check_dim(b)?;
    Lu::new(a)?.solve(b)
}

pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(Lu::new(a)?.inverse())
}
