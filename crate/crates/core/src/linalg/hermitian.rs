//! Hermitian eigendecomposition (cyclic Jacobi) and positive-semidefiniteness.

use num_complex::Complex64;

use super::matrix::ComplexMatrix;
use super::norm::fro_norm;
use crate::error::{Error, Result};

/// Relative tolerance on `‖H − H*‖_F / ‖H‖_F` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// `H = U Λ U*` with eigenvalues in ascending order; column `k` of `vectors`
/// is the eigenvector for `values[k]`.
#[derive(Debug, Clone)]
pub struct HermitianEigen {
    pub values: Vec<f64>,
    pub vectors: ComplexMatrix,
}

impl HermitianEigen {
    /// `U f(Λ) U*`.
    pub fn apply(&self, f: impl Fn(f64) -> Complex64) -> ComplexMatrix {
        let u = &self.vectors;
        let d = ComplexMatrix::from_diagonal(&self.values.iter().map(|&x| f(x)).collect::<Vec<_>>());
        &(u * &d) * &u.adjoint()
    }
}

/// Relative asymmetry `‖H − H*‖_F / ‖H‖_F` (zero for the zero matrix).
pub fn hermitian_defect(h: &ComplexMatrix) -> f64 {
    let scale = fro_norm(h);
    if scale == 0.0 {
        return 0.0;
    }
    fro_norm(&(h - &h.adjoint())) / scale
}

pub fn check_hermitian(h: &ComplexMatrix) -> Result<()> {
    let asymmetry = hermitian_defect(h);
    if asymmetry > HERMITIAN_TOL || asymmetry.is_nan() {
        return Err(Error::NotHermitian { asymmetry });
    }
    Ok(())
}

/// Eigendecomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
pub fn hermitian_eig(h: &ComplexMatrix) -> Result<HermitianEigen> {
    check_hermitian(h)?;
    let n = h.dim();
    // work on the exactly Hermitian part
    let mut a = h.hermitian_part();
    let mut v = ComplexMatrix::identity(n);
    let scale = fro_norm(&a);
    let target = f64::EPSILON * scale;

    for _ in 0..MAX_SWEEPS {
        if off_diagonal_norm(&a) <= target {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut a, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    order.sort_by(|&i, &j| diag[i].total_cmp(&diag[j]));
    let values = order.iter().map(|&i| diag[i]).collect();
    let vectors = ComplexMatrix::from_fn(n, |r, k| v[(r, order[k])]);
    Ok(HermitianEigen { values, vectors })
}

fn off_diagonal_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)].norm_sqr();
            }
        }
    }
    s.sqrt()
}

/// Annihilates `a[p][q]` with the unitary `J = diag(1, e^{-iφ}) · [[c, s], [−s, c]]`
/// acting on coordinates (p, q): `A ← J* A J`, `V ← V J`.
fn rotate(a: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let mag = apq.norm();
    if mag == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let phase = apq / mag; // e^{iφ}

    let theta = (aqq - app) / (2.0 * mag);
    let t = if theta.is_finite() {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    } else {
        0.0
    };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // J entries
    let j_pp = Complex64::new(c, 0.0);
    let j_pq = Complex64::new(s, 0.0);
    let j_qp = -phase.conj() * s;
    let j_qq = phase.conj() * c;

    let n = a.dim();
    // A ← A J (columns p, q)
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * j_pp + akq * j_qp;
        a[(k, q)] = akp * j_pq + akq * j_qq;
    }
    // A ← J* A (rows p, q)
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = j_pp.conj() * apk + j_qp.conj() * aqk;
        a[(q, k)] = j_pq.conj() * apk + j_qq.conj() * aqk;
    }
    a[(p, q)] = Complex64::new(0.0, 0.0);
    a[(q, p)] = Complex64::new(0.0, 0.0);
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * j_pp + vkq * j_qp;
        v[(k, q)] = vkp * j_pq + vkq * j_qq;
    }
}

/// True iff the Cholesky factorization of `H + τI` succeeds, with
/// `τ = tol · max(1, ‖H‖_F)`.
pub fn psd_check(h: &ComplexMatrix, tol: f64) -> Result<bool> {
    check_hermitian(h)?;
    let tau = tol * fro_norm(h).max(1.0);
    Ok(cholesky(&h.shift(Complex64::new(tau, 0.0))).is_some())
}

/// Lower-triangular `G` with `H = G G*`, or `None` when a pivot is not positive.
pub fn cholesky(h: &ComplexMatrix) -> Option<ComplexMatrix> {
    let n = h.dim();
    let mut g = ComplexMatrix::zeros(n);
    for j in 0..n {
        let mut d = h[(j, j)].re;
        for k in 0..j {
            d -= g[(j, k)].norm_sqr();
        }
        if !(d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        g[(j, j)] = Complex64::new(djj, 0.0);
        for i in j + 1..n {
            let mut s = h[(i, j)];
            for k in 0..j {
                s -= g[(i, k)] * g[(j, k)].conj();
            }
            g[(i, j)] = s / djj;
        }
    }
    Some(g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(n: usize, seed: u64) -> ComplexMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ComplexMatrix::random_gaussian(n, &mut rng).hermitian_part()
    }

    #[test]
    fn identity_eigenpairs() {
        let e = hermitian_eig(&ComplexMatrix::identity(4)).unwrap();
        assert!(e.values.iter().all(|&x| x == 1.0));
        assert_eq!(e.vectors, ComplexMatrix::identity(4));
    }

    #[test]
    fn diagonal_eigenvalues_sorted() {
        let d = ComplexMatrix::from_diagonal(&[c(3.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]);
        let e = hermitian_eig(&d).unwrap();
        assert_eq!(e.values, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn two_by_two_complex_offdiagonal() {
        // [[0, i], [−i, 0]] has eigenvalues ±1
        let h = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(0.0, -1.0), c(0.0, 0.0)]]).unwrap();
        let e = hermitian_eig(&h).unwrap();
        assert!((e.values[0] + 1.0).abs() < 1e-15);
        assert!((e.values[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn reconstruction_and_unitarity() {
        for seed in 0..10 {
            let h = random_hermitian(8, 100 + seed);
            let e = hermitian_eig(&h).unwrap();
            let u = &e.vectors;
            let lam = ComplexMatrix::from_diagonal(&e.values.iter().map(|&x| c(x, 0.0)).collect::<Vec<_>>());
            let recon = &(u * &lam) * &u.adjoint();
            assert!(fro_norm(&(&recon - &h)) <= 1e-10 * fro_norm(&h));
            let resid = &(&h * u) - &(u * &lam);
            assert!(fro_norm(&resid) <= 1e-10 * fro_norm(&h));
            let gram = &u.adjoint() * u;
            assert!((&gram - &ComplexMatrix::identity(8)).max_abs() <= 1e-12);
        }
    }

    #[test]
    fn trace_is_sum_of_eigenvalues() {
        let h = random_hermitian(12, 7);
        let e = hermitian_eig(&h).unwrap();
        let sum: f64 = e.values.iter().sum();
        assert!((sum - h.trace().re).abs() < 1e-12 * fro_norm(&h) * 12.0);
    }

    #[test]
    fn non_hermitian_is_rejected() {
        let a = ComplexMatrix::from_rows(&[vec![c(1.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(1.0, 0.0)]]).unwrap();
        assert!(matches!(hermitian_eig(&a), Err(Error::NotHermitian { .. })));
        assert!(matches!(psd_check(&a, 1e-12), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn psd_examples() {
        assert!(psd_check(&ComplexMatrix::identity(3), 1e-12).unwrap());
        let d = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(!psd_check(&d, 1e-12).unwrap());
        // the zero matrix sits on the boundary and is accepted
        assert!(psd_check(&ComplexMatrix::zeros(3), 1e-12).unwrap());
    }

    #[test]
    fn gram_matrices_are_psd() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for n in 1..=30 {
            let g = ComplexMatrix::random_gaussian(1 + n % 9, &mut rng);
            assert!(psd_check(&(&g.adjoint() * &g), 1e-12).unwrap());
        }
    }

    #[test]
    fn cholesky_reconstructs() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        let g = ComplexMatrix::random_gaussian(5, &mut rng);
        let h = (&g.adjoint() * &g).shift(c(0.1, 0.0));
        let l = cholesky(&h).unwrap();
        assert!(fro_norm(&(&(&l * &l.adjoint()) - &h)) < 1e-12 * fro_norm(&h));
    }
}
