//! Reference computations that take a different route from the main code
//! paths and are used to cross-check them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::funcalc::AnalyticFunction;
use crate::linalg::{hermitian_eig, ComplexMatrix};

/// `e^A` by classical RK4 on `U′ = AU`, `U(0) = I`, over `[0, 1]` with `steps` steps.
pub fn expm_rk4(a: &ComplexMatrix, steps: usize) -> ComplexMatrix {
    assert!(steps >= 1);
    let h = 1.0 / steps as f64;
    let mut u = ComplexMatrix::identity(a.dim());
    for _ in 0..steps {
        let k1 = a * &u;
        let k2 = a * &(&u + &k1.scale_real(0.5 * h));
        let k3 = a * &(&u + &k2.scale_real(0.5 * h));
        let k4 = a * &(&u + &k3.scale_real(h));
        let incr = &(&k1 + &k2.scale_real(2.0)) + &(&k3.scale_real(2.0) + &k4);
        u += &incr.scale_real(h / 6.0);
    }
    u
}

/// Schur product `[Δf(zᵢ, wⱼ) · Qᵢⱼ]`: the double operator integral for
/// diagonal `L₁ = diag(z)`, `L₂ = diag(w)`.
pub fn diagonal_schur_doi(
    f: &AnalyticFunction,
    z: &[Complex64],
    w: &[Complex64],
    q: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let n = q.dim();
    if z.len() != n || w.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if z.len() != n { z.len() } else { w.len() },
        });
    }
    let mut kernel = ComplexMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            kernel[(i, j)] = f.divided_difference(z[i], w[j])?;
        }
    }
    kernel.hadamard(q)
}

/// Classical double operator integral for Hermitian `A₁ = UΛU*`, `A₂ = VMV*`:
/// `U [Δf(λᵢ, μⱼ) · (U*QV)ᵢⱼ] V*`.
pub fn self_adjoint_doi(
    f: &AnalyticFunction,
    a1: &ComplexMatrix,
    a2: &ComplexMatrix,
    q: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    let e1 = hermitian_eig(a1)?;
    let e2 = hermitian_eig(a2)?;
    let u = &e1.vectors;
    let v = &e2.vectors;
    let rotated = &(&u.adjoint() * q) * v;
    let z: Vec<Complex64> = e1.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let w: Vec<Complex64> = e2.values.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    let inner = diagonal_schur_doi(f, &z, &w, &rotated)?;
    Ok(&(u * &inner) * &v.adjoint())
}

/// `f(A) = U f(Λ) U*` for Hermitian `A`.
pub fn self_adjoint_function(f: &AnalyticFunction, a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(a)?;
    let values: Vec<Complex64> = eig
        .values
        .iter()
        .map(|&x| f.eval_scalar(Complex64::new(x, 0.0)))
        .collect::<Result<_>>()?;
    let u = &eig.vectors;
    Ok(&(u * &ComplexMatrix::from_diagonal(&values)) * &u.adjoint())
}
