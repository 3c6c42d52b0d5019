//! Dissipative matrices, their Cayley transforms and resolvents.
//!
//! In finite dimension every dissipative matrix is maximal dissipative and
//! its domain is the whole space, so no domain bookkeeping is needed.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{check_hermitian, inverse, op_norm, psd_check, ComplexMatrix, Lu};

/// Relative tolerance for the PSD test on the imaginary part.
pub const DISSIPATIVE_TOL: f64 = 1e-10;

/// Slack allowed when testing `‖T‖ ≤ 1`.
pub const CONTRACTION_TOL: f64 = 1e-9;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// True iff `(L − L*)/(2i)` passes [`psd_check`] at `tol`.
pub fn is_dissipative(l: &ComplexMatrix, tol: f64) -> bool {
    // the imaginary part is Hermitian by construction, so psd_check cannot reject it
    psd_check(&l.imaginary_part(), tol).unwrap_or(false)
}

/// A matrix `L = A + iB` with `A` Hermitian and `B ≥ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct DissipativeMatrix {
    matrix: ComplexMatrix,
    real_part: ComplexMatrix,
    imaginary_part: ComplexMatrix,
}

impl DissipativeMatrix {
    /// Validates `l` and caches its Hermitian and imaginary parts.
    pub fn new(l: ComplexMatrix) -> Result<Self> {
        if !l.is_finite() {
            return Err(Error::RejectedInput("matrix has non-finite entries".into()));
        }
        let imaginary_part = l.imaginary_part();
        if !psd_check(&imaginary_part, DISSIPATIVE_TOL)? {
            return Err(Error::RejectedInput(
                "imaginary part is not positive semidefinite".into(),
            ));
        }
        Ok(Self {
            real_part: l.hermitian_part(),
            imaginary_part,
            matrix: l,
        })
    }

    /// `L = A + iB` from a Hermitian `A` and a PSD `B`.
    pub fn from_parts(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<Self> {
        a.check_dim(b)?;
        check_hermitian(a).map_err(|e| Error::RejectedInput(format!("real part: {e}")))?;
        match psd_check(b, DISSIPATIVE_TOL) {
            Ok(true) => {}
            Ok(false) => {
                return Err(Error::RejectedInput(
                    "imaginary part is not positive semidefinite".into(),
                ))
            }
            Err(e) => return Err(Error::RejectedInput(format!("imaginary part: {e}"))),
        }
        Self::new(a + &b.scale(I))
    }

    /// `A = scale·(G₁ + G₁*)/2`, `B = scale·G₂*G₂/dim` with standard complex
    /// Gaussian `G₁, G₂` drawn from a ChaCha generator seeded with `seed`.
    pub fn random(dim: usize, seed: u64, scale: f64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self::random_with_rng(dim, &mut rng, scale)
    }

    pub fn random_with_rng<R: Rng + ?Sized>(dim: usize, rng: &mut R, scale: f64) -> Self {
        assert!(dim >= 1, "dimension must be at least 1");
        assert!(scale > 0.0 && scale.is_finite(), "scale must be positive and finite");
        let g1 = ComplexMatrix::random_gaussian(dim, rng);
        let g2 = ComplexMatrix::random_gaussian(dim, rng);
        let a = g1.hermitian_part().scale_real(scale);
        let b = (&g2.adjoint() * &g2).scale_real(scale / dim as f64);
        let matrix = &a + &b.scale(I);
        Self {
            real_part: matrix.hermitian_part(),
            imaginary_part: matrix.imaginary_part(),
            matrix,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.matrix
    }

    /// `(L + L*)/2`.
    pub fn real_part(&self) -> &ComplexMatrix {
        &self.real_part
    }

    /// `(L − L*)/(2i)`.
    pub fn imaginary_part(&self) -> &ComplexMatrix {
        &self.imaginary_part
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// `(L − λI)⁻¹`, defined for `Im λ < 0`.
    pub fn resolvent(&self, lambda: Complex64) -> Result<ComplexMatrix> {
        if !(lambda.im < 0.0) {
            return Err(Error::RejectedInput(format!(
                "resolvent point must lie in the open lower half-plane, got {lambda}"
            )));
        }
        inverse(&self.matrix.shift(-lambda))
            .map_err(|e| Error::Internal(format!("resolvent of a dissipative matrix failed: {e}")))
    }

    /// `(L + iI)⁻¹`.
    pub fn resolvent_at_minus_i(&self) -> Result<ComplexMatrix> {
        self.resolvent(-I)
    }

    /// Cayley transform `T = (L − iI)(L + iI)⁻¹`.
    pub fn cayley(&self) -> Result<ComplexMatrix> {
        let inv = self.resolvent_at_minus_i()?;
        let t = &self.matrix.shift(-I) * &inv;
        let n = self.dim();
        Lu::new(&(&ComplexMatrix::identity(n) - &t))
            .map_err(|_| Error::Internal("Cayley transform has eigenvalue one".into()))?;
        Ok(t)
    }
}

/// Inverse Cayley transform `L = i(I + T)(I − T)⁻¹` of a contraction `T`.
pub fn inverse_cayley(t: &ComplexMatrix) -> Result<DissipativeMatrix> {
    let norm = op_norm(t);
    if norm > 1.0 + CONTRACTION_TOL {
        return Err(Error::RejectedInput(format!("not a contraction: ‖T‖ = {norm}")));
    }
    let n = t.dim();
    let id = ComplexMatrix::identity(n);
    let inv = match inverse(&(&id - t)) {
        Ok(inv) => inv,
        Err(Error::Singular { .. }) => return Err(Error::EigenvalueOne),
        Err(e) => return Err(e),
    };
    let l = (&(&id + t) * &inv).scale(I);
    DissipativeMatrix::new(l)
        .map_err(|e| Error::Internal(format!("inverse Cayley transform left the dissipative class: {e}")))
}

/// Two dissipative matrices together with `K = L₁ − L₂`.
#[derive(Debug, Clone)]
pub struct PerturbationPair {
    pub l1: DissipativeMatrix,
    pub l2: DissipativeMatrix,
    pub k: ComplexMatrix,
}

impl PerturbationPair {
    pub fn new(l1: DissipativeMatrix, l2: DissipativeMatrix) -> Result<Self> {
        let k = l1.matrix().checked_sub(l2.matrix())?;
        Ok(Self { l1, l2, k })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{expm, fro_norm};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn rel(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
        fro_norm(&(a - b)) / (1.0 + fro_norm(b))
    }

    #[test]
    fn from_parts_examples() {
        let z = ComplexMatrix::zeros(3);
        let l = DissipativeMatrix::from_parts(&z, &z).unwrap();
        assert_eq!(l.matrix(), &z);
        let l = DissipativeMatrix::from_parts(&z, &ComplexMatrix::identity(3)).unwrap();
        assert_eq!(l.matrix(), &ComplexMatrix::scalar(3, I));
    }

    #[test]
    fn from_parts_rejects_bad_parts() {
        let z = ComplexMatrix::zeros(2);
        let neg = ComplexMatrix::from_diagonal(&[c(1.0, 0.0), c(-1.0, 0.0)]);
        assert!(matches!(
            DissipativeMatrix::from_parts(&z, &neg),
            Err(Error::RejectedInput(_))
        ));
        let non_herm = ComplexMatrix::from_rows(&[vec![c(0.0, 0.0), c(1.0, 0.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]])
            .unwrap();
        assert!(matches!(
            DissipativeMatrix::from_parts(&non_herm, &z),
            Err(Error::RejectedInput(_))
        ));
        assert!(matches!(
            DissipativeMatrix::from_parts(&z, &non_herm),
            Err(Error::RejectedInput(_))
        ));
    }

    #[test]
    fn gram_construction_is_dissipative() {
        for seed in 0..50u64 {
            let a = ComplexMatrix::random_gaussian(5, &mut ChaCha8Rng::seed_from_u64(seed)).hermitian_part();
            let g = ComplexMatrix::random_gaussian(5, &mut ChaCha8Rng::seed_from_u64(seed + 1000));
            let l = DissipativeMatrix::from_parts(&a, &(&g.adjoint() * &g)).unwrap();
            assert!(is_dissipative(l.matrix(), DISSIPATIVE_TOL));
        }
    }

    #[test]
    fn is_dissipative_examples() {
        assert!(is_dissipative(&ComplexMatrix::scalar(3, I), 1e-10));
        assert!(!is_dissipative(&ComplexMatrix::scalar(3, -I), 1e-10));
        assert!(matches!(
            DissipativeMatrix::new(ComplexMatrix::scalar(2, -I)),
            Err(Error::RejectedInput(_))
        ));
    }

    #[test]
    fn random_is_deterministic_and_dissipative() {
        assert_eq!(DissipativeMatrix::random(6, 42, 1.0), DissipativeMatrix::random(6, 42, 1.0));
        assert_ne!(DissipativeMatrix::random(6, 42, 1.0), DissipativeMatrix::random(6, 43, 1.0));
        for dim in [1, 2, 4, 8, 16] {
            for seed in 0..100 {
                let l = DissipativeMatrix::random(dim, seed, 1.0);
                assert!(is_dissipative(l.matrix(), DISSIPATIVE_TOL), "dim {dim} seed {seed}");
            }
        }
    }

    #[test]
    fn random_with_tiny_scale_is_near_zero() {
        let l = DissipativeMatrix::random(4, 1, 1e-300);
        assert!(l.matrix().max_abs() < 1e-290);
    }

    #[test]
    fn cayley_examples() {
        let l = DissipativeMatrix::new(ComplexMatrix::scalar(3, I)).unwrap();
        assert!(l.cayley().unwrap().max_abs() < 1e-15);
        let l = DissipativeMatrix::new(ComplexMatrix::zeros(3)).unwrap();
        assert!(rel(&l.cayley().unwrap(), &ComplexMatrix::scalar(3, c(-1.0, 0.0))) < 1e-15);
    }

    #[test]
    fn inverse_cayley_examples() {
        let l = inverse_cayley(&ComplexMatrix::zeros(2)).unwrap();
        assert!(rel(l.matrix(), &ComplexMatrix::scalar(2, I)) < 1e-15);
        let l = inverse_cayley(&ComplexMatrix::scalar(2, c(-1.0, 0.0))).unwrap();
        assert!(l.matrix().max_abs() < 1e-15);
    }

    #[test]
    fn inverse_cayley_errors() {
        assert!(matches!(
            inverse_cayley(&ComplexMatrix::identity(2)),
            Err(Error::EigenvalueOne)
        ));
        assert!(matches!(
            inverse_cayley(&ComplexMatrix::scalar(2, c(1.5, 0.0))),
            Err(Error::RejectedInput(_))
        ));
    }

    #[test]
    fn cayley_round_trip_and_contraction() {
        for seed in 0..50u64 {
            let dim = 1 + (seed as usize % 16);
            let l = DissipativeMatrix::random(dim, seed, 1.0);
            let t = l.cayley().unwrap();
            assert!(op_norm(&t) <= 1.0 + 1e-9);
            let back = inverse_cayley(&t).unwrap();
            let err = fro_norm(&(back.matrix() - l.matrix())) / (1.0 + fro_norm(l.matrix()));
            assert!(err <= 1e-9, "seed {seed}: {err}");
        }
    }

    #[test]
    fn self_adjoint_cayley_is_unitary() {
        let a = DissipativeMatrix::random(6, 5, 1.0).real_part().clone();
        let l = DissipativeMatrix::new(a).unwrap();
        let t = l.cayley().unwrap();
        let defect = &(&t.adjoint() * &t) - &ComplexMatrix::identity(6);
        assert!(op_norm(&defect) <= 1e-9);
    }

    #[test]
    fn resolvent_examples() {
        let zero = DissipativeMatrix::new(ComplexMatrix::zeros(1)).unwrap();
        let r = zero.resolvent(-I).unwrap();
        assert!((r[(0, 0)] - (-I)).norm() < 1e-15);

        let l = DissipativeMatrix::new(ComplexMatrix::scalar(3, I)).unwrap();
        let r = l.resolvent(-I).unwrap();
        assert!(rel(&r, &ComplexMatrix::scalar(3, c(0.0, -0.5))) < 1e-15);

        assert!(matches!(l.resolvent(c(0.0, 0.0)), Err(Error::RejectedInput(_))));
        assert!(matches!(l.resolvent(c(1.0, 2.0)), Err(Error::RejectedInput(_))));
    }

    #[test]
    fn resolvent_norm_bound() {
        for seed in 0..50u64 {
            let l = DissipativeMatrix::random(6, seed, 1.0);
            for lambda in [c(0.0, -1.0), c(1.0, -2.0), c(-5.0, -0.1)] {
                let r = l.resolvent(lambda).unwrap();
                assert!(op_norm(&r) <= (1.0 + 1e-9) / lambda.im.abs());
            }
        }
    }

    #[test]
    fn contraction_semigroup() {
        for seed in 0..20u64 {
            let l = DissipativeMatrix::random(8, seed, 1.0);
            for s in [0.1, 0.5, 1.0, 2.0] {
                let e = expm(&l.matrix().scale(c(0.0, s))).unwrap();
                assert!(op_norm(&e) <= 1.0 + 1e-9);
            }
        }
    }

    #[test]
    fn pair_difference_is_exact() {
        let l1 = DissipativeMatrix::random(4, 1, 1.0);
        let l2 = DissipativeMatrix::random(4, 2, 1.0);
        let p = PerturbationPair::new(l1.clone(), l2.clone()).unwrap();
        assert_eq!(p.k, l1.matrix() - l2.matrix());
        assert!(PerturbationPair::new(l1, DissipativeMatrix::random(3, 2, 1.0)).is_err());
    }
}
