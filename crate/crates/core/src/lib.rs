//! Functional calculus for dissipative matrices.
//!
//! A matrix `L` is dissipative when its imaginary part `(L − L*)/2i` is
//! positive semidefinite. For functions analytic in the upper half-plane and
//! Lipschitz on its closure, this crate evaluates `f(L)`, builds explicit
//! factorizations `Δf(z, w) = Σ φₙ(z) ψₙ(w)` of divided differences, and uses
//! them as double operator integrals to represent and bound
//! `f(L₁) − f(L₂)` and `f(L₁)R − R f(L₂)`.
//!
//! Module map:
//! - [`linalg`]: dense complex kernels (LU, Padé `expm`, norms, Jacobi, Cholesky)
//! - [`dissipative`]: validated dissipative matrices, Cayley transform, resolvents
//! - [`funcalc`]: the symbolic function class and its scalar/matrix evaluation
//! - [`doi`]: divided-difference factorizations, double operator integrals, residuals and margins
//! - [`oracle`]: independent reference computations used for cross-checks

pub mod dissipative;
pub mod doi;
pub mod error;
pub mod funcalc;
pub mod linalg;
pub mod oracle;
pub mod quadrature;

pub use dissipative::{DissipativeMatrix, PerturbationPair};
pub use doi::{HaagerupDecomposition, Margin};
pub use error::{Error, Result};
pub use funcalc::AnalyticFunction;
pub use linalg::ComplexMatrix;

pub use num_complex::Complex64;
