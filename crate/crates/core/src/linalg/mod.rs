//! Dense complex linear-algebra kernels.

mod expm;
mod hermitian;
mod lu;
mod matrix;
mod norm;

pub use expm::{expm, MAX_SQUARINGS, THETA_13};
pub use hermitian::{
    check_hermitian, cholesky, hermitian_defect, hermitian_eig, psd_check, HermitianEigen, HERMITIAN_TOL,
};
pub use lu::{inverse, lu_solve, Lu, PIVOT_TOL};
pub use matrix::ComplexMatrix;
pub use norm::{
    fro_norm, one_norm, op_norm, op_norm_estimate, op_norm_estimate_with_rng, NormEstimate, POWER_MAX_ITER,
    POWER_REL_TOL,
};
