//! Matrix exponential by scaling and squaring with diagonal Padé approximants.
//!
//! Degree selection and θ thresholds follow Higham, "The scaling and squaring
//! method for the matrix exponential revisited" (2005): the smallest degree
//! in {3, 5, 7, 9} whose θ bounds `‖A‖₁` is used directly, otherwise `A` is
//! scaled by `2^-s` until `‖A/2^s‖₁ ≤ θ₁₃ ≈ 5.37` and the degree-13
//! approximant is squared back up.

use num_complex::Complex64;

use super::lu::lu_solve;
use super::matrix::ComplexMatrix;
use super::norm::one_norm;
use crate::error::{Error, Result};

const THETA_3: f64 = 1.495_585_217_958_292e-2;
const THETA_5: f64 = 2.539_398_330_063_230e-1;
const THETA_7: f64 = 9.504_178_996_162_932e-1;
const THETA_9: f64 = 2.097_847_961_257_068e0;
pub const THETA_13: f64 = 5.371_920_351_148_152e0;

/// More squarings than this is treated as out of range.
pub const MAX_SQUARINGS: u32 = 60;

const B3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const B5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const B7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const B9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const B13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

/// `e^A`.
pub fn expm(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Range { norm });
    }
    let n = a.dim();
    if n == 1 {
        let e = a[(0, 0)].exp();
        return if e.re.is_finite() && e.im.is_finite() {
            Ok(ComplexMatrix::scalar(1, e))
        } else {
            Err(Error::Range { norm })
        };
    }

    let result = if norm <= THETA_3 {
        pade_low(a, &B3)?
    } else if norm <= THETA_5 {
        pade_low(a, &B5)?
    } else if norm <= THETA_7 {
        pade_low(a, &B7)?
    } else if norm <= THETA_9 {
        pade_low(a, &B9)?
    } else {
        let s = (norm / THETA_13).log2().ceil().max(0.0);
        if s > MAX_SQUARINGS as f64 {
            return Err(Error::Range { norm });
        }
        let s = s as u32;
        let scaled = a.scale_real(0.5f64.powi(s as i32));
        let mut r = pade13(&scaled)?;
        for _ in 0..s {
            r = &r * &r;
        }
        r
    };

    if !result.is_finite() {
        return Err(Error::Range { norm });
    }
    Ok(result)
}

fn solve_pade(u: &ComplexMatrix, v: &ComplexMatrix) -> Result<ComplexMatrix> {
    // r = (V − U)⁻¹ (V + U)
    lu_solve(&(v - u), &(v + u))
}

fn pade_low(a: &ComplexMatrix, b: &[f64]) -> Result<ComplexMatrix> {
    let n = a.dim();
    let a2 = a * a;
    let mut odd = ComplexMatrix::scalar(n, Complex64::new(b[1], 0.0));
    let mut even = ComplexMatrix::scalar(n, Complex64::new(b[0], 0.0));
    let mut power = ComplexMatrix::identity(n);
    for k in (2..b.len()).step_by(2) {
        power = &power * &a2;
        even += &power.scale_real(b[k]);
        if k + 1 < b.len() {
            odd += &power.scale_real(b[k + 1]);
        }
    }
    let u = a * &odd;
    solve_pade(&u, &even)
}

fn pade13(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.dim();
    let b = &B13;
    let a2 = a * a;
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;

    let inner_u = &(&a6.scale_real(b[13]) + &a4.scale_real(b[11])) + &a2.scale_real(b[9]);
    let mut tail_u = &(&a6.scale_real(b[7]) + &a4.scale_real(b[5])) + &a2.scale_real(b[3]);
    tail_u = tail_u.shift(Complex64::new(b[1], 0.0));
    let u = a * &(&(&a6 * &inner_u) + &tail_u);

    let inner_v = &(&a6.scale_real(b[12]) + &a4.scale_real(b[10])) + &a2.scale_real(b[8]);
    let mut tail_v = &(&a6.scale_real(b[6]) + &a4.scale_real(b[4])) + &a2.scale_real(b[2]);
    tail_v = tail_v.shift(Complex64::new(b[0], 0.0));
    let v = &(&a6 * &inner_v) + &tail_v;
    debug_assert_eq!(v.dim(), n);

    solve_pade(&u, &v)
}
