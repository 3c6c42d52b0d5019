//! Matrix norms.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::matrix::ComplexMatrix;

pub const POWER_MAX_ITER: usize = 10_000;
pub const POWER_REL_TOL: f64 = 1e-12;
const POWER_DEFAULT_SEED: u64 = 0x6f70_6e6f_726d;

/// Outcome of a power-iteration estimate of the spectral norm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormEstimate {
    pub value: f64,
    pub iterations: usize,
    /// `‖A*A v − ρ v‖` for the final unit vector `v` and Rayleigh quotient `ρ`.
    pub residual: f64,
    pub converged: bool,
}

/// Frobenius (Hilbert–Schmidt) norm.
pub fn fro_norm(a: &ComplexMatrix) -> f64 {
    // scaled accumulation avoids overflow for huge entries
    let scale = a.max_abs();
    if scale == 0.0 || !scale.is_finite() {
        return scale;
    }
    let sum: f64 = a.as_slice().iter().map(|z| (z / scale).norm_sqr()).sum();
    scale * sum.sqrt()
}

/// Maximum absolute column sum.
pub fn one_norm(a: &ComplexMatrix) -> f64 {
    let n = a.dim();
    (0..n)
        .map(|j| (0..n).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Spectral norm (largest singular value).
pub fn op_norm(a: &ComplexMatrix) -> f64 {
    op_norm_estimate(a).value
}

/// Power iteration on `A*A` from a fixed-seed random start.
pub fn op_norm_estimate(a: &ComplexMatrix) -> NormEstimate {
    let mut rng = ChaCha8Rng::seed_from_u64(POWER_DEFAULT_SEED);
    op_norm_estimate_with_rng(a, &mut rng)
}

pub fn op_norm_estimate_with_rng<R: Rng + ?Sized>(a: &ComplexMatrix, rng: &mut R) -> NormEstimate {
    if a.max_abs() == 0.0 {
        return NormEstimate {
            value: 0.0,
            iterations: 0,
            residual: 0.0,
            converged: true,
        };
    }
    let n = a.dim();
    let adj = a.adjoint();
    let mut v: Vec<Complex64> = (0..n)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im)
        })
        .collect();
    normalize(&mut v);

    let mut rho_prev = f64::NAN;
    let mut settled = 0;
    let mut rho = 0.0;
    let mut residual = f64::INFINITY;
    for iter in 1..=POWER_MAX_ITER {
        let w = a.mul_vec(&v);
        rho = w.iter().map(|z| z.norm_sqr()).sum::<f64>();
        let u = adj.mul_vec(&w);
        residual = u
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - y * rho).norm_sqr())
            .sum::<f64>()
            .sqrt();

        // two consecutive small steps guard against a stall far from the top
        if (rho - rho_prev).abs() <= POWER_REL_TOL * rho {
            settled += 1;
        } else {
            settled = 0;
        }
        if settled >= 2 || residual <= f64::EPSILON * rho {
            return NormEstimate {
                value: rho.sqrt(),
                iterations: iter,
                residual,
                converged: true,
            };
        }
        rho_prev = rho;
        v = u;
        if normalize(&mut v) == 0.0 {
            break;
        }
    }
    NormEstimate {
        value: rho.sqrt(),
        iterations: POWER_MAX_ITER,
        residual,
        converged: false,
    }
}

fn normalize(v: &mut [Complex64]) -> f64 {
    let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if nrm > 0.0 {
        for z in v.iter_mut() {
            *z /= nrm;
        }
    }
    nrm
}
