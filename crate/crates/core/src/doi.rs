//! Divided-difference factorizations and double operator integrals.
//!
//! For the function class of [`crate::funcalc`] the divided difference
//! factors explicitly:
//!
//! - linear `m z`: `Δ = m · 1 · 1`
//! - resolvent `a r_λ`, `r_λ(z) = (z − λ)⁻¹`: `Δ(z, w) = −a r_λ(z) r_λ(w)`
//! - exponential `b e_t`, `e_t(z) = e^{itz}`: the Duhamel formula
//!   `Δ(z, w) = i b ∫₀ᵗ e^{isz} e^{i(t−s)w} ds`, discretized with an
//!   `n`-point Gauss–Legendre rule on `[0, t]`.
//!
//! A factorization `Δf(z, w) = Σ cₙ φₙ(z) ψₙ(w)` turns into the double
//! operator integral `Σ cₙ φₙ(L₁) Q ψₙ(L₂)`, which in finite dimension
//! represents `f(L₁) − f(L₂)` for `Q = L₁ − L₂` and `f(L₁)R − Rf(L₂)` for
//! `Q = L₁R − RL₂`. Every identity here is a finite sum, so residuals are
//! pure rounding (plus quadrature error for exponential terms).

use num_complex::Complex64;

use crate::dissipative::{DissipativeMatrix, PerturbationPair};
use crate::error::{Error, Result};
use crate::funcalc::AnalyticFunction;
use crate::linalg::{expm, fro_norm, op_norm, ComplexMatrix};
use crate::quadrature::GaussLegendre;

pub const DEFAULT_QUAD_NODES: usize = 32;
pub const MAX_QUAD_NODES: usize = 256;
/// Node doubling stops once successive residuals differ by less than this.
pub const QUAD_CONVERGENCE_TOL: f64 = 1e-12;
/// Default relative tolerance for representation residuals.
pub const TOL_THM: f64 = 1e-8;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A scalar factor on the closed upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Factor {
    /// The constant function 1.
    Unit,
    /// `(z − λ)⁻¹`.
    Resolvent(Complex64),
    /// `e^{isz}`.
    Exponential(f64),
}

impl Factor {
    pub fn eval_scalar(&self, z: Complex64) -> Complex64 {
        match *self {
            Factor::Unit => Complex64::new(1.0, 0.0),
            Factor::Resolvent(pole) => 1.0 / (z - pole),
            Factor::Exponential(s) => (I * s * z).exp(),
        }
    }

    pub fn eval_matrix(&self, l: &DissipativeMatrix) -> Result<ComplexMatrix> {
        match *self {
            Factor::Unit => Ok(ComplexMatrix::identity(l.dim())),
            Factor::Resolvent(pole) => l.resolvent(pole),
            Factor::Exponential(s) => expm(&l.matrix().scale(I * s)),
        }
    }

    /// `sup |φ|` over the closed upper half-plane.
    pub fn sup_abs(&self) -> f64 {
        match *self {
            Factor::Unit | Factor::Exponential(_) => 1.0,
            Factor::Resolvent(pole) => 1.0 / (-pole.im),
        }
    }
}

/// One summand `weight · left(z) · right(w)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HaagerupTerm {
    pub weight: Complex64,
    pub left: Factor,
    pub right: Factor,
}

/// Explicit factorization of `Δf` as a finite sum of products.
#[derive(Debug, Clone, PartialEq)]
pub struct HaagerupDecomposition {
    terms: Vec<HaagerupTerm>,
    source: AnalyticFunction,
    quad_nodes: usize,
}

impl HaagerupDecomposition {
    pub fn new(f: &AnalyticFunction, quad_nodes: usize) -> Result<Self> {
        if quad_nodes == 0 {
            return Err(Error::RejectedInput("quad_nodes must be at least 1".into()));
        }
        let mut terms = Vec::new();
        if f.linear_term() != Complex64::new(0.0, 0.0) {
            terms.push(HaagerupTerm {
                weight: f.linear_term(),
                left: Factor::Unit,
                right: Factor::Unit,
            });
        }
        for r in f.resolvent_terms() {
            terms.push(HaagerupTerm {
                weight: -r.coeff,
                left: Factor::Resolvent(r.pole),
                right: Factor::Resolvent(r.pole),
            });
        }
        if !f.exponential_terms().is_empty() {
            let rule = GaussLegendre::new(quad_nodes)?;
            for e in f.exponential_terms() {
                for (s, w) in rule.on_interval(0.0, e.time) {
                    terms.push(HaagerupTerm {
                        weight: I * e.coeff * w,
                        left: Factor::Exponential(s),
                        right: Factor::Exponential(e.time - s),
                    });
                }
            }
        }
        Ok(Self {
            terms,
            source: f.clone(),
            quad_nodes,
        })
    }

    pub fn terms(&self) -> &[HaagerupTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn source(&self) -> &AnalyticFunction {
        &self.source
    }

    pub fn quad_nodes(&self) -> usize {
        self.quad_nodes
    }

    /// `Σ weight · left(z) · right(w)`.
    pub fn reconstruct(&self, z: Complex64, w: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.weight * t.left.eval_scalar(z) * t.right.eval_scalar(w))
            .sum()
    }

    /// `(Σ|weight|·|left(z)|²)^{1/2} · (Σ|weight|·|right(w)|²)^{1/2}` at one point pair.
    pub fn factorization_bound_at(&self, z: Complex64, w: Complex64) -> f64 {
        let (l, r) = self.terms.iter().fold((0.0, 0.0), |(l, r), t| {
            let c = t.weight.norm();
            (l + c * t.left.eval_scalar(z).norm_sqr(), r + c * t.right.eval_scalar(w).norm_sqr())
        });
        l.sqrt() * r.sqrt()
    }

    /// Supremum of the factorization bound over the closed upper half-plane,
    /// taken termwise: `(Σ|weight|·sup|left|²)^{1/2} · (Σ|weight|·sup|right|²)^{1/2}`.
    pub fn factorization_bound(&self) -> f64 {
        let (l, r) = self.terms.iter().fold((0.0, 0.0), |(l, r), t| {
            let c = t.weight.norm();
            (l + c * t.left.sup_abs().powi(2), r + c * t.right.sup_abs().powi(2))
        });
        l.sqrt() * r.sqrt()
    }

    /// Double operator integral `Σ weight · left(L₁) · Q · right(L₂)`.
    pub fn apply(&self, l1: &DissipativeMatrix, l2: &DissipativeMatrix, q: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = l1.dim();
        if l2.dim() != n || q.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: if l2.dim() != n { l2.dim() } else { q.dim() },
            });
        }
        let mut out = ComplexMatrix::zeros(n);
        for t in &self.terms {
            let left_q = match t.left {
                Factor::Unit => q.clone(),
                other => &other.eval_matrix(l1)? * q,
            };
            let sandwich = match t.right {
                Factor::Unit => left_q,
                other => &left_q * &other.eval_matrix(l2)?,
            };
            out += &sandwich.scale(t.weight);
        }
        Ok(out)
    }
}

/// `‖(f(L₁) − f(L₂)) − Σ φₙ(L₁) K ψₙ(L₂)‖ / (1 + ‖f(L₁) − f(L₂)‖)` with `K = L₁ − L₂`.
pub fn theorem42_residual(f: &AnalyticFunction, pair: &PerturbationPair, quad_nodes: usize) -> Result<f64> {
    let d = HaagerupDecomposition::new(f, quad_nodes)?;
    let diff = &f.eval_matrix(&pair.l1)? - &f.eval_matrix(&pair.l2)?;
    let doi = d.apply(&pair.l1, &pair.l2, &pair.k)?;
    Ok(relative_residual(&diff, &doi))
}

/// Residual of the resolvent-sandwiched identity
/// `f(L₁)R₁R₂ − R₁f(L₂)R₂ = Σ φₙ(L₁)(R₂ − R₁)ψₙ(L₂)`, `Rⱼ = (Lⱼ + iI)⁻¹`,
/// which holds for any pair of dissipative matrices.
pub fn theorem41_residual(
    f: &AnalyticFunction,
    l1: &DissipativeMatrix,
    l2: &DissipativeMatrix,
    quad_nodes: usize,
) -> Result<f64> {
    let d = HaagerupDecomposition::new(f, quad_nodes)?;
    let r1 = l1.resolvent_at_minus_i()?;
    let r2 = l2.resolvent_at_minus_i()?;
    let lhs = &(&(&f.eval_matrix(l1)? * &r1) * &r2) - &(&(&r1 * &f.eval_matrix(l2)?) * &r2);
    let rhs = d.apply(l1, l2, &(&r2 - &r1))?;
    Ok(relative_residual(&lhs, &rhs))
}

/// Residual of `f(L₁)R₁RR₂ − R₁Rf(L₂)R₂ = Σ φₙ(L₁)(RR₂ − R₁R)ψₙ(L₂)`.
pub fn theorem51_residual(
    f: &AnalyticFunction,
    l1: &DissipativeMatrix,
    l2: &DissipativeMatrix,
    r: &ComplexMatrix,
    quad_nodes: usize,
) -> Result<f64> {
    let d = HaagerupDecomposition::new(f, quad_nodes)?;
    let r1 = l1.resolvent_at_minus_i()?;
    let r2 = l2.resolvent_at_minus_i()?;
    let r_r2 = r.checked_mul(&r2)?;
    let r1_r = &r1 * r;
    let lhs = &(&(&f.eval_matrix(l1)? * &r1_r) * &r2) - &(&(&r1_r * &f.eval_matrix(l2)?) * &r2);
    let rhs = d.apply(l1, l2, &(&r_r2 - &r1_r))?;
    Ok(relative_residual(&lhs, &rhs))
}

/// `‖(f(L₁)R − Rf(L₂)) − Σ φₙ(L₁) J ψₙ(L₂)‖ / (1 + ‖f(L₁)R − Rf(L₂)‖)` with `J = L₁R − RL₂`.
pub fn quasicommutator_residual(
    f: &AnalyticFunction,
    l1: &DissipativeMatrix,
    l2: &DissipativeMatrix,
    r: &ComplexMatrix,
    quad_nodes: usize,
) -> Result<f64> {
    let d = HaagerupDecomposition::new(f, quad_nodes)?;
    let j = quasicommutator_source(l1, l2, r)?;
    let qc = &(&f.eval_matrix(l1)? * r) - &(r * &f.eval_matrix(l2)?);
    let doi = d.apply(l1, l2, &j)?;
    Ok(relative_residual(&qc, &doi))
}

/// `J = L₁R − RL₂`.
pub fn quasicommutator_source(
    l1: &DissipativeMatrix,
    l2: &DissipativeMatrix,
    r: &ComplexMatrix,
) -> Result<ComplexMatrix> {
    l1.matrix().check_dim(r)?;
    l2.matrix().check_dim(r)?;
    Ok(&(l1.matrix() * r) - &(r * l2.matrix()))
}

fn relative_residual(exact: &ComplexMatrix, approx: &ComplexMatrix) -> f64 {
    op_norm(&(exact - approx)) / (1.0 + op_norm(exact))
}

/// A one-sided estimate `lhs ≤ rhs`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Margin {
    pub lhs: f64,
    pub rhs: f64,
}

impl Margin {
    /// `rhs − lhs`.
    pub fn margin(&self) -> f64 {
        self.rhs - self.lhs
    }

    /// `lhs ≤ rhs·(1 + rel_tol)`, i.e. `margin ≥ −rel_tol·rhs`.
    pub fn holds(&self, rel_tol: f64) -> bool {
        self.margin() >= -rel_tol * self.rhs
    }
}

/// `‖f(L₁) − f(L₂)‖` against `ol_bound(f)·‖L₁ − L₂‖`.
pub fn lipschitz_margin(f: &AnalyticFunction, pair: &PerturbationPair) -> Result<Margin> {
    let diff = &f.eval_matrix(&pair.l1)? - &f.eval_matrix(&pair.l2)?;
    Ok(Margin {
        lhs: op_norm(&diff),
        rhs: f.ol_bound() * op_norm(&pair.k),
    })
}

/// `‖f(L₁) − f(L₂)‖_F` against `sup_deriv_bound(f)·‖L₁ − L₂‖_F`.
pub fn s2_margin(f: &AnalyticFunction, pair: &PerturbationPair) -> Result<Margin> {
    let diff = &f.eval_matrix(&pair.l1)? - &f.eval_matrix(&pair.l2)?;
    Ok(Margin {
        lhs: fro_norm(&diff),
        rhs: f.sup_deriv_bound() * fro_norm(&pair.k),
    })
}

/// `‖f(L₁)R − Rf(L₂)‖` against `ol_bound(f)·‖L₁R − RL₂‖`.
pub fn quasicommutator_margin(
    f: &AnalyticFunction,
    l1: &DissipativeMatrix,
    l2: &DissipativeMatrix,
    r: &ComplexMatrix,
) -> Result<Margin> {
    let j = quasicommutator_source(l1, l2, r)?;
    let qc = &(&f.eval_matrix(l1)? * r) - &(r * &f.eval_matrix(l2)?);
    Ok(Margin {
        lhs: op_norm(&qc),
        rhs: f.ol_bound() * op_norm(&j),
    })
}

/// Result of a node-doubling study.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergedResidual {
    pub residual: f64,
    pub quad_nodes: usize,
    pub converged: bool,
}

/// Evaluates `residual_at(n)` starting from `start_nodes`, doubling `n` (up to
/// [`MAX_QUAD_NODES`]) until successive residuals differ by less than
/// [`QUAD_CONVERGENCE_TOL`]. Rational functions need no quadrature and are
/// evaluated once.
pub fn converge_quadrature(
    f: &AnalyticFunction,
    start_nodes: usize,
    mut residual_at: impl FnMut(usize) -> Result<f64>,
) -> Result<ConvergedResidual> {
    let mut nodes = start_nodes.max(1);
    let mut prev = residual_at(nodes)?;
    if f.is_rational() {
        return Ok(ConvergedResidual {
            residual: prev,
            quad_nodes: nodes,
            converged: true,
        });
    }
    while nodes * 2 <= MAX_QUAD_NODES {
        nodes *= 2;
        let next = residual_at(nodes)?;
        if (next - prev).abs() < QUAD_CONVERGENCE_TOL {
            return Ok(ConvergedResidual {
                residual: next,
                quad_nodes: nodes,
                converged: true,
            });
        }
        prev = next;
    }
    Ok(ConvergedResidual {
        residual: prev,
        quad_nodes: nodes,
        converged: false,
    })
}
