//! A concrete class of Lipschitz analytic functions on the closed upper half-plane.
//!
//! Every [`AnalyticFunction`] has the form
//!
//! ```text
//! f(z) = c₀ + m·z + Σⱼ aⱼ (z − λⱼ)⁻¹ + Σₖ bₖ e^{i tₖ z},   Im λⱼ < 0,  tₖ ≥ 0,
//! ```
//!
//! which is analytic in `Im z > 0`, continuous and Lipschitz on `Im z ≥ 0`,
//! and has an explicit factorization of its divided difference (see
//! [`crate::doi`]).
//!
//! # Text form
//!
//! One term per line; blank lines and `#` comments are ignored:
//!
//! ```text
//! const RE IM
//! linear RE IM
//! res RE_a IM_a RE_pole IM_pole
//! exp RE_b IM_b T
//! ```

use std::fmt;
use std::ops::Add;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dissipative::DissipativeMatrix;
use crate::error::{Error, Result};
use crate::linalg::{expm, op_norm, ComplexMatrix};

/// Divided differences switch from the difference quotient to the termwise
/// formula when `|z − w| ≤ H_SWITCH·(1 + |z| + |w|)`.
pub const H_SWITCH: f64 = 1e-4;

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `a (z − λ)⁻¹` with `Im λ < 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResolventTerm {
    pub coeff: Complex64,
    pub pole: Complex64,
}

impl ResolventTerm {
    /// Distance `δ = −Im λ` from the pole to the real axis.
    pub fn distance(&self) -> f64 {
        -self.pole.im
    }
}

/// `b e^{i t z}` with `t ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExponentialTerm {
    pub coeff: Complex64,
    pub time: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticFunction {
    constant: Complex64,
    linear: Complex64,
    resolvents: Vec<ResolventTerm>,
    exponentials: Vec<ExponentialTerm>,
}

fn check_finite(z: Complex64, what: &str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::RejectedInput(format!("{what} must be finite, got {z}")))
    }
}

fn check_domain(z: Complex64) -> Result<()> {
    check_finite(z, "evaluation point")?;
    if z.im < 0.0 {
        return Err(Error::RejectedInput(format!(
            "evaluation point {z} lies outside the closed upper half-plane"
        )));
    }
    Ok(())
}

/// `(eˣ − 1)/x`, accurate near zero.
fn phi1(x: Complex64) -> Complex64 {
    if x.norm() < 0.5 {
        // Σ xᵏ/(k+1)!, Horner from the tail
        let mut acc = Complex64::new(1.0, 0.0);
        for k in (1..=20).rev() {
            acc = acc * x / (k as f64 + 1.0) + 1.0;
        }
        acc
    } else {
        (x.exp() - 1.0) / x
    }
}

impl AnalyticFunction {
    pub fn zero() -> Self {
        Self {
            constant: ZERO,
            linear: ZERO,
            resolvents: Vec::new(),
            exponentials: Vec::new(),
        }
    }

    pub fn constant(c: Complex64) -> Self {
        Self {
            constant: c,
            ..Self::zero()
        }
    }

    pub fn linear(m: Complex64) -> Self {
        Self {
            linear: m,
            ..Self::zero()
        }
    }

    /// `a (z − λ)⁻¹`; requires `Im λ < 0`.
    pub fn resolvent(a: Complex64, pole: Complex64) -> Result<Self> {
        Self::zero().with_resolvent(a, pole)
    }

    /// `b e^{i t z}`; requires `t ≥ 0`.
    pub fn exponential(b: Complex64, time: f64) -> Result<Self> {
        Self::zero().with_exponential(b, time)
    }

    pub fn with_constant(mut self, c: Complex64) -> Result<Self> {
        check_finite(c, "constant")?;
        self.constant += c;
        Ok(self)
    }

    pub fn with_linear(mut self, m: Complex64) -> Result<Self> {
        check_finite(m, "linear coefficient")?;
        self.linear += m;
        Ok(self)
    }

    pub fn with_resolvent(mut self, coeff: Complex64, pole: Complex64) -> Result<Self> {
        check_finite(coeff, "resolvent coefficient")?;
        check_finite(pole, "pole")?;
        if !(pole.im < 0.0) {
            return Err(Error::RejectedInput(format!(
                "pole {pole} must lie in the open lower half-plane"
            )));
        }
        self.resolvents.push(ResolventTerm { coeff, pole });
        Ok(self)
    }

    pub fn with_exponential(mut self, coeff: Complex64, time: f64) -> Result<Self> {
        check_finite(coeff, "exponential coefficient")?;
        if !(time >= 0.0 && time.is_finite()) {
            return Err(Error::RejectedInput(format!(
                "exponential time must be finite and non-negative, got {time}"
            )));
        }
        self.exponentials.push(ExponentialTerm { coeff, time });
        Ok(self)
    }

    pub fn constant_term(&self) -> Complex64 {
        self.constant
    }

    pub fn linear_term(&self) -> Complex64 {
        self.linear
    }

    pub fn resolvent_terms(&self) -> &[ResolventTerm] {
        &self.resolvents
    }

    pub fn exponential_terms(&self) -> &[ExponentialTerm] {
        &self.exponentials
    }

    /// True when the function has no exponential terms, so its divided
    /// difference factorization is exact.
    pub fn is_rational(&self) -> bool {
        self.exponentials.is_empty()
    }

    pub fn eval_scalar(&self, z: Complex64) -> Result<Complex64> {
        check_domain(z)?;
        Ok(self.eval_unchecked(z))
    }

    fn eval_unchecked(&self, z: Complex64) -> Complex64 {
        let mut v = self.constant + self.linear * z;
        for r in &self.resolvents {
            v += r.coeff / (z - r.pole);
        }
        for e in &self.exponentials {
            v += e.coeff * (I * e.time * z).exp();
        }
        v
    }

    pub fn eval_deriv(&self, z: Complex64) -> Result<Complex64> {
        check_domain(z)?;
        let mut v = self.linear;
        for r in &self.resolvents {
            let d = z - r.pole;
            v -= r.coeff / (d * d);
        }
        for e in &self.exponentials {
            v += I * e.coeff * e.time * (I * e.time * z).exp();
        }
        Ok(v)
    }

    /// `Δf(z, w)`: the difference quotient off the diagonal and `f′(z)` on it.
    pub fn divided_difference(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        check_domain(z)?;
        check_domain(w)?;
        let gap = (z - w).norm();
        if gap > H_SWITCH * (1.0 + z.norm() + w.norm()) {
            return Ok((self.eval_unchecked(z) - self.eval_unchecked(w)) / (z - w));
        }
        // termwise, no cancellation; reduces to f′(z) at z = w
        let mut v = self.linear;
        for r in &self.resolvents {
            v -= r.coeff / ((z - r.pole) * (w - r.pole));
        }
        for e in &self.exponentials {
            // i b ∫₀ᵗ e^{isz} e^{i(t−s)w} ds = i b t e^{itw} φ₁(it(z − w))
            let t = e.time;
            v += I * e.coeff * t * (I * t * w).exp() * phi1(I * t * (z - w));
        }
        Ok(v)
    }

    /// `f(L) = c₀I + mL + Σ aⱼ(L − λⱼI)⁻¹ + Σ bₖ e^{itₖL}`.
    pub fn eval_matrix(&self, l: &DissipativeMatrix) -> Result<ComplexMatrix> {
        let lm = l.matrix();
        let n = l.dim();
        let mut out = ComplexMatrix::scalar(n, self.constant);
        if self.linear != ZERO {
            out += &lm.scale(self.linear);
        }
        for r in &self.resolvents {
            out += &l.resolvent(r.pole)?.scale(r.coeff);
        }
        for e in &self.exponentials {
            out += &expm(&lm.scale(I * e.time))?.scale(e.coeff);
        }
        Ok(out)
    }

    /// `‖f(L)(L + iI)⁻¹ − (L + iI)⁻¹f(L)‖ / (1 + ‖f(L)‖)`.
    pub fn commutation_check(&self, l: &DissipativeMatrix) -> Result<f64> {
        let fl = self.eval_matrix(l)?;
        let r = l.resolvent_at_minus_i()?;
        let comm = &(&fl * &r) - &(&r * &fl);
        Ok(op_norm(&comm) / (1.0 + op_norm(&fl)))
    }

    /// `|m| + Σ|aⱼ|/δⱼ² + Σ|bₖ|tₖ`, an upper bound for `sup_{Im ζ > 0} |f′(ζ)|`.
    pub fn sup_deriv_bound(&self) -> f64 {
        self.termwise_lipschitz_sum()
    }

    /// Upper bound for the operator Lipschitz norm read off the explicit
    /// divided-difference factorization: each resolvent pair contributes
    /// `sup|r_λ|² = 1/δ²` times `|a|`, each Duhamel integral `∫₀ᵗ 1 ds = t`
    /// times `|b|`, and the linear term `|m|`.
    pub fn ol_bound(&self) -> f64 {
        self.termwise_lipschitz_sum()
    }

    fn termwise_lipschitz_sum(&self) -> f64 {
        let res: f64 = self
            .resolvents
            .iter()
            .map(|r| r.coeff.norm() / (r.distance() * r.distance()))
            .sum();
        let exp: f64 = self.exponentials.iter().map(|e| e.coeff.norm() * e.time).sum();
        self.linear.norm() + res + exp
    }

    /// `Σ|aⱼ|/δⱼ + Σ|bₖ|`, which bounds `|f(z) − mz − c₀|` on the closed upper half-plane.
    pub fn bounded_part_sup(&self) -> f64 {
        let res: f64 = self.resolvents.iter().map(|r| r.coeff.norm() / r.distance()).sum();
        let exp: f64 = self.exponentials.iter().map(|e| e.coeff.norm()).sum();
        res + exp
    }
}

impl Default for AnalyticFunction {
    fn default() -> Self {
        Self::zero()
    }
}

impl Add for AnalyticFunction {
    type Output = AnalyticFunction;

    fn add(mut self, rhs: AnalyticFunction) -> AnalyticFunction {
        self.constant += rhs.constant;
        self.linear += rhs.linear;
        self.resolvents.extend(rhs.resolvents);
        self.exponentials.extend(rhs.exponentials);
        self
    }
}

impl fmt::Display for AnalyticFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.constant != ZERO {
            writeln!(f, "const {} {}", self.constant.re, self.constant.im)?;
        }
        if self.linear != ZERO {
            writeln!(f, "linear {} {}", self.linear.re, self.linear.im)?;
        }
        for r in &self.resolvents {
            writeln!(f, "res {} {} {} {}", r.coeff.re, r.coeff.im, r.pole.re, r.pole.im)?;
        }
        for e in &self.exponentials {
            writeln!(f, "exp {} {} {}", e.coeff.re, e.coeff.im, e.time)?;
        }
        Ok(())
    }
}

impl AnalyticFunction {
    /// Parses the text form, reporting line numbers relative to `first_line`.
    pub fn parse_lines<'a>(lines: impl IntoIterator<Item = &'a str>, first_line: usize) -> Result<Self> {
        let mut f = Self::zero();
        for (offset, raw) in lines.into_iter().enumerate() {
            let line_no = first_line + offset;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let mut parts = line.split_whitespace();
            let kind = parts.next().unwrap_or_default();
            let nums: Vec<f64> = parts
                .map(|p| {
                    p.parse::<f64>().map_err(|_| Error::Parse {
                        line: line_no,
                        message: format!("invalid number `{p}`"),
                    })
                })
                .collect::<Result<_>>()?;
            let arity = match kind {
                "const" | "linear" => 2,
                "res" => 4,
                "exp" => 3,
                other => {
                    return Err(Error::Parse {
                        line: line_no,
                        message: format!("unknown term `{other}` (expected const, linear, res or exp)"),
                    })
                }
            };
            if nums.len() != arity {
                return Err(Error::Parse {
                    line: line_no,
                    message: format!("`{kind}` takes {arity} numbers, found {}", nums.len()),
                });
            }
            let c = |i: usize| Complex64::new(nums[i], nums[i + 1]);
            let next = match kind {
                "const" => f.with_constant(c(0)),
                "linear" => f.with_linear(c(0)),
                "res" => f.with_resolvent(c(0), c(2)),
                _ => f.with_exponential(c(0), nums[2]),
            };
            f = next.map_err(|e| Error::Parse {
                line: line_no,
                message: e.to_string(),
            })?;
        }
        Ok(f)
    }
}

impl FromStr for AnalyticFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::parse_lines(s.lines(), 1)
    }
}
