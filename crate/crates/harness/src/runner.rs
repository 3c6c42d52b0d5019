//! Seeded instance generation and suite execution.

use std::collections::BTreeMap;
use std::time::Instant;

use dissip_core::dissipative::inverse_cayley;
use dissip_core::doi::{
    lipschitz_margin, quasicommutator_margin, quasicommutator_residual, s2_margin, theorem41_residual,
    theorem42_residual, theorem51_residual, HaagerupDecomposition,
};
use dissip_core::linalg::{expm, fro_norm, op_norm, ComplexMatrix};
use dissip_core::oracle::{diagonal_schur_doi, expm_rk4, self_adjoint_doi};
use dissip_core::{Complex64, DissipativeMatrix, Margin, PerturbationPair};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{ConfigError, ExperimentConfig, FunctionSpec, Suite};
use crate::report::{Check, Record, VerificationReport, NO_FUNCTION};

pub const SCHUR_ORACLE_TOL: f64 = 1e-10;
pub const SELF_ADJOINT_ORACLE_TOL: f64 = 1e-9;
pub const RK4_ORACLE_TOL: f64 = 1e-8;
pub const RK4_STEPS: usize = 10_000;
/// RK4 cross-check only runs up to this dimension.
pub const RK4_MAX_DIM: usize = 6;
pub const SEMIGROUP_TIMES: [f64; 4] = [0.1, 0.5, 1.0, 2.0];

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{suite} dim {dim} trial {trial} ({function}): {source}")]
    Numeric {
        suite: Suite,
        dim: usize,
        trial: usize,
        function: String,
        source: dissip_core::Error,
    },
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Seed of trial `trial` of `suite` at dimension `dim`.
pub fn trial_seed(seed: u64, suite: Suite, dim: usize, trial: usize) -> u64 {
    let suite_idx = Suite::ALL.iter().position(|&s| s == suite).unwrap_or(0) as u64;
    let mut h = splitmix64(seed);
    for part in [suite_idx, dim as u64, trial as u64] {
        h = splitmix64(h ^ part);
    }
    h
}

/// `L₁` random and `L₂ = L₁ + P` with `P` a random dissipative matrix of scale `eps`.
pub fn dissipative_perturbation<R: Rng + ?Sized>(dim: usize, eps: f64, rng: &mut R) -> Option<PerturbationPair> {
    let l1 = DissipativeMatrix::random_with_rng(dim, rng, 1.0);
    let p = DissipativeMatrix::random_with_rng(dim, rng, eps);
    let l2 = DissipativeMatrix::new(l1.matrix() + p.matrix()).ok()?;
    PerturbationPair::new(l1, l2).ok()
}

/// `K` an arbitrary (generally non-normal, non-dissipative) matrix with
/// `‖K‖_F = eps·u`, `u ∈ [0.1, 1]`. `L₁` carries an extra `iεI` so that
/// `L₂ = L₁ − K` stays dissipative; `L₂` is still re-checked and `None`
/// signals a skipped trial.
pub fn arbitrary_perturbation<R: Rng + ?Sized>(dim: usize, eps: f64, rng: &mut R) -> Option<PerturbationPair> {
    let base = DissipativeMatrix::random_with_rng(dim, rng, 1.0);
    let g = ComplexMatrix::random_gaussian(dim, rng);
    let size = eps * rng.random_range(0.1..=1.0);
    let k = g.scale_real(size / fro_norm(&g));
    let l1 = DissipativeMatrix::new(base.matrix().shift(Complex64::new(0.0, eps))).ok()?;
    let l2 = DissipativeMatrix::new(l1.matrix() - &k).ok()?;
    PerturbationPair::new(l1, l2).ok()
}

/// Even trials use a dissipative perturbation, odd trials an arbitrary one.
pub fn perturbation_pair<R: Rng + ?Sized>(dim: usize, eps: f64, trial: usize, rng: &mut R) -> Option<PerturbationPair> {
    if trial % 2 == 0 {
        dissipative_perturbation(dim, eps, rng)
    } else {
        arbitrary_perturbation(dim, eps, rng)
    }
}

/// Random `R` rescaled to `‖R‖ = 1`.
pub fn unit_norm_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let r = ComplexMatrix::random_gaussian(dim, rng);
    r.scale_real(1.0 / op_norm(&r))
}

/// Two unrelated dissipative matrices.
pub fn independent_pair<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> (DissipativeMatrix, DissipativeMatrix) {
    let l1 = DissipativeMatrix::random_with_rng(dim, rng, 1.0);
    let l2 = DissipativeMatrix::random_with_rng(dim, rng, 1.5);
    (l1, l2)
}

fn upper_half_plane_point<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.random_range(-2.0..2.0), rng.random_range(0.0..2.0))
}

fn relative(exact: &ComplexMatrix, approx: &ComplexMatrix) -> f64 {
    op_norm(&(exact - approx)) / (1.0 + op_norm(exact))
}

struct Trial<'a> {
    cfg: &'a ExperimentConfig,
    suite: Suite,
    dim: usize,
    trial: usize,
    seed: u64,
    records: Vec<Record>,
}

impl Trial<'_> {
    /// Times `f` and appends its check as a record.
    fn record(
        &mut self,
        function: &str,
        metric: &str,
        f: impl FnOnce() -> dissip_core::Result<Check>,
    ) -> Result<(), RunError> {
        let start = Instant::now();
        let check = f().map_err(|source| RunError::Numeric {
            suite: self.suite,
            dim: self.dim,
            trial: self.trial,
            function: function.to_string(),
            source,
        })?;
        let mut r = Record::new(self.suite, self.dim, self.trial, self.seed, function, metric, check);
        r.wall_time = start.elapsed().as_secs_f64();
        self.records.push(r);
        Ok(())
    }

    /// Returns `false` when the trial was skipped.
    fn run(&mut self) -> Result<bool, RunError> {
        let cfg = self.cfg;
        let (dim, nodes, eps) = (self.dim, cfg.quad_nodes, cfg.perturbation_scale);
        let residual = |value: f64| Check::Residual {
            value,
            tolerance: cfg.tolerances.thm,
        };
        let margin = |m: Margin| Check::Margin {
            lhs: m.lhs,
            rhs: m.rhs,
            tolerance: cfg.tolerances.lip,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let fns: &[FunctionSpec] = &cfg.functions;
        match self.suite {
            Suite::Thm41 => {
                let (l1, l2) = independent_pair(dim, &mut rng);
                for f in fns {
                    self.record(&f.name, "residual", || {
                        theorem41_residual(&f.function, &l1, &l2, nodes).map(residual)
                    })?;
                }
            }
            Suite::Thm51 => {
                let (l1, l2) = independent_pair(dim, &mut rng);
                let r = unit_norm_matrix(dim, &mut rng);
                for f in fns {
                    self.record(&f.name, "residual", || {
                        theorem51_residual(&f.function, &l1, &l2, &r, nodes).map(residual)
                    })?;
                }
            }
            suite => {
                if suite == Suite::Oracles {
                    self.oracles(&mut rng)?;
                    return Ok(true);
                }
                let Some(pair) = perturbation_pair(dim, eps, self.trial, &mut rng) else {
                    return Ok(false);
                };
                let r = unit_norm_matrix(dim, &mut rng);
                let (l1, l2) = (&pair.l1, &pair.l2);
                for f in fns {
                    let g = &f.function;
                    match suite {
                        Suite::Thm42 => {
                            self.record(&f.name, "residual", || theorem42_residual(g, &pair, nodes).map(residual))?
                        }
                        Suite::Thm43 => self.record(&f.name, "lipschitz", || lipschitz_margin(g, &pair).map(margin))?,
                        Suite::S2 => self.record(&f.name, "hilbert_schmidt", || s2_margin(g, &pair).map(margin))?,
                        Suite::Thm52 => self.record(&f.name, "residual", || {
                            quasicommutator_residual(g, l1, l2, &r, nodes).map(residual)
                        })?,
                        _ => self.record(&f.name, "quasicommutator", || {
                            quasicommutator_margin(g, l1, l2, &r).map(margin)
                        })?,
                    }
                }
            }
        }
        Ok(true)
    }

    fn oracles(&mut self, rng: &mut ChaCha8Rng) -> Result<(), RunError> {
        let cfg = self.cfg;
        let dim = self.dim;
        let tol = cfg.tolerances.kernel;

        // diagonal arguments: the DOI is a Schur product
        let z: Vec<Complex64> = (0..dim).map(|_| upper_half_plane_point(rng)).collect();
        let w: Vec<Complex64> = (0..dim).map(|_| upper_half_plane_point(rng)).collect();
        let q = ComplexMatrix::random_gaussian(dim, rng);
        // self-adjoint arguments: classical spectral DOI
        let a1 = DissipativeMatrix::random_with_rng(dim, rng, 1.0).real_part().clone();
        let a2 = &a1 + &ComplexMatrix::random_gaussian(dim, rng).hermitian_part().scale_real(cfg.perturbation_scale);
        let l = DissipativeMatrix::random_with_rng(dim, rng, 1.0);
        let lambdas: Vec<Complex64> = (0..3)
            .map(|_| Complex64::new(rng.random_range(-2.0..2.0), -rng.random_range(0.05..2.0)))
            .collect();

        for f in &cfg.functions {
            let g = &f.function;
            self.record(&f.name, "schur_oracle", || {
                let l1 = DissipativeMatrix::new(ComplexMatrix::from_diagonal(&z))?;
                let l2 = DissipativeMatrix::new(ComplexMatrix::from_diagonal(&w))?;
                let doi = HaagerupDecomposition::new(g, cfg.quad_nodes)?.apply(&l1, &l2, &q)?;
                let oracle = diagonal_schur_doi(g, &z, &w, &q)?;
                Ok(Check::Residual {
                    value: relative(&oracle, &doi),
                    tolerance: SCHUR_ORACLE_TOL,
                })
            })?;
            self.record(&f.name, "self_adjoint_oracle", || {
                let k = &a1 - &a2;
                let l1 = DissipativeMatrix::new(a1.clone())?;
                let l2 = DissipativeMatrix::new(a2.clone())?;
                let doi = HaagerupDecomposition::new(g, cfg.quad_nodes)?.apply(&l1, &l2, &k)?;
                let oracle = self_adjoint_doi(g, &a1, &a2, &k)?;
                Ok(Check::Residual {
                    value: relative(&oracle, &doi),
                    tolerance: SELF_ADJOINT_ORACLE_TOL,
                })
            })?;
        }

        let margin = |lhs: f64, rhs: f64| Check::Margin { lhs, rhs, tolerance: tol };
        self.record(NO_FUNCTION, "cayley_roundtrip", || {
            let back = inverse_cayley(&l.cayley()?)?;
            Ok(Check::Residual {
                value: relative(l.matrix(), back.matrix()),
                tolerance: tol,
            })
        })?;
        self.record(NO_FUNCTION, "cayley_norm", || Ok(margin(op_norm(&l.cayley()?), 1.0)))?;
        for s in SEMIGROUP_TIMES {
            self.record(NO_FUNCTION, &format!("semigroup_s{s}"), || {
                Ok(margin(op_norm(&expm(&l.matrix().scale(I * s))?), 1.0))
            })?;
        }
        for (k, &lambda) in lambdas.iter().enumerate() {
            self.record(NO_FUNCTION, &format!("resolvent_{k}"), || {
                Ok(margin(op_norm(&l.resolvent(lambda)?), 1.0 / lambda.im.abs()))
            })?;
        }
        if dim <= RK4_MAX_DIM {
            self.record(NO_FUNCTION, "expm_rk4", || {
                let a = l.matrix().scale(I);
                let err = fro_norm(&(&expm(&a)? - &expm_rk4(&a, RK4_STEPS)));
                Ok(Check::Residual {
                    value: err,
                    tolerance: RK4_ORACLE_TOL,
                })
            })?;
        }
        Ok(())
    }
}

/// Runs every configured suite. Trials run in parallel; records come back in
/// (suite, dim, trial, function) order regardless of scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<VerificationReport, RunError> {
    cfg.validate()?;
    let jobs: Vec<(Suite, usize, usize)> = cfg
        .suites
        .iter()
        .flat_map(|&s| cfg.dims.iter().flat_map(move |&d| (0..cfg.trials).map(move |t| (s, d, t))))
        .collect();
    let outcomes: Vec<Result<(Suite, bool, Vec<Record>), RunError>> = jobs
        .par_iter()
        .map(|&(suite, dim, trial)| {
            let mut t = Trial {
                cfg,
                suite,
                dim,
                trial,
                seed: trial_seed(cfg.seed, suite, dim, trial),
                records: Vec::new(),
            };
            let ran = t.run()?;
            Ok((suite, ran, t.records))
        })
        .collect();
    let mut records = Vec::new();
    let mut skipped: BTreeMap<Suite, usize> = BTreeMap::new();
    for outcome in outcomes {
        let (suite, ran, recs) = outcome?;
        if !ran {
            *skipped.entry(suite).or_default() += 1;
        }
        records.extend(recs);
    }
    Ok(VerificationReport::assemble(&cfg.suites, records, &skipped))
}

/// Kernel oracle suite over a small sweep.
pub fn selftest_config(seed: u64) -> ExperimentConfig {
    ExperimentConfig {
        dims: vec![1, 2, 4, 6, 8],
        trials: 10,
        seed,
        suites: vec![Suite::Oracles],
        ..ExperimentConfig::default()
    }
}
