//! Acceptance criteria, one `[PASS]`/`[FAIL]` line each. Exits non-zero if any fails.

use std::time::Instant;

use dissip_core::dissipative::inverse_cayley;
use dissip_core::doi::{
    lipschitz_margin, quasicommutator_residual, s2_margin, theorem41_residual, theorem42_residual, theorem51_residual,
    HaagerupDecomposition,
};
use dissip_core::linalg::{expm, fro_norm, op_norm, ComplexMatrix};
use dissip_core::oracle::{diagonal_schur_doi, expm_rk4, self_adjoint_doi};
use dissip_core::{AnalyticFunction, Complex64, DissipativeMatrix, PerturbationPair};
use dissip_harness::runner::{arbitrary_perturbation, independent_pair, perturbation_pair, unit_norm_matrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DIMS: [usize; 5] = [1, 2, 4, 8, 16];
const TRIALS: usize = 100;
const NODES: usize = 32;
const PERTURBATION: f64 = 0.5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn e(t: f64) -> AnalyticFunction {
    AnalyticFunction::exponential(c(1.0, 0.0), t).unwrap()
}

/// The five sweep functions with their labels.
fn sweep_functions() -> Vec<(&'static str, AnalyticFunction)> {
    vec![
        ("r_-i", AnalyticFunction::resolvent(c(1.0, 0.0), c(0.0, -1.0)).unwrap()),
        ("2r_1-2i", AnalyticFunction::resolvent(c(2.0, 0.0), c(1.0, -2.0)).unwrap()),
        ("e_1", e(1.0)),
        ("e_0.5+3r_-2i", e(0.5) + AnalyticFunction::resolvent(c(3.0, 0.0), c(0.0, -2.0)).unwrap()),
        ("z", AnalyticFunction::linear(c(1.0, 0.0))),
    ]
}

fn rng(criterion: u64, dim: usize, trial: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64((criterion << 40) ^ ((dim as u64) << 20) ^ trial as u64)
}

fn pair(criterion: u64, dim: usize, trial: usize) -> (PerturbationPair, ChaCha8Rng) {
    let mut r = rng(criterion, dim, trial);
    let p = perturbation_pair(dim, PERTURBATION, trial, &mut r).expect("perturbed matrix stays dissipative");
    (p, r)
}

/// Tracks the worst value seen and where.
#[derive(Default)]
struct Worst {
    value: f64,
    at: String,
    failures: usize,
}

impl Worst {
    fn residual(&mut self, v: f64, tol: f64, at: impl FnOnce() -> String) {
        if !(v <= tol) {
            self.failures += 1;
        }
        if !(v <= self.value) {
            self.value = v;
            self.at = at();
        }
    }

    /// Records `lhs / rhs − 1`, which must stay ≤ `tol`.
    fn ratio(&mut self, lhs: f64, rhs: f64, tol: f64, at: impl FnOnce() -> String) {
        let excess = if rhs > 0.0 { lhs / rhs - 1.0 } else if lhs == 0.0 { -1.0 } else { f64::INFINITY };
        if !(lhs <= rhs * (1.0 + tol)) {
            self.failures += 1;
        }
        if self.at.is_empty() || !(excess <= self.value) {
            self.value = excess;
            self.at = at();
        }
    }
}

/// Difference representation, plus the residuals reused by the quasicommutator check.
fn difference_representation(residuals: &mut Vec<f64>) -> Outcome {
    let start = Instant::now();
    let fns = sweep_functions();
    let (mut all, mut rational) = (Worst::default(), Worst::default());
    for dim in DIMS {
        for t in 0..TRIALS {
            let (p, _) = pair(1, dim, t);
            for (name, f) in &fns {
                let r = theorem42_residual(f, &p, NODES).unwrap();
                residuals.push(r);
                let at = || format!("{name} dim {dim} trial {t}");
                all.residual(r, 1e-8, at);
                if f.is_rational() {
                    rational.residual(r, 1e-10, at);
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    Outcome {
        pass: all.failures == 0 && rational.failures == 0 && secs < 30.0,
        detail: format!(
            "max residual {:.2e} ({}), rational max {:.2e}, {} cases in {secs:.1}s (limit 30s)",
            all.value,
            all.at,
            rational.value,
            residuals.len()
        ),
    }
}

fn quasicommutator_representation(reference: &[f64]) -> Outcome {
    let fns = sweep_functions();
    let mut worst = Worst::default();
    let mut identity_gap: f64 = 0.0;
    let mut k = 0;
    for dim in DIMS {
        let id = ComplexMatrix::identity(dim);
        for t in 0..TRIALS {
            let (p, mut r) = pair(1, dim, t);
            let rr = unit_norm_matrix(dim, &mut r);
            for (name, f) in &fns {
                let v = quasicommutator_residual(f, &p.l1, &p.l2, &rr, NODES).unwrap();
                worst.residual(v, 1e-8, || format!("{name} dim {dim} trial {t}"));
                let with_id = quasicommutator_residual(f, &p.l1, &p.l2, &id, NODES).unwrap();
                identity_gap = identity_gap.max((with_id - reference[k]).abs());
                k += 1;
            }
        }
    }
    Outcome {
        pass: worst.failures == 0 && identity_gap <= 1e-12,
        detail: format!(
            "max residual {:.2e} ({}), R = I vs difference residuals {:.1e} (limit 1e-12)",
            worst.value, worst.at, identity_gap
        ),
    }
}

fn sandwich_identities() -> Outcome {
    let fns = sweep_functions();
    let (mut w41, mut w51) = (Worst::default(), Worst::default());
    for dim in DIMS {
        for t in 0..TRIALS {
            let mut r = rng(3, dim, t);
            let (l1, l2) = independent_pair(dim, &mut r);
            let rr = unit_norm_matrix(dim, &mut r);
            for (name, f) in &fns {
                let at = || format!("{name} dim {dim} trial {t}");
                w41.residual(theorem41_residual(f, &l1, &l2, NODES).unwrap(), 1e-8, at);
                w51.residual(theorem51_residual(f, &l1, &l2, &rr, NODES).unwrap(), 1e-8, at);
            }
        }
    }
    Outcome {
        pass: w41.failures == 0 && w51.failures == 0,
        detail: format!(
            "resolvent sandwich max {:.2e} ({}), with R max {:.2e} ({})",
            w41.value, w41.at, w51.value, w51.at
        ),
    }
}

fn lipschitz_estimate() -> Outcome {
    let mut fns = sweep_functions();
    fns.push(("e_0.5", e(0.5)));
    fns.push(("e_2", e(2.0)));
    let mut worst = Worst::default();
    let mut exp_bound_ok = true;
    for t in [0.5, 1.0, 2.0] {
        exp_bound_ok &= e(t).ol_bound() == t;
    }
    for dim in DIMS {
        for t in 0..TRIALS {
            let (p, _) = pair(4, dim, t);
            for (name, f) in &fns {
                let m = lipschitz_margin(f, &p).unwrap();
                worst.ratio(m.lhs, m.rhs, 1e-8, || format!("{name} dim {dim} trial {t}"));
            }
        }
    }
    Outcome {
        pass: worst.failures == 0 && exp_bound_ok,
        detail: format!(
            "largest lhs/rhs − 1 = {:.3e} ({}), bound for e_t equals t: {exp_bound_ok}",
            worst.value, worst.at
        ),
    }
}

fn is_normal(k: &ComplexMatrix) -> bool {
    let comm = &(&k.adjoint() * k) - &(k * &k.adjoint());
    fro_norm(&comm) <= 1e-12 * fro_norm(k).powi(2)
}

fn hilbert_schmidt_estimate() -> Outcome {
    let mut fns = sweep_functions();
    fns.push(("e_2", e(2.0)));
    let mut worst = Worst::default();
    let (mut non_normal, mut max_kf) = (0usize, 0.0f64);
    for dim in DIMS {
        for t in 0..TRIALS {
            let mut r = rng(5, dim, t);
            // odd trials: arbitrary K with ‖K‖_F up to 1
            let p = if t % 2 == 0 {
                perturbation_pair(dim, PERTURBATION, 0, &mut r)
            } else {
                arbitrary_perturbation(dim, 1.0, &mut r)
            }
            .expect("perturbed matrix stays dissipative");
            if t % 2 == 1 {
                max_kf = max_kf.max(fro_norm(&p.k));
                non_normal += usize::from(!is_normal(&p.k));
            }
            for (name, f) in &fns {
                let m = s2_margin(f, &p).unwrap();
                worst.ratio(m.lhs, m.rhs, 1e-8, || format!("{name} dim {dim} trial {t}"));
            }
        }
    }
    Outcome {
        pass: worst.failures == 0 && non_normal > 0,
        detail: format!(
            "largest lhs/rhs − 1 = {:.3e} ({}), {non_normal} non-normal K, max ‖K‖_F {max_kf:.3}",
            worst.value, worst.at
        ),
    }
}

fn relative(exact: &ComplexMatrix, approx: &ComplexMatrix) -> f64 {
    op_norm(&(exact - approx)) / (1.0 + op_norm(exact))
}

fn oracle_equivalences() -> Outcome {
    let fns = sweep_functions();
    let (mut schur, mut sa, mut rk4) = (Worst::default(), Worst::default(), Worst::default());
    for dim in DIMS {
        for t in 0..20 {
            let mut r = rng(6, dim, t);
            let z: Vec<Complex64> = (0..dim).map(|_| c(r.random_range(-3.0..3.0), r.random_range(0.0..3.0))).collect();
            let w: Vec<Complex64> = (0..dim).map(|_| c(r.random_range(-3.0..3.0), r.random_range(0.0..3.0))).collect();
            let q = ComplexMatrix::random_gaussian(dim, &mut r);
            let d1 = DissipativeMatrix::new(ComplexMatrix::from_diagonal(&z)).unwrap();
            let d2 = DissipativeMatrix::new(ComplexMatrix::from_diagonal(&w)).unwrap();
            let a1 = DissipativeMatrix::random_with_rng(dim, &mut r, 1.0).real_part().clone();
            let a2 = DissipativeMatrix::random_with_rng(dim, &mut r, 1.0).real_part().clone();
            let (s1, s2) = (DissipativeMatrix::new(a1.clone()).unwrap(), DissipativeMatrix::new(a2.clone()).unwrap());
            let k = &a1 - &a2;
            for (name, f) in &fns {
                let at = || format!("{name} dim {dim} trial {t}");
                let h = HaagerupDecomposition::new(f, NODES).unwrap();
                let oracle = diagonal_schur_doi(f, &z, &w, &q).unwrap();
                schur.residual(relative(&oracle, &h.apply(&d1, &d2, &q).unwrap()), 1e-10, at);
                for src in [&k, &q] {
                    let oracle = self_adjoint_doi(f, &a1, &a2, src).unwrap();
                    sa.residual(relative(&oracle, &h.apply(&s1, &s2, src).unwrap()), 1e-9, at);
                }
            }
        }
    }
    for dim in 1..=6 {
        for t in 0..5 {
            let l = DissipativeMatrix::random_with_rng(dim, &mut rng(60, dim, t), 1.0);
            for s in [0.5, 1.0, 2.0] {
                let a = l.matrix().scale(c(0.0, s));
                let err = fro_norm(&(&expm(&a).unwrap() - &expm_rk4(&a, 10_000)));
                rk4.residual(err, 1e-8, || format!("dim {dim} trial {t} s {s}"));
            }
        }
    }
    Outcome {
        pass: schur.failures == 0 && sa.failures == 0 && rk4.failures == 0,
        detail: format!(
            "Schur product {:.2e} ({}), self-adjoint {:.2e} ({}), RK4 {:.2e} ({})",
            schur.value, schur.at, sa.value, sa.at, rk4.value, rk4.at
        ),
    }
}

fn structural_invariants() -> Outcome {
    let (mut round, mut cayley, mut semi, mut res) =
        (Worst::default(), Worst::default(), Worst::default(), Worst::default());
    for dim in DIMS {
        for seed in 0..100 {
            let mut r = rng(7, dim, seed);
            let l = DissipativeMatrix::random_with_rng(dim, &mut r, 1.0);
            let at = || format!("dim {dim} seed {seed}");
            let t = l.cayley().unwrap();
            let back = inverse_cayley(&t).unwrap();
            round.residual(op_norm(&(back.matrix() - l.matrix())), 1e-9, at);
            cayley.ratio(op_norm(&t), 1.0, 1e-9, at);
            for s in [0.1, 0.5, 1.0, 2.0] {
                let u = expm(&l.matrix().scale(c(0.0, s))).unwrap();
                semi.ratio(op_norm(&u), 1.0, 1e-9, || format!("dim {dim} seed {seed} s {s}"));
            }
            for _ in 0..3 {
                let lambda = c(r.random_range(-3.0..3.0), -r.random_range(0.01..3.0));
                let norm = op_norm(&l.resolvent(lambda).unwrap());
                res.ratio(norm, 1.0 / lambda.im.abs(), 1e-9, || format!("dim {dim} seed {seed} λ {lambda}"));
            }
        }
    }
    Outcome {
        pass: [&round, &cayley, &semi, &res].iter().all(|w| w.failures == 0),
        detail: format!(
            "round trip {:.2e}, ‖T‖−1 {:.2e}, ‖e^(isL)‖−1 {:.2e}, resolvent ratio−1 {:.2e}",
            round.value, cayley.value, semi.value, res.value
        ),
    }
}

/// Below this the residual is rounding noise.
const PLATEAU: f64 = 1e-13;

fn quadrature_convergence() -> Outcome {
    let fns: Vec<(&str, AnalyticFunction)> = vec![
        ("e_1", e(1.0)),
        ("e_2", e(2.0)),
        ("e_0.5+3r_-2i", e(0.5) + AnalyticFunction::resolvent(c(3.0, 0.0), c(0.0, -2.0)).unwrap()),
    ];
    let (mut bad_order, mut worst_gap, mut worst_32) = (0usize, 0.0f64, 0.0f64);
    let mut example = String::new();
    for dim in [2, 4, 8, 16] {
        for t in 0..10 {
            let (p, _) = pair(8, dim, t);
            for (name, f) in &fns {
                let r: Vec<f64> = [8, 16, 32, 64].iter().map(|&n| theorem42_residual(f, &p, n).unwrap()).collect();
                if !(r[1] <= r[0].max(PLATEAU) && r[2] <= r[1].max(PLATEAU)) {
                    bad_order += 1;
                }
                worst_gap = worst_gap.max((r[2] - r[3]).abs());
                worst_32 = worst_32.max(r[2]);
                if dim == 16 && t == 0 && *name == "e_2" {
                    example = format!("e_2 dim 16: {:.1e} → {:.1e} → {:.1e} → {:.1e}", r[0], r[1], r[2], r[3]);
                }
            }
        }
    }
    Outcome {
        pass: bad_order == 0 && worst_32 <= PLATEAU && worst_gap <= 1e-12,
        detail: format!(
            "{bad_order} non-decreasing sequences, max residual at 32 nodes {worst_32:.1e}, max |r32 − r64| {worst_gap:.1e}; {example}"
        ),
    }
}

fn main() {
    let mut failed = 0;
    let mut report = |label: &str, o: Outcome| {
        println!("[{}] {label}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    };
    let mut residuals = Vec::new();
    report("1 difference representation", difference_representation(&mut residuals));
    report("2 quasicommutator representation", quasicommutator_representation(&residuals));
    report("3 resolvent sandwich identities", sandwich_identities());
    report("4 operator Lipschitz estimate", lipschitz_estimate());
    report("5 Hilbert-Schmidt estimate", hilbert_schmidt_estimate());
    report("6 oracle equivalences", oracle_equivalences());
    report("7 structural invariants", structural_invariants());
    report("8 quadrature convergence", quadrature_convergence());
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
