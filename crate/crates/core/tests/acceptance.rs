//! Acceptance suite. Runs without the libtest harness so every criterion
//! prints exactly one PASS/FAIL line; the process fails if any line fails.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::*;
use kronsum::commutant;
use kronsum::exact::ExactMatrix;
use kronsum::factor::{self, Tolerance};
use kronsum::matfunc::{self, ScalarFunction};
use kronsum::matrix;
use kronsum::spectral::{self, JordanSpec};
use kronsum::{CMatrix, Complex};
use rand::Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(failures: &[String], summary: String) -> Outcome {
    match failures.first() {
        None => Outcome { passed: true, detail: summary },
        Some(first) => {
            Outcome { passed: false, detail: format!("{summary}; {} failure(s), first: {first}", failures.len()) }
        }
    }
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn criterion_1() -> Outcome {
    let mut rng = rng(1);
    let mut failures = Vec::new();
    for case in 0..200 {
        let n = 2 + case % 5;
        let a = int_matrix(&mut rng, n, 9);
        let x = int_matrix(&mut rng, n, 9);
        let op = ExactMatrix::from_cmatrix(&matrix::commutator_operator(&a).unwrap()).unwrap();
        let vx = ExactMatrix::from_cmatrix(&x).unwrap().vec_row();
        let lhs = op.mul_vec(&vx).unwrap();
        let rhs = ExactMatrix::from_cmatrix(&matrix::commutator(&a, &x).unwrap()).unwrap().vec_row();
        if lhs != rhs {
            failures.push(format!("case {case} (n={n})"));
        }
    }
    outcome(&failures, "200 integer pairs, n in 2..=6, exact equality".into())
}

fn criterion_2() -> Outcome {
    let mut rng = rng(2);
    let mut failures = Vec::new();
    for case in 0..100 {
        let n = 2 + case % 5;
        let a = if case % 2 == 0 { real_matrix(&mut rng, n) } else { complex_matrix(&mut rng, n) };
        let rank = factor::rank_of(&matrix::commutator_operator(&a).unwrap(), &tol());
        let basis = commutant::commutant_basis(&a, &tol()).unwrap();
        if rank >= n * n || basis.dim < 1 {
            failures.push(format!("matrix {case}: rank {rank}, dim {}", basis.dim));
        }
    }
    for case in 0..50 {
        let n = 2 + case % 3;
        let p = 1 + case % 4;
        let set: Vec<CMatrix> = (0..p)
            .map(|k| if (case + k) % 2 == 0 { real_matrix(&mut rng, n) } else { complex_matrix(&mut rng, n) })
            .collect();
        let stack = commutant::stacked_operator(&set, None).unwrap();
        let rank = factor::rank_of(&stack, &tol());
        let mutual = commutant::mutual_commutant_basis(&set, &tol()).unwrap();
        let lambda = Complex::new(rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0));
        let residual = mutual.projection_residual(&CMatrix::identity(n).scale(lambda)).unwrap();
        if rank >= n * n || mutual.dim < 1 || residual > 1e-8 {
            failures.push(format!("set {case}: rank {rank}, dim {}, λI residual {residual:e}", mutual.dim));
        }
    }
    outcome(&failures, "100 matrices and 50 sets have rank < n² and contain λI".into())
}

fn criterion_3() -> Outcome {
    let mut rng = rng(3);
    let specs = jordan_structures(6, &[0.0, 3.0, -2.0]);
    let mut failures = Vec::new();
    let mut j2_line = String::new();
    for (k, spec) in specs.iter().enumerate() {
        let n = spec.order();
        let p = unimodular(&mut rng, n, 2 * n);
        let spec = spec.clone().with_transform(p);
        let a = spectral::build_from_jordan(&spec, &tol()).unwrap();
        let nullity = factor::kernel_basis(&matrix::commutator_operator(&a).unwrap(), &tol()).nullity();
        let stated = spectral::centralizer_dim_oracle(&spec.summary());
        let measured_summary = spectral::spectral_summary(&a, &tol());
        let recovered = measured_summary.as_ref().ok().map(spectral::centralizer_dim_oracle);
        if nullity != stated || recovered != Some(stated) {
            failures.push(format!(
                "structure {k} {:?}: nullity {nullity}, oracle {stated}, oracle on computed summary {recovered:?}",
                spec.blocks
            ));
        }
        if spec.blocks.len() == 1 && spec.blocks[0].1 == vec![2] && spec.blocks[0].0 == c(0.0) {
            j2_line = format!(
                "J2(0): nullity {nullity}, oracle {stated}, sum of squared geometric multiplicities {}",
                spec.summary().sum_geo_sq()
            );
        }
    }
    outcome(&failures, format!("{} Jordan structures (order <= 6, <= 3 eigenvalues); {j2_line}", specs.len()))
}

fn criterion_4() -> Outcome {
    let mut rng = rng(4);
    let mut failures = Vec::new();
    for case in 0..100 {
        let n = 1 + case % 5;
        let a = if case % 3 == 2 { complex_matrix(&mut rng, n) } else { real_matrix(&mut rng, n) };
        let op = matrix::commutator_operator(&a).unwrap();
        let measured = spectral::eigenvalues(&op, &tol()).unwrap();
        let summary = spectral::spectral_summary(&a, &tol()).unwrap();
        let predicted = spectral::kron_sum_spectrum(&summary);
        let radius = 1e-6 * a.frobenius_norm().max(1.0);
        let matched = spectral::match_multisets(&measured, &predicted.expanded(), radius);
        let nu_bar = factor::kernel_basis(&op, &tol()).nullity();
        let chain = n * n >= predicted.zero_alg_mult
            && predicted.zero_alg_mult >= summary.sum_alg_sq()
            && nu_bar >= summary.sum_geo_sq().max(n);
        if matched.is_none() || !chain {
            failures.push(format!("case {case} (n={n}): matched {matched:?}, chain {chain}"));
        }
    }
    outcome(&failures, "100 random matrices, n <= 5, spectra match at 1e-6·‖A‖".into())
}

fn criterion_5() -> Outcome {
    let mut rng = rng(5);
    let mut failures = Vec::new();
    for case in 0..100 {
        let n = 2 + case % 4;
        let a = if case % 4 == 3 { complex_matrix(&mut rng, n) } else { real_matrix(&mut rng, n) };
        let r = real_matrix(&mut rng, n);
        let m = matrix::commutator(&a, &r).unwrap();
        let w = commutant::noncommuting_witness(&a, &m, &tol(), Some(case as u64)).unwrap();
        match (w.consistent(), w.residual) {
            (true, Some(res)) if res <= 1e-8 * w.scale => {}
            other => failures.push(format!("consistent target {case}: {other:?}")),
        }

        // component orthogonal to the image: a member of the commutant of A*
        let adj = commutant::commutant_basis(&a.adjoint(), &tol()).unwrap();
        let pick = &adj.members[case % adj.dim];
        let y = pick.scale_real(m.frobenius_norm().max(1.0) / pick.frobenius_norm());
        let bad = m.try_add(&y).unwrap();
        let w = commutant::noncommuting_witness(&a, &bad, &tol(), None).unwrap();
        if w.consistent() {
            failures.push(format!("injected target {case} judged consistent"));
        }

        let op = matrix::commutator_operator(&a).unwrap();
        let part = factor::block_partition(&op, &tol()).unwrap();
        let schur = part.schur_complement().unwrap().frobenius_norm();
        if schur > 1e-8 * op.frobenius_norm() {
            failures.push(format!("Schur complement {schur:e} on case {case}"));
        }
    }
    outcome(&failures, "100 consistent and 100 injected targets; Schur complements vanish".into())
}

fn criterion_6() -> Outcome {
    let mut rng = rng(6);
    let mut failures = Vec::new();
    for case in 0..100 {
        let n = 2 + case % 3;
        let p = 2 + case % 3;
        let base = real_matrix(&mut rng, n);
        let mut set: Vec<CMatrix> = (0..p).map(|_| random_polynomial_in(&mut rng, &base, 3)).collect();
        let perturbed = case % 2 == 1;
        if perturbed {
            let k = rng.gen_range(0..p);
            set[k] = set[k].try_add(&real_matrix(&mut rng, n).scale_real(0.1)).unwrap();
        }
        let report = commutant::pairwise_commuting(&set, &tol()).unwrap();
        let triangular = report.triangular_verdicts.iter().all(|&v| v);
        if !report.tests_agree || triangular != report.pairwise_commuting || report.pairwise_commuting == perturbed {
            failures.push(format!(
                "set {case}: direct {}, triangular {triangular}, perturbed {perturbed}",
                report.pairwise_commuting
            ));
        }
    }

    let mut worst: f64 = 0.0;
    for case in 0..30 {
        let n = 2 + case % 3;
        let specs: Vec<JordanSpec> = match case % 3 {
            0 => {
                let structures = jordan_structures(n, &[1.0, -1.0, 2.0]);
                let pick = structures.iter().filter(|s| s.order() == n).nth(case % 2).unwrap().clone();
                vec![pick.with_transform(unimodular(&mut rng, n, 2 * n))]
            }
            1 => {
                // two diagonalizable matrices sharing one eigenbasis
                let p = unimodular(&mut rng, n, 2 * n);
                (0..2)
                    .map(|_| {
                        let blocks = (0..n).map(|_| (c(rng.gen_range(-3..=3) as f64), vec![1])).collect();
                        merge_equal(JordanSpec::new(blocks)).with_transform(p.clone())
                    })
                    .collect()
            }
            _ => (0..2)
                .map(|k| {
                    let blocks = vec![(c(k as f64), vec![n])];
                    JordanSpec::new(blocks).with_transform(unimodular(&mut rng, n, 2 * n))
                })
                .collect(),
        };
        let route = commutant::jordan_route_kernel(&specs, &tol()).unwrap();
        let mats: Vec<CMatrix> = specs.iter().map(|s| spectral::build_from_jordan(s, &tol()).unwrap()).collect();
        let direct = commutant::mutual_commutant_basis(&mats, &tol()).unwrap();
        let angle = factor::max_principal_angle(&route.kernel, &direct.kernel);
        worst = worst.max(angle);
        if route.dim != direct.dim || angle > 1e-6 {
            failures.push(format!("Jordan route {case}: dims {} vs {}, angle {angle:e}", route.dim, direct.dim));
        }
    }
    outcome(&failures, format!("100 sets agree; 30 Jordan-route instances, worst angle {worst:.3e}"))
}

/// Groups equal eigenvalues of a diagonal structure under one entry.
fn merge_equal(spec: JordanSpec) -> JordanSpec {
    let mut blocks: Vec<(Complex, Vec<usize>)> = Vec::new();
    for (v, sizes) in spec.blocks {
        match blocks.iter_mut().find(|b| b.0 == v) {
            Some(b) => b.1.extend(sizes),
            None => blocks.push((v, sizes)),
        }
    }
    JordanSpec::new(blocks)
}

fn criterion_7() -> Outcome {
    let mut rng = rng(7);
    let mut failures = Vec::new();
    let mut worst: f64 = 0.0;
    for case in 0..50 {
        let n = 2 + case % 3;
        let single = vec![if case % 5 == 0 {
            // repeated eigenvalues: a complex matrix with a nontrivial commutant
            let d = CMatrix::diag(&vec![Complex::new(1.0, 2.0); n]);
            d.try_add(&CMatrix::unit(n, 0, n - 1).scale(Complex::i())).unwrap()
        } else {
            complex_matrix(&mut rng, n)
        }];
        let p = 1 + case % 3;
        let base = complex_matrix(&mut rng, n);
        let set: Vec<CMatrix> = (0..p)
            .map(|k| {
                if case % 2 == 0 {
                    matfunc::polynomial_at(&[c(k as f64), Complex::new(0.5, -1.0), Complex::i()], &base).unwrap()
                } else {
                    complex_matrix(&mut rng, n)
                }
            })
            .collect();
        for (label, s) in [("matrix", &single), ("set", &set)] {
            let eq = commutant::split_equivalence(s, &tol()).unwrap();
            worst = worst.max(eq.forward_residual).max(eq.backward_residual);
            if !eq.holds(&tol()) {
                failures.push(format!("{label} {case}: complex dim {}, split dim {}", eq.complex_dim, eq.split_dim));
            }
        }
    }
    outcome(&failures, format!("50 complex matrices and 50 sets; worst correspondence residual {worst:.3e}"))
}

fn criterion_8() -> Outcome {
    let mut rng = rng(8);
    let mut failures = Vec::new();
    for case in 0..50 {
        let n = 2 + case % 4;
        let a = real_matrix(&mut rng, n);
        let b = random_polynomial_in(&mut rng, &a, 3);
        let spec_b = spectral::eigenvalues(&b, &tol()).unwrap();
        let shift = Complex::new(spec_b.iter().map(|z| z.norm()).fold(0.0, f64::max) + 1.0, 0.5);
        for f in [ScalarFunction::exp(), ScalarFunction::power(3), ScalarFunction::shifted_inverse(shift)] {
            let checked = matfunc::function_commutes_check(&a, &b, &f, None, &tol())
                .and_then(|r| Ok((r, matfunc::matrix_function(&b, &f, &tol())?.value)));
            match checked {
                Ok((r, fb)) => {
                    let residual = matrix::commutator(&a, &fb).unwrap().frobenius_norm();
                    if !r.passed || residual > 1e-8 * a.frobenius_norm() * fb.frobenius_norm() {
                        failures.push(format!("pair {case}, f={}: residual {residual:e}", f.name()));
                    }
                }
                Err(e) => failures.push(format!("pair {case}, f={}: {e}", f.name())),
            }
        }
    }

    let j2 = CMatrix::jordan_block(c(0.0), 2);
    let e = matfunc::matrix_function(&j2, &ScalarFunction::exp(), &tol()).unwrap().value;
    let want = CMatrix::from_real_rows(&[[1.0, 1.0], [0.0, 1.0]]).unwrap();
    let exp_err = e.try_sub(&want).unwrap().max_abs();
    if exp_err > 1e-12 {
        failures.push(format!("exp(J2(0)) off by {exp_err:e}"));
    }
    let inc = matfunc::kernel_inclusion_check(&j2, &[ScalarFunction::power(2)], &tol()).unwrap();
    if !(inc.included && inc.strict) {
        failures.push(format!("inclusion at J2(0): included {}, strict {}", inc.included, inc.strict));
    }
    outcome(&failures, format!("50 pairs x 3 functions; exp(J2(0)) error {exp_err:e}; strict inclusion at J2(0)"))
}

fn criterion_9() -> Outcome {
    let mut rng = rng(9);
    let mut failures = Vec::new();
    for case in 0..100 {
        let n = 2 + case % 4;
        let a = int_matrix(&mut rng, n, 5);
        let b = if case % 2 == 0 {
            matfunc::polynomial_at(&[c(rng.gen_range(-3..=3) as f64), c(1.0), c(rng.gen_range(-2..=2) as f64)], &a)
                .unwrap()
        } else {
            int_matrix(&mut rng, n, 5)
        };
        let t = unimodular(&mut rng, n, 2 * n);
        let r = matfunc::similarity_commutator(&a, &b, &t, &tol()).unwrap();
        let implication = !r.pair_commutes || r.transformed_commutes;
        if !(r.exact && r.identity_holds && r.residual == 0.0 && implication) {
            failures.push(format!("triple {case}: exact {}, holds {}", r.exact, r.identity_holds));
        }
    }
    outcome(&failures, "100 integer triples with unimodular T, exact".into())
}

type Criterion = (&'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("vectorized commutator identity", criterion_1),
        ("non-empty commutants and mutual commutants", criterion_2),
        ("kernel dimension equals the Frobenius oracle", criterion_3),
        ("spectrum of the commutator operator", criterion_4),
        ("non-commuting witnesses", criterion_5),
        ("triangular set test and Jordan route", criterion_6),
        ("complex split equivalence", criterion_7),
        ("matrix-function commutation", criterion_8),
        ("similarity transfer of commutators", criterion_9),
    ];
    let mut all = true;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let o = run();
        all &= o.passed;
        println!(
            "{} criterion {}: {name} ({}) [{:.2}s]",
            if o.passed { "PASS" } else { "FAIL" },
            k + 1,
            o.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
