mod common;

use common::*;
use kronsum::commutant;
use kronsum::factor;
use kronsum::matfunc::{self, ScalarFunction};
use kronsum::matrix::{self, kron, kron_sum, unvec_row, vec_row};
use kronsum::spectral::{self, partitions, JordanSpec};
use kronsum::{CMatrix, Complex, Tolerance};
use proptest::prelude::*;
use rand::Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn int_entries(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec(-6i64..=6, n * n).prop_map(move |v| CMatrix::from_fn(n, n, |i, j| c(v[i * n + j] as f64)))
}

fn int_pair() -> impl Strategy<Value = (CMatrix, CMatrix)> {
    (1usize..=5).prop_flat_map(|n| (int_entries(n), int_entries(n)))
}

fn gaussian_entries(n: usize) -> impl Strategy<Value = CMatrix> {
    prop::collection::vec((-4i64..=4, -4i64..=4), n * n)
        .prop_map(move |v| CMatrix::from_fn(n, n, |i, j| Complex::new(v[i * n + j].0 as f64, v[i * n + j].1 as f64)))
}

/// Seed and order; the matrices are drawn from the shared generators.
fn seeded(orders: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (u64, usize)> {
    (any::<u64>(), orders)
}

fn random_jordan_spec(rng: &mut rand_chacha::ChaCha8Rng, max_order: usize) -> JordanSpec {
    let values = [0.0, 2.0, -1.0];
    let k = rng.gen_range(1..=3);
    let blocks = (0..k)
        .map(|e| {
            let m = rng.gen_range(1..=(max_order / k).max(1));
            let parts = partitions(m);
            (c(values[e]), parts[rng.gen_range(0..parts.len())].clone())
        })
        .collect();
    JordanSpec::new(blocks)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn vec_round_trip(x in (1usize..=6).prop_flat_map(gaussian_entries)) {
        let n = x.rows();
        prop_assert_eq!(unvec_row(&vec_row(&x).unwrap(), n).unwrap(), x);
    }

    #[test]
    fn vectorized_commutator_is_exact((a, x) in int_pair()) {
        let op = matrix::commutator_operator(&a).unwrap();
        let lhs = vec_row(&matrix::commutator(&a, &x).unwrap()).unwrap();
        let rhs = op.mul_vec(vec_row(&x).unwrap().values()).unwrap();
        prop_assert_eq!(lhs.values(), &rhs[..]);
    }

    #[test]
    fn kron_mixed_product(((a, b), (p, q)) in (int_pair(), int_pair())) {
        prop_assume!(a.rows() == p.rows() && b.rows() == q.rows());
        let lhs = kron(&a, &b).matmul(&kron(&p, &q)).unwrap();
        let rhs = kron(&a.matmul(&p).unwrap(), &b.matmul(&q).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn commutator_is_antisymmetric((a, b) in int_pair()) {
        let ab = matrix::commutator(&a, &b).unwrap();
        let ba = matrix::commutator(&b, &a).unwrap();
        prop_assert_eq!(ab, -&ba);
    }

    #[test]
    fn kron_sum_spectrum_is_pairwise_sums((seed, n) in seeded(1..=4)) {
        let mut g = rng(seed);
        let a = real_matrix(&mut g, n);
        let b = complex_matrix(&mut g, n);
        let ea = spectral::eigenvalues(&a, &tol()).unwrap();
        let eb = spectral::eigenvalues(&b, &tol()).unwrap();
        let sums: Vec<Complex> = ea.iter().flat_map(|x| eb.iter().map(move |y| x + y)).collect();
        let measured = spectral::eigenvalues(&kron_sum(&a, &b).unwrap(), &tol()).unwrap();
        prop_assert!(spectral::match_multisets(&measured, &sums, 1e-6).is_some());
    }

    #[test]
    fn commutant_contains_identity_and_a((seed, n) in seeded(1..=5), complex in any::<bool>()) {
        let mut g = rng(seed);
        let a = if complex { complex_matrix(&mut g, n) } else { real_matrix(&mut g, n) };
        let basis = commutant::commutant_basis(&a, &tol()).unwrap();
        prop_assert!(basis.dim >= n);
        prop_assert!(basis.contains(&CMatrix::identity(n), &tol()).unwrap());
        prop_assert!(basis.contains(&a, &tol()).unwrap());
        for x in &basis.members {
            prop_assert!(commutant::in_commutant(&a, x, &tol()).unwrap().commutes);
        }
    }

    #[test]
    fn witness_reproduces_target((seed, n) in seeded(2..=5), with_seed in any::<bool>()) {
        let mut g = rng(seed);
        let a = real_matrix(&mut g, n);
        let r = complex_matrix(&mut g, n);
        let m = matrix::commutator(&a, &r).unwrap();
        let w = commutant::noncommuting_witness(&a, &m, &tol(), with_seed.then_some(seed)).unwrap();
        prop_assert!(w.consistent());
        let achieved = w.achieved_m.unwrap();
        prop_assert!(achieved.try_sub(&m).unwrap().frobenius_norm() <= 1e-8 * w.scale);
    }

    #[test]
    fn set_tests_agree((seed, n) in seeded(2..=4), p in 2usize..=4, perturb in any::<bool>()) {
        let mut g = rng(seed);
        let base = real_matrix(&mut g, n);
        let mut set: Vec<CMatrix> = (0..p).map(|_| random_polynomial_in(&mut g, &base, 3)).collect();
        if perturb {
            set[0] = set[0].try_add(&real_matrix(&mut g, n).scale_real(0.2)).unwrap();
        }
        let report = commutant::pairwise_commuting(&set, &tol()).unwrap();
        prop_assert!(report.tests_agree);
        prop_assert_eq!(report.pairwise_commuting, !perturb);
    }

    #[test]
    fn split_operator_matches_complex_kernel((seed, n) in seeded(1..=4), p in 1usize..=3) {
        let mut g = rng(seed);
        let set: Vec<CMatrix> = (0..p).map(|_| complex_matrix(&mut g, n)).collect();
        let eq = commutant::split_equivalence(&set, &tol()).unwrap();
        prop_assert!(eq.holds(&tol()));
        prop_assert_eq!(eq.split_dim, 2 * eq.complex_dim);
    }

    #[test]
    fn hermite_route_reproduces_polynomials((seed, n) in seeded(1..=5), degree in 0usize..=6) {
        let mut g = rng(seed);
        let a = real_matrix(&mut g, n);
        let coeffs: Vec<Complex> = (0..=degree).map(|_| c(g.gen_range(-1.0..1.0))).collect();
        let f = ScalarFunction::polynomial("q", coeffs.clone());
        let direct = matfunc::polynomial_at(&coeffs, &a).unwrap();
        match matfunc::matrix_function(&a, &f, &tol()) {
            Ok(value) => {
                let err = value.value.try_sub(&direct).unwrap().frobenius_norm();
                prop_assert!(err <= 1e-10 * direct.frobenius_norm().max(1.0), "error {err:e}");
            }
            Err(e) => prop_assert!(e.is_numerical(), "{e}"),
        }
    }

    #[test]
    fn functions_of_commuting_matrices_commute((seed, n) in seeded(2..=4), which in 0usize..3) {
        let mut g = rng(seed);
        let a = real_matrix(&mut g, n);
        let b = random_polynomial_in(&mut g, &a, 2);
        let f = match which {
            0 => ScalarFunction::exp(),
            1 => ScalarFunction::power(3),
            _ => ScalarFunction::shifted_inverse(Complex::new(0.0, 10.0)),
        };
        let report = matfunc::function_commutes_check(&a, &b, &f, Some(&ScalarFunction::exp()), &tol()).unwrap();
        prop_assert!(report.pair_commutes);
        prop_assert!(report.passed, "{report:?}");
    }

    #[test]
    fn resolvent_commutes_with_commuting_pairs((seed, n) in seeded(1..=5)) {
        let mut g = rng(seed);
        let b = real_matrix(&mut g, n);
        let a = random_polynomial_in(&mut g, &b, 3);
        let res = matfunc::resolvent_commutator(&a, &b, Complex::new(0.5, 8.0), &tol()).unwrap();
        prop_assert!(res <= 1e-10 * a.frobenius_norm().max(1.0));
    }

    #[test]
    fn similarity_transfer_preserves_operator(seed in any::<u64>()) {
        let mut g = rng(seed);
        let spec = random_jordan_spec(&mut g, 6);
        let n = spec.order();
        let spec = spec.with_transform(unimodular(&mut g, n, 2 * n));
        prop_assert!(spectral::jordan_similarity_residual(&spec, &tol()).unwrap() <= 1e-8);
    }

    #[test]
    fn kernel_nullity_matches_exact_rank((a, _) in int_pair()) {
        let n = a.rows();
        let op = matrix::commutator_operator(&a).unwrap();
        let rank = exact_rank(&op).unwrap();
        prop_assert_eq!(factor::kernel_basis(&op, &tol()).nullity(), n * n - rank);
    }

    #[test]
    fn jordan_built_matrices_meet_oracle(seed in any::<u64>()) {
        let mut g = rng(seed);
        let spec = random_jordan_spec(&mut g, 8);
        let n = spec.order();
        let spec = spec.with_transform(unimodular(&mut g, n, n));
        let a = spectral::build_from_jordan(&spec, &tol()).unwrap();
        let op = matrix::commutator_operator(&a).unwrap();
        let oracle = spectral::centralizer_dim_oracle(&spec.summary());
        prop_assert_eq!(factor::kernel_basis(&op, &tol()).nullity(), oracle);
        prop_assert_eq!(exact_rank(&op).map(|r| n * n - r), Some(oracle));
    }
}
