use proptest::prelude::*;

use qtrace::deformed::{exp_q_matrix, log_q, log_q_matrix, random_in_domain, Deformation};
use qtrace::functionals::{phi_multi, tsallis_relative_entropy, MultiTermInput};
use qtrace::inequalities::{
    corollary52_bound, golden_thompson_classical, golden_thompson_deformed, isometry_split, pb_sense,
    peierls_bogolyubov, tracial_young, young_sense, CurvatureCase, CurvatureMap,
};
use qtrace::linalg::{
    eigh, frechet_derivative, random_density, random_hermitian, random_negative_definite, random_positive_definite,
    random_unitary, trial_rng, HermitianMatrix, PositiveDefiniteMatrix,
};
use qtrace::record::{Direction, DIR_SLACK};
use qtrace::variational::lemma21_objective;

fn rel_err(a: &HermitianMatrix, b: &HermitianMatrix) -> f64 {
    a.max_abs_diff(b) / b.max_abs_entry().max(1e-300)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frechet_matches_central_differences(seed in any::<u64>(), n in 1usize..=6, qi in 0usize..4) {
        let rng = &mut trial_rng(seed, 0);
        let a = random_positive_definite(n, 0.2, 3.0, rng);
        let b = random_hermitian(n, rng);
        let q = Deformation::new([1.0, 0.5, 1.5, 2.5][qi]);
        let d = frechet_derivative(a.as_hermitian(), &b, |x| log_q(x, q), |x| q.log_derivative(x)).unwrap();
        let h = 1e-5;
        let plus = PositiveDefiniteMatrix::new(a.as_hermitian() + &b.scale(h)).unwrap();
        let minus = PositiveDefiniteMatrix::new(a.as_hermitian() - &b.scale(h)).unwrap();
        let fd = (&log_q_matrix(&plus, q) - &log_q_matrix(&minus, q)).scale(0.5 / h);
        prop_assert!(rel_err(&fd, &d) <= 1e-6);
    }

    #[test]
    fn eigen_round_trip(seed in any::<u64>(), n in 1usize..=8) {
        let a = random_hermitian(n, &mut trial_rng(seed, 1));
        let d = eigh(&a).unwrap();
        prop_assert!(d.reconstruct().max_abs_diff(&a) <= 1e-10 * (1.0 + a.max_abs_entry()));
        prop_assert!(d.eigenvalues().windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn exp_q_inverts_log_q(seed in any::<u64>(), n in 1usize..=5, q in 0.0f64..4.0) {
        let rng = &mut trial_rng(seed, 2);
        let q = Deformation::new(q);
        let x = random_positive_definite(n, 0.1, 5.0, rng);
        let back = exp_q_matrix(&log_q_matrix(&x, q), q).unwrap();
        prop_assert!(back.as_hermitian().max_abs_diff(x.as_hermitian()) <= 1e-9 * (1.0 + x.max_eig()));
        let l = random_in_domain(n, q, rng);
        let back = log_q_matrix(&exp_q_matrix(&l, q).unwrap(), q);
        prop_assert!(back.max_abs_diff(&l) <= 1e-9 * (1.0 + l.max_abs_entry()));
    }

    #[test]
    fn tsallis_divergence_nonnegative(seed in any::<u64>(), n in 2usize..=4, p in 0.0f64..=1.0) {
        let rng = &mut trial_rng(seed, 3);
        let x = random_density(n, rng).into_pd();
        let y = random_density(n, rng).into_pd();
        prop_assert!(tsallis_relative_entropy(&x, &y, p).unwrap() >= -1e-12);
        prop_assert!(tsallis_relative_entropy(&x, &x, p).unwrap().abs() <= 1e-12);
    }

    #[test]
    fn lemma21_direction(seed in any::<u64>(), n in 2usize..=4, q in 0.0f64..3.5) {
        let rng = &mut trial_rng(seed, 4);
        let q = Deformation::new(q);
        let x = random_positive_definite(n, 0.05, 4.0, rng);
        let y = random_positive_definite(n, 0.05, 4.0, rng);
        let v = lemma21_objective(&x, &y, q).unwrap();
        let gap = Direction::for_q(q.q()).sense().violation(v - y.trace());
        prop_assert!(gap <= DIR_SLACK);
    }

    #[test]
    fn young_direction(seed in any::<u64>(), n in 1usize..=4, p in -2.0f64..3.0) {
        let rng = &mut trial_rng(seed, 5);
        let x = random_positive_definite(n, 0.05, 4.0, rng);
        let y = random_positive_definite(n, 0.05, 4.0, rng);
        prop_assert!(young_sense(p).violation(tracial_young(&x, &y, p).unwrap()) <= DIR_SLACK);
    }

    #[test]
    fn peierls_bogolyubov_sign(seed in any::<u64>(), n in 2usize..=4, q in 0.0f64..3.0) {
        let rng = &mut trial_rng(seed, 6);
        let q = Deformation::new(q);
        let a = random_in_domain(n, q, rng);
        let b = &random_in_domain(n, q, rng) - &a;
        if let Some(g) = peierls_bogolyubov(&a, &b, q).unwrap() {
            prop_assert!(pb_sense(q).violation(g) <= DIR_SLACK);
        }
    }

    #[test]
    fn golden_thompson_signs(seed in any::<u64>(), n in 2usize..=4, q in 0.0f64..0.999) {
        let rng = &mut trial_rng(seed, 7);
        let a = random_negative_definite(n, -3.0, -0.05, rng);
        let b = random_negative_definite(n, -3.0, -0.05, rng);
        prop_assert!(golden_thompson_deformed(&a, &b, Deformation::new(q)).unwrap() <= DIR_SLACK);
        let a = random_hermitian(n, rng);
        let b = random_hermitian(n, rng);
        prop_assert!(golden_thompson_classical(&a, &b).unwrap() <= DIR_SLACK);
    }

    #[test]
    fn classical_golden_thompson_is_tight_on_commuting_pairs(seed in any::<u64>(), n in 1usize..=4) {
        let rng = &mut trial_rng(seed, 8);
        let u = random_unitary(n, rng);
        let da: Vec<f64> = (0..n).map(|i| (i as f64 * 0.37).sin()).collect();
        let db: Vec<f64> = (0..n).map(|i| (i as f64 * 0.91).cos()).collect();
        let a = HermitianMatrix::diagonal(&da).conjugate_by(&u);
        let b = HermitianMatrix::diagonal(&db).conjugate_by(&u);
        prop_assert!(golden_thompson_classical(&a, &b).unwrap().abs() <= 1e-10 * n as f64 * 10.0);
    }

    #[test]
    fn supporting_hyperplane(seed in any::<u64>(), n in 2usize..=3, k in 1usize..=3, q in 0.0f64..0.999) {
        let rng = &mut trial_rng(seed, 9);
        let q = Deformation::new(q);
        let h = isometry_split(n, k, rng);
        let a: Vec<_> = (0..k).map(|_| random_positive_definite(n, 0.1, 3.0, rng)).collect();
        let b: Vec<_> = (0..k).map(|_| random_positive_definite(n, 0.1, 3.0, rng)).collect();
        let inp = MultiTermInput::new(a.clone(), h, q).unwrap();
        prop_assert!(corollary52_bound(&b, &inp).unwrap() <= DIR_SLACK);
        let phi = phi_multi(&inp).unwrap();
        prop_assert!(corollary52_bound(&a, &inp).unwrap().abs() <= 1e-8 * (1.0 + phi));
    }

    #[test]
    fn phi_is_homogeneous(seed in any::<u64>(), n in 2usize..=4, q in 0.0f64..0.999, t in 0.01f64..100.0) {
        let rng = &mut trial_rng(seed, 10);
        let h = isometry_split(n, 2, rng);
        let a = vec![random_positive_definite(n, 0.1, 3.0, rng), random_positive_definite(n, 0.1, 3.0, rng)];
        let inp = MultiTermInput::new(a, h, Deformation::new(q)).unwrap();
        let base = phi_multi(&inp).unwrap();
        let scaled = phi_multi(&inp.scaled(t).unwrap()).unwrap();
        prop_assert!((scaled - t * base).abs() <= 1e-9 * scaled.abs());
    }

    #[test]
    fn midpoint_curvature(seed in any::<u64>(), n in 2usize..=3, mi in 0usize..8, q in 0.0f64..3.0) {
        let map = CurvatureMap::ALL[mi];
        let q = Deformation::new(if map == CurvatureMap::Classical { 1.0 } else { q });
        prop_assume!(map.expected(q).is_some());
        let rng = &mut trial_rng(seed, 11);
        let case = CurvatureCase::random(map, q, n, rng).unwrap();
        let draw = |rng: &mut _| -> Vec<PositiveDefiniteMatrix> {
            (0..case.arity()).map(|_| random_positive_definite(n, 0.1, 2.0, rng)).collect()
        };
        let (p, r) = (draw(rng), draw(rng));
        if let Ok(g) = case.midpoint_gap(&p, &r) {
            prop_assert!(case.expected.sense().violation(g) <= DIR_SLACK, "{} q={} g={g}", map.id(), q.q());
        }
    }
}
