use nalgebra::DMatrix;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rigidity::flex::{affine_witness_from_phi, quadratic_at_infinity_edges, quadratic_at_infinity_gale};
use rigidity::framework::{congruence_check, equivalence_check};
use rigidity::gale::gale_matrix;
use rigidity::generate::{mixed_corpus, random_lateration};
use rigidity::lateration::{find_lateration_order, purify_observed};
use rigidity::linalg::numerical_rank;
use rigidity::stress::{omega_from_stress, stress_from_omega, stress_space_basis, verify_stress};
use rigidity::{parse_framework, Tolerances};

fn random_psd(m: usize, rank: usize, vals: &[f64]) -> DMatrix<f64> {
    let b = DMatrix::from_fn(m, rank, |i, k| vals[(i * rank + k) % vals.len()] + if i == k { 3.0 } else { 0.0 });
    &b * b.transpose()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn gale_columns_are_orthonormal_and_annihilate(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let f = &mixed_corpus(seed, 1)[0];
        let gale = gale_matrix(f.config(), &tol).unwrap();
        let z = gale.matrix();
        prop_assert_eq!(z.ncols(), f.gale_dim());
        prop_assert!((z.transpose() * z - DMatrix::identity(z.ncols(), z.ncols())).amax() < 1e-10);
        prop_assert!((f.config().extended_matrix() * z).amax() < 1e-10 * f.config().matrix().amax().max(1.0));
    }

    #[test]
    fn gale_congruence_preserves_rank(seed in any::<u64>(), rank in 1usize..4, vals in proptest::collection::vec(-1.0f64..1.0, 16)) {
        let tol = Tolerances::default();
        let f = &mixed_corpus(seed, 1)[0];
        let z = gale_matrix(f.config(), &tol).unwrap().matrix().clone();
        let m = z.ncols();
        let rank = rank.min(m);
        let psi = random_psd(m, rank, &vals);
        let s = &z * &psi * z.transpose();
        prop_assert_eq!(numerical_rank(&s, &tol), numerical_rank(&psi, &tol));
    }

    #[test]
    fn omega_and_stress_round_trip(seed in any::<u64>(), coeffs in proptest::collection::vec(-2.0f64..2.0, 40)) {
        let tol = Tolerances::default();
        let f = &mixed_corpus(seed, 1)[0];
        let basis = stress_space_basis(f, &tol).unwrap();
        prop_assume!(basis.dim() > 0);
        let s = basis.stress(&coeffs[..basis.dim()]);
        let omega = omega_from_stress(f.graph(), &s);
        let back = stress_from_omega(f, &omega, &tol).unwrap();
        prop_assert!((back.matrix() - &s).amax() <= 1e-9 * s.amax().max(1e-300));
        prop_assert!(verify_stress(f, &s, &tol).rank_bound_ok);
    }

    #[test]
    fn every_purification_step_clears_its_column(seed in any::<u64>(), r in 1usize..4, extra in 1usize..7) {
        let tol = Tolerances::default();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_lateration(&mut rng, r, r + 1 + extra, true);
        let order = find_lateration_order(f.graph(), r, 100_000).unwrap().expect("lateration graph");
        let gale = gale_matrix(f.config(), &tol).unwrap();
        let relabeled = f.graph().relabeled(order.order());
        let mut columns = Vec::new();
        let p = purify_observed(&f, &order, &gale, &tol, |k, s| {
            let scale = s.amax();
            let worst = (0..k).filter(|&i| !relabeled.has_edge(i, k)).map(|i| s[(i, k)].abs()).fold(0.0, f64::max);
            columns.push(worst / scale);
        })
        .unwrap();
        prop_assert!(columns.iter().all(|&c| c < 1e-10), "{:?}", columns);
        prop_assert_eq!(p.report.rank, f.gale_dim());
        prop_assert!(p.report.psd && p.report.passes);
    }

    #[test]
    fn text_format_round_trips(seed in any::<u64>()) {
        let f = &mixed_corpus(seed, 1)[0];
        let back = parse_framework(&f.to_text()).unwrap();
        prop_assert_eq!(&back, f);
    }

    #[test]
    fn detected_flexes_give_valid_witnesses(seed in any::<u64>()) {
        let tol = Tolerances::default();
        let f = &mixed_corpus(seed, 1)[0];
        let gale = gale_matrix(f.config(), &tol).unwrap();
        let edge = quadratic_at_infinity_edges(f, &tol);
        prop_assert_eq!(edge.is_some(), quadratic_at_infinity_gale(f, &gale, &tol).unwrap().is_some());
        if let Some(phi) = edge {
            let w = affine_witness_from_phi(f, &phi, &tol).unwrap();
            prop_assert!(equivalence_check(f.graph(), f.config(), &w.q, 1e-9).unwrap());
            prop_assert!(!congruence_check(f.config(), &w.q, 1e-6).unwrap());
        }
    }
}
