mod common;

use common::*;
use proptest::prelude::*;
use quiverdm::functors::{compare_reps, functor_g, functor_q, predict_a, roundtrip_check};
use quiverdm::matrix::{spectrum, CMat, ONE};
use quiverdm::quiver::{conjugate, conjugate_with, dualize, validate, Category, DEFAULT_TOL};
use quiverdm::report::ValidationReport;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn q_then_g_is_identity(seed in any::<u64>(), n in 1usize..4) {
        let rep = random_rep(&mut rng(seed), n, 4, Category::Sigma1, seed % 4 == 0);
        let q = functor_q(&rep).unwrap();
        prop_assert!(validate(&q, Category::C, DEFAULT_TOL).passed());
        let report = roundtrip_check(&rep, Category::Sigma1, 1e-8).unwrap();
        prop_assert!(report.passed(), "{}", report.to_text());
    }

    #[test]
    fn g_then_q_is_identity(seed in any::<u64>(), n in 1usize..4) {
        let rep = random_rep(&mut rng(seed), n, 4, Category::C, false);
        let g = functor_g(&rep).unwrap();
        prop_assert!(validate(&g, Category::Sigma1, DEFAULT_TOL).passed());
        let report = roundtrip_check(&rep, Category::C, 1e-8).unwrap();
        prop_assert!(report.passed(), "{}", report.to_text());
    }

    #[test]
    fn q_backward_matches_oracle(seed in any::<u64>(), n in 1usize..3) {
        let rep = random_rep(&mut rng(seed), n, 3, Category::Sigma1, false);
        let q = functor_q(&rep).unwrap();
        for (e, m) in rep.edges() {
            let want = &psi_oracle(&(&m.y * &m.u)) * &m.y;
            prop_assert!(rel_residual(q.y(e.from, e.dir), &want) < 1e-10);
            prop_assert_eq!(q.u(e.from, e.dir), &m.u);
        }
    }

    #[test]
    fn q_image_relation_is_exponential(seed in any::<u64>(), n in 1usize..3) {
        // w∘u + Id = e^{2πi y∘u} for w the backward map of Q.
        let rep = random_rep(&mut rng(seed), n, 3, Category::Sigma1, false);
        let q = functor_q(&rep).unwrap();
        for (e, m) in rep.edges() {
            let lhs = (q.y(e.from, e.dir) * &m.u).add_identity(ONE);
            prop_assert!(rel_residual(&lhs, &exp_2pii_oracle(&(&m.y * &m.u))) < 1e-10);
        }
    }

    #[test]
    fn prediction_is_q_of_dual(seed in any::<u64>(), n in 1usize..4) {
        let rep = random_rep(&mut rng(seed), n, 4, Category::Sigma1, seed % 3 == 0);
        let mut report = ValidationReport::new("p", 1e-9);
        compare_reps(&mut report, "p", &predict_a(&rep).unwrap(), &functor_q(&dualize(&rep)).unwrap(), 1e-9);
        prop_assert!(report.passed(), "{}", report.to_text());
    }

    #[test]
    fn functors_commute_with_isomorphisms(seed in any::<u64>(), n in 1usize..3) {
        let rep = random_rep(&mut rng(seed), n, 3, Category::Sigma1, false);
        let (conj, m) = conjugate(&rep, seed ^ 11).unwrap();
        let mut report = ValidationReport::new("nat", 1e-8);
        let via = conjugate_with(&functor_q(&rep).unwrap(), &m).unwrap();
        compare_reps(&mut report, "q", &functor_q(&conj).unwrap(), &via, 1e-8);
        prop_assert!(report.passed(), "{}", report.to_text());
    }
}

#[test]
fn sigma1_outlier_is_rejected_by_q() {
    let rep = quiverdm::quiver::QuiverRep::from_fn(1, vec![1, 1], |_| {
        Ok(quiverdm::quiver::EdgeMaps {
            u: CMat::scalar(ONE),
            y: CMat::from_real(&[&[1.5]]),
        })
    })
    .unwrap();
    assert!(functor_q(&rep).is_err());
    assert_eq!(spectrum(&CMat::from_real(&[&[1.0]])).unwrap(), vec![ONE]);
}
