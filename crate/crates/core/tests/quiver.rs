mod common;

use common::*;
use proptest::prelude::*;
use quiverdm::io::RepDocument;
use quiverdm::matrix::CMat;
use quiverdm::quiver::{
    conjugate, direct_sum, dualize, dualize_morphism, generate, validate, validate_morphism, Category, EdgeMaps,
    QuiverMorphism, QuiverRep, VertexId, DEFAULT_TOL,
};

fn category(k: u8) -> Category {
    [Category::Qui, Category::C, Category::Sigma1][k as usize % 3]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generated_reps_validate(seed in any::<u64>(), n in 1usize..4, k in 0u8..3) {
        let cat = category(k);
        let rep = random_rep(&mut rng(seed), n, 4, cat, false);
        let report = validate(&rep, cat, DEFAULT_TOL);
        prop_assert!(report.passed(), "{}", report.to_text());
        prop_assert!(max_vertex_dim(&rep) <= 4);
    }

    #[test]
    fn duality_is_an_exact_involution(seed in any::<u64>(), n in 1usize..4, k in 0u8..3) {
        let rep = random_rep(&mut rng(seed), n, 4, category(k), false);
        let d = dualize(&rep);
        prop_assert_eq!(&dualize(&d), &rep);
        for (e, m) in d.edges() {
            prop_assert_eq!(&m.u, &rep.y(e.from, e.dir).transpose());
            prop_assert_eq!(&m.y, &rep.u(e.from, e.dir).transpose());
        }
    }

    #[test]
    fn verdicts_survive_duality_and_conjugation(seed in any::<u64>(), n in 1usize..3, k in 0u8..3) {
        let rep = random_rep(&mut rng(seed), n, 3, category(k), false);
        let (conj, m) = conjugate(&rep, seed ^ 3).unwrap();
        prop_assert!(validate_morphism(&rep, &conj, &m, 1e-9).passed());
        let d = dualize(&rep);
        prop_assert!(validate_morphism(&dualize(&conj), &d, &dualize_morphism(&m), 1e-9).passed());
        for cat in [Category::Qui, Category::C, Category::Sigma1] {
            let v = validate(&rep, cat, DEFAULT_TOL).passed();
            prop_assert_eq!(validate(&d, cat, DEFAULT_TOL).passed(), v);
            prop_assert_eq!(validate(&conj, cat, 1e-8).passed(), v);
        }
    }

    #[test]
    fn direct_sums_stay_in_category(seed in any::<u64>(), n in 1usize..3, k in 0u8..3) {
        let cat = category(k);
        let mut r = rng(seed);
        let a = random_rep(&mut r, n, 2, cat, false);
        let b = random_rep(&mut r, n, 2, cat, false);
        let s = direct_sum(&a, &b).unwrap();
        prop_assert!(validate(&s, cat, DEFAULT_TOL).passed());
        for v in VertexId::all(n) {
            prop_assert_eq!(s.dim(v), a.dim(v) + b.dim(v));
        }
    }

    #[test]
    fn documents_round_trip_exactly(seed in any::<u64>(), n in 1usize..4) {
        let rep = random_rep(&mut rng(seed), n, 3, Category::Sigma1, false);
        let text = RepDocument::new(rep.clone()).to_json_string().unwrap();
        let back = RepDocument::parse(&text).unwrap();
        prop_assert_eq!(&back.rep, &rep);
        prop_assert_eq!(back.to_json_string().unwrap(), text);
    }
}

#[test]
fn broken_relation_is_located() {
    let rep = generate(2, &[2], Category::Sigma1, 4).unwrap();
    let bad = rep
        .map_edges(|e, m| {
            let mut u = m.u.clone();
            if e.from == VertexId::EMPTY && e.dir == 1 {
                u[(0, 0)] += c(1.0, 0.0);
            }
            Ok(EdgeMaps { u, y: m.y.clone() })
        })
        .unwrap();
    let report = validate(&bad, Category::Qui, DEFAULT_TOL);
    assert!(!report.passed());
    assert!(report.violations.iter().any(|v| v.tag == "qui.uu" && v.location.contains("I={}")));
}

#[test]
fn zero_dimensional_vertices_are_vacuous() {
    let rep = QuiverRep::zero(3).unwrap();
    for cat in [Category::Qui, Category::C, Category::Sigma1] {
        assert!(validate(&rep, cat, DEFAULT_TOL).passed());
    }
    let m = QuiverMorphism::identity(&rep);
    assert!(validate_morphism(&rep, &rep, &m, DEFAULT_TOL).passed());
    assert_eq!(rep.u(VertexId::EMPTY, 1), &CMat::zeros(0, 0));
}
