mod common;

use common::*;
use proptest::prelude::*;
use quiverdm::logexpr::{expr_residual, expr_residual_mod_constants, sample_points, Factor, LogExpr};
use quiverdm::matrix::{CMat, TWO_PI_I};

fn exponent(seed: u64, m: usize) -> CMat {
    let mut r = rng(seed);
    match seed % 3 {
        0 => random_cmat(&mut r, m, m, 0.6),
        1 => {
            let mut a = random_cmat(&mut r, m, m, 0.8);
            for i in 0..m {
                for j in 0..=i {
                    a[(i, j)] = c(0.0, 0.0);
                }
            }
            conjugated(&a, &mut r)
        }
        _ => conjugated(&jordan(c(-1.0, 0.0), m), &mut r),
    }
}

/// `α·φ_A(z_1)·z_2^B`.
fn two_slot(seed: u64, m: usize) -> LogExpr {
    let a = exponent(seed, m);
    let b = exponent(seed.wrapping_add(1), m);
    let coeff = random_cmat(&mut rng(seed ^ 7), 1, m, 1.0);
    LogExpr::monomial(coeff, vec![Factor::phi(a), Factor::power(b)]).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn derivative_of_power(seed in any::<u64>(), m in 1usize..4) {
        let a = exponent(seed, m);
        let e = LogExpr::monomial(CMat::identity(m), vec![Factor::power(a.clone())]).unwrap();
        let lhs = e.derive(1).unwrap().mul_monomial(1, 1).unwrap();
        prop_assert!(expr_residual(&lhs, &e.right_mul(&a).unwrap(), 8, seed).unwrap() < 1e-10);
    }

    #[test]
    fn antiderivative_inverts_derivative(seed in any::<u64>(), m in 1usize..4) {
        let e = two_slot(seed, m);
        let back = e.antiderive(2).unwrap().derive(2).unwrap();
        prop_assert!(expr_residual(&back, &e, 8, seed).unwrap() < 1e-9);
        let again = e.derive(2).unwrap().antiderive(2).unwrap();
        prop_assert!(expr_residual_mod_constants(&again, &e, &[2], 8, seed).unwrap() < 1e-9);
    }

    #[test]
    fn monodromy_is_log_shift(seed in any::<u64>(), m in 1usize..4, slot in 1usize..=2) {
        let e = two_slot(seed, m);
        let moved = e.monodromy(slot).unwrap();
        for z in sample_points(2, 4, seed) {
            let mut logs: Vec<_> = z.iter().map(|w| {
                let t = w.arg();
                c(w.norm().ln(), if t < 0.0 { t + 2.0 * std::f64::consts::PI } else { t })
            }).collect();
            logs[slot - 1] += TWO_PI_I;
            let numeric = e.evaluate_with_logs(&logs).unwrap();
            let symbolic = moved.evaluate(&z).unwrap();
            prop_assert!(symbolic.dist_fro(&numeric) <= 1e-9 * (1.0 + numeric.norm_fro()));
        }
    }

    #[test]
    fn variation_of_phi(seed in any::<u64>(), m in 1usize..5) {
        let a = exponent(seed, m);
        let phi = LogExpr::monomial(CMat::identity(m), vec![Factor::phi(a.clone())]).unwrap();
        let var = phi.monodromy(1).unwrap().sub(&phi).unwrap();
        let want = LogExpr::monomial(psi_oracle(&a), vec![Factor::power(a)]).unwrap();
        prop_assert!(expr_residual(&var, &want, 8, seed).unwrap() < 1e-9);
    }

    #[test]
    fn monomial_shift_commutes_with_evaluation(seed in any::<u64>(), m in 1usize..4, k in -2i32..3) {
        let e = two_slot(seed, m);
        let shifted = e.mul_monomial(2, k).unwrap();
        for z in sample_points(2, 4, seed) {
            let want = e.evaluate(&z).unwrap().scale(z[1].powi(k));
            prop_assert!(rel_residual(&shifted.evaluate(&z).unwrap(), &want) < 1e-12);
        }
    }
}
