//! Reference implementations and instance generators shared by the
//! integration tests. The oracles use only truncated power series and plain
//! matrix products, independent of the Schur-based kernels they check.

#![allow(dead_code)]

use num_complex::Complex64;
use quiverdm::matrix::{inverse, CMat, ONE, TWO_PI_I, ZERO};
use quiverdm::quiver::{generate_with, random_well_conditioned, Category, FactorShape, GenOptions, QuiverRep};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn norm1(a: &CMat) -> f64 {
    (0..a.cols())
        .map(|j| (0..a.rows()).map(|i| a[(i, j)].norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// `e^A` by scaling and squaring of a 40-term Taylor polynomial.
pub fn exp_taylor(a: &CMat) -> CMat {
    let n = a.rows();
    let nrm = norm1(a);
    let s = if nrm > 0.5 { (nrm / 0.5).log2().ceil() as i32 } else { 0 };
    let b = a.scale(c(0.5f64.powi(s), 0.0));
    let mut sum = CMat::identity(n);
    let mut term = CMat::identity(n);
    for k in 1..40 {
        term = (&term * &b).scale(c(1.0 / k as f64, 0.0));
        sum = sum.try_add(&term).unwrap();
    }
    for _ in 0..s {
        sum = &sum * &sum;
    }
    sum
}

/// `ψ(A) = Σ_{k≥1} (2πi)^k/k!·A^{k-1}`, read off the upper right block of
/// `exp([[2πiA, 2πi·Id], [0, 0]])`.
pub fn psi_oracle(a: &CMat) -> CMat {
    let n = a.rows();
    let mut big = CMat::zeros(2 * n, 2 * n);
    big.set_submatrix(0, 0, &a.scale(TWO_PI_I));
    big.set_submatrix(0, n, &CMat::identity(n).scale(TWO_PI_I));
    exp_taylor(&big).submatrix(0, n, n, 2 * n)
}

/// `e^{2πiA}`.
pub fn exp_2pii_oracle(a: &CMat) -> CMat {
    exp_taylor(&a.scale(TWO_PI_I))
}

/// Literal strip membership: `0 ≤ ℜλ ≤ 1`, `ℜλ = 0 ⇒ ℑλ ≥ 0`,
/// `ℜλ = 1 ⇒ ℑλ < 0`, each relaxed by `tol`.
pub fn in_strip(l: Complex64, tol: f64) -> bool {
    if l.re < -tol || l.re > 1.0 + tol {
        return false;
    }
    if l.re.abs() <= tol && l.im < -tol {
        return false;
    }
    !((l.re - 1.0).abs() <= tol && l.im >= tol)
}

/// Means of single-linkage groups of points within `rel·max(1, |λ|)`.
pub fn group_means(values: &[Complex64], rel: f64) -> Vec<Complex64> {
    let n = values.len();
    let mut label: Vec<usize> = (0..n).collect();
    let mut changed = true;
    while changed {
        changed = false;
        for i in 0..n {
            for j in 0..n {
                let close = (values[i] - values[j]).norm() <= rel * values[i].norm().max(values[j].norm()).max(1.0);
                if close && label[j] < label[i] {
                    label[i] = label[j];
                    changed = true;
                }
            }
        }
    }
    let mut out = Vec::new();
    for l in 0..n {
        let members: Vec<Complex64> = (0..n).filter(|&i| label[i] == l).map(|i| values[i]).collect();
        if !members.is_empty() {
            out.push(members.iter().sum::<Complex64>() / members.len() as f64);
        }
    }
    out
}

pub fn rel_residual(a: &CMat, b: &CMat) -> f64 {
    a.dist_fro(b) / b.norm_fro().max(1.0)
}

pub fn random_cmat(rng: &mut ChaCha8Rng, rows: usize, cols: usize, scale: f64) -> CMat {
    let data = (0..rows * cols)
        .map(|_| c(rng.random_range(-scale..scale), rng.random_range(-scale..scale)))
        .collect();
    CMat::from_vec(rows, cols, data).unwrap()
}

/// Upper triangular `λ + N` with `N` the shift.
pub fn jordan(lambda: Complex64, k: usize) -> CMat {
    let mut j = CMat::zeros(k, k);
    for i in 0..k {
        j[(i, i)] = lambda;
        if i + 1 < k {
            j[(i, i + 1)] = ONE;
        }
    }
    j
}

pub fn block_diag(blocks: &[CMat]) -> CMat {
    blocks.iter().skip(1).fold(blocks[0].clone(), |acc, b| acc.direct_sum(b))
}

/// `P·M·P⁻¹` with `P` well conditioned (singular values in `[1, 4]`).
pub fn conjugated(m: &CMat, rng: &mut ChaCha8Rng) -> CMat {
    let p = random_well_conditioned(m.rows(), m.rows(), 1.0, 4.0, rng).unwrap();
    &(&p * m) * &inverse(&p).unwrap()
}

/// Point in the strip at distance at least `margin` from its boundary.
pub fn strip_point(rng: &mut ChaCha8Rng, margin: f64) -> Complex64 {
    c(rng.random_range(margin..1.0 - margin), rng.random_range(-1.5..1.5))
}

/// Factor shapes for `n` slots whose vertex dimensions never exceed `cap`.
pub fn factor_shapes(rng: &mut ChaCha8Rng, n: usize, cap: usize) -> Vec<FactorShape> {
    let mut budget = cap;
    let mut out = Vec::new();
    for _ in 0..n {
        let m = rng.random_range(1..=budget.max(1));
        let other = rng.random_range(1..=m);
        out.push(if rng.random_bool(0.5) {
            FactorShape { lower: m, upper: other }
        } else {
            FactorShape { lower: other, upper: m }
        });
        budget /= m;
    }
    out
}

pub fn random_rep(
    rng: &mut ChaCha8Rng,
    n: usize,
    cap: usize,
    category: Category,
    nilpotent: bool,
) -> QuiverRep {
    let seed = rng.random();
    let mut opts = GenOptions::new(n, &[1], category, seed);
    opts.factors = factor_shapes(rng, n, cap);
    opts.nilpotent = nilpotent;
    generate_with(&opts).unwrap()
}

pub fn max_vertex_dim(rep: &QuiverRep) -> usize {
    rep.dims().iter().copied().max().unwrap_or(0)
}

pub fn unit(k: usize, d: usize) -> CMat {
    let mut a = CMat::zeros(1, d);
    a[(0, k)] = ONE;
    a
}

pub fn zero_like(a: &CMat) -> CMat {
    a.map(|_| ZERO)
}
