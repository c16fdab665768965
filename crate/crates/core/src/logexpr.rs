//! Sums of ordered products of `z_k^X` and `φ_X(z_k)`, one factor per
//! variable, with exact `∂`, `∂⁻¹`, `z^k`-shift and monodromy rules.
//!
//! A term is `coeff · (L₁ F₁(z₁)) · … · (Lₙ Fₙ(zₙ)) · tail` where each `Fₖ`
//! is either `z^X = exp(X ln z)` or `φ_X(z) = Σ_{j≥0} X^j ln(z)^{j+1}/(j+1)!`
//! and `Lₖ` is a constant left multiplier local to slot `k`. All factor
//! matrices of one term share an inner dimension `m`; `coeff` is `rows × m`
//! and `tail` is `m × width`, so terms with different inner dimensions can
//! be summed as long as `rows` and `width` agree.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::matrix::funm::{funm, Exp, Indicator, Phi1};
use crate::matrix::{expm_2pii, inverse, psi, CMat, MatrixError, ONE, SIGMA1_GROUP_REL, ZERO};

/// Distance below which a point counts as lying on the cut `ℝ≥0`.
pub const CUT_TOL: f64 = 1e-12;
/// Eigenvalue groups of `X + Id` whose mean is this close to zero go to
/// the logarithmic part of an antiderivative.
pub const NILPOTENT_TOL: f64 = 1e-8;
pub const DEFAULT_SAMPLES: usize = 8;
pub const DEFAULT_EQ_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExprError {
    #[error("variable index {index} out of range 1..={n}")]
    SlotOutOfRange { index: usize, n: usize },
    #[error("{op} is not defined on a Phi factor in slot {slot}")]
    OutOfClass { op: &'static str, slot: usize },
    #[error("coordinate {slot} = {z} lies on the cut of the logarithm")]
    OnCut { slot: usize, z: Complex64 },
    #[error("expression shapes differ: {left} vs {right}")]
    DimensionMismatch { left: String, right: String },
    #[error("term shape error: {0}")]
    TermShape(String),
    #[error("expected {expected} coordinates, got {got}")]
    PointArity { expected: usize, got: usize },
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FactorKind {
    Power,
    Phi,
}

/// `left · z^exponent` or `left · φ_exponent(z)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Factor {
    pub left: CMat,
    pub kind: FactorKind,
    pub exponent: CMat,
}

impl Factor {
    pub fn power(exponent: CMat) -> Self {
        Self {
            left: CMat::identity(exponent.rows()),
            kind: FactorKind::Power,
            exponent,
        }
    }

    pub fn phi(exponent: CMat) -> Self {
        Self {
            left: CMat::identity(exponent.rows()),
            kind: FactorKind::Phi,
            exponent,
        }
    }

    pub fn unit(m: usize) -> Self {
        Self::power(CMat::zeros(m, m))
    }

    /// Value at a point with `ln z = log`.
    pub fn value(&self, log: Complex64) -> Result<CMat, MatrixError> {
        let m = self.exponent.rows();
        let core = match self.kind {
            FactorKind::Power if self.exponent.max_abs() == 0.0 => CMat::identity(m),
            FactorKind::Phi if self.exponent.max_abs() == 0.0 => CMat::identity(m).scale(log),
            FactorKind::Power => funm(&self.exponent, &Exp { c: log })?,
            FactorKind::Phi => funm(&self.exponent, &Phi1 { c: log })?,
        };
        Ok(&self.left * &core)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: CMat,
    pub factors: Vec<Factor>,
    pub tail: CMat,
}

impl Term {
    pub fn new(coeff: CMat, factors: Vec<Factor>, tail: CMat) -> Result<Self, ExprError> {
        let m = coeff.cols();
        for (k, f) in factors.iter().enumerate() {
            if f.exponent.shape() != (m, m) || f.left.shape() != (m, m) {
                return Err(ExprError::TermShape(format!(
                    "slot {} factor has shape {:?}/{:?}, inner dimension is {m}",
                    k + 1,
                    f.left.shape(),
                    f.exponent.shape()
                )));
            }
        }
        if tail.rows() != m {
            return Err(ExprError::TermShape(format!(
                "tail has {} rows, inner dimension is {m}",
                tail.rows()
            )));
        }
        Ok(Self { coeff, factors, tail })
    }

    pub fn inner_dim(&self) -> usize {
        self.coeff.cols()
    }

    /// Absorbs the slot-1 left multiplier into the coefficient.
    fn canonical(mut self) -> Self {
        if let Some(first) = self.factors.first_mut() {
            let m = first.left.rows();
            if first.left != CMat::identity(m) {
                self.coeff = &self.coeff * &first.left;
                first.left = CMat::identity(m);
            }
        }
        self
    }

    fn evaluate_logs(&self, logs: &[Complex64]) -> Result<CMat, MatrixError> {
        let mut acc = self.coeff.clone();
        for (f, log) in self.factors.iter().zip(logs) {
            acc = &acc * &f.value(*log)?;
        }
        Ok(&acc * &self.tail)
    }
}

/// A finite sum of terms in `n` variables, valued in `rows × width` matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct LogExpr {
    n: usize,
    rows: usize,
    width: usize,
    terms: Vec<Term>,
}

impl LogExpr {
    pub fn zero(n: usize, rows: usize, width: usize) -> Self {
        Self {
            n,
            rows,
            width,
            terms: Vec::new(),
        }
    }

    /// A single term with identity tail.
    pub fn monomial(coeff: CMat, factors: Vec<Factor>) -> Result<Self, ExprError> {
        let m = coeff.cols();
        Self::from_term(Term::new(coeff, factors, CMat::identity(m))?)
    }

    pub fn from_term(term: Term) -> Result<Self, ExprError> {
        let term = Term::new(term.coeff, term.factors, term.tail)?;
        Ok(Self {
            n: term.factors.len(),
            rows: term.coeff.rows(),
            width: term.tail.cols(),
            terms: vec![term.canonical()],
        })
    }

    /// The constant expression `value`.
    pub fn constant(n: usize, value: CMat) -> Self {
        let p = value.cols();
        let term = Term {
            coeff: value,
            factors: (0..n).map(|_| Factor::unit(p)).collect(),
            tail: CMat::identity(p),
        };
        Self {
            n,
            rows: term.coeff.rows(),
            width: p,
            terms: vec![term],
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn shape_tag(&self) -> String {
        format!("n={} {}x{}", self.n, self.rows, self.width)
    }

    fn check_compatible(&self, other: &LogExpr) -> Result<(), ExprError> {
        if self.n != other.n || self.rows != other.rows || self.width != other.width {
            return Err(ExprError::DimensionMismatch {
                left: self.shape_tag(),
                right: other.shape_tag(),
            });
        }
        Ok(())
    }

    fn slot(&self, index: usize) -> Result<usize, ExprError> {
        if index == 0 || index > self.n {
            return Err(ExprError::SlotOutOfRange { index, n: self.n });
        }
        Ok(index - 1)
    }

    fn with_terms(&self, terms: Vec<Term>) -> Self {
        Self {
            n: self.n,
            rows: self.rows,
            width: self.width,
            terms: terms.into_iter().map(Term::canonical).collect(),
        }
    }

    pub fn add(&self, other: &LogExpr) -> Result<LogExpr, ExprError> {
        self.check_compatible(other)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(self.with_terms(terms))
    }

    pub fn sub(&self, other: &LogExpr) -> Result<LogExpr, ExprError> {
        self.add(&other.scale(-ONE))
    }

    pub fn scale(&self, s: Complex64) -> LogExpr {
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: t.coeff.scale(s),
                ..t.clone()
            })
            .collect();
        self.with_terms(terms)
    }

    /// `self · m`.
    pub fn right_mul(&self, m: &CMat) -> Result<LogExpr, ExprError> {
        if m.rows() != self.width {
            return Err(ExprError::DimensionMismatch {
                left: self.shape_tag(),
                right: format!("right factor {}x{}", m.rows(), m.cols()),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                tail: &t.tail * m,
                ..t.clone()
            })
            .collect();
        Ok(LogExpr {
            width: m.cols(),
            ..self.with_terms(terms)
        })
    }

    /// `m · self`.
    pub fn left_mul(&self, m: &CMat) -> Result<LogExpr, ExprError> {
        if m.cols() != self.rows {
            return Err(ExprError::DimensionMismatch {
                left: format!("left factor {}x{}", m.rows(), m.cols()),
                right: self.shape_tag(),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|t| Term {
                coeff: m * &t.coeff,
                ..t.clone()
            })
            .collect();
        Ok(LogExpr {
            rows: m.rows(),
            ..self.with_terms(terms)
        })
    }

    /// Multiplies the slot-`index` left multiplier of every term by `m`
    /// on the right (`L ↦ L·m`), which must commute with that slot's exponent.
    pub fn absorb_into_slot(&self, index: usize, m: &CMat) -> Result<LogExpr, ExprError> {
        let s = self.slot(index)?;
        let mut terms = self.terms.clone();
        for t in &mut terms {
            if m.shape() != (t.inner_dim(), t.inner_dim()) {
                return Err(ExprError::TermShape(format!(
                    "slot multiplier {:?} for inner dimension {}",
                    m.shape(),
                    t.inner_dim()
                )));
            }
            t.factors[s].left = &t.factors[s].left * m;
        }
        Ok(self.with_terms(terms))
    }

    /// `∂/∂z_index`.
    pub fn derive(&self, index: usize) -> Result<LogExpr, ExprError> {
        let s = self.slot(index)?;
        let terms = self
            .terms
            .iter()
            .map(|t| {
                let mut t = t.clone();
                let f = &mut t.factors[s];
                let m = f.exponent.rows();
                match f.kind {
                    FactorKind::Power => {
                        f.left = &f.left * &f.exponent;
                        f.exponent = f.exponent.add_identity(-ONE);
                    }
                    FactorKind::Phi => {
                        f.kind = FactorKind::Power;
                        f.exponent = f.exponent.add_identity(-ONE);
                    }
                }
                debug_assert_eq!(f.exponent.rows(), m);
                t
            })
            .collect();
        Ok(self.with_terms(terms))
    }

    /// An antiderivative in `z_index`, exact within the expression class.
    ///
    /// `L z^X` with `B = X + Id` splits along the spectral projector `P₀` of
    /// `B` at eigenvalue 0: the invertible part gives `L (B+P₀)⁻¹ (Id-P₀) z^B`
    /// and the nilpotent part gives `L P₀ φ_{B P₀}`.
    pub fn antiderive(&self, index: usize) -> Result<LogExpr, ExprError> {
        let s = self.slot(index)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let f = &t.factors[s];
            if f.kind == FactorKind::Phi {
                return Err(ExprError::OutOfClass {
                    op: "antiderive",
                    slot: index,
                });
            }
            let m = f.exponent.rows();
            let b = f.exponent.add_identity(ONE);
            let (near_zero, radius) = zero_group(&crate::matrix::spectrum(&b)?);
            if near_zero == 0 {
                let mut nt = t.clone();
                nt.factors[s] = Factor {
                    left: &f.left * &inverse(&b)?,
                    kind: FactorKind::Power,
                    exponent: b,
                };
                terms.push(nt);
            } else if near_zero == m {
                let mut nt = t.clone();
                nt.factors[s] = Factor {
                    left: f.left.clone(),
                    kind: FactorKind::Phi,
                    exponent: b,
                };
                terms.push(nt);
            } else {
                let p0 = funm(
                    &b,
                    &Indicator {
                        target: ZERO,
                        radius,
                    },
                )?;
                let p = &CMat::identity(m) - &p0;
                let mut regular = t.clone();
                regular.factors[s] = Factor {
                    left: &(&f.left * &inverse(&(&b + &p0))?) * &p,
                    kind: FactorKind::Power,
                    exponent: b.clone(),
                };
                let mut logarithmic = t.clone();
                logarithmic.factors[s] = Factor {
                    left: &f.left * &p0,
                    kind: FactorKind::Phi,
                    exponent: &b * &p0,
                };
                terms.push(regular);
                terms.push(logarithmic);
            }
        }
        Ok(self.with_terms(terms))
    }

    /// Multiplication by `z_index^k`.
    pub fn mul_monomial(&self, index: usize, k: i32) -> Result<LogExpr, ExprError> {
        let s = self.slot(index)?;
        if k == 0 {
            return Ok(self.clone());
        }
        let mut terms = self.terms.clone();
        for t in &mut terms {
            let f = &mut t.factors[s];
            if f.kind == FactorKind::Phi {
                return Err(ExprError::OutOfClass {
                    op: "mul_monomial",
                    slot: index,
                });
            }
            f.exponent = f.exponent.add_identity(Complex64::new(k as f64, 0.0));
        }
        Ok(self.with_terms(terms))
    }

    /// Analytic continuation once around `z_index = 0`
    /// (`ln z_index ↦ ln z_index + 2πi`).
    pub fn monodromy(&self, index: usize) -> Result<LogExpr, ExprError> {
        let s = self.slot(index)?;
        let mut terms = Vec::with_capacity(self.terms.len());
        for t in &self.terms {
            let f = &t.factors[s];
            match f.kind {
                FactorKind::Power => {
                    let mut nt = t.clone();
                    nt.factors[s].left = &f.left * &expm_2pii(&f.exponent)?;
                    terms.push(nt);
                }
                FactorKind::Phi => {
                    terms.push(t.clone());
                    let mut extra = t.clone();
                    extra.factors[s] = Factor {
                        left: &f.left * &psi(&f.exponent)?,
                        kind: FactorKind::Power,
                        exponent: f.exponent.clone(),
                    };
                    terms.push(extra);
                }
            }
        }
        Ok(self.with_terms(terms))
    }

    /// Value at `z`, using `ln` with imaginary part in `(0, 2π)`.
    pub fn evaluate(&self, z: &[Complex64]) -> Result<CMat, ExprError> {
        if z.len() != self.n {
            return Err(ExprError::PointArity {
                expected: self.n,
                got: z.len(),
            });
        }
        let logs = z
            .iter()
            .enumerate()
            .map(|(k, zk)| branch_log(*zk).ok_or(ExprError::OnCut { slot: k + 1, z: *zk }))
            .collect::<Result<Vec<_>, _>>()?;
        self.evaluate_with_logs(&logs)
    }

    /// Value with the logarithms of the coordinates supplied directly, which
    /// allows evaluation on other sheets.
    pub fn evaluate_with_logs(&self, logs: &[Complex64]) -> Result<CMat, ExprError> {
        if logs.len() != self.n {
            return Err(ExprError::PointArity {
                expected: self.n,
                got: logs.len(),
            });
        }
        let mut out = CMat::zeros(self.rows, self.width);
        for t in &self.terms {
            out = &out + &t.evaluate_logs(logs)?;
        }
        Ok(out)
    }
}

/// Size and radius of the group of eigenvalues treated as zero.
///
/// A nilpotent Jordan block of size `k` comes back from the eigensolver as
/// a ring of radius about `ε^{1/k}`, so eigenvalues are grouped by single
/// linkage first; a group is zero when its mean is below [`NILPOTENT_TOL`].
fn zero_group(eigs: &[Complex64]) -> (usize, f64) {
    let labels = crate::matrix::funm::link_clusters(eigs, |a, b| {
        (a - b).norm() <= SIGMA1_GROUP_REL * a.norm().max(b.norm()).max(1.0)
    });
    let mut count = 0;
    let mut radius: f64 = 0.0;
    let mut seen = Vec::new();
    for &l in &labels {
        if seen.contains(&l) {
            continue;
        }
        seen.push(l);
        let members: Vec<Complex64> = labels
            .iter()
            .zip(eigs)
            .filter(|(m, _)| **m == l)
            .map(|(_, z)| *z)
            .collect();
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        if mean.norm() <= NILPOTENT_TOL {
            count += members.len();
            radius = members.iter().map(|z| z.norm()).fold(radius, f64::max);
        }
    }
    (count, radius * (1.0 + 1e-9) + f64::MIN_POSITIVE)
}

/// `ln z` with imaginary part in `(0, 2π)`; `None` on the cut `ℝ≥0`.
pub fn branch_log(z: Complex64) -> Option<Complex64> {
    let dist = if z.re >= 0.0 { z.im.abs() } else { z.norm() };
    if dist <= CUT_TOL || !z.re.is_finite() || !z.im.is_finite() {
        return None;
    }
    let mut arg = z.arg();
    if arg < 0.0 {
        arg += 2.0 * PI;
    }
    Some(Complex64::new(z.norm().ln(), arg))
}

/// Pseudo-random points with `0.2 ≤ |z_k| ≤ 5` and argument in
/// `[0.1, 2π - 0.1]`.
pub fn sample_points(n: usize, samples: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..samples)
        .map(|_| (0..n).map(|_| sample_coordinate(&mut rng)).collect())
        .collect()
}

fn sample_coordinate(rng: &mut ChaCha8Rng) -> Complex64 {
    let r: f64 = rng.random_range(0.2..=5.0);
    let theta: f64 = rng.random_range(0.1..=(2.0 * PI - 0.1));
    Complex64::from_polar(r, theta)
}

fn pointwise_residual(a: &CMat, b: &CMat) -> f64 {
    a.dist_fro(b) / (1.0 + a.norm_fro().max(b.norm_fro()))
}

/// Largest sampled value of `‖e1 - e2‖ / (1 + max(‖e1‖, ‖e2‖))`.
pub fn expr_residual(e1: &LogExpr, e2: &LogExpr, samples: usize, seed: u64) -> Result<f64, ExprError> {
    e1.check_compatible(e2)?;
    let mut worst: f64 = 0.0;
    for z in sample_points(e1.n, samples, seed) {
        worst = worst.max(pointwise_residual(&e1.evaluate(&z)?, &e2.evaluate(&z)?));
    }
    Ok(worst)
}

/// Sampled equality: true iff the evaluations agree within `tol·(1 + ‖·‖)`
/// at every sample point.
pub fn expr_equal(e1: &LogExpr, e2: &LogExpr, samples: usize, seed: u64, tol: f64) -> Result<bool, ExprError> {
    Ok(expr_residual(e1, e2, samples, seed)? <= tol)
}

/// Sampled equality modulo functions independent of at least one of the
/// variables in `slots` (sums `Σ_k c_k(z without z_k)`).
///
/// Applies the mixed finite difference over `slots` to `e1 - e2`: each
/// listed coordinate is evaluated at its sample and at a second independent
/// sample, with alternating signs. The result vanishes exactly on such sums.
pub fn expr_residual_mod_constants(
    e1: &LogExpr,
    e2: &LogExpr,
    slots: &[usize],
    samples: usize,
    seed: u64,
) -> Result<f64, ExprError> {
    e1.check_compatible(e2)?;
    for &s in slots {
        e1.slot(s)?;
    }
    let diff = e1.sub(e2)?;
    let base = sample_points(e1.n, samples, seed);
    let alt = sample_points(e1.n, samples, seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut worst: f64 = 0.0;
    for (z, w) in base.iter().zip(&alt) {
        let mut acc = CMat::zeros(e1.rows, e1.width);
        let mut scale: f64 = 0.0;
        for mask in 0..(1usize << slots.len()) {
            let mut p = z.clone();
            for (bit, &s) in slots.iter().enumerate() {
                if mask & (1 << bit) != 0 {
                    p[s - 1] = w[s - 1];
                }
            }
            let sign = if mask.count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            acc = &acc + &diff.evaluate(&p)?.scale(Complex64::new(sign, 0.0));
            scale = scale
                .max(e1.evaluate(&p)?.norm_fro())
                .max(e2.evaluate(&p)?.norm_fro());
        }
        worst = worst.max(acc.norm_fro() / (1.0 + scale));
    }
    Ok(worst)
}

/// Largest discrepancy between two expressions compared term by term
/// (same number of terms, same kinds, matrices compared entrywise relative
/// to `1 + max|entry|`). `None` if the structures differ.
pub fn structural_residual(e1: &LogExpr, e2: &LogExpr) -> Option<f64> {
    if e1.check_compatible(e2).is_err() || e1.terms.len() != e2.terms.len() {
        return None;
    }
    let rel = |a: &CMat, b: &CMat| -> Option<f64> {
        (a.shape() == b.shape()).then(|| a.max_abs_diff(b) / (1.0 + a.max_abs().max(b.max_abs())))
    };
    let mut worst: f64 = 0.0;
    for (a, b) in e1.terms.iter().zip(&e2.terms) {
        worst = worst.max(rel(&a.coeff, &b.coeff)?).max(rel(&a.tail, &b.tail)?);
        for (fa, fb) in a.factors.iter().zip(&b.factors) {
            if fa.kind != fb.kind {
                return None;
            }
            worst = worst
                .max(rel(&fa.left, &fb.left)?)
                .max(rel(&fa.exponent, &fb.exponent)?);
        }
    }
    Some(worst)
}
