//! Solution data of the quiver D-module attached to a `Qui^Σ1_n` object:
//! the fundamental solutions `η_I(α) = α·𝓕_I`, the reconstruction of the
//! full family `(φ^K)` from `φ^I`, and checks of the canonical and
//! variation maps by symbolic monodromy.
//!
//! Row vectors `α` act on the left; canonical and variation matrices act on
//! rows by right multiplication.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::functors::{compare_reps, entry_deviation, functor_q, predict_a, FunctorError};
use crate::logexpr::{
    expr_residual, expr_residual_mod_constants, sample_points, structural_residual, ExprError, Factor,
    LogExpr,
};
use crate::matrix::{inverse, psi, sigma1_outliers, sigma_min, spectrum, CMat, MatrixError, ONE, SIGMA1_TOL};
use crate::quiver::{dualize, validate, Category, EdgeMaps, QuiverError, QuiverRep, VertexId, DEFAULT_TOL};
use crate::report::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolutionError {
    #[error("representation is not in Qui^Σ1: {0}")]
    NotSigma1(String),
    #[error("vertex {vertex} is not a vertex of the {n}-cube")]
    BadVertex { vertex: String, n: usize },
    #[error("alpha has {got} columns, vertex {vertex} has dimension {expected}")]
    AlphaLength {
        vertex: String,
        expected: usize,
        got: usize,
    },
    #[error("cannot step {direction} {i} from {vertex} with base vertex {base}")]
    BadStep {
        vertex: String,
        base: String,
        direction: Direction,
        i: usize,
    },
    #[error("vertex {0} has no expression yet")]
    NotPopulated(String),
    #[error("spectrum is not contained in Σ: {0}")]
    NotInSigma(String),
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error(transparent)]
    Quiver(#[from] QuiverError),
    #[error(transparent)]
    Functor(#[from] FunctorError),
}

fn require_sigma1(rep: &QuiverRep) -> Result<(), SolutionError> {
    let report = validate(rep, Category::Sigma1, DEFAULT_TOL);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(SolutionError::NotSigma1(format!(
            "{} at {} (residual {:.3e})",
            v.tag, v.location, v.residual
        ))),
    }
}

fn check_vertex(rep: &QuiverRep, v: VertexId) -> Result<(), SolutionError> {
    if v.index() >= rep.dims().len() {
        return Err(SolutionError::BadVertex {
            vertex: v.to_string(),
            n: rep.n(),
        });
    }
    Ok(())
}

fn check_edge(rep: &QuiverRep, v: VertexId, i: usize) -> Result<(), SolutionError> {
    check_vertex(rep, v)?;
    if i == 0 || i > rep.n() || v.contains(i) {
        return Err(SolutionError::BadVertex {
            vertex: format!("{v} ∪ {{{i}}}"),
            n: rep.n(),
        });
    }
    Ok(())
}

/// Exponent of slot `k` in `𝓕_I`: `𝓑_{I,I∪k}` for `k ∉ I`,
/// `𝓑_{I,I∖k} − Id` for `k ∈ I`.
pub fn slot_exponent(rep: &QuiverRep, vertex: VertexId, k: usize) -> CMat {
    if vertex.contains(k) {
        rep.calb(vertex, vertex.without(k))
            .expect("adjacent vertices")
            .add_identity(-ONE)
    } else {
        rep.calb(vertex, vertex.with(k)).expect("adjacent vertices")
    }
}

fn eta_unchecked(rep: &QuiverRep, vertex: VertexId, alpha: &CMat) -> Result<LogExpr, SolutionError> {
    let d = rep.dim(vertex);
    if alpha.cols() != d {
        return Err(SolutionError::AlphaLength {
            vertex: vertex.to_string(),
            expected: d,
            got: alpha.cols(),
        });
    }
    let factors = (1..=rep.n())
        .map(|k| Factor::power(slot_exponent(rep, vertex, k)))
        .collect();
    Ok(LogExpr::monomial(alpha.clone(), factors)?)
}

/// `η_I(α) = α·𝓕_I`; `alpha` may hold several rows.
pub fn build_eta(rep: &QuiverRep, vertex: VertexId, alpha: &CMat) -> Result<LogExpr, SolutionError> {
    require_sigma1(rep)?;
    check_vertex(rep, vertex)?;
    eta_unchecked(rep, vertex, alpha)
}

/// `𝓕_I` itself (`α = Id`).
pub fn fundamental(rep: &QuiverRep, vertex: VertexId) -> Result<LogExpr, SolutionError> {
    build_eta(rep, vertex, &CMat::identity(rep.dim(vertex)))
}

/// `Θ_{I,i} = ψ(𝓑_{I∪i,I})·B_{I∪i,I} = ψ(u∘y)∘u`.
pub fn theta(rep: &QuiverRep, vertex: VertexId, i: usize) -> Result<CMat, SolutionError> {
    check_edge(rep, vertex, i)?;
    let (u, y) = (rep.u(vertex, i), rep.y(vertex, i));
    Ok(&psi(&(u * y))? * u)
}

/// Checks `z_l ∂_l η = η·X_l` for every slot, where `X_l` is the slot
/// exponent of `𝓕_I` computed from `rep`: numerically at sample points and
/// structurally against `η` with `X_l` absorbed into slot `l`.
pub fn verify_pde_expr(
    rep: &QuiverRep,
    vertex: VertexId,
    eta: &LogExpr,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ValidationReport, SolutionError> {
    check_vertex(rep, vertex)?;
    let mut report = ValidationReport::new(format!("pde I={vertex}"), tol).with_seed(seed);
    for l in 1..=rep.n() {
        let x = slot_exponent(rep, vertex, l);
        let loc = format!("I={vertex} slot {l}");
        let lhs = eta.derive(l)?.mul_monomial(l, 1)?;
        let numeric = expr_residual(&lhs, &eta.right_mul(&x)?, samples, seed)?;
        report.record("pde.numeric", loc.clone(), numeric, tol);
        match structural_residual(&lhs, &eta.absorb_into_slot(l, &x)?) {
            Some(r) => {
                report.record("pde.symbolic", loc, r, tol);
            }
            None => report.fail("pde.symbolic", loc, "term structure differs"),
        }
    }
    Ok(report)
}

pub fn verify_pde(
    rep: &QuiverRep,
    vertex: VertexId,
    alpha: &CMat,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ValidationReport, SolutionError> {
    let eta = build_eta(rep, vertex, alpha)?;
    verify_pde_expr(rep, vertex, &eta, samples, seed, tol)
}

/// `φ^{K∪i} = z_i⁻¹·φ^K∘B_{K,K∪i}` for `i ∉ K`.
pub fn z_step(rep: &QuiverRep, expr: &LogExpr, k: VertexId, i: usize) -> Result<LogExpr, SolutionError> {
    check_edge(rep, k, i)?;
    Ok(expr.mul_monomial(i, -1)?.right_mul(rep.y(k, i))?)
}

/// `φ^{K∖i} = ∂_i⁻¹(φ^K∘B_{K,K∖i})` for `i ∈ K`.
pub fn antiderivative_step(
    rep: &QuiverRep,
    expr: &LogExpr,
    k: VertexId,
    i: usize,
) -> Result<LogExpr, SolutionError> {
    check_edge(rep, k.without(i), i)?;
    if !k.contains(i) {
        return Err(SolutionError::BadVertex {
            vertex: format!("{k} ∖ {{{i}}}"),
            n: rep.n(),
        });
    }
    Ok(expr.right_mul(rep.u(k.without(i), i))?.antiderive(i)?)
}

/// Direction of one reconstruction step: `Into` goes from `K` to `K ∪ {i}`,
/// `OutOf` from `K` to `K ∖ {i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Into,
    OutOf,
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Into => "into",
            Direction::OutOf => "outof",
        })
    }
}

impl FromStr for Direction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "into" => Ok(Direction::Into),
            "outof" => Ok(Direction::OutOf),
            other => Err(format!("unknown direction '{other}' (expected into or outof)")),
        }
    }
}

/// Steps from `from` to `to`: first remove `from ∖ to`, then add
/// `to ∖ from`, each in ascending order.
pub fn canonical_path(from: VertexId, to: VertexId) -> Vec<(VertexId, Direction, usize)> {
    let mut out = Vec::new();
    let mut cur = from;
    for i in from.elements() {
        if !to.contains(i) {
            out.push((cur, Direction::OutOf, i));
            cur = cur.without(i);
        }
    }
    for i in to.elements() {
        if !from.contains(i) {
            out.push((cur, Direction::Into, i));
            cur = cur.with(i);
        }
    }
    out
}

/// The family `(φ^K)` determined by `φ^I = η_I(α)`, filled in step by step.
#[derive(Clone, Debug)]
pub struct SolutionFamily {
    rep: QuiverRep,
    base: VertexId,
    alpha: CMat,
    exprs: BTreeMap<VertexId, LogExpr>,
}

impl SolutionFamily {
    pub fn new(rep: &QuiverRep, base: VertexId, alpha: &CMat) -> Result<Self, SolutionError> {
        let eta = build_eta(rep, base, alpha)?;
        Ok(Self {
            rep: rep.clone(),
            base,
            alpha: alpha.clone(),
            exprs: BTreeMap::from([(base, eta)]),
        })
    }

    pub fn rep(&self) -> &QuiverRep {
        &self.rep
    }

    pub fn base(&self) -> VertexId {
        self.base
    }

    pub fn alpha(&self) -> &CMat {
        &self.alpha
    }

    pub fn expr(&self, v: VertexId) -> Option<&LogExpr> {
        self.exprs.get(&v)
    }

    pub fn populated(&self) -> impl Iterator<Item = (&VertexId, &LogExpr)> {
        self.exprs.iter()
    }

    /// One step away from the base vertex: a `z`-step for `i ∉ I`, an
    /// antiderivative step for `i ∈ I`.
    pub fn extend_edge(mut self, k: VertexId, direction: Direction, i: usize) -> Result<Self, SolutionError> {
        let expr = self
            .exprs
            .get(&k)
            .ok_or_else(|| SolutionError::NotPopulated(k.to_string()))?;
        let bad = || SolutionError::BadStep {
            vertex: k.to_string(),
            base: self.base.to_string(),
            direction,
            i,
        };
        if i == 0 || i > self.rep.n() {
            return Err(bad());
        }
        let (target, value) = match direction {
            Direction::Into if !k.contains(i) && !self.base.contains(i) => {
                (k.with(i), z_step(&self.rep, expr, k, i)?)
            }
            Direction::OutOf if k.contains(i) && self.base.contains(i) => {
                (k.without(i), antiderivative_step(&self.rep, expr, k, i)?)
            }
            _ => return Err(bad()),
        };
        self.exprs.insert(target, value);
        Ok(self)
    }

    /// Populates `target` and every vertex on the canonical path to it.
    pub fn extend_to(mut self, target: VertexId) -> Result<Self, SolutionError> {
        check_vertex(&self.rep, target)?;
        for (k, dir, i) in canonical_path(self.base, target) {
            let next = match dir {
                Direction::Into => k.with(i),
                Direction::OutOf => k.without(i),
            };
            if !self.exprs.contains_key(&next) {
                self = self.extend_edge(k, dir, i)?;
            }
        }
        Ok(self)
    }

    pub fn extend_all(mut self) -> Result<Self, SolutionError> {
        for v in VertexId::all(self.rep.n()) {
            self = self.extend_to(v)?;
        }
        Ok(self)
    }

    /// Checks `∂_j φ^J = φ^{J∪j}∘B_{J∪j,J}` and `z_j φ^{J∪j} = φ^J∘B_{J,J∪j}`
    /// for every populated neighbouring pair, modulo functions independent
    /// of a variable in `I ∖ J` (the integration constants of the
    /// antiderivative steps).
    pub fn relation_report(&self, samples: usize, seed: u64, tol: f64) -> Result<ValidationReport, SolutionError> {
        let mut report = ValidationReport::new(format!("family I={}", self.base), tol).with_seed(seed);
        let n = self.rep.n();
        for (&j_set, phi) in &self.exprs {
            for j in 1..=n {
                if j_set.contains(j) {
                    continue;
                }
                let Some(phi_up) = self.exprs.get(&j_set.with(j)) else { continue };
                let slots: Vec<usize> = self.base.elements().into_iter().filter(|m| !j_set.contains(*m)).collect();
                let loc = format!("J={j_set} j={j}");
                let d_lhs = phi.derive(j)?;
                let d_rhs = phi_up.right_mul(self.rep.u(j_set, j))?;
                let r = compare(&d_lhs, &d_rhs, &slots, samples, seed)?;
                report.record("family.d", loc.clone(), r, tol);
                let z_lhs = phi_up.mul_monomial(j, 1)?;
                let z_rhs = phi.right_mul(self.rep.y(j_set, j))?;
                let r = compare(&z_lhs, &z_rhs, &slots, samples, seed)?;
                report.record("family.z", loc, r, tol);
            }
        }
        Ok(report)
    }
}

fn compare(a: &LogExpr, b: &LogExpr, slots: &[usize], samples: usize, seed: u64) -> Result<f64, ExprError> {
    if slots.is_empty() {
        expr_residual(a, b, samples, seed)
    } else {
        expr_residual_mod_constants(a, b, slots, samples, seed)
    }
}

fn step_from_base(
    rep: &QuiverRep,
    base: VertexId,
    expr: &LogExpr,
    k: VertexId,
    i: usize,
) -> Result<(VertexId, LogExpr), SolutionError> {
    if base.contains(i) {
        Ok((k.without(i), antiderivative_step(rep, expr, k, i)?))
    } else {
        Ok((k.with(i), z_step(rep, expr, k, i)?))
    }
}

/// Reconstruction checks for one `(I, α)`: the relations of the full
/// family, single-edge round trips and order independence of every
/// two-step extension from `I`.
pub fn verify_alg(
    rep: &QuiverRep,
    base: VertexId,
    alpha: &CMat,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ValidationReport, SolutionError> {
    let family = SolutionFamily::new(rep, base, alpha)?.extend_all()?;
    let mut report = ValidationReport::new(format!("alg I={base}"), tol).with_seed(seed);
    report.merge(family.relation_report(samples, seed, tol)?, "");
    let eta = family.expr(base).expect("base populated").clone();
    let n = rep.n();
    for i in 1..=n {
        let loc = format!("I={base} i={i}");
        let r = if base.contains(i) {
            let down = antiderivative_step(rep, &eta, base, i)?;
            let back = down.right_mul(rep.y(base.without(i), i))?;
            expr_residual_mod_constants(&eta.mul_monomial(i, 1)?, &back, &[i], samples, seed)?
        } else {
            let up = z_step(rep, &eta, base, i)?;
            let back = antiderivative_step(rep, &up, base.with(i), i)?;
            expr_residual_mod_constants(&back, &eta, &[i], samples, seed)?
        };
        report.record("alg.roundtrip", loc, r, tol);
    }
    for i in 1..=n {
        for j in i + 1..=n {
            let (k1, a1) = step_from_base(rep, base, &eta, base, i)?;
            let (_, a) = step_from_base(rep, base, &a1, k1, j)?;
            let (k2, b1) = step_from_base(rep, base, &eta, base, j)?;
            let (_, b) = step_from_base(rep, base, &b1, k2, i)?;
            let slots: Vec<usize> = [i, j].into_iter().filter(|s| base.contains(*s)).collect();
            let r = compare(&a, &b, &slots, samples, seed)?;
            report.record("alg.order", format!("I={base} steps {i},{j}"), r, tol);
        }
    }
    Ok(report)
}

/// Checks that `β` is the image of `α` under the canonical map at edge
/// `(I, i)`: `η_{I∪i}(β) = z_i⁻¹·η_I(α)∘B_{I,I∪i}` and
/// `∂_i⁻¹(η_{I∪i}(β)∘B_{I∪i,I}) = η_I(α)` up to a `z_i`-constant, whose
/// derivative form `∂_i η_I(α) = η_{I∪i}(β)∘B_{I∪i,I}` is checked exactly.
#[allow(clippy::too_many_arguments)]
pub fn verify_can_with(
    rep: &QuiverRep,
    vertex: VertexId,
    i: usize,
    alpha: &CMat,
    beta: &CMat,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ValidationReport, SolutionError> {
    check_edge(rep, vertex, i)?;
    let up_v = vertex.with(i);
    let mut report = ValidationReport::new(format!("can edge ({vertex},{i})"), tol).with_seed(seed);
    let loc = format!("edge ({vertex},{i})");
    let eta = eta_unchecked(rep, vertex, alpha)?;
    let up = eta_unchecked(rep, up_v, beta)?;
    let pushed = eta.mul_monomial(i, -1)?.right_mul(rep.y(vertex, i))?;
    report.record("can.z", loc.clone(), expr_residual(&up, &pushed, samples, seed)?, tol);
    let pulled = up.right_mul(rep.u(vertex, i))?;
    report.record(
        "can.derivative",
        loc.clone(),
        expr_residual(&eta.derive(i)?, &pulled, samples, seed)?,
        tol,
    );
    let back = pulled.antiderive(i)?;
    report.record(
        "can.antiderivative",
        loc,
        expr_residual_mod_constants(&back, &eta, &[i], samples, seed)?,
        tol,
    );
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn verify_can(
    rep: &QuiverRep,
    vertex: VertexId,
    i: usize,
    alpha: &CMat,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ValidationReport, SolutionError> {
    require_sigma1(rep)?;
    check_edge(rep, vertex, i)?;
    let beta = alpha.try_mul(rep.y(vertex, i))?;
    verify_can_with(rep, vertex, i, alpha, &beta, samples, seed, tol)
}

/// Checks the variation at edge `(I, i)` against a claimed matrix `Θ`:
/// `M_i φ^{I∪i} − φ^{I∪i} = z_i⁻¹·η_I(α·Θ)∘B_{I,I∪i}` and
/// `M_i φ^I − φ^I = η_I(α·Θ)` with `φ^{I∪i} = η_{I∪i}(α)` and
/// `φ^I = ∂_i⁻¹(φ^{I∪i}∘B_{I∪i,I})`.
#[allow(clippy::too_many_arguments)]
pub fn verify_var_with(
    rep: &QuiverRep,
    vertex: VertexId,
    i: usize,
    alpha_up: &CMat,
    theta_claimed: &CMat,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ValidationReport, SolutionError> {
    check_edge(rep, vertex, i)?;
    let mut report = ValidationReport::new(format!("var edge ({vertex},{i})"), tol).with_seed(seed);
    let loc = format!("edge ({vertex},{i})");
    let up = eta_unchecked(rep, vertex.with(i), alpha_up)?;
    let image = eta_unchecked(rep, vertex, &alpha_up.try_mul(theta_claimed)?)?;
    let var_up = up.monodromy(i)?.sub(&up)?;
    let want_up = image.mul_monomial(i, -1)?.right_mul(rep.y(vertex, i))?;
    report.record("var.up", loc.clone(), expr_residual(&var_up, &want_up, samples, seed)?, tol);
    let down = up.right_mul(rep.u(vertex, i))?.antiderive(i)?;
    let var_down = down.monodromy(i)?.sub(&down)?;
    report.record("var.down", loc, expr_residual(&var_down, &image, samples, seed)?, tol);
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
pub fn verify_var(
    rep: &QuiverRep,
    vertex: VertexId,
    i: usize,
    alpha_up: &CMat,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<ValidationReport, SolutionError> {
    require_sigma1(rep)?;
    let th = theta(rep, vertex, i)?;
    verify_var_with(rep, vertex, i, alpha_up, &th, samples, seed, tol)
}

/// Invertibility of `var(∂⁻¹ z^A)` at sample points, for `A` with spectrum
/// in `Σ = Σ1 − 1`. The residual is `1/σ_min`, compared against `1/tol`.
pub fn verify_var_invertible(a: &CMat, samples: usize, seed: u64, tol: f64) -> Result<ValidationReport, SolutionError> {
    let m = a.require_square()?;
    let bad = sigma1_outliers(&spectrum(&a.add_identity(ONE))?, SIGMA1_TOL);
    if !bad.is_empty() {
        let list: Vec<String> = bad.iter().map(|l| format!("{:.6}{:+.6}i", l.re - 1.0, l.im)).collect();
        return Err(SolutionError::NotInSigma(list.join(", ")));
    }
    let mut report = ValidationReport::new("variation invertibility", tol).with_seed(seed);
    if m == 0 {
        return Ok(report);
    }
    let e = LogExpr::monomial(CMat::identity(m), vec![Factor::power(a.clone())])?.antiderive(1)?;
    let v = e.monodromy(1)?.sub(&e)?;
    let limit = if tol > 0.0 { 1.0 / tol } else { f64::MAX };
    for (k, z) in sample_points(1, samples, seed).iter().enumerate() {
        let smin = sigma_min(&v.evaluate(z)?);
        let residual = if smin > 0.0 { 1.0 / smin } else { f64::INFINITY };
        report.record_with(
            "var.invertible",
            format!("sample {k}"),
            residual,
            limit,
            Some(format!("smallest singular value {smin:.3e}")),
        );
    }
    Ok(report)
}

/// Canonical and variation matrices at edge `(I, i)` read off from the
/// solution data at the point `z`:
/// `can = z_i⁻¹·𝓕_I(z)·B_{I,I∪i}·𝓕_{I∪i}(z)⁻¹` and
/// `var = (M_i φ − φ)(z)·𝓕_I(z)⁻¹` with `φ = ∂_i⁻¹(𝓕_{I∪i}∘B_{I∪i,I})`.
pub fn extract_can_var(
    rep: &QuiverRep,
    vertex: VertexId,
    i: usize,
    z: &[num_complex::Complex64],
) -> Result<(CMat, CMat), SolutionError> {
    check_edge(rep, vertex, i)?;
    let up_v = vertex.with(i);
    let (d0, d1) = (rep.dim(vertex), rep.dim(up_v));
    if d0 == 0 || d1 == 0 {
        return Ok((CMat::zeros(d0, d1), CMat::zeros(d1, d0)));
    }
    let f0 = eta_unchecked(rep, vertex, &CMat::identity(d0))?;
    let f1 = eta_unchecked(rep, up_v, &CMat::identity(d1))?;
    let f0z = f0.evaluate(z)?;
    let f1z = f1.evaluate(z)?;
    let pushed = z_step(rep, &f0, vertex, i)?.evaluate(z)?;
    let can = &pushed * &inverse(&f1z)?;
    let down = f1.right_mul(rep.u(vertex, i))?.antiderive(i)?;
    let var = down.monodromy(i)?.sub(&down)?.evaluate(z)?;
    let var = &var * &inverse(&f0z)?;
    Ok((can, var))
}

/// Certifies can/var on every edge for a basis of `α`'s, extracts their
/// matrices from the solution data, assembles the resulting `C_n` object on
/// dual spaces and compares it with `predict_a(rep)` and `Q(D(rep))`.
pub fn verify_main_theorem(rep: &QuiverRep, trials: usize, seed: u64, tol: f64) -> Result<ValidationReport, SolutionError> {
    require_sigma1(rep)?;
    let samples = trials.max(1);
    let mut report = ValidationReport::new("main theorem", tol).with_seed(seed);
    let points = sample_points(rep.n(), samples, seed);
    let mut maps = BTreeMap::new();
    for (e, m) in rep.edges() {
        let (v, i) = (e.from, e.dir);
        let (d0, d1) = (rep.dim(v), rep.dim(e.to()));
        for k in 0..d0 {
            let alpha = unit_row(d0, k);
            let beta = alpha.try_mul(&m.y)?;
            let sub = verify_can_with(rep, v, i, &alpha, &beta, samples, seed, tol)?;
            report.merge(sub, &format!("alpha {k}:"));
        }
        let th = theta(rep, v, i)?;
        for k in 0..d1 {
            let alpha = unit_row(d1, k);
            let sub = verify_var_with(rep, v, i, &alpha, &th, samples, seed, tol)?;
            report.merge(sub, &format!("alpha {k}:"));
        }
        let mut first: Option<(CMat, CMat)> = None;
        for (p, z) in points.iter().enumerate() {
            let (can, var) = extract_can_var(rep, v, i, z)?;
            let loc = format!("edge {e} sample {p}");
            report.record("main.can", loc.clone(), entry_deviation(&can, &m.y), tol);
            report.record("main.var", loc, entry_deviation(&var, &th), tol);
            if first.is_none() {
                first = Some((can, var));
            }
        }
        let (can, var) = first.expect("at least one sample");
        maps.insert(
            *e,
            EdgeMaps {
                u: can.transpose(),
                y: var.transpose(),
            },
        );
    }
    let assembled = QuiverRep::new(rep.n(), rep.dims().to_vec(), maps)?;
    compare_reps(&mut report, "main.predict", &assembled, &predict_a(rep)?, tol);
    compare_reps(&mut report, "main.q_dual", &assembled, &functor_q(&dualize(rep))?, tol);
    report.merge(validate(&assembled, Category::C, DEFAULT_TOL), "assembled");
    Ok(report)
}

/// The `k`-th standard basis row vector of length `d`.
pub fn unit_row(d: usize, k: usize) -> CMat {
    let mut a = CMat::zeros(1, d);
    a[(0, k)] = ONE;
    a
}
