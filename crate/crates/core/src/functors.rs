//! The functors `Q: Qui^Σ1_n → C_n`, `G: C_n → Qui^Σ1_n` and the closed-form
//! prediction of `𝒜∘E`.

use thiserror::Error;

use crate::matrix::{psi, psi_inv, strip_log, CMat, MatrixError, ONE};
use crate::quiver::{validate, Category, Edge, EdgeMaps, QuiverError, QuiverRep, DEFAULT_TOL};
use crate::report::ValidationReport;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctorError {
    #[error("input is not in category {category}: {first}")]
    NotInCategory { category: Category, first: String },
    #[error("edge {edge}: {source}")]
    Edge {
        edge: String,
        #[source]
        source: MatrixError,
    },
    #[error(transparent)]
    Quiver(#[from] QuiverError),
}

fn require(rep: &QuiverRep, category: Category) -> Result<(), FunctorError> {
    let report = validate(rep, category, DEFAULT_TOL);
    match report.violations.first() {
        None => Ok(()),
        Some(v) => Err(FunctorError::NotInCategory {
            category,
            first: format!("{} at {} (residual {:.3e})", v.tag, v.location, v.residual),
        }),
    }
}

fn at(edge: Edge) -> impl Fn(MatrixError) -> FunctorError {
    move |source| FunctorError::Edge {
        edge: edge.to_string(),
        source,
    }
}

/// `ψ(c∘u)∘c`.
pub fn q_backward_left(u: &CMat, c: &CMat) -> Result<CMat, MatrixError> {
    Ok(&psi(&c.try_mul(u)?)? * c)
}

/// `c∘ψ(u∘c)`.
pub fn q_backward_right(u: &CMat, c: &CMat) -> Result<CMat, MatrixError> {
    Ok(c * &psi(&u.try_mul(c)?)?)
}

/// The backward map of `Q`, using whichever form has the smaller inner
/// dimension.
pub fn q_backward(u: &CMat, c: &CMat) -> Result<CMat, MatrixError> {
    if c.rows() <= u.rows() {
        q_backward_left(u, c)
    } else {
        q_backward_right(u, c)
    }
}

/// `(s, x)` for one edge of `G`: `s = strip_log(w∘u + Id)`, `x = ψ(s)⁻¹∘w`.
pub fn g_edge(u: &CMat, w: &CMat) -> Result<(CMat, CMat), MatrixError> {
    let s = strip_log(&w.try_mul(u)?.add_identity(ONE))?;
    let x = &psi_inv(&s)? * w;
    Ok((s, x))
}

/// Forward maps unchanged, backward maps `c ↦ ψ(c∘u)∘c`.
pub fn functor_q(rep: &QuiverRep) -> Result<QuiverRep, FunctorError> {
    require(rep, Category::Sigma1)?;
    let mut maps = Vec::new();
    for (e, m) in rep.edges() {
        let y = q_backward(&m.u, &m.y).map_err(at(*e))?;
        maps.push((*e, EdgeMaps { u: m.u.clone(), y }));
    }
    Ok(QuiverRep::new(rep.n(), rep.dims().to_vec(), maps.into_iter().collect())?)
}

/// Forward maps unchanged, backward maps `w ↦ ψ(s)⁻¹∘w` with
/// `s = strip_log(w∘u + Id)`.
pub fn functor_g(rep: &QuiverRep) -> Result<QuiverRep, FunctorError> {
    require(rep, Category::C)?;
    let mut maps = Vec::new();
    for (e, m) in rep.edges() {
        let (_, x) = g_edge(&m.u, &m.y).map_err(at(*e))?;
        maps.push((*e, EdgeMaps { u: m.u.clone(), y: x }));
    }
    Ok(QuiverRep::new(rep.n(), rep.dims().to_vec(), maps.into_iter().collect())?)
}

/// The solution-side prediction on dual spaces: forward maps `yᵀ`, backward
/// maps `uᵀ∘ψ(yᵀ∘uᵀ)`.
pub fn predict_a(rep: &QuiverRep) -> Result<QuiverRep, FunctorError> {
    require(rep, Category::Sigma1)?;
    let mut maps = Vec::new();
    for (e, m) in rep.edges() {
        let ut = m.u.transpose();
        let yt = m.y.transpose();
        let back = &ut * &psi(&(&yt * &ut)).map_err(at(*e))?;
        maps.push((*e, EdgeMaps { u: yt, y: back }));
    }
    Ok(QuiverRep::new(rep.n(), rep.dims().to_vec(), maps.into_iter().collect())?)
}

/// Largest entrywise deviation relative to `max(1, max|entry|)` of the
/// reference.
pub fn entry_deviation(got: &CMat, want: &CMat) -> f64 {
    if got.shape() != want.shape() {
        return f64::INFINITY;
    }
    got.max_abs_diff(want) / want.max_abs().max(1.0)
}

/// Compares every map of `got` with `want`, recording one check per map.
pub fn compare_reps(report: &mut ValidationReport, tag: &str, got: &QuiverRep, want: &QuiverRep, tol: f64) {
    if got.n() != want.n() || got.dims() != want.dims() {
        report.fail(tag, "", "vertex dimensions differ");
        return;
    }
    for ((e, g), (_, w)) in got.edges().zip(want.edges()) {
        report.record(&format!("{tag}.u"), format!("edge {e}"), entry_deviation(&g.u, &w.u), tol);
        report.record(&format!("{tag}.y"), format!("edge {e}"), entry_deviation(&g.y, &w.y), tol);
    }
}

/// `C`: deviation of `Q(G(rep))` from `rep`; `Sigma1`: deviation of
/// `G(Q(rep))` from `rep`.
pub fn roundtrip_check(rep: &QuiverRep, category: Category, tol: f64) -> Result<ValidationReport, FunctorError> {
    let back = match category {
        Category::C => functor_q(&functor_g(rep)?)?,
        Category::Sigma1 => functor_g(&functor_q(rep)?)?,
        Category::Qui => {
            return Err(FunctorError::NotInCategory {
                category,
                first: "round trips are defined for c and sigma1 only".into(),
            })
        }
    };
    let mut report = ValidationReport::new(format!("roundtrip {category}"), tol);
    compare_reps(&mut report, "roundtrip", &back, rep, tol);
    Ok(report)
}
