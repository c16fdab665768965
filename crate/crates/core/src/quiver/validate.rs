use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use super::{Edge, QuiverMorphism, QuiverRep, VertexId};
use crate::matrix::{norm2, sigma1_outliers, sigma_min, spectrum, CMat};
use crate::report::ValidationReport;

/// Default relative tolerance for relation residuals.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Category {
    Qui,
    C,
    Sigma1,
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Category::Qui => "qui",
            Category::C => "c",
            Category::Sigma1 => "sigma1",
        })
    }
}

impl FromStr for Category {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "qui" => Ok(Category::Qui),
            "c" => Ok(Category::C),
            "sigma1" => Ok(Category::Sigma1),
            other => Err(format!("unknown category '{other}' (expected qui, c or sigma1)")),
        }
    }
}

fn relation(report: &mut ValidationReport, tag: &str, loc: String, lhs: &CMat, rhs: &CMat, tol: f64) {
    let residual = lhs.dist_fro(rhs);
    let threshold = tol * (1.0 + lhs.norm_fro() + rhs.norm_fro());
    report.record(tag, loc, residual, threshold);
}

/// Distance from `λ` to the closed strip `0 ≤ ℜλ ≤ 1`, with the half-lines
/// excluded by the boundary rules counted as outside.
fn sigma1_distance(l: Complex64) -> f64 {
    if l.re < 0.0 {
        if l.im >= 0.0 { -l.re } else { l.norm() }
    } else if l.re > 1.0 {
        if l.im < 0.0 { l.re - 1.0 } else { Complex64::new(l.re - 1.0, l.im).norm() }
    } else if l.re == 0.0 && l.im < 0.0 {
        -l.im
    } else if l.re == 1.0 && l.im >= 0.0 {
        l.im
    } else {
        0.0
    }
}

/// Checks the commutation relations (all categories), invertibility of
/// `y∘u + Id` (`C`) or the spectrum of `y∘u` (`Sigma1`).
///
/// Relation residuals are Frobenius norms compared against
/// `tol·(1 + ‖lhs‖ + ‖rhs‖)`.
pub fn validate(rep: &QuiverRep, category: Category, tol: f64) -> ValidationReport {
    let mut report = ValidationReport::new(format!("validate {category}"), tol);
    let n = rep.n();
    for v in VertexId::all(n) {
        let free: Vec<usize> = (1..=n).filter(|&i| !v.contains(i)).collect();
        for (a, &i) in free.iter().enumerate() {
            for &j in &free[a + 1..] {
                let loc = format!("I={v} i={i} j={j}");
                let lhs = rep.u(v.with(i), j) * rep.u(v, i);
                let rhs = rep.u(v.with(j), i) * rep.u(v, j);
                relation(&mut report, "qui.uu", loc.clone(), &lhs, &rhs, tol);
                let lhs = rep.y(v, i) * rep.y(v.with(i), j);
                let rhs = rep.y(v, j) * rep.y(v.with(j), i);
                relation(&mut report, "qui.yy", loc, &lhs, &rhs, tol);
            }
        }
        for &i in &free {
            for &j in &free {
                if i == j {
                    continue;
                }
                let lhs = rep.y(v.with(i), j) * rep.u(v.with(j), i);
                let rhs = rep.u(v, i) * rep.y(v, j);
                relation(&mut report, "qui.yu", format!("I={v} i={i} j={j}"), &lhs, &rhs, tol);
            }
        }
    }
    match category {
        Category::Qui => {}
        Category::C => check_invertible_edges(rep, tol, &mut report),
        Category::Sigma1 => check_sigma1_edges(rep, tol, &mut report),
    }
    report
}

fn check_invertible_edges(rep: &QuiverRep, tol: f64, report: &mut ValidationReport) {
    let limit = if tol > 0.0 { 1.0 / tol } else { f64::MAX };
    for (e, m) in rep.edges() {
        if rep.dim(e.from) == 0 {
            continue;
        }
        let a = (&m.y * &m.u).add_identity(crate::matrix::ONE);
        let smin = sigma_min(&a);
        let cond = if smin > 0.0 { norm2(&a).max(1.0) / smin } else { f64::INFINITY };
        report.record_with(
            "c.invertible",
            format!("edge {e}"),
            cond,
            limit,
            Some(format!("smallest singular value of y*u + Id is {smin:.3e}")),
        );
    }
}

fn check_sigma1_edges(rep: &QuiverRep, tol: f64, report: &mut ValidationReport) {
    for (e, m) in rep.edges() {
        if rep.dim(e.from) == 0 {
            continue;
        }
        let loc = format!("edge {e}");
        match spectrum(&(&m.y * &m.u)) {
            Ok(eigs) => {
                let bad = sigma1_outliers(&eigs, tol);
                let residual = bad.iter().map(|l| sigma1_distance(*l)).fold(0.0, f64::max);
                let detail = (!bad.is_empty()).then(|| {
                    let list: Vec<String> = bad.iter().map(|l| format!("{:.6}{:+.6}i", l.re, l.im)).collect();
                    format!("eigenvalues of y*u outside the strip: {}", list.join(", "))
                });
                report.record_verdict("sigma1.spectrum", loc, residual, tol, bad.is_empty(), detail);
            }
            Err(err) => report.fail("sigma1.spectrum", loc, err.to_string()),
        }
    }
}

/// Checks `u'∘h_I = h_{I∪i}∘u` and `h_I∘y = y'∘h_{I∪i}` on every edge.
pub fn validate_morphism(
    src: &QuiverRep,
    dst: &QuiverRep,
    m: &QuiverMorphism,
    tol: f64,
) -> ValidationReport {
    let mut report = ValidationReport::new("validate morphism", tol);
    if src.n() != dst.n() || m.n() != src.n() {
        report.fail(
            "morphism.shape",
            "",
            format!("n mismatch: source {}, target {}, morphism {}", src.n(), dst.n(), m.n()),
        );
        return report;
    }
    let mut shapes_ok = true;
    for v in VertexId::all(src.n()) {
        let want = (dst.dim(v), src.dim(v));
        let got = m.component(v).shape();
        if got != want {
            shapes_ok = false;
            report.fail(
                "morphism.shape",
                format!("I={v}"),
                format!("component has shape {got:?}, expected {want:?}"),
            );
        }
    }
    if !shapes_ok {
        return report;
    }
    for e in Edge::all(src.n()) {
        let (h0, h1) = (m.component(e.from), m.component(e.to()));
        let (s, d) = (src.edge(e), dst.edge(e));
        relation(&mut report, "morphism.u", format!("edge {e}"), &(&d.u * h0), &(h1 * &s.u), tol);
        relation(&mut report, "morphism.y", format!("edge {e}"), &(h0 * &s.y), &(&d.y * h1), tol);
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quiver::EdgeMaps;

    #[test]
    fn n1_is_always_qui() {
        let rep = QuiverRep::from_fn(1, vec![2, 3], |_| {
            Ok(EdgeMaps {
                u: CMat::from_real(&[&[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]]),
                y: CMat::from_real(&[&[1.0, 0.0, 7.0], &[0.0, 1.0, 2.0]]),
            })
        })
        .unwrap();
        let r = validate(&rep, Category::Qui, DEFAULT_TOL);
        assert!(r.passed());
        assert!(r.checks.is_empty());
    }

    #[test]
    fn sigma1_distance_cases() {
        assert_eq!(sigma1_distance(Complex64::new(0.5, 3.0)), 0.0);
        assert_eq!(sigma1_distance(Complex64::new(-0.5, 1.0)), 0.5);
        assert_eq!(sigma1_distance(Complex64::new(1.0, 0.25)), 0.25);
        assert_eq!(sigma1_distance(Complex64::new(0.0, -0.25)), 0.25);
    }

    #[test]
    fn category_round_trips_through_strings() {
        for c in [Category::Qui, Category::C, Category::Sigma1] {
            assert_eq!(c.to_string().parse::<Category>().unwrap(), c);
        }
        assert!("foo".parse::<Category>().is_err());
    }
}
