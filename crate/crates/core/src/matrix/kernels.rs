use std::f64::consts::PI;

use num_complex::Complex64;

use super::funm::{funm, link_clusters, link_indices, Exp, Phi1, ScalarFunction, CLUSTER_DELTA};
use super::schur::schur;
use super::{check_invertible, inverse, CMat, MatrixError, SINGULAR_TOL, TWO_PI_I};

/// Default tolerance for Σ1 membership checks.
pub const SIGMA1_TOL: f64 = 1e-9;

/// Eigenvalues of `f` closer than this (relative to `max(1, |μ|)`) to the
/// positive real axis are treated as lying on it.
pub const BRANCH_AXIS_TOL: f64 = 1e-9;

/// Relative backward error assumed for computed eigenvalues. A defective
/// eigenvalue `c` of multiplicity `k` comes back as a ring of radius about
/// `(DEFECT_BACKWARD·‖F‖·‖N‖^(k-1))^(1/k)`, `N` the strictly upper part of
/// the Schur form; groups that tight are treated as one eigenvalue when
/// choosing a log branch.
const DEFECT_BACKWARD: f64 = 1e-12;

/// Norms entering the defect radius.
#[derive(Clone, Copy, Debug)]
struct DefectScale {
    norm: f64,
    departure: f64,
}

impl DefectScale {
    fn limit(&self, center: Complex64, k: usize) -> f64 {
        let c = center.norm();
        let k = k as f64;
        let ring = (DEFECT_BACKWARD * c.max(self.norm)).powf(1.0 / k) * c.max(self.departure).powf((k - 1.0) / k);
        ring.min(CLUSTER_DELTA * c)
    }
}

/// Largest tolerated mismatch between the series branch of a cluster and the
/// direct branch of one of its eigenvalues.
const BRANCH_CONSISTENCY: f64 = 1e-6;

/// Membership in the strip `0 ≤ ℜλ ≤ 1` with the boundary rules
/// `ℜλ = 0 ⇒ ℑλ ≥ 0` and `ℜλ = 1 ⇒ ℑλ < 0`, every inequality relaxed by `tol`.
///
/// "On the boundary" means within `tol` of it; the strict rule at `ℜλ = 1`
/// becomes `ℑλ < tol`.
pub fn in_sigma1(lambda: Complex64, tol: f64) -> bool {
    let (re, im) = (lambda.re, lambda.im);
    if !re.is_finite() || !im.is_finite() {
        return false;
    }
    if re < -tol || re > 1.0 + tol {
        return false;
    }
    if re.abs() <= tol && im < -tol {
        return false;
    }
    if (re - 1.0).abs() <= tol && im >= tol {
        return false;
    }
    true
}

pub fn in_sigma1_default(lambda: Complex64) -> bool {
    in_sigma1(lambda, SIGMA1_TOL)
}

/// Single-linkage radius (relative to `max(1, |λ|)`) under which computed
/// eigenvalues are averaged before a Σ1 test.
pub const SIGMA1_GROUP_REL: f64 = 1e-3;

/// Eigenvalue groups whose mean fails [`in_sigma1`].
///
/// A defective eigenvalue comes back from a backward-stable eigensolver
/// split into a small ring whose mean is accurate to working precision, so
/// the test is applied to group means. Σ1 is convex, so averaging members of
/// Σ1 never produces a point outside it.
pub fn sigma1_outliers(eigenvalues: &[Complex64], tol: f64) -> Vec<Complex64> {
    let labels = link_clusters(eigenvalues, |a, b| {
        (a - b).norm() <= SIGMA1_GROUP_REL * a.norm().max(b.norm()).max(1.0)
    });
    let mut out = Vec::new();
    let mut seen = Vec::new();
    for &l in &labels {
        if seen.contains(&l) {
            continue;
        }
        seen.push(l);
        let members: Vec<Complex64> = labels
            .iter()
            .zip(eigenvalues)
            .filter(|(m, _)| **m == l)
            .map(|(_, z)| *z)
            .collect();
        let mean = members.iter().sum::<Complex64>() / members.len() as f64;
        if !in_sigma1(mean, tol) {
            out.push(mean);
        }
    }
    out
}

/// Whether the spectrum of `a` lies in Σ1 up to `tol`, judged on grouped
/// eigenvalues.
pub fn spectrum_in_sigma1(a: &CMat, tol: f64) -> Result<bool, MatrixError> {
    Ok(sigma1_outliers(&spectrum(a)?, tol).is_empty())
}

/// Eigenvalues with algebraic multiplicity, read off the complex Schur form.
pub fn spectrum(a: &CMat) -> Result<Vec<Complex64>, MatrixError> {
    a.require_square()?;
    Ok(schur(a)?.eigenvalues())
}

/// `e^{A}`.
pub fn expm(a: &CMat) -> Result<CMat, MatrixError> {
    funm(a, &Exp { c: Complex64::new(1.0, 0.0) })
}

/// `e^{2πiA}`.
pub fn expm_2pii(a: &CMat) -> Result<CMat, MatrixError> {
    funm(a, &Exp { c: TWO_PI_I })
}

/// `ψ(A)` for `ψ(λ) = (e^{2πiλ} - 1)/λ`, `ψ(0) = 2πi`.
pub fn psi(a: &CMat) -> Result<CMat, MatrixError> {
    funm(a, &Phi1 { c: TWO_PI_I })
}

/// `ψ(A)⁻¹`, refusing eigenvalues within `tol` of a nonzero integer.
pub fn psi_inv_with_tol(a: &CMat, tol: f64) -> Result<CMat, MatrixError> {
    for ev in spectrum(a)? {
        let k = ev.re.round();
        let distance = (ev - k).norm();
        if k != 0.0 && distance <= tol {
            return Err(MatrixError::NearNonzeroInteger {
                eigenvalue: ev,
                integer: k as i64,
                distance,
            });
        }
    }
    inverse(&psi(a)?)
}

pub fn psi_inv(a: &CMat) -> Result<CMat, MatrixError> {
    psi_inv_with_tol(a, SINGULAR_TOL)
}

/// Largest accepted `‖e^{2πiG} - F‖/‖F‖` before [`strip_log`] refuses.
pub const LOG_RESIDUAL_MAX: f64 = 1e-6;

/// Residual below which the first grouping attempt is accepted as is.
const LOG_RESIDUAL_CLEAN: f64 = 1e-11;

/// The unique `g` with `e^{2πig} = f` and spectrum in Σ1.
pub fn strip_log(f: &CMat) -> Result<CMat, MatrixError> {
    strip_log_with_tol(f, SINGULAR_TOL)
}

/// As [`strip_log`], with `tol` the relative invertibility threshold.
///
/// Computed eigenvalues near the cut are first taken at face value. If that
/// does not reproduce `f`, they are regrouped with a defect radius scaled by
/// `‖F‖` and the departure from normality, and the better result is kept.
pub fn strip_log_with_tol(f: &CMat, tol: f64) -> Result<CMat, MatrixError> {
    f.require_square()?;
    check_invertible(f, tol)?;
    if f.rows() == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    let fine = log_attempt(f, DefectScale { norm: 0.0, departure: 0.0 });
    if let Ok((_, residual)) = &fine {
        if *residual <= LOG_RESIDUAL_CLEAN {
            return fine.map(|(g, _)| g);
        }
    }
    let norm = f.norm_fro();
    let diagonal: f64 = spectrum(f)?.iter().map(|l| l.norm_sqr()).sum();
    let coarse = log_attempt(
        f,
        DefectScale {
            norm,
            departure: (norm * norm - diagonal).max(0.0).sqrt(),
        },
    );
    let (g, residual) = match (fine, coarse) {
        (Ok(a), Ok(b)) => {
            if a.1 <= b.1 {
                a
            } else {
                b
            }
        }
        (Ok(a), Err(_)) => a,
        (Err(_), Ok(b)) => b,
        (Err(_), Err(e)) => return Err(e),
    };
    if residual <= LOG_RESIDUAL_MAX {
        Ok(g)
    } else {
        Err(MatrixError::Inaccurate { routine: "strip_log", residual })
    }
}

fn log_attempt(f: &CMat, scale: DefectScale) -> Result<(CMat, f64), MatrixError> {
    let g = funm(f, &StripLog { scale })?;
    let residual = match expm_2pii(&g) {
        Ok(back) => back.dist_fro(f) / f.norm_fro(),
        Err(_) => f64::INFINITY,
    };
    Ok((g, residual))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Sheet {
    /// At or just above the positive real axis, where `θ` starts at 0.
    Upper,
    /// Just below the positive real axis, where `θ` ends at 2π.
    Lower,
    /// Away from the cut.
    Free,
    /// A split defective eigenvalue reaching across the cut off its axis.
    Straddle,
}

#[derive(Clone, Debug)]
struct Group {
    members: Vec<usize>,
    center: Complex64,
    sheet: Sheet,
}

/// A group whose mean is on the axis takes the sheet the boundary rules
/// give it; a group that reaches across the axis without being centred on
/// it has no well-defined branch.
fn sheet_of(center: Complex64, radius: f64) -> Sheet {
    if center.re <= 0.0 {
        return Sheet::Free;
    }
    let band = BRANCH_AXIS_TOL * center.norm().max(1.0);
    if center.im.abs() <= band {
        if center.norm() <= 1.0 + band {
            Sheet::Upper
        } else {
            Sheet::Lower
        }
    } else if center.im.abs() <= radius {
        Sheet::Straddle
    } else if center.im > 0.0 {
        Sheet::Upper
    } else {
        Sheet::Lower
    }
}

/// Argument of `mu` on the branch selected by `sheet`.
fn branch_angle(mu: Complex64, sheet: Sheet) -> f64 {
    let a = mu.arg();
    match sheet {
        Sheet::Upper => a,
        Sheet::Lower => {
            if a < PI / 2.0 {
                a + 2.0 * PI
            } else {
                a
            }
        }
        Sheet::Free | Sheet::Straddle => {
            if a < 0.0 {
                a + 2.0 * PI
            } else {
                a
            }
        }
    }
}

fn mean_and_radius(values: &[Complex64], members: &[usize]) -> (Complex64, f64) {
    let center = members.iter().map(|&i| values[i]).sum::<Complex64>() / members.len() as f64;
    let radius = members.iter().map(|&i| (values[i] - center).norm()).fold(0.0, f64::max);
    (center, radius)
}

/// Splits `members` at its largest single-linkage gap until every part is
/// tight enough to be one defective eigenvalue of its size.
fn split_defects(values: &[Complex64], scale: DefectScale, members: Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let (center, radius) = mean_and_radius(values, &members);
    let limit = scale.limit(center, members.len());
    if members.len() == 1 || radius <= limit {
        out.push(members);
        return;
    }
    let points: Vec<Complex64> = members.iter().map(|&i| values[i]).collect();
    let widest = mst_widest_edge(&points);
    let labels = link_clusters(&points, |a, b| (a - b).norm() < widest);
    let mut parts: Vec<(usize, Vec<usize>)> = Vec::new();
    for (k, l) in labels.iter().enumerate() {
        match parts.iter_mut().find(|(label, _)| label == l) {
            Some((_, part)) => part.push(members[k]),
            None => parts.push((*l, vec![members[k]])),
        }
    }
    if parts.len() == 1 {
        out.push(members);
        return;
    }
    for (_, part) in parts {
        split_defects(values, scale, part, out);
    }
}

/// Longest edge of a minimum spanning tree (Prim).
fn mst_widest_edge(points: &[Complex64]) -> f64 {
    let n = points.len();
    let mut dist: Vec<f64> = points.iter().map(|p| (p - points[0]).norm()).collect();
    let mut done = vec![false; n];
    done[0] = true;
    let mut widest: f64 = 0.0;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&i| !done[i])
            .min_by(|&a, &b| dist[a].total_cmp(&dist[b]))
            .expect("unvisited point");
        widest = widest.max(dist[next]);
        done[next] = true;
        for i in 0..n {
            if !done[i] {
                dist[i] = dist[i].min((points[i] - points[next]).norm());
            }
        }
    }
    widest
}

fn defect_groups(values: &[Complex64], scale: DefectScale) -> Result<Vec<Group>, MatrixError> {
    if let Some(z) = values.iter().find(|z| z.norm() == 0.0) {
        return Err(MatrixError::LogOfZero { eigenvalue: *z });
    }
    let mut sets = Vec::new();
    if !values.is_empty() {
        split_defects(values, scale, (0..values.len()).collect(), &mut sets);
    }
    Ok(sets
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            let (center, radius) = mean_and_radius(values, &members);
            Group {
                sheet: sheet_of(center, radius),
                members,
                center,
            }
        })
        .collect())
}

fn opposite(a: Sheet, b: Sheet) -> bool {
    matches!((a, b), (Sheet::Upper, Sheet::Lower) | (Sheet::Lower, Sheet::Upper))
}

/// `μ ↦ (ln|μ| + iθ(μ))/(2πi)` with `θ` chosen per the Σ1 boundary rules.
struct StripLog {
    scale: DefectScale,
}

impl ScalarFunction for StripLog {
    fn clusters(&self, eigenvalues: &[Complex64]) -> Result<Vec<usize>, MatrixError> {
        let groups = defect_groups(eigenvalues, self.scale)?;
        let centers: Vec<Complex64> = groups.iter().map(|g| g.center).collect();
        let sheets: Vec<Sheet> = groups.iter().map(|g| g.sheet).collect();
        let group_labels = link_indices(groups.len(), |i, j| {
            let (ci, cj) = (centers[i], centers[j]);
            (ci - cj).norm() <= CLUSTER_DELTA * ci.norm().min(cj.norm()) && !opposite(sheets[i], sheets[j])
        });
        let mut labels = vec![0; eigenvalues.len()];
        for (g, group) in groups.iter().enumerate() {
            for &m in &group.members {
                labels[m] = group_labels[g];
            }
        }
        Ok(labels)
    }

    fn taylor(&self, center: Complex64, members: &[Complex64], len: usize) -> Result<Vec<Complex64>, MatrixError> {
        let groups = defect_groups(members, self.scale)?;
        if let Some(g) = groups.iter().find(|g| g.sheet == Sheet::Straddle) {
            return Err(MatrixError::ClusterStraddlesCut { eigenvalue: g.center });
        }
        let upper = groups.iter().find(|g| g.sheet == Sheet::Upper);
        let lower = groups.iter().find(|g| g.sheet == Sheet::Lower);
        let sheet = match (upper, lower) {
            (Some(_), Some(g)) => {
                return Err(MatrixError::ClusterStraddlesCut { eigenvalue: g.center })
            }
            (Some(_), None) => Sheet::Upper,
            (None, Some(_)) => Sheet::Lower,
            (None, None) => Sheet::Free,
        };
        let theta_c = branch_angle(center, sheet);
        for g in &groups {
            let series = theta_c + (g.center / center).arg();
            let direct = branch_angle(g.center, g.sheet);
            if (series - direct).abs() > BRANCH_CONSISTENCY {
                return Err(MatrixError::ClusterStraddlesCut { eigenvalue: g.center });
            }
        }
        let mut out = Vec::with_capacity(len);
        out.push(Complex64::new(center.norm().ln(), theta_c) / TWO_PI_I);
        let inv = 1.0 / center;
        let mut p = Complex64::new(1.0, 0.0);
        for k in 1..len {
            p *= inv;
            let sign = if k % 2 == 1 { 1.0 } else { -1.0 };
            out.push(p * (sign / k as f64) / TWO_PI_I);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{ONE, ZERO};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn sigma1_membership_examples() {
        assert!(in_sigma1(ZERO, 0.0));
        assert!(!in_sigma1(ONE, 0.0));
        assert!(in_sigma1(c(0.5, -3.0), 0.0));
        assert!(in_sigma1(c(1.0, -0.1), 0.0));
        assert!(!in_sigma1(c(0.0, -0.1), 0.0));
        assert!(!in_sigma1(c(1.2, 0.0), 1e-9));
        assert!(in_sigma1(c(-1e-10, 0.5), 1e-9));
        assert!(!in_sigma1(c(-1e-10, -0.5), 1e-9));
    }

    #[test]
    fn spectrum_examples() {
        let ev = spectrum(&CMat::identity(2)).unwrap();
        assert_eq!(ev, vec![ONE, ONE]);
        let ev = spectrum(&CMat::from_real(&[&[0.0, 1.0], &[0.0, 0.0]])).unwrap();
        assert_eq!(ev, vec![ZERO, ZERO]);
        let mut ev = spectrum(&CMat::from_real(&[&[0.3, 0.0], &[0.0, -1.0]])).unwrap();
        ev.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((ev[0] - c(-1.0, 0.0)).norm() < 1e-15 && (ev[1] - c(0.3, 0.0)).norm() < 1e-15);
        assert!(spectrum(&CMat::zeros(2, 3)).is_err());
    }

    #[test]
    fn expm_2pii_examples() {
        let e = expm_2pii(&CMat::identity(2)).unwrap();
        assert!(e.max_abs_diff(&CMat::identity(2)) < 1e-14);
        let e = expm_2pii(&CMat::from_real(&[&[0.5]])).unwrap();
        assert!((e[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-15);
        let n = CMat::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let e = expm_2pii(&n).unwrap();
        let want = CMat::from_rows(&[vec![ONE, TWO_PI_I], vec![ZERO, ONE]]).unwrap();
        assert_eq!(e, want);
    }

    #[test]
    fn strip_log_examples() {
        let g = strip_log(&CMat::identity(3)).unwrap();
        assert!(g.max_abs() < 1e-15);
        let g = strip_log(&CMat::from_real(&[&[-1.0]])).unwrap();
        assert!((g[(0, 0)] - c(0.5, 0.0)).norm() < 1e-15);
        let g = strip_log(&CMat::from_real(&[&[2.0]])).unwrap();
        let want = c(1.0, -(2f64.ln()) / (2.0 * PI));
        assert!((g[(0, 0)] - want).norm() < 1e-15);
        let back = expm_2pii(&g).unwrap();
        assert!((back[(0, 0)] - c(2.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn strip_log_of_unipotent_jordan() {
        let f = CMat::from_rows(&[vec![ONE, TWO_PI_I], vec![ZERO, ONE]]).unwrap();
        let g = strip_log(&f).unwrap();
        let n = CMat::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(g.max_abs_diff(&n) < 1e-14);
    }

    #[test]
    fn strip_log_rejects_singular() {
        let f = CMat::from_real(&[&[1.0, 1.0], &[1.0, 1.0]]);
        assert!(matches!(strip_log(&f), Err(MatrixError::Singular { .. })));
    }

    #[test]
    fn strip_log_separates_sheets() {
        // eigenvalues just above and just below the cut go to opposite edges
        let f = CMat::from_diag(&[c(2.0, 1e-4), c(2.0, -1e-4), c(0.5, 0.0), c(3.0, 0.0)]);
        let g = strip_log(&f).unwrap();
        let d = g.diag();
        assert!(d[0].re < 1e-4 && d[1].re > 1.0 - 1e-4);
        assert!(d[2].re.abs() < 1e-15 && d[2].im > 0.0);
        assert!((d[3].re - 1.0).abs() < 1e-15 && d[3].im < 0.0);
        assert!(expm_2pii(&g).unwrap().max_abs_diff(&f) < 1e-12);
    }

    #[test]
    fn psi_examples() {
        let p = psi(&CMat::zeros(1, 1)).unwrap();
        assert!((p[(0, 0)] - TWO_PI_I).norm() < 1e-14);
        let p = psi(&CMat::from_real(&[&[0.5]])).unwrap();
        assert!((p[(0, 0)] - c(-4.0, 0.0)).norm() < 1e-14);
        let n = CMat::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let p = psi(&n).unwrap();
        let want = CMat::from_rows(&[vec![TWO_PI_I, c(-2.0 * PI * PI, 0.0)], vec![ZERO, TWO_PI_I]]).unwrap();
        assert!(p.max_abs_diff(&want) < 1e-13);
    }

    #[test]
    fn psi_inv_examples() {
        let p = psi_inv(&CMat::zeros(1, 1)).unwrap();
        assert!((p[(0, 0)] - 1.0 / TWO_PI_I).norm() < 1e-15);
        assert!(matches!(
            psi_inv(&CMat::from_real(&[&[1.0]])),
            Err(MatrixError::NearNonzeroInteger { integer: 1, .. })
        ));
        let a = CMat::from_rows(&[vec![TWO_PI_I, c(-2.0 * PI * PI, 0.0)], vec![ZERO, TWO_PI_I]]).unwrap();
        let inv = inverse(&a).unwrap();
        let want = CMat::from_rows(&[vec![1.0 / TWO_PI_I, c(-0.5, 0.0)], vec![ZERO, 1.0 / TWO_PI_I]]).unwrap();
        assert!(inv.max_abs_diff(&want) < 1e-15);
        let n = CMat::from_real(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(psi_inv(&n).unwrap().max_abs_diff(&want) < 1e-14);
    }
}
