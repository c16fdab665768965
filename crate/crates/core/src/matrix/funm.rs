//! Primary matrix functions by the block Schur–Parlett method.
//!
//! Eigenvalues are grouped into clusters, the Schur form is reordered so each
//! cluster is a contiguous diagonal block, diagonal blocks are evaluated by a
//! Taylor series about the cluster mean and off-diagonal blocks follow from
//! the block Parlett recurrence (one triangular Sylvester solve per block).

use num_complex::Complex64;

use super::quadrature::exp_moments;
use super::schur::schur;
use super::{CMat, MatrixError, ONE, ZERO};

/// Single-linkage distance used by the default clustering.
pub const CLUSTER_DELTA: f64 = 0.1;

const TAYLOR_STAGES: [usize; 2] = [48, 240];

/// A scalar function that can be lifted to matrices by [`funm`].
pub trait ScalarFunction {
    /// Cluster label for each eigenvalue; labels only need to be distinct
    /// between clusters.
    fn clusters(&self, eigenvalues: &[Complex64]) -> Result<Vec<usize>, MatrixError> {
        Ok(link_clusters(eigenvalues, |a, b| {
            (a - b).norm() <= CLUSTER_DELTA
        }))
    }

    /// Taylor coefficients `f^(k)(center)/k!`, `k < len`, valid on the
    /// cluster formed by `members`.
    fn taylor(
        &self,
        center: Complex64,
        members: &[Complex64],
        len: usize,
    ) -> Result<Vec<Complex64>, MatrixError>;
}

/// Connected components of the graph on `values` with an edge wherever
/// `linked` holds.
pub fn link_clusters(
    values: &[Complex64],
    linked: impl Fn(Complex64, Complex64) -> bool,
) -> Vec<usize> {
    link_indices(values.len(), |i, j| linked(values[i], values[j]))
}

/// Connected components of the graph on `0..n`; returns a label per vertex.
pub fn link_indices(n: usize, linked: impl Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut label: Vec<usize> = (0..n).collect();
    fn root(label: &mut [usize], mut i: usize) -> usize {
        while label[i] != i {
            label[i] = label[label[i]];
            i = label[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            if linked(i, j) {
                let (ri, rj) = (root(&mut label, i), root(&mut label, j));
                if ri != rj {
                    label[ri.max(rj)] = ri.min(rj);
                }
            }
        }
    }
    (0..n).map(|i| root(&mut label, i)).collect()
}

/// Evaluates `f(A)`.
pub fn funm(a: &CMat, f: &dyn ScalarFunction) -> Result<CMat, MatrixError> {
    let n = a.require_square()?;
    if n == 0 {
        return Ok(CMat::zeros(0, 0));
    }
    let mut s = schur(a)?;
    let labels = f.clusters(&s.eigenvalues())?;
    let mut keys = first_appearance_order(&labels);
    s.reorder(&mut keys);
    let mut starts = vec![0];
    for k in 1..n {
        if keys[k] != keys[k - 1] {
            starts.push(k);
        }
    }
    starts.push(n);
    let ft = parlett(&s.t, &starts, f)?;
    let out = &(&s.q * &ft) * &s.q.adjoint();
    if out.is_finite() {
        Ok(out)
    } else {
        Err(MatrixError::NonFinite)
    }
}

fn first_appearance_order(labels: &[usize]) -> Vec<usize> {
    let mut seen: Vec<usize> = Vec::new();
    labels
        .iter()
        .map(|l| match seen.iter().position(|s| s == l) {
            Some(p) => p,
            None => {
                seen.push(*l);
                seen.len() - 1
            }
        })
        .collect()
}

fn parlett(t: &CMat, starts: &[usize], f: &dyn ScalarFunction) -> Result<CMat, MatrixError> {
    let n = t.rows();
    let p = starts.len() - 1;
    let block = |i: usize, j: usize| t.submatrix(starts[i], starts[i + 1], starts[j], starts[j + 1]);
    let mut fb: Vec<Vec<Option<CMat>>> = vec![vec![None; p]; p];
    for i in 0..p {
        fb[i][i] = Some(taylor_block(&block(i, i), f)?);
    }
    for d in 1..p {
        for i in 0..p - d {
            let j = i + d;
            let tii = block(i, i);
            let tjj = block(j, j);
            let tij = block(i, j);
            let fii = fb[i][i].as_ref().expect("diagonal block");
            let fjj = fb[j][j].as_ref().expect("diagonal block");
            let mut rhs = &(fii * &tij) - &(&tij * fjj);
            for k in i + 1..j {
                let fik = fb[i][k].as_ref().expect("computed earlier");
                let fkj = fb[k][j].as_ref().expect("computed earlier");
                rhs = &rhs + &(&(fik * &block(k, j)) - &(&block(i, k) * fkj));
            }
            fb[i][j] = Some(sylvester_upper(&tii, &tjj, &rhs));
        }
    }
    let mut out = CMat::zeros(n, n);
    for i in 0..p {
        for j in i..p {
            out.set_submatrix(starts[i], starts[j], fb[i][j].as_ref().expect("filled"));
        }
    }
    Ok(out)
}

/// Solves `A X - X B = C` for upper triangular `A`, `B` with disjoint spectra.
fn sylvester_upper(a: &CMat, b: &CMat, c: &CMat) -> CMat {
    let (m, q) = c.shape();
    let mut x = CMat::zeros(m, q);
    for col in 0..q {
        let mut rhs: Vec<Complex64> = (0..m).map(|r| c[(r, col)]).collect();
        for l in 0..col {
            let blc = b[(l, col)];
            if blc != ZERO {
                for (r, v) in rhs.iter_mut().enumerate() {
                    *v += x[(r, l)] * blc;
                }
            }
        }
        let shift = b[(col, col)];
        for r in (0..m).rev() {
            let mut acc = rhs[r];
            for k in r + 1..m {
                acc -= a[(r, k)] * x[(k, col)];
            }
            x[(r, col)] = acc / (a[(r, r)] - shift);
        }
    }
    x
}

fn taylor_block(tb: &CMat, f: &dyn ScalarFunction) -> Result<CMat, MatrixError> {
    let m = tb.rows();
    let members = tb.diag();
    let center = members.iter().sum::<Complex64>() / m as f64;
    if m == 1 {
        let c = f.taylor(center, &members, 1)?;
        return Ok(CMat::scalar(c[0]));
    }
    let nmat = tb.add_identity(-center);
    for len in TAYLOR_STAGES {
        let coeffs = f.taylor(center, &members, len)?;
        let mut out = CMat::identity(m).scale(coeffs[0]);
        let mut power = CMat::identity(m);
        let mut small_run = 0;
        let mut converged = false;
        for (k, ck) in coeffs.iter().enumerate().skip(1) {
            power = &power * &nmat;
            let term = power.scale(*ck);
            out = &out + &term;
            let tn = term.max_abs();
            if k >= m && tn <= f64::EPSILON * out.max_abs() {
                small_run += 1;
                if small_run >= 2 || power.max_abs() == 0.0 {
                    converged = true;
                    break;
                }
            } else {
                small_run = 0;
            }
            if !out.is_finite() {
                break;
            }
        }
        if converged {
            return Ok(out);
        }
    }
    Err(MatrixError::NoConvergence {
        routine: "in-cluster Taylor series",
        iterations: TAYLOR_STAGES[TAYLOR_STAGES.len() - 1],
    })
}

fn factorial_scaled_powers(c: Complex64, len: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(len);
    let mut v = ONE;
    for k in 0..len {
        if k > 0 {
            v = v * c / k as f64;
        }
        out.push(v);
    }
    out
}

/// `λ ↦ e^{cλ}`.
#[derive(Clone, Copy, Debug)]
pub struct Exp {
    pub c: Complex64,
}

impl ScalarFunction for Exp {
    fn taylor(&self, center: Complex64, _: &[Complex64], len: usize) -> Result<Vec<Complex64>, MatrixError> {
        let e = (self.c * center).exp();
        Ok(factorial_scaled_powers(self.c, len)
            .into_iter()
            .map(|v| v * e)
            .collect())
    }
}

/// `λ ↦ (e^{cλ} - 1)/λ`, extended by `c` at `λ = 0`.
///
/// Coefficients come from `c · g(cλ)` with `g(w) = ∫₀¹ e^{wt} dt`, so there
/// is no cancellation near `λ = 0`.
#[derive(Clone, Copy, Debug)]
pub struct Phi1 {
    pub c: Complex64,
}

impl ScalarFunction for Phi1 {
    fn taylor(&self, center: Complex64, _: &[Complex64], len: usize) -> Result<Vec<Complex64>, MatrixError> {
        let moments = exp_moments(self.c * center, len);
        Ok(factorial_scaled_powers(self.c, len)
            .into_iter()
            .zip(moments)
            .map(|(v, mom)| v * self.c * mom)
            .collect())
    }
}

/// Indicator of the eigenvalues within `radius` of `target`; lifts to the
/// spectral projector onto the corresponding generalized eigenspace.
#[derive(Clone, Copy, Debug)]
pub struct Indicator {
    pub target: Complex64,
    pub radius: f64,
}

impl Indicator {
    fn contains(&self, z: Complex64) -> bool {
        (z - self.target).norm() <= self.radius
    }
}

impl ScalarFunction for Indicator {
    fn clusters(&self, eigenvalues: &[Complex64]) -> Result<Vec<usize>, MatrixError> {
        Ok(eigenvalues
            .iter()
            .map(|z| usize::from(!self.contains(*z)))
            .collect())
    }

    fn taylor(&self, _: Complex64, members: &[Complex64], len: usize) -> Result<Vec<Complex64>, MatrixError> {
        let mut out = vec![ZERO; len];
        if members.first().is_some_and(|z| self.contains(*z)) {
            out[0] = ONE;
        }
        Ok(out)
    }
}
