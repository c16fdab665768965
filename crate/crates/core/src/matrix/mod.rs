//! Dense complex matrices and the spectral kernels built on them.

mod cmat;
pub mod funm;
mod kernels;
mod quadrature;
pub mod schur;

use num_complex::Complex64;
use thiserror::Error;

pub use cmat::{CMat, ONE, ZERO};
pub use kernels::{
    expm, expm_2pii, in_sigma1, in_sigma1_default, psi, psi_inv, psi_inv_with_tol, sigma1_outliers,
    spectrum, spectrum_in_sigma1, strip_log, strip_log_with_tol, BRANCH_AXIS_TOL, SIGMA1_GROUP_REL,
    SIGMA1_TOL,
};

pub const TWO_PI_I: Complex64 = Complex64::new(0.0, 2.0 * std::f64::consts::PI);

/// Default relative threshold for treating a matrix as singular.
pub const SINGULAR_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MatrixError {
    #[error("data length {len} does not match shape {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("rows have different lengths")]
    RaggedRows,
    #[error("matrix contains a non-finite entry")]
    NonFinite,
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("cannot {op} matrices of shape {left:?} and {right:?}")]
    ShapeMismatch {
        op: &'static str,
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("matrix is numerically singular (smallest singular value {sigma_min:.3e}, threshold {threshold:.3e})")]
    Singular { sigma_min: f64, threshold: f64 },
    #[error("{routine} did not converge within {iterations} iterations")]
    NoConvergence {
        routine: &'static str,
        iterations: usize,
    },
    #[error("eigenvalue {eigenvalue} lies in a cluster that straddles the logarithm cut")]
    ClusterStraddlesCut { eigenvalue: Complex64 },
    #[error("eigenvalue {eigenvalue} is within {distance:.3e} of the nonzero integer {integer}")]
    NearNonzeroInteger {
        eigenvalue: Complex64,
        integer: i64,
        distance: f64,
    },
    #[error("eigenvalue {eigenvalue} is too close to zero for the logarithm")]
    LogOfZero { eigenvalue: Complex64 },
    #[error("{routine} lost accuracy (relative residual {residual:.3e})")]
    Inaccurate { routine: &'static str, residual: f64 },
}

/// Solves `a * x = b` with partial-pivot LU.
pub fn solve(a: &CMat, b: &CMat) -> Result<CMat, MatrixError> {
    let n = a.require_square()?;
    if b.rows() != n {
        return Err(MatrixError::ShapeMismatch {
            op: "solve",
            left: a.shape(),
            right: b.shape(),
        });
    }
    if n == 0 {
        return Ok(CMat::zeros(0, b.cols()));
    }
    check_invertible(a, SINGULAR_TOL)?;
    let lu = a.to_nalgebra().lu();
    let x = lu
        .solve(&b.to_nalgebra())
        .ok_or(MatrixError::Singular {
            sigma_min: 0.0,
            threshold: SINGULAR_TOL,
        })?;
    from_nalgebra(&x)
}

/// Inverse of a square matrix, refusing numerically singular input.
pub fn inverse(a: &CMat) -> Result<CMat, MatrixError> {
    solve(a, &CMat::identity(a.require_square()?))
}

/// Singular values in descending order.
pub fn singular_values(a: &CMat) -> Vec<f64> {
    if a.rows() == 0 || a.cols() == 0 {
        return Vec::new();
    }
    let svd = a.to_nalgebra().svd(false, false);
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Smallest singular value of a square matrix (`+inf` for the empty matrix).
pub fn sigma_min(a: &CMat) -> f64 {
    singular_values(a).last().copied().unwrap_or(f64::INFINITY)
}

pub fn norm2(a: &CMat) -> f64 {
    singular_values(a).first().copied().unwrap_or(0.0)
}

/// Errors unless `sigma_min(a) > tol * max(1, ‖a‖₂)`.
pub fn check_invertible(a: &CMat, tol: f64) -> Result<f64, MatrixError> {
    a.require_square()?;
    let s = singular_values(a);
    let (Some(&smax), Some(&smin)) = (s.first(), s.last()) else {
        return Ok(f64::INFINITY);
    };
    let threshold = tol * smax.max(1.0);
    if smin > threshold && smin.is_finite() {
        Ok(smin)
    } else {
        Err(MatrixError::Singular {
            sigma_min: smin,
            threshold,
        })
    }
}

/// Moore–Penrose pseudo-inverse of a full-rank matrix.
pub fn pseudo_inverse(a: &CMat) -> Result<CMat, MatrixError> {
    let ah = a.adjoint();
    if a.rows() >= a.cols() {
        let g = &ah * a;
        Ok(&inverse(&g)? * &ah)
    } else {
        let g = a * &ah;
        Ok(&ah * &inverse(&g)?)
    }
}

/// Converts from nalgebra, rejecting non-finite entries.
pub fn from_nalgebra(m: &nalgebra::DMatrix<Complex64>) -> Result<CMat, MatrixError> {
    let mut out = CMat::zeros(m.nrows(), m.ncols());
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            out[(i, j)] = m[(i, j)];
        }
    }
    if out.is_finite() {
        Ok(out)
    } else {
        Err(MatrixError::NonFinite)
    }
}

/// `‖a - b‖_F / max(1, ‖b‖_F)`.
pub fn rel_dist(a: &CMat, b: &CMat) -> f64 {
    a.dist_fro(b) / b.norm_fro().max(1.0)
}
