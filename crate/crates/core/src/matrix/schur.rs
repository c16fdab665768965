//! Complex Schur decomposition `A = Q T Qᴴ` with unitary `Q` and upper
//! triangular `T`, plus reordering of the diagonal by adjacent swaps.

use num_complex::Complex64;

use super::{CMat, MatrixError, ZERO};

const MAX_SWEEPS_PER_EIGENVALUE: usize = 60;

#[derive(Clone, Debug)]
pub struct Schur {
    pub q: CMat,
    pub t: CMat,
}

impl Schur {
    pub fn eigenvalues(&self) -> Vec<Complex64> {
        self.t.diag()
    }

    /// Reassembles `Q T Qᴴ`.
    pub fn reconstruct(&self) -> CMat {
        &(&self.q * &self.t) * &self.q.adjoint()
    }

    /// Swaps the diagonal entries at `k` and `k + 1` with a unitary rotation.
    pub fn swap(&mut self, k: usize) {
        let a = self.t[(k, k)];
        let b = self.t[(k, k + 1)];
        let c = self.t[(k + 1, k + 1)];
        let w = c - a;
        let norm = (b.norm_sqr() + w.norm_sqr()).sqrt();
        if norm == 0.0 {
            return;
        }
        let v1 = b / norm;
        let v2 = w / norm;
        let n = self.t.rows();
        for j in 0..n {
            let t1 = self.t[(k, j)];
            let t2 = self.t[(k + 1, j)];
            self.t[(k, j)] = v1.conj() * t1 + v2.conj() * t2;
            self.t[(k + 1, j)] = -v2 * t1 + v1 * t2;
        }
        for i in 0..n {
            let t1 = self.t[(i, k)];
            let t2 = self.t[(i, k + 1)];
            self.t[(i, k)] = t1 * v1 + t2 * v2;
            self.t[(i, k + 1)] = -t1 * v2.conj() + t2 * v1.conj();
            let q1 = self.q[(i, k)];
            let q2 = self.q[(i, k + 1)];
            self.q[(i, k)] = q1 * v1 + q2 * v2;
            self.q[(i, k + 1)] = -q1 * v2.conj() + q2 * v1.conj();
        }
        self.t[(k + 1, k)] = ZERO;
        self.t[(k, k)] = c;
        self.t[(k + 1, k + 1)] = a;
    }

    /// Stable-sorts the diagonal by `keys` (one key per diagonal position),
    /// permuting `keys` alongside.
    pub fn reorder(&mut self, keys: &mut [usize]) {
        let n = keys.len();
        for pass in 0..n {
            let mut swapped = false;
            for k in 0..n.saturating_sub(1 + pass) {
                if keys[k] > keys[k + 1] {
                    self.swap(k);
                    keys.swap(k, k + 1);
                    swapped = true;
                }
            }
            if !swapped {
                break;
            }
        }
    }
}

/// Computes the complex Schur form of a square matrix.
pub fn schur(a: &CMat) -> Result<Schur, MatrixError> {
    let n = a.require_square()?;
    if !a.is_finite() {
        return Err(MatrixError::NonFinite);
    }
    let mut h = a.clone();
    let mut q = CMat::identity(n);
    hessenberg(&mut h, &mut q);
    qr_iterate(&mut h, &mut q)?;
    for i in 0..n {
        for j in 0..i {
            h[(i, j)] = ZERO;
        }
    }
    Ok(Schur { q, t: h })
}

fn hessenberg(h: &mut CMat, q: &mut CMat) {
    let n = h.rows();
    for k in 0..n.saturating_sub(2) {
        let mut v: Vec<Complex64> = (k + 1..n).map(|i| h[(i, k)]).collect();
        let alpha = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let phase = if v[0].norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            v[0] / v[0].norm()
        };
        v[0] += phase * alpha;
        let vnorm2: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let beta = 2.0 / vnorm2;
        // H ← P H with P = I - beta v vᴴ acting on rows k+1..n
        for j in 0..n {
            let s: Complex64 = v
                .iter()
                .enumerate()
                .map(|(r, vr)| vr.conj() * h[(k + 1 + r, j)])
                .sum();
            for (r, vr) in v.iter().enumerate() {
                h[(k + 1 + r, j)] -= vr * s * beta;
            }
        }
        // H ← H P, Q ← Q P
        for m in [&mut *h, &mut *q] {
            for i in 0..n {
                let s: Complex64 = v
                    .iter()
                    .enumerate()
                    .map(|(r, vr)| m[(i, k + 1 + r)] * vr)
                    .sum();
                for (r, vr) in v.iter().enumerate() {
                    m[(i, k + 1 + r)] -= s * vr.conj() * beta;
                }
            }
        }
        for i in k + 2..n {
            h[(i, k)] = ZERO;
        }
    }
}

/// Rotation `[[c, s], [-s̄, c]]` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let an = a.norm();
    let bn = b.norm();
    if bn == 0.0 {
        return (1.0, ZERO);
    }
    if an == 0.0 {
        return (0.0, b.conj() / bn);
    }
    let norm = an.hypot(bn);
    (an / norm, (a / an) * b.conj() / norm)
}

fn rotate_rows(h: &mut CMat, k: usize, c: f64, s: Complex64, cols: std::ops::Range<usize>) {
    for j in cols {
        let h1 = h[(k, j)];
        let h2 = h[(k + 1, j)];
        h[(k, j)] = h1 * c + s * h2;
        h[(k + 1, j)] = -s.conj() * h1 + h2 * c;
    }
}

fn rotate_cols(m: &mut CMat, k: usize, c: f64, s: Complex64, rows: std::ops::Range<usize>) {
    for i in rows {
        let m1 = m[(i, k)];
        let m2 = m[(i, k + 1)];
        m[(i, k)] = m1 * c + m2 * s.conj();
        m[(i, k + 1)] = -m1 * s + m2 * c;
    }
}

fn wilkinson_shift(h: &CMat, hi: usize) -> Complex64 {
    let a = h[(hi - 1, hi - 1)];
    let b = h[(hi - 1, hi)];
    let c = h[(hi, hi - 1)];
    let d = h[(hi, hi)];
    let half_tr = (a + d) * 0.5;
    let disc = ((a - d) * 0.5 * ((a - d) * 0.5) + b * c).sqrt();
    let l1 = half_tr + disc;
    let l2 = half_tr - disc;
    if (l1 - d).norm() <= (l2 - d).norm() {
        l1
    } else {
        l2
    }
}

fn qr_iterate(h: &mut CMat, q: &mut CMat) -> Result<(), MatrixError> {
    let n = h.rows();
    if n <= 1 {
        return Ok(());
    }
    let total_norm = h.norm_fro();
    let tiny = f64::MIN_POSITIVE / f64::EPSILON;
    let max_iter = MAX_SWEEPS_PER_EIGENVALUE * n;
    let mut hi = n - 1;
    let mut iter = 0;
    let mut since_deflation = 0;
    while hi > 0 {
        // find the start of the trailing unreduced block
        let mut l = hi;
        while l > 0 {
            let mut scale = h[(l, l)].norm() + h[(l - 1, l - 1)].norm();
            if scale == 0.0 {
                scale = total_norm;
            }
            if h[(l, l - 1)].norm() <= f64::EPSILON * scale || h[(l, l - 1)].norm() < tiny {
                h[(l, l - 1)] = ZERO;
                break;
            }
            l -= 1;
        }
        if l == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        iter += 1;
        since_deflation += 1;
        if iter > max_iter {
            return Err(MatrixError::NoConvergence {
                routine: "complex Schur QR",
                iterations: iter,
            });
        }
        let mu = if since_deflation % 11 == 0 {
            let sub = h[(hi, hi - 1)].norm();
            h[(hi, hi)] + Complex64::new(0.75 * sub, 0.4 * sub)
        } else {
            wilkinson_shift(h, hi)
        };
        // implicit single-shift bulge chase on rows/cols l..=hi
        let (c, s) = givens(h[(l, l)] - mu, h[(l + 1, l)]);
        rotate_rows(h, l, c, s, l..n);
        rotate_cols(h, l, c, s, 0..(l + 3).min(hi + 1));
        rotate_cols(q, l, c, s, 0..n);
        for k in l + 1..hi {
            let (c, s) = givens(h[(k, k - 1)], h[(k + 1, k - 1)]);
            rotate_rows(h, k, c, s, k - 1..n);
            h[(k + 1, k - 1)] = ZERO;
            rotate_cols(h, k, c, s, 0..(k + 3).min(hi + 1));
            rotate_cols(q, k, c, s, 0..n);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> CMat {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut a = CMat::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
        }
        a
    }

    fn check(a: &CMat, s: &Schur) {
        let n = a.rows();
        assert!(s.reconstruct().max_abs_diff(a) < 1e-12 * (1.0 + a.max_abs()) * n as f64);
        let qhq = &s.q.adjoint() * &s.q;
        assert!(qhq.max_abs_diff(&CMat::identity(n)) < 1e-13 * n as f64);
        for i in 0..n {
            for j in 0..i {
                assert_eq!(s.t[(i, j)], ZERO);
            }
        }
    }

    #[test]
    fn random_matrices_decompose() {
        for seed in 0..40 {
            let n = 1 + (seed as usize % 9);
            let a = random(n, seed);
            check(&a, &schur(&a).unwrap());
        }
    }

    #[test]
    fn jordan_and_permutation() {
        let j = CMat::from_real(&[&[2.0, 1.0, 0.0], &[0.0, 2.0, 1.0], &[0.0, 0.0, 2.0]]);
        check(&j, &schur(&j).unwrap());
        let p = CMat::from_real(&[&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
        let s = schur(&p).unwrap();
        check(&p, &s);
        for ev in s.eigenvalues() {
            assert!((ev.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn reorder_preserves_similarity() {
        let a = random(6, 99);
        let mut s = schur(&a).unwrap();
        let before = s.eigenvalues();
        let mut keys: Vec<usize> = (0..6).rev().collect();
        s.reorder(&mut keys);
        check(&a, &s);
        let after = s.eigenvalues();
        for (i, ev) in after.iter().enumerate() {
            assert!((ev - before[5 - i]).norm() < 1e-10);
        }
    }
}
