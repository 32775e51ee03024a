//! Symmetric eigendecomposition by cyclic Jacobi rotations.
//!
//! Covariance matrices in this crate are at most 64x64, where Jacobi is
//! simple, robust and plenty fast. Zero-variance directions fall out
//! naturally: untouched rows keep eigenvalue 0 and their canonical basis
//! vector from the identity-initialized accumulator.

use crate::error::{Error, Result};
use crate::tensor::Mat;

/// Result of [`sym_eig`]: eigenvalues sorted descending, eigenvector i in
/// column i of `vectors`.
#[derive(Debug, Clone)]
pub struct SymEigResult {
    pub eigenvalues: Vec<f64>,
    pub vectors: Mat,
}

const SYMMETRY_TOL: f64 = 1e-9;
const OFF_DIAG_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix.
///
/// Runs cyclic Jacobi sweeps until the largest off-diagonal magnitude drops
/// to 1e-10 (relative to the matrix scale) or 100 sweeps elapse. Eigenpairs
/// come back sorted by descending eigenvalue, each eigenvector oriented so
/// its largest-magnitude component is positive (ties to the lowest index).
pub fn sym_eig(c: &Mat) -> Result<SymEigResult> {
    if c.rows != c.cols {
        return Err(Error::Shape(format!(
            "sym_eig needs a square matrix, got {}x{}",
            c.rows, c.cols
        )));
    }
    let n = c.rows;
    if n == 0 {
        return Err(Error::Shape("sym_eig on empty matrix".into()));
    }
    if c.data.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation("sym_eig input contains NaN/Inf".into()));
    }
    let scale = c.max_abs().max(1.0);
    for i in 0..n {
        for j in (i + 1)..n {
            if (c.get(i, j) - c.get(j, i)).abs() > SYMMETRY_TOL * scale {
                return Err(Error::Validation(format!(
                    "sym_eig input asymmetric at ({i},{j}): {} vs {}",
                    c.get(i, j),
                    c.get(j, i)
                )));
            }
        }
    }

    let mut a = c.clone();
    // symmetrize exactly so rotations see one consistent value
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let mut v = Mat::identity(n);
    let tol = OFF_DIAG_TOL * scale;

    let mut converged = n == 1;
    for _ in 0..MAX_SWEEPS {
        let off = max_off_diag(&a);
        if off <= tol {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                // rotation angle zeroing a[p][q]
                let theta = 0.5 * (a.get(q, q) - a.get(p, p)) / apq;
                let t = {
                    let s = if theta >= 0.0 { 1.0 } else { -1.0 };
                    s / (theta.abs() + (theta * theta + 1.0).sqrt())
                };
                let cos = 1.0 / (t * t + 1.0).sqrt();
                let sin = t * cos;

                for k in 0..n {
                    let akp = a.get(k, p);
                    let akq = a.get(k, q);
                    a.set(k, p, cos * akp - sin * akq);
                    a.set(k, q, sin * akp + cos * akq);
                }
                for k in 0..n {
                    let apk = a.get(p, k);
                    let aqk = a.get(q, k);
                    a.set(p, k, cos * apk - sin * aqk);
                    a.set(q, k, sin * apk + cos * aqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, cos * vkp - sin * vkq);
                    v.set(k, q, sin * vkp + cos * vkq);
                }
            }
        }
    }
    if !converged && max_off_diag(&a) > tol {
        return Err(Error::Numerical(format!(
            "Jacobi did not converge in {MAX_SWEEPS} sweeps; residual off-diagonal {:.3e}",
            max_off_diag(&a)
        )));
    }

    let mut order: Vec<usize> = (0..n).collect();
    let diag: Vec<f64> = (0..n).map(|i| a.get(i, i)).collect();
    order.sort_by(|&i, &j| diag[j].partial_cmp(&diag[i]).unwrap().then(i.cmp(&j)));

    let mut eigenvalues = Vec::with_capacity(n);
    let mut vectors = Mat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvalues.push(diag[src]);
        // sign convention: largest-magnitude component positive, ties to
        // the lowest index
        let mut best = 0;
        let mut best_abs = 0.0;
        for r in 0..n {
            let mag = v.get(r, src).abs();
            if mag > best_abs + 1e-300 {
                best_abs = mag;
                best = r;
            }
        }
        let flip = if v.get(best, src) < 0.0 { -1.0 } else { 1.0 };
        for r in 0..n {
            vectors.set(r, dst, flip * v.get(r, src));
        }
    }

    Ok(SymEigResult {
        eigenvalues,
        vectors,
    })
}

fn max_off_diag(a: &Mat) -> f64 {
    let n = a.rows;
    let mut m = 0.0f64;
    for i in 0..n {
        for j in (i + 1)..n {
            m = m.max(a.get(i, j).abs());
        }
    }
    m
}

impl SymEigResult {
    /// Max-norm of V^T V - I.
    pub fn orthogonality_residual(&self) -> f64 {
        let vt = self.vectors.transpose();
        let g = vt.matmul(&self.vectors);
        let n = g.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let expect = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((g.get(i, j) - expect).abs());
            }
        }
        worst
    }

    /// Max-norm of V diag(lambda) V^T - C.
    pub fn reconstruction_residual(&self, c: &Mat) -> f64 {
        let n = self.vectors.rows;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let mut acc = 0.0;
                for k in 0..n {
                    acc += self.vectors.get(i, k) * self.eigenvalues[k] * self.vectors.get(j, k);
                }
                worst = worst.max((acc - c.get(i, j)).abs());
            }
        }
        worst
    }
}
