//! Symmetric eigendecomposition via cyclic Jacobi rotations.
//!
//! The covariance matrices here are small (tens of columns), where Jacobi is
//! simple, deterministic, and accurate to near machine precision.

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Eigenvalues (descending) with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Column `j` is the eigenvector for `eigenvalues[j]`, sign-normalized so
    /// the entry of largest magnitude is positive (ties: lowest index wins).
    pub eigenvectors: Matrix,
}

const MAX_SWEEPS: usize = 100;

/// Decompose a symmetric matrix `S = V diag(l) V^T`.
///
/// Rejects matrices asymmetric beyond `1e-10` relative to their largest entry
/// or larger than 1000x1000.
pub fn sym_eigen(s: &Matrix) -> Result<EigenDecomposition> {
    let n = s.rows();
    if n != s.cols() {
        return Err(Error::Validation(format!(
            "matrix is {}x{}, not square",
            s.rows(),
            s.cols()
        )));
    }
    if n > 1000 {
        return Err(Error::Validation(format!("dimension {n} exceeds 1000")));
    }
    let scale = s.max_abs().max(1e-300);
    if s.asymmetry() > 1e-10 * scale {
        return Err(Error::Validation(format!(
            "matrix asymmetric: max |a_ij - a_ji| = {:e}",
            s.asymmetry()
        )));
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            eigenvalues: vec![],
            eigenvectors: Matrix::zeros(0, 0),
        });
    }

    let mut a = s.clone();
    // Symmetrize exactly so rotations treat both triangles consistently.
    for i in 0..n {
        for j in (i + 1)..n {
            let v = 0.5 * (a.get(i, j) + a.get(j, i));
            a.set(i, j, v);
            a.set(j, i, v);
        }
    }
    let mut v = Matrix::identity(n);

    let mut converged = false;
    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0_f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a.get(p, q).abs());
            }
        }
        if off <= 1e-15 * scale {
            converged = true;
            break;
        }
        for p in 0..n.saturating_sub(1) {
            for q in (p + 1)..n {
                let apq = a.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                // Stable rotation angle (Numerical Recipes formulation).
                let theta = 0.5 * (a.get(q, q) - a.get(p, p)) / apq;
                let t = if theta.abs() > 1e150 {
                    0.5 / theta
                } else {
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    sign / (theta.abs() + (1.0 + theta * theta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);

                let app = a.get(p, p);
                let aqq = a.get(q, q);
                a.set(p, p, app - t * apq);
                a.set(q, q, aqq + t * apq);
                a.set(p, q, 0.0);
                a.set(q, p, 0.0);
                for i in 0..n {
                    if i != p && i != q {
                        let aip = a.get(i, p);
                        let aiq = a.get(i, q);
                        let new_ip = aip - sn * (aiq + tau * aip);
                        let new_iq = aiq + sn * (aip - tau * aiq);
                        a.set(i, p, new_ip);
                        a.set(p, i, new_ip);
                        a.set(i, q, new_iq);
                        a.set(q, i, new_iq);
                    }
                }
                for i in 0..n {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, vip - sn * (viq + tau * vip));
                    v.set(i, q, viq + sn * (vip - tau * viq));
                }
            }
        }
    }
    if !converged {
        return Err(Error::Numeric(format!(
            "Jacobi sweeps did not converge within {MAX_SWEEPS} iterations"
        )));
    }

    // Sort descending, permute columns, and fix the sign convention.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a.get(j, j).total_cmp(&a.get(i, i)));

    let eigenvalues: Vec<f64> = order.iter().map(|&i| a.get(i, i)).collect();
    let mut vectors = Matrix::zeros(n, n);
    for (new_col, &old_col) in order.iter().enumerate() {
        let mut col: Vec<f64> = (0..n).map(|i| v.get(i, old_col)).collect();
        normalize_sign(&mut col);
        for (i, &x) in col.iter().enumerate() {
            vectors.set(i, new_col, x);
        }
    }

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors: vectors,
    })
}

/// Flip the vector so its entry of largest magnitude is positive; among tied
/// magnitudes the one with the lowest index decides.
fn normalize_sign(col: &mut [f64]) {
    let mut best = 0usize;
    for (i, &x) in col.iter().enumerate() {
        if x.abs() > col[best].abs() {
            best = i;
        }
    }
    if col[best] < 0.0 {
        for x in col.iter_mut() {
            *x = -*x;
        }
    }
}

impl EigenDecomposition {
    /// Max-norm of `V^T V - I`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.eigenvalues.len();
        let vtv = self
            .eigenvectors
            .transpose()
            .matmul(&self.eigenvectors)
            .expect("square");
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((vtv.get(i, j) - target).abs());
            }
        }
        worst
    }

    /// Max-norm of `V diag(l) V^T - S`.
    pub fn reconstruction_defect(&self, s: &Matrix) -> f64 {
        let n = self.eigenvalues.len();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in 0..n {
                let mut back = 0.0;
                for (k, &l) in self.eigenvalues.iter().enumerate() {
                    back += self.eigenvectors.get(i, k) * l * self.eigenvectors.get(j, k);
                }
                worst = worst.max((back - s.get(i, j)).abs());
            }
        }
        worst
    }
}
