//! Dense linear algebra for matrices of dimension 1..=3.
//!
//! Everything the toolkit needs (determinants, symmetric eigenvalues,
//! singular values, PSD square roots) lives here as hand-rolled Jacobi
//! iterations; the fixed tiny dimension makes a dependency on a full
//! linear-algebra crate pointless.

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Row-major square matrix of logical dimension `n <= 3`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Mat {
    pub n: usize,
    e: [[f64; MAX_DIM]; MAX_DIM],
}

impl Mat {
    pub fn zeros(n: usize) -> Self {
        assert!(n >= 1 && n <= MAX_DIM, "dimension {n} out of range");
        Mat {
            n,
            e: [[0.0; MAX_DIM]; MAX_DIM],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n);
        for i in 0..n {
            m.e[i][i] = 1.0;
        }
        m
    }

    pub fn diag(d: &[f64]) -> Self {
        let mut m = Mat::zeros(d.len());
        for (i, &v) in d.iter().enumerate() {
            m.e[i][i] = v;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > MAX_DIM {
            return Err(Error::Domain(format!("matrix dimension {n} out of range")));
        }
        let mut m = Mat::zeros(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Domain(format!(
                    "row {i} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for (j, &v) in row.iter().enumerate() {
                m.e[i][j] = v;
            }
        }
        Ok(m)
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.e[i][j]).collect())
            .collect()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.e[i][j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.e[i][j] = v;
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                t.e[j][i] = self.e[i][j];
            }
        }
        t
    }

    pub fn matmul(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let mut out = Mat::zeros(self.n);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s = 0.0;
                for k in 0..self.n {
                    s += self.e[i][k] * other.e[k][j];
                }
                out.e[i][j] = s;
            }
        }
        out
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.e[i][j] * x[j]).sum())
            .collect()
    }

    pub fn add(&self, other: &Mat) -> Mat {
        assert_eq!(self.n, other.n);
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.e[i][j] += other.e[i][j];
            }
        }
        out
    }

    pub fn scale(&self, s: f64) -> Mat {
        let mut out = *self;
        for i in 0..self.n {
            for j in 0..self.n {
                out.e[i][j] *= s;
            }
        }
        out
    }

    pub fn det(&self) -> f64 {
        let e = &self.e;
        match self.n {
            1 => e[0][0],
            2 => e[0][0] * e[1][1] - e[0][1] * e[1][0],
            3 => {
                e[0][0] * (e[1][1] * e[2][2] - e[1][2] * e[2][1])
                    - e[0][1] * (e[1][0] * e[2][2] - e[1][2] * e[2][0])
                    + e[0][2] * (e[1][0] * e[2][1] - e[1][1] * e[2][0])
            }
            _ => unreachable!(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..self.n {
            for j in 0..self.n {
                m = m.max(self.e[i][j].abs());
            }
        }
        m
    }

    pub fn symmetric_within(&self, tol: f64) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if (self.e[i][j] - self.e[j][i]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns (eigenvalues, eigenvectors-as-columns) with `A = V diag(w) V^T`,
/// eigenvalues sorted descending.
pub fn eigen_symmetric(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.n;
    let mut m = *a;
    // Symmetrize round-off before iterating.
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (m.e[i][j] + m.e[j][i]);
            m.e[i][j] = avg;
            m.e[j][i] = avg;
        }
    }
    let mut v = Mat::identity(n);
    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m.e[i][j].abs());
            }
        }
        if off <= 1e-14 * (1.0 + m.max_abs()) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m.e[p][q].abs() <= 1e-300 {
                    continue;
                }
                let theta = (m.e[q][q] - m.e[p][p]) / (2.0 * m.e[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.e[k][p];
                    let mkq = m.e[k][q];
                    m.e[k][p] = c * mkp - s * mkq;
                    m.e[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m.e[p][k];
                    let mqk = m.e[q][k];
                    m.e[p][k] = c * mpk - s * mqk;
                    m.e[q][k] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v.e[k][p];
                    let vkq = v.e[k][q];
                    v.e[k][p] = c * vkp - s * vkq;
                    v.e[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m.e[j][j].partial_cmp(&m.e[i][i]).unwrap());
    let w: Vec<f64> = idx.iter().map(|&i| m.e[i][i]).collect();
    let mut vs = Mat::zeros(n);
    for (new_col, &old_col) in idx.iter().enumerate() {
        for r in 0..n {
            vs.e[r][new_col] = v.e[r][old_col];
        }
    }
    (w, vs)
}

/// Symmetric PSD square root; eigenvalues are clipped at zero first.
pub fn sqrt_psd(a: &Mat) -> Mat {
    let (w, v) = eigen_symmetric(a);
    let mut out = Mat::zeros(a.n);
    for i in 0..a.n {
        for j in 0..a.n {
            let mut s = 0.0;
            for k in 0..a.n {
                s += v.e[i][k] * w[k].max(0.0).sqrt() * v.e[j][k];
            }
            out.e[i][j] = s;
        }
    }
    out
}

/// Projects a nearly-PSD symmetric matrix onto the PSD cone by clipping
/// negative eigenvalues at zero.
pub fn project_psd(a: &Mat) -> Mat {
    let (w, v) = eigen_symmetric(a);
    let mut out = Mat::zeros(a.n);
    for i in 0..a.n {
        for j in 0..a.n {
            let mut s = 0.0;
            for k in 0..a.n {
                s += v.e[i][k] * w[k].max(0.0) * v.e[j][k];
            }
            out.e[i][j] = s;
        }
    }
    out
}

/// Largest singular value via power iteration on `A^T A`, stopping when the
/// Rayleigh quotient settles to 1e-10 (relative).
pub fn largest_singular_value(a: &Mat) -> Result<f64> {
    let n = a.n;
    let b = a.transpose().matmul(a);
    // A deterministic start with unequal entries avoids landing exactly on a
    // non-dominant eigenvector.
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * i as f64).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut lambda = 0.0f64;
    for _ in 0..10_000 {
        let w = b.apply(&v);
        let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm <= 1e-300 {
            return Ok(0.0); // A^T A v = 0: the matrix annihilates v; sigma_max of a rank-deficient direction
        }
        let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
        let new_lambda: f64 = next
            .iter()
            .zip(b.apply(&next))
            .map(|(x, bx)| x * bx)
            .sum();
        let done = (new_lambda - lambda).abs() <= 1e-10 * (1.0 + new_lambda.abs());
        v = next;
        lambda = new_lambda;
        if done {
            return Ok(lambda.max(0.0).sqrt());
        }
    }
    Err(Error::NoConvergence(
        "power iteration on A^T A exceeded 10000 steps".into(),
    ))
}

/// Singular value decomposition `A = U S V^T` by one-sided Jacobi
/// orthogonalization of columns, with singular values sorted descending.
/// Columns belonging to zero singular values are completed to an
/// orthonormal basis.
pub fn svd(a: &Mat) -> Result<(Mat, Vec<f64>, Mat)> {
    let n = a.n;
    let mut u = *a; // columns get orthogonalized in place
    let mut v = Mat::identity(n);
    let scale = a.max_abs().max(1e-300);

    let col_dot = |m: &Mat, p: usize, q: usize| -> f64 {
        (0..n).map(|i| m.e[i][p] * m.e[i][q]).sum()
    };

    let mut converged = false;
    for _sweep in 0..128 {
        let mut rotated = false;
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = col_dot(&u, p, q);
                // Off-diagonal threshold fixed at 1e-12 of the matrix scale;
                // column pairs already orthogonal to that level are skipped.
                if apq.abs() <= 1e-12 * scale * scale {
                    continue;
                }
                let app = col_dot(&u, p, p);
                let aqq = col_dot(&u, q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let uip = u.e[i][p];
                    let uiq = u.e[i][q];
                    u.e[i][p] = c * uip - s * uiq;
                    u.e[i][q] = s * uip + c * uiq;
                    let vip = v.e[i][p];
                    let viq = v.e[i][q];
                    v.e[i][p] = c * vip - s * viq;
                    v.e[i][q] = s * vip + c * viq;
                }
                rotated = true;
            }
        }
        if !rotated {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::NoConvergence(
            "one-sided Jacobi SVD exceeded 128 sweeps".into(),
        ));
    }

    let mut sigma: Vec<f64> = (0..n)
        .map(|j| (0..n).map(|i| u.e[i][j] * u.e[i][j]).sum::<f64>().sqrt())
        .collect();

    // Sort descending, permuting U and V columns along.
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| sigma[j].partial_cmp(&sigma[i]).unwrap());
    let mut us = Mat::zeros(n);
    let mut vs = Mat::zeros(n);
    let mut ss = vec![0.0; n];
    for (new_col, &old) in idx.iter().enumerate() {
        ss[new_col] = sigma[old];
        for r in 0..n {
            us.e[r][new_col] = u.e[r][old];
            vs.e[r][new_col] = v.e[r][old];
        }
    }
    sigma = ss;

    // Normalize nonzero columns of U; rebuild zero columns orthonormally.
    let tiny = 1e-14 * scale;
    for j in 0..n {
        if sigma[j] > tiny {
            for i in 0..n {
                us.e[i][j] /= sigma[j];
            }
        } else {
            sigma[j] = 0.0;
            // Gram-Schmidt a coordinate axis against the earlier columns.
            'axis: for axis in 0..n {
                let mut cand = vec![0.0; n];
                cand[axis] = 1.0;
                for k in 0..j {
                    let d: f64 = (0..n).map(|i| us.e[i][k] * cand[i]).sum();
                    for i in 0..n {
                        cand[i] -= d * us.e[i][k];
                    }
                }
                let norm = cand.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 0.5 {
                    for i in 0..n {
                        us.e[i][j] = cand[i] / norm;
                    }
                    break 'axis;
                }
            }
        }
    }

    Ok((us, sigma, vs.transpose()))
}
