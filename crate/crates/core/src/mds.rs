//! Classical (Torgerson) multidimensional scaling with a cyclic Jacobi
//! eigensolver.

use crate::error::{Error, Result};

/// Eigen-decomposition of a symmetric matrix, eigenvalues in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    /// Column `k` of this row-major `n × n` matrix is the eigenvector of `values[k]`.
    pub vectors: Vec<f64>,
    pub n: usize,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.vectors[i * self.n + k]).collect()
    }
}

/// Cyclic Jacobi rotations until the off-diagonal Frobenius norm falls below
/// `tol` times the matrix norm. Each eigenvector is signed so that its
/// largest-magnitude entry is positive.
pub fn jacobi_eigen(matrix: &[f64], n: usize, tol: f64) -> Result<SymmetricEigen> {
    if n == 0 {
        return Err(Error::Empty);
    }
    if matrix.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: matrix.len() });
    }
    if matrix.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mut a = matrix.to_vec();
    for i in 0..n {
        for j in 0..i {
            let s = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = s;
            a[j * n + i] = s;
        }
    }
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let total: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let off = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    s += a[i * n + j] * a[i * n + j];
                }
            }
        }
        s.sqrt()
    };

    for _sweep in 0..100 {
        if off(&a) <= tol * total.max(f64::MIN_POSITIVE) {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]).then(i.cmp(&j)));
    let values = order.iter().map(|&k| a[k * n + k]).collect();
    let mut vectors = vec![0.0; n * n];
    for (dst, &src) in order.iter().enumerate() {
        let col: Vec<f64> = (0..n).map(|i| v[i * n + src]).collect();
        let pivot = col.iter().copied().fold(0.0f64, |m, x| if x.abs() > m.abs() { x } else { m });
        let sign = if pivot < 0.0 { -1.0 } else { 1.0 };
        for i in 0..n {
            vectors[i * n + dst] = sign * col[i];
        }
    }
    Ok(SymmetricEigen { values, vectors, n })
}

/// Embeds `n` items in `dims` dimensions from a symmetric dissimilarity matrix.
///
/// The squared dissimilarities are double-centered, `B = −½ J D² J`, and the
/// coordinates are the top eigenvectors of `B` scaled by the square roots of
/// their eigenvalues (negative eigenvalues clamp to zero). Returns `n` rows of
/// `dims` coordinates.
pub fn classical_mds(dissimilarity: &[f64], n: usize, dims: usize) -> Result<Vec<Vec<f64>>> {
    if dissimilarity.len() != n * n {
        return Err(Error::DimensionMismatch { expected: n * n, got: dissimilarity.len() });
    }
    if n == 0 {
        return Err(Error::Empty);
    }
    let sq: Vec<f64> = dissimilarity.iter().map(|d| d * d).collect();
    let nf = n as f64;
    let row_mean: Vec<f64> = (0..n).map(|i| sq[i * n..(i + 1) * n].iter().sum::<f64>() / nf).collect();
    let col_mean: Vec<f64> = (0..n).map(|j| (0..n).map(|i| sq[i * n + j]).sum::<f64>() / nf).collect();
    let grand = row_mean.iter().sum::<f64>() / nf;
    let mut b = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            b[i * n + j] = -0.5 * (sq[i * n + j] - row_mean[i] - col_mean[j] + grand);
        }
    }
    let eig = jacobi_eigen(&b, n, 1e-10)?;
    Ok((0..n)
        .map(|i| {
            (0..dims)
                .map(|k| {
                    if k >= n {
                        return 0.0;
                    }
                    eig.values[k].max(0.0).sqrt() * eig.vectors[i * n + k]
                })
                .collect()
        })
        .collect())
}
