//! Small dense linear-algebra helpers: row-major matrices, LU with partial
//! pivoting, and a symmetric eigendecomposition used for pseudoinverse
//! solves of the tiny moment systems.

use crate::scalar::Real;

/// Row-major dense matrix.
#[derive(Debug, Clone)]
pub struct DenseMat<T> {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<T>,
}

impl<T: Real> DenseMat<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> T {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn at_mut(&mut self, i: usize, j: usize) -> &mut T {
        &mut self.data[i * self.cols + j]
    }

    pub fn matvec(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| {
                let row = &self.data[i * self.cols..(i + 1) * self.cols];
                row.iter().zip(x).map(|(&a, &b)| a * b).sum()
            })
            .collect()
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> T {
        (0..self.rows)
            .map(|i| {
                self.data[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(|a| a.abs())
                    .sum()
            })
            .fold(T::zero(), |m: T, r: T| m.max(r))
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LaError {
    #[error("matrix is numerically singular (pivot {pivot} below threshold)")]
    Singular { pivot: f64 },
}

/// Solve `A x = b` by LU with partial pivoting. `a` is consumed.
///
/// Fails when a pivot falls below `1e-14 * |A|_inf`.
pub fn lu_solve<T: Real>(mut a: DenseMat<T>, b: &[T]) -> Result<Vec<T>, LaError> {
    let n = a.rows;
    assert_eq!(a.cols, n);
    assert_eq!(b.len(), n);
    let threshold = T::of(1e-14) * a.norm_inf().max(T::min_positive_value());
    let mut x: Vec<T> = b.to_vec();
    for col in 0..n {
        // pivot search
        let mut p = col;
        let mut best = a.at(col, col).abs();
        for r in col + 1..n {
            let v = a.at(r, col).abs();
            if v > best {
                best = v;
                p = r;
            }
        }
        if best < threshold {
            return Err(LaError::Singular {
                pivot: best.to_f64().unwrap_or(0.0),
            });
        }
        if p != col {
            for j in 0..n {
                let tmp = a.at(col, j);
                *a.at_mut(col, j) = a.at(p, j);
                *a.at_mut(p, j) = tmp;
            }
            x.swap(col, p);
        }
        let pivot = a.at(col, col);
        for r in col + 1..n {
            let factor = a.at(r, col) / pivot;
            if factor == T::zero() {
                continue;
            }
            *a.at_mut(r, col) = T::zero();
            for j in col + 1..n {
                let upd = a.at(r, j) - factor * a.at(col, j);
                *a.at_mut(r, j) = upd;
            }
            x[r] = x[r] - factor * x[col];
        }
    }
    for col in (0..n).rev() {
        x[col] = x[col] / a.at(col, col);
        for r in 0..col {
            x[r] = x[r] - a.at(r, col) * x[col];
        }
    }
    Ok(x)
}

/// Eigendecomposition of a symmetric matrix by the cyclic Jacobi method.
/// Returns `(eigenvalues, eigenvectors)` with eigenvectors as columns.
pub fn jacobi_eigen<T: Real>(a: &DenseMat<T>) -> (Vec<T>, DenseMat<T>) {
    let n = a.rows;
    assert_eq!(a.cols, n);
    let mut m = a.clone();
    let mut v = DenseMat::zeros(n, n);
    for i in 0..n {
        *v.at_mut(i, i) = T::one();
    }
    for _sweep in 0..64 {
        let mut off = T::zero();
        for i in 0..n {
            for j in i + 1..n {
                off += m.at(i, j).abs();
            }
        }
        if off <= T::epsilon() * T::of_usize(n * n) {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m.at(p, q);
                if apq.abs() <= T::epsilon() * (m.at(p, p).abs() + m.at(q, q).abs()) {
                    continue;
                }
                let theta = (m.at(q, q) - m.at(p, p)) / (T::of(2.0) * apq);
                let t = {
                    let sign = if theta >= T::zero() { T::one() } else { -T::one() };
                    sign / (theta.abs() + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m.at(k, p);
                    let mkq = m.at(k, q);
                    *m.at_mut(k, p) = c * mkp - s * mkq;
                    *m.at_mut(k, q) = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m.at(p, k);
                    let mqk = m.at(q, k);
                    *m.at_mut(p, k) = c * mpk - s * mqk;
                    *m.at_mut(q, k) = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v.at(k, p);
                    let vkq = v.at(k, q);
                    *v.at_mut(k, p) = c * vkp - s * vkq;
                    *v.at_mut(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    let eig = (0..n).map(|i| m.at(i, i)).collect();
    (eig, v)
}

/// Minimum-norm solution of `A x = b` for symmetric `A` via eigenvalue
/// truncation (pseudoinverse). Eigenvalues below `n * eps * max|lambda|`
/// are treated as zero.
pub fn pinv_solve_sym<T: Real>(a: &DenseMat<T>, b: &[T]) -> Vec<T> {
    let n = a.rows;
    let (eig, q) = jacobi_eigen(a);
    let lmax = eig.iter().map(|l| l.abs()).fold(T::zero(), T::max);
    let cutoff = T::of_usize(n.max(1)) * T::epsilon() * lmax * T::of(8.0);
    let mut x = vec![T::zero(); n];
    for k in 0..n {
        if eig[k].abs() <= cutoff {
            continue;
        }
        let mut qk_b = T::zero();
        for i in 0..n {
            qk_b += q.at(i, k) * b[i];
        }
        let coeff = qk_b / eig[k];
        for i in 0..n {
            x[i] += coeff * q.at(i, k);
        }
    }
    x
}
