//! Solvers for the nonsymmetric collocation system and the L^2(Omega) error
//! functional. The direct path uses a banded LU with partial pivoting
//! (lexicographic node ordering keeps the band narrow); the iterative path
//! is restarted GMRES with Jacobi preconditioning.

use crate::grid::{DomainSpec, GridSpec, NodeRole};
use crate::operators::CollocationSystem;
use crate::rk_basis::RKBasis;
use crate::scalar::{dot, norm2, Real};
use crate::sparse::CsrMat;

#[derive(Debug, thiserror::Error)]
pub enum SolveError {
    #[error("matrix is numerically singular (pivot {pivot:.3e} below threshold)")]
    Singular { pivot: f64 },
    #[error("system too large for the direct solver ({n} unknowns > {max})")]
    TooLarge { n: usize, max: usize },
    #[error("iteration limit reached; best relative residual {residual:.3e}")]
    NotConverged { residual: f64 },
}

#[derive(Debug, Clone)]
pub struct SolveReport<T> {
    pub coefficients: Vec<T>,
    pub residual_norm: T,
    pub method: String,
    pub iterations: usize,
}

fn relative_residual<T: Real>(m: &CsrMat<T>, x: &[T], b: &[T]) -> T {
    let ax = m.matvec(x);
    let num = norm2(
        &ax.iter()
            .zip(b)
            .map(|(&a, &bi)| a - bi)
            .collect::<Vec<_>>(),
    );
    let den = norm2(b).max(T::min_positive_value());
    num / den
}

/// Direct solve by banded LU with partial pivoting.
pub fn solve_direct<T: Real>(system: &CollocationSystem<T>) -> Result<SolveReport<T>, SolveError> {
    let n = system.matrix.n_rows;
    const MAX_DIRECT: usize = 30_000;
    if n > MAX_DIRECT {
        return Err(SolveError::TooLarge { n, max: MAX_DIRECT });
    }
    let x = band_lu_solve(&system.matrix, &system.rhs)?;
    let residual_norm = relative_residual(&system.matrix, &x, &system.rhs);
    Ok(SolveReport {
        coefficients: x,
        residual_norm,
        method: "direct".into(),
        iterations: 0,
    })
}

/// Banded LU with partial pivoting. Band widths are read off the sparsity
/// pattern; pivoting widens the upper band by the lower width (standard
/// LAPACK-style storage).
fn band_lu_solve<T: Real>(m: &CsrMat<T>, b: &[T]) -> Result<Vec<T>, SolveError> {
    let n = m.n_rows;
    assert_eq!(m.n_cols, n);
    let mut kl = 0usize;
    let mut ku = 0usize;
    for i in 0..n {
        let (cols, _) = m.row(i);
        for &c in cols {
            if c < i {
                kl = kl.max(i - c);
            } else {
                ku = ku.max(c - i);
            }
        }
    }
    let width = kl + ku + kl + 1; // extra kl rows of pivoting fill
    let mut band = vec![T::zero(); width * n]; // band[(kl + ku + i - j) * ... column-major per j
    let at = |j: usize, i: usize| (kl + ku + i) - j + width * j; // valid when j <= i + kl + ku, i <= j + kl
    let mut norm = T::zero();
    for i in 0..n {
        let (cols, vals) = m.row(i);
        let mut row_abs = T::zero();
        for (&c, &v) in cols.iter().zip(vals) {
            band[at(c, i)] = v;
            row_abs += v.abs();
        }
        norm = norm.max(row_abs);
    }
    let threshold = T::of(1e-14) * norm.max(T::min_positive_value());
    let mut x = b.to_vec();
    for j in 0..n {
        let i_max = (j + kl).min(n - 1);
        let mut p = j;
        let mut best = band[at(j, j)].abs();
        for i in j + 1..=i_max {
            let v = band[at(j, i)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best < threshold {
            return Err(SolveError::Singular {
                pivot: best.to_f64().unwrap_or(0.0),
            });
        }
        let c_max = (j + kl + ku).min(n - 1);
        if p != j {
            for c in j..=c_max {
                band.swap(at(c, j), at(c, p));
            }
            x.swap(j, p);
        }
        let pivot = band[at(j, j)];
        // multipliers, stored briefly in the pivot column (contiguous in i)
        for i in j + 1..=i_max {
            band[at(j, i)] /= pivot;
        }
        // rank-1 update, column by column so the inner loop is a contiguous
        // axpy down column c (the storage is column-major in j)
        for c in j + 1..=c_max {
            let bjc = band[at(c, j)];
            if bjc == T::zero() {
                continue;
            }
            let f0 = at(j, j + 1);
            let u0 = at(c, j + 1);
            for i in 0..=(i_max - j - 1) {
                let upd = band[u0 + i] - band[f0 + i] * bjc;
                band[u0 + i] = upd;
            }
        }
        for i in j + 1..=i_max {
            x[i] = x[i] - band[at(j, i)] * x[j];
            band[at(j, i)] = T::zero();
        }
    }
    for j in (0..n).rev() {
        let c_max = (j + kl + ku).min(n - 1);
        let mut v = x[j];
        for c in j + 1..=c_max {
            v = v - band[at(c, j)] * x[c];
        }
        x[j] = v / band[at(j, j)];
    }
    Ok(x)
}

/// Restarted GMRES with Jacobi (diagonal) right preconditioning.
pub fn solve_krylov<T: Real>(
    system: &CollocationSystem<T>,
    tol: T,
    max_iter: usize,
) -> Result<SolveReport<T>, SolveError> {
    let m = &system.matrix;
    let b = &system.rhs;
    let n = m.n_rows;
    let diag: Vec<T> = m
        .diagonal()
        .iter()
        .map(|&d| {
            if d.abs() > T::min_positive_value() {
                d
            } else {
                T::one()
            }
        })
        .collect();
    let precond = |v: &[T]| -> Vec<T> { v.iter().zip(&diag).map(|(&vi, &di)| vi / di).collect() };
    let restart = 60.min(n.max(1));
    let bnorm = norm2(b).max(T::min_positive_value());
    let mut x = vec![T::zero(); n];
    let mut total_iters = 0usize;
    let mut best_res = T::infinity();
    while total_iters < max_iter {
        let ax = m.matvec(&x);
        let r0: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
        let beta = norm2(&r0);
        best_res = best_res.min(beta / bnorm);
        if beta / bnorm <= tol {
            return Ok(SolveReport {
                coefficients: x,
                residual_norm: beta / bnorm,
                method: "krylov".into(),
                iterations: total_iters,
            });
        }
        // Arnoldi with modified Gram-Schmidt
        let mut basis: Vec<Vec<T>> = vec![r0.iter().map(|&v| v / beta).collect()];
        let mut hess = vec![vec![T::zero(); restart]; restart + 1];
        let mut cs = vec![T::zero(); restart];
        let mut sn = vec![T::zero(); restart];
        let mut g = vec![T::zero(); restart + 1];
        g[0] = beta;
        let mut k_used = 0usize;
        for k in 0..restart {
            total_iters += 1;
            let mut w = m.matvec(&precond(&basis[k]));
            for (i, vi) in basis.iter().enumerate() {
                let hik = dot(&w, vi);
                hess[i][k] = hik;
                for (wj, &vij) in w.iter_mut().zip(vi) {
                    *wj -= hik * vij;
                }
            }
            let hkk = norm2(&w);
            hess[k + 1][k] = hkk;
            // apply accumulated Givens rotations
            for i in 0..k {
                let t = cs[i] * hess[i][k] + sn[i] * hess[i + 1][k];
                hess[i + 1][k] = -sn[i] * hess[i][k] + cs[i] * hess[i + 1][k];
                hess[i][k] = t;
            }
            let denom = (hess[k][k] * hess[k][k] + hkk * hkk).sqrt();
            if denom > T::min_positive_value() {
                cs[k] = hess[k][k] / denom;
                sn[k] = hkk / denom;
            } else {
                cs[k] = T::one();
                sn[k] = T::zero();
            }
            hess[k][k] = cs[k] * hess[k][k] + sn[k] * hess[k + 1][k];
            hess[k + 1][k] = T::zero();
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];
            k_used = k + 1;
            let res = g[k + 1].abs() / bnorm;
            best_res = best_res.min(res);
            if res <= tol || hkk <= T::min_positive_value() || total_iters >= max_iter {
                break;
            }
            basis.push(w.iter().map(|&v| v / hkk).collect());
        }
        // back-substitute the least-squares solution and update x
        let mut y = vec![T::zero(); k_used];
        for i in (0..k_used).rev() {
            let mut v = g[i];
            for j in i + 1..k_used {
                v = v - hess[i][j] * y[j];
            }
            y[i] = v / hess[i][i];
        }
        let mut z = vec![T::zero(); n];
        for (j, yj) in y.iter().enumerate() {
            for (zi, &vij) in z.iter_mut().zip(&basis[j]) {
                *zi += *yj * vij;
            }
        }
        let dz = precond(&z);
        for (xi, &di) in x.iter_mut().zip(&dz) {
            *xi += di;
        }
    }
    let res = relative_residual(m, &x, b);
    if res <= tol {
        Ok(SolveReport {
            coefficients: x,
            residual_norm: res,
            method: "krylov".into(),
            iterations: total_iters,
        })
    } else {
        Err(SolveError::NotConverged {
            residual: res.to_f64().unwrap_or(f64::NAN),
        })
    }
}

/// Dense coefficient vector over the whole enumerated grid: solved values on
/// unknown nodes, Dirichlet data on constrained nodes, zero elsewhere.
pub fn expansion_coeffs<T: Real>(
    grid: &GridSpec<T>,
    roles: &[NodeRole],
    system: &CollocationSystem<T>,
    solution: &[T],
) -> Vec<T> {
    let mut coeffs = vec![T::zero(); grid.n_nodes()];
    for (flat, role) in roles.iter().enumerate() {
        match role {
            NodeRole::Unknown(i) => coeffs[flat] = solution[*i],
            NodeRole::Constrained(i) => coeffs[flat] = system.constrained_values[*i],
            NodeRole::Exterior => {}
        }
    }
    coeffs
}

/// ||u_h - u_exact||_{L^2(Omega)} with u_h the RK expansion of a dense
/// coefficient vector; composite Gauss quadrature on half-cells.
pub fn error_l2<T: Real>(
    basis: &RKBasis<T>,
    coeffs: &[T],
    u_exact: impl Fn(&[T]) -> T,
    domain: &DomainSpec<T>,
) -> T {
    basis
        .l2_sq_on_box(&domain.box_lo, &domain.box_hi, |x| {
            basis.interpolant(coeffs, x) - u_exact(x)
        })
        .sqrt()
}
