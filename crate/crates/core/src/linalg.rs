//! Small dense linear algebra helpers: symmetric eigendecomposition,
//! Cholesky solves, and a PSD square-root factor for Gaussian sampling.
//!
//! Everything here is deterministic; matrices in this crate are small
//! (tens of rows), so the classical cyclic-Jacobi and Cholesky routines are
//! accurate and fast enough.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// Returns `(eigenvalues, eigenvectors)` with `a = V diag(w) V'`, columns of
/// `V` the eigenvectors. Eigenvalues are not sorted.
pub fn jacobi_eigh(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let n = a.nrows();
    if a.ncols() != n {
        return Err(Error::DimensionMismatch("matrix must be square".into()));
    }
    let mut m = a.clone();
    let mut v = Array2::eye(n);
    let scale = m.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);

    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for i in 0..n {
            for j in (i + 1)..n {
                off = off.max(m[[i, j]].abs());
            }
        }
        if off <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[[p, q]];
                if apq.abs() <= 1e-18 * scale {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * apq);
                // Smaller-angle rotation root for stability.
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let w = Array1::from_iter((0..n).map(|i| m[[i, i]]));
    Ok((w, v))
}

/// Square-root factor `F` with `F F' = a` for a symmetric PSD matrix.
///
/// Eigenvalues slightly below zero (relative to the largest magnitude) are
/// clamped to zero; anything grossly negative is rejected.
pub fn psd_sqrt_factor(a: &Array2<f64>) -> Result<Array2<f64>> {
    let (w, v) = jacobi_eigh(a)?;
    let max_abs = w.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let neg_tol = 1e-10 * max_abs.max(1.0);
    let n = w.len();
    let mut f = v;
    for i in 0..n {
        if w[i] < -neg_tol {
            return Err(Error::Factorization(format!(
                "matrix is not positive semidefinite: eigenvalue {}",
                w[i]
            )));
        }
        let root = w[i].max(0.0).sqrt();
        f.column_mut(i).mapv_inplace(|x| x * root);
    }
    Ok(f)
}

/// Solves `a x = b` for symmetric positive definite `a` via Cholesky.
pub fn cholesky_solve(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::DimensionMismatch("cholesky solve shapes".into()));
    }
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 {
                    return Err(Error::Factorization(format!(
                        "matrix not positive definite at pivot {i} ({sum})"
                    )));
                }
                l[[i, j]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    // Forward then backward substitution.
    let mut y = Array1::<f64>::zeros(n);
    for i in 0..n {
        let mut sum = b[i];
        for k in 0..i {
            sum -= l[[i, k]] * y[k];
        }
        y[i] = sum / l[[i, i]];
    }
    let mut x = Array1::<f64>::zeros(n);
    for i in (0..n).rev() {
        let mut sum = y[i];
        for k in (i + 1)..n {
            sum -= l[[k, i]] * x[k];
        }
        x[i] = sum / l[[i, i]];
    }
    Ok(x)
}

/// Least-squares solution of `x beta ~ y` via the normal equations, with a
/// tiny ridge fallback when the Gram matrix is numerically singular.
pub fn least_squares(x: &Array2<f64>, y: &Array1<f64>) -> Result<Array1<f64>> {
    let n = x.nrows() as f64;
    let gram = x.t().dot(x) / n;
    let rhs = x.t().dot(y) / n;
    match cholesky_solve(&gram, &rhs) {
        Ok(beta) => Ok(beta),
        Err(_) => {
            let d = gram.nrows();
            let scale = gram.diag().iter().copied().fold(0.0, f64::max).max(1.0);
            let mut bumped = gram;
            for i in 0..d {
                bumped[[i, i]] += 1e-10 * scale;
            }
            cholesky_solve(&bumped, &rhs)
        }
    }
}

/// Largest eigenvalue of a symmetric PSD matrix by power iteration, padded
/// by a small safety factor so it can serve as a Lipschitz bound.
pub fn psd_max_eigenvalue(a: &Array2<f64>) -> f64 {
    let n = a.nrows();
    if n == 0 {
        return 0.0;
    }
    if n == 1 {
        return a[[0, 0]].max(0.0);
    }
    let mut v = Array1::from_elem(n, 1.0 / (n as f64).sqrt());
    let mut lambda = 0.0f64;
    for _ in 0..500 {
        let w = a.dot(&v);
        let norm = w.dot(&w).sqrt();
        if norm == 0.0 {
            return 0.0;
        }
        let next = &w / norm;
        let new_lambda = next.dot(&a.dot(&next));
        let done = (new_lambda - lambda).abs() <= 1e-14 * new_lambda.abs().max(1.0);
        v = next;
        lambda = new_lambda;
        if done {
            break;
        }
    }
    // Frobenius bound as a guard against slow power-iteration convergence.
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    (lambda * (1.0 + 1e-7)).min(frob).max(lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn jacobi_recovers_diagonal() {
        let a = array![[3.0, 0.0], [0.0, -1.0]];
        let (w, _v) = jacobi_eigh(&a).unwrap();
        let mut evs: Vec<f64> = w.to_vec();
        evs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((evs[0] + 1.0).abs() < 1e-12);
        assert!((evs[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let a = array![
            [4.0, 1.0, 0.5],
            [1.0, 3.0, -0.2],
            [0.5, -0.2, 2.0]
        ];
        let (w, v) = jacobi_eigh(&a).unwrap();
        let recon = v.dot(&Array2::from_diag(&w)).dot(&v.t());
        for (x, y) in a.iter().zip(recon.iter()) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn cholesky_solves_spd_system() {
        let a = array![[4.0, 1.0], [1.0, 3.0]];
        let b = array![1.0, 2.0];
        let x = cholesky_solve(&a, &b).unwrap();
        let r = a.dot(&x) - &b;
        assert!(r.iter().all(|t| t.abs() < 1e-12));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        let b = array![1.0, 1.0];
        assert!(cholesky_solve(&a, &b).is_err());
    }

    #[test]
    fn power_iteration_bounds_spectrum() {
        let a = array![[2.0, 1.0], [1.0, 2.0]];
        let l = psd_max_eigenvalue(&a);
        assert!(l >= 3.0 - 1e-10 && l <= 3.0 * (1.0 + 1e-6));
    }
}
