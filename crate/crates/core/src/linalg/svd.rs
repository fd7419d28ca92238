//! Economy SVD by one-sided (Hestenes) Jacobi rotations.

use crate::error::{Error, Result};
use crate::linalg::eigen::tridiagonal_eigenvalues;
use crate::linalg::{dot, DenseMatrix};

/// `X = left · diag(singular_values) · rightᵀ`, economy size.
#[derive(Debug, Clone)]
pub struct SvdFactors {
    pub left: DenseMatrix,
    pub singular_values: Vec<f64>,
    pub right: DenseMatrix,
}

const MAX_SWEEPS: usize = 80;

/// Economy SVD with `k = min(nrows, ncols)` triplets, σ sorted non-increasing.
pub fn dense_svd(x: &DenseMatrix) -> Result<SvdFactors> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if x.nrows() < x.ncols() {
        let t = dense_svd(&x.transpose())?;
        return Ok(SvdFactors { left: t.right, singular_values: t.singular_values, right: t.left });
    }
    let (m, n) = (x.nrows(), x.ncols());
    // Column-major working copies.
    let mut u: Vec<Vec<f64>> = (0..n).map(|j| x.column(j)).collect();
    let mut v: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            e
        })
        .collect();

    let eps = f64::EPSILON;
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let alpha = dot(&u[p], &u[p]);
                let beta = dot(&u[q], &u[q]);
                let gamma = dot(&u[p], &u[q]);
                if gamma == 0.0 || gamma.abs() <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate(&mut u, p, q, c, s);
                rotate(&mut v, p, q, c, s);
            }
        }
        if !rotated {
            break;
        }
    }

    let sigma: Vec<f64> = u.iter().map(|c| dot(c, c).sqrt()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| sigma[b].total_cmp(&sigma[a]));
    let smax = sigma.iter().cloned().fold(0.0, f64::max);

    let mut left = DenseMatrix::zeros(m, n);
    let mut right = DenseMatrix::zeros(n, n);
    let mut sorted_sigma = Vec::with_capacity(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n);
    for (k, &j) in order.iter().enumerate() {
        let s = sigma[j];
        let mut col: Vec<f64> = if s > 0.0 { u[j].iter().map(|x| x / s).collect() } else { vec![0.0; m] };
        // Columns tied to negligible σ carry rounding noise; clean them up
        // against the columns already accepted, completing the basis if needed.
        let reliable = s > smax * 1e-8 * (m as f64).sqrt();
        if !reliable || k > 0 {
            for _ in 0..2 {
                for b in &basis {
                    let h = dot(b, &col);
                    col.iter_mut().zip(b).for_each(|(c, bv)| *c -= h * bv);
                }
            }
            let nrm = dot(&col, &col).sqrt();
            if nrm < 0.5 {
                col = complete_basis(&basis, m);
            } else {
                col.iter_mut().for_each(|c| *c /= nrm);
            }
        }
        left.set_column(k, &col);
        right.set_column(k, &v[j]);
        sorted_sigma.push(s);
        basis.push(col);
    }
    Ok(SvdFactors { left, singular_values: sorted_sigma, right })
}

fn rotate(cols: &mut [Vec<f64>], p: usize, q: usize, c: f64, s: f64) {
    let (a, b) = cols.split_at_mut(q);
    let (cp, cq) = (&mut a[p], &mut b[0]);
    for (x, y) in cp.iter_mut().zip(cq.iter_mut()) {
        let (xp, xq) = (*x, *y);
        *x = c * xp - s * xq;
        *y = s * xp + c * xq;
    }
}

/// A unit vector orthogonal to `basis`, taken from projected canonical vectors.
fn complete_basis(basis: &[Vec<f64>], m: usize) -> Vec<f64> {
    let mut best = vec![0.0; m];
    let mut best_norm = -1.0;
    for i in 0..m {
        let mut e = vec![0.0; m];
        e[i] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let h = dot(b, &e);
                e.iter_mut().zip(b).for_each(|(c, bv)| *c -= h * bv);
            }
        }
        let nrm = dot(&e, &e).sqrt();
        if nrm > best_norm {
            best_norm = nrm;
            best = e;
        }
        if nrm > 0.7 {
            break;
        }
    }
    best.iter_mut().for_each(|c| *c /= best_norm);
    best
}

/// Singular values only, non-increasing, via Householder bidiagonalization
/// and the Golub–Kahan tridiagonal whose eigenvalues are `±σ_i`.
///
/// Cost is `O(mn²)` with a small constant, against several `O(mn²)` sweeps
/// for [`dense_svd`]; used for condition numbers of assembled operators.
pub fn singular_values(x: &DenseMatrix) -> Result<Vec<f64>> {
    if !x.is_finite() {
        return Err(Error::NonFinite);
    }
    if x.nrows() < x.ncols() {
        return singular_values(&x.transpose());
    }
    let (m, n) = (x.nrows(), x.ncols());
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = x.data().to_vec();
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut v = vec![0.0; m.max(n)];
    let mut w = vec![0.0; n];
    for k in 0..n {
        // Left reflector on column k, rows k..m.
        let alpha = (k..m).map(|i| a[i * n + k] * a[i * n + k]).sum::<f64>().sqrt();
        d[k] = householder_apply_left(&mut a, m, n, k, alpha, &mut v, &mut w);
        if k + 1 < n {
            // Right reflector on row k, columns k+1..n.
            let row = &a[k * n..(k + 1) * n];
            let alpha = row[k + 1..].iter().map(|t| t * t).sum::<f64>().sqrt();
            e[k] = householder_apply_right(&mut a, m, n, k, alpha, &mut v);
        }
    }
    let mut off = Vec::with_capacity(2 * n - 1);
    for k in 0..n {
        off.push(d[k]);
        if k + 1 < n {
            off.push(e[k]);
        }
    }
    let ev = tridiagonal_eigenvalues(&vec![0.0; 2 * n], &off)?;
    let mut sigma: Vec<f64> = ev[n..].iter().map(|s| s.abs()).collect();
    sigma.sort_by(|p, q| q.total_cmp(p));
    Ok(sigma)
}

/// Reflects column `k` (rows `k..m`) onto `β e_k`; returns `β`.
fn householder_apply_left(a: &mut [f64], m: usize, n: usize, k: usize, alpha: f64, v: &mut [f64], w: &mut [f64]) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let x0 = a[k * n + k];
    let beta = if x0 >= 0.0 { -alpha } else { alpha };
    for i in k..m {
        v[i] = a[i * n + k];
    }
    v[k] -= beta;
    let vn2: f64 = v[k..m].iter().map(|t| t * t).sum();
    if vn2 == 0.0 {
        return beta;
    }
    let tau = 2.0 / vn2;
    w[k..n].iter_mut().for_each(|t| *t = 0.0);
    for i in k..m {
        let vi = v[i];
        let row = &a[i * n..(i + 1) * n];
        for j in k..n {
            w[j] += vi * row[j];
        }
    }
    for i in k..m {
        let vi = v[i] * tau;
        let row = &mut a[i * n..(i + 1) * n];
        for j in k..n {
            row[j] -= vi * w[j];
        }
    }
    beta
}

/// Reflects row `k` (columns `k+1..n`) onto `β e_{k+1}`; returns `β`.
fn householder_apply_right(a: &mut [f64], m: usize, n: usize, k: usize, alpha: f64, v: &mut [f64]) -> f64 {
    if alpha == 0.0 {
        return 0.0;
    }
    let x0 = a[k * n + k + 1];
    let beta = if x0 >= 0.0 { -alpha } else { alpha };
    for j in k + 1..n {
        v[j] = a[k * n + j];
    }
    v[k + 1] -= beta;
    let vn2: f64 = v[k + 1..n].iter().map(|t| t * t).sum();
    if vn2 == 0.0 {
        return beta;
    }
    let tau = 2.0 / vn2;
    for i in k..m {
        let row = &mut a[i * n..(i + 1) * n];
        let s: f64 = (k + 1..n).map(|j| row[j] * v[j]).sum::<f64>() * tau;
        for j in k + 1..n {
            row[j] -= s * v[j];
        }
    }
    beta
}
