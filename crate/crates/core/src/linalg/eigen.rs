//! Dense eigenvalue solvers: shifted Hessenberg QR for general matrices and
//! Householder tridiagonalization + implicit QL for symmetric ones.
//!
//! Both follow the classic EISPACK formulations; internally they index from 1
//! to keep the loops recognizable against the reference listings.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

const MAX_ITS: usize = 60;

/// 1-based square work array.
struct W {
    n: usize,
    d: Vec<f64>,
}

impl W {
    fn from_dense(a: &DenseMatrix) -> Self {
        Self { n: a.nrows(), d: a.data().to_vec() }
    }
}

impl Index<(usize, usize)> for W {
    type Output = f64;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.d[(i - 1) * self.n + (j - 1)]
    }
}

impl IndexMut<(usize, usize)> for W {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.d[(i - 1) * self.n + (j - 1)]
    }
}

/// All eigenvalues of a square matrix, sorted by decreasing modulus.
pub fn dense_eigenvalues(t: &DenseMatrix) -> Result<Vec<Complex64>> {
    if !t.is_square() {
        return Err(Error::DimensionMismatch { expected: t.nrows(), found: t.ncols() });
    }
    if !t.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = t.nrows();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut a = W::from_dense(t);
    balance(&mut a);
    hessenberg(&mut a);
    let mut ev = hqr(&mut a)?;
    ev.sort_by(|x, y| y.norm().total_cmp(&x.norm()));
    Ok(ev)
}

/// Diagonal similarity scaling by powers of two (improves QR accuracy).
fn balance(a: &mut W) {
    let n = a.n;
    let radix = 2.0f64;
    let sqrdx = radix * radix;
    let mut done = false;
    while !done {
        done = true;
        for i in 1..=n {
            let mut r = 0.0;
            let mut c = 0.0;
            for j in 1..=n {
                if j != i {
                    c += a[(j, i)].abs();
                    r += a[(i, j)].abs();
                }
            }
            if c != 0.0 && r != 0.0 {
                let mut g = r / radix;
                let mut f = 1.0;
                let s = c + r;
                while c < g {
                    f *= radix;
                    c *= sqrdx;
                }
                g = r * radix;
                while c > g {
                    f /= radix;
                    c /= sqrdx;
                }
                if (c + r) / f < 0.95 * s {
                    done = false;
                    let g = 1.0 / f;
                    for j in 1..=n {
                        a[(i, j)] *= g;
                    }
                    for j in 1..=n {
                        a[(j, i)] *= f;
                    }
                }
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (similarity).
fn hessenberg(a: &mut W) {
    let n = a.n;
    let mut v = vec![0.0; n + 1];
    let mut w = vec![0.0; n + 1];
    for k in 1..n.saturating_sub(1) {
        // Annihilate a[k+2..n, k].
        let alpha: f64 = (k + 1..=n).map(|i| a[(i, k)] * a[(i, k)]).sum::<f64>().sqrt();
        if alpha == 0.0 {
            continue;
        }
        let x0 = a[(k + 1, k)];
        let beta = if x0 >= 0.0 { -alpha } else { alpha };
        for i in k + 1..=n {
            v[i] = a[(i, k)];
        }
        v[k + 1] -= beta;
        let vnorm2: f64 = (k + 1..=n).map(|i| v[i] * v[i]).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        let tau = 2.0 / vnorm2;
        // A ← H A, accumulating wᵀ = τ vᵀA row by row for contiguous access.
        w.iter_mut().for_each(|x| *x = 0.0);
        for i in k + 1..=n {
            let vi = v[i];
            let row = &a.d[(i - 1) * n..i * n];
            for j in k..=n {
                w[j] += vi * row[j - 1];
            }
        }
        for i in k + 1..=n {
            let vi = v[i] * tau;
            let row = &mut a.d[(i - 1) * n..i * n];
            for j in k..=n {
                row[j - 1] -= vi * w[j];
            }
        }
        // A ← A H
        for i in 1..=n {
            let row = &mut a.d[(i - 1) * n..i * n];
            let s: f64 = (k + 1..=n).map(|j| row[j - 1] * v[j]).sum::<f64>() * tau;
            for j in k + 1..=n {
                row[j - 1] -= s * v[j];
            }
        }
        a[(k + 1, k)] = beta;
        for i in k + 2..=n {
            a[(i, k)] = 0.0;
        }
    }
}

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Francis double-shift QR on an upper Hessenberg matrix.
fn hqr(a: &mut W) -> Result<Vec<Complex64>> {
    let n = a.n;
    let eps = f64::EPSILON;
    let mut wr = vec![0.0; n + 1];
    let mut wi = vec![0.0; n + 1];
    let mut anorm = 0.0;
    let mut fro = 0.0;
    for i in 1..=n {
        for j in i.saturating_sub(1).max(1)..=n {
            anorm += a[(i, j)].abs();
            fro += a[(i, j)] * a[(i, j)];
        }
    }
    // Subdiagonals below ε‖H‖_F are negligible in the normwise backward
    // sense; without this, clusters of (near-)zero eigenvalues never deflate
    // under the purely relative test.
    let small = eps * f64::sqrt(fro);
    let mut nn = n;
    let mut t = 0.0;
    while nn >= 1 {
        let mut its = 0;
        loop {
            let mut l = nn;
            while l >= 2 {
                let mut s = a[(l - 1, l - 1)].abs() + a[(l, l)].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[(l, l - 1)].abs() <= eps * s || a[(l, l - 1)].abs() <= small {
                    a[(l, l - 1)] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[(nn, nn)];
            if l == nn {
                wr[nn] = x + t;
                wi[nn] = 0.0;
                nn -= 1;
            } else {
                let mut y = a[(nn - 1, nn - 1)];
                let mut w = a[(nn, nn - 1)] * a[(nn - 1, nn)];
                if l == nn - 1 {
                    let p = 0.5 * (y - x);
                    let q = p * p + w;
                    let mut z = q.abs().sqrt();
                    x += t;
                    if q >= 0.0 {
                        z = p + sign(z, p);
                        wr[nn - 1] = x + z;
                        wr[nn] = x + z;
                        if z != 0.0 {
                            wr[nn] = x - w / z;
                        }
                        wi[nn - 1] = 0.0;
                        wi[nn] = 0.0;
                    } else {
                        wr[nn - 1] = x + p;
                        wr[nn] = x + p;
                        wi[nn - 1] = -z;
                        wi[nn] = z;
                    }
                    nn -= 2;
                } else {
                    if its == MAX_ITS {
                        return Err(Error::EigenNoConvergence { index: nn - 1, sweeps: its });
                    }
                    if its > 0 && its % 10 == 0 {
                        // Exceptional shift.
                        t += x;
                        for i in 1..=nn {
                            a[(i, i)] -= x;
                        }
                        let s = a[(nn, nn - 1)].abs() + a[(nn - 1, nn - 2)].abs();
                        x = 0.75 * s;
                        y = x;
                        w = -0.4375 * s * s;
                    }
                    its += 1;
                    let (mut p, mut q, mut r, mut z);
                    let mut m = nn - 2;
                    loop {
                        z = a[(m, m)];
                        let rr = x - z;
                        let ss = y - z;
                        p = (rr * ss - w) / a[(m + 1, m)] + a[(m, m + 1)];
                        q = a[(m + 1, m + 1)] - z - rr - ss;
                        r = a[(m + 2, m + 1)];
                        let s = p.abs() + q.abs() + r.abs();
                        p /= s;
                        q /= s;
                        r /= s;
                        if m == l {
                            break;
                        }
                        let u = a[(m, m - 1)].abs() * (q.abs() + r.abs());
                        let v = p.abs() * (a[(m - 1, m - 1)].abs() + z.abs() + a[(m + 1, m + 1)].abs());
                        if u <= eps * v {
                            break;
                        }
                        m -= 1;
                    }
                    for i in m + 2..=nn {
                        a[(i, i - 2)] = 0.0;
                        if i != m + 2 {
                            a[(i, i - 3)] = 0.0;
                        }
                    }
                    let mut k = m;
                    while k + 1 <= nn {
                        if k != m {
                            p = a[(k, k - 1)];
                            q = a[(k + 1, k - 1)];
                            r = 0.0;
                            if k != nn - 1 {
                                r = a[(k + 2, k - 1)];
                            }
                            x = p.abs() + q.abs() + r.abs();
                            if x != 0.0 {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        let s = sign((p * p + q * q + r * r).sqrt(), p);
                        if s != 0.0 {
                            if k == m {
                                if l != m {
                                    a[(k, k - 1)] = -a[(k, k - 1)];
                                }
                            } else {
                                a[(k, k - 1)] = -s * x;
                            }
                            p += s;
                            x = p / s;
                            y = q / s;
                            z = r / s;
                            q /= p;
                            r /= p;
                            for j in k..=nn {
                                let mut pp = a[(k, j)] + q * a[(k + 1, j)];
                                if k != nn - 1 {
                                    pp += r * a[(k + 2, j)];
                                    a[(k + 2, j)] -= pp * z;
                                }
                                a[(k + 1, j)] -= pp * y;
                                a[(k, j)] -= pp * x;
                            }
                            let mmin = if nn < k + 3 { nn } else { k + 3 };
                            for i in l..=mmin {
                                let mut pp = x * a[(i, k)] + y * a[(i, k + 1)];
                                if k != nn - 1 {
                                    pp += z * a[(i, k + 2)];
                                    a[(i, k + 2)] -= pp * r;
                                }
                                a[(i, k + 1)] -= pp * q;
                                a[(i, k)] -= pp;
                            }
                        }
                        k += 1;
                    }
                }
            }
            if nn < 1 || l + 1 >= nn {
                break;
            }
        }
    }
    Ok((1..=n).map(|i| Complex64::new(wr[i], wi[i])).collect())
}

/// Eigen-decomposition of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in ascending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors as columns, matching `values`.
    pub vectors: DenseMatrix,
}

/// Symmetric eigensolver; only the lower triangle of `a` is read.
pub fn symmetric_eigen(a: &DenseMatrix) -> Result<SymmetricEigen> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    if n == 0 {
        return Ok(SymmetricEigen { values: Vec::new(), vectors: DenseMatrix::zeros(0, 0) });
    }
    let mut z = W::from_dense(a);
    let mut d = vec![0.0; n + 1];
    let mut e = vec![0.0; n + 1];
    tred2(&mut z, &mut d, &mut e);
    tql2(&mut d, &mut e, Some(&mut z))?;

    let mut order: Vec<usize> = (1..=n).collect();
    order.sort_by(|&i, &j| d[i].total_cmp(&d[j]));
    let mut vectors = DenseMatrix::zeros(n, n);
    let mut values = Vec::with_capacity(n);
    for (c, &k) in order.iter().enumerate() {
        values.push(d[k]);
        for r in 1..=n {
            vectors[(r - 1, c)] = z[(r, k)];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

fn tred2(a: &mut W, d: &mut [f64], e: &mut [f64]) {
    let n = a.n;
    for i in (2..=n).rev() {
        let l = i - 1;
        let mut h = 0.0;
        if l > 1 {
            let scale: f64 = (1..=l).map(|k| a[(i, k)].abs()).sum();
            if scale == 0.0 {
                e[i] = a[(i, l)];
            } else {
                for k in 1..=l {
                    a[(i, k)] /= scale;
                    h += a[(i, k)] * a[(i, k)];
                }
                let mut f = a[(i, l)];
                let mut g = if f >= 0.0 { -h.sqrt() } else { h.sqrt() };
                e[i] = scale * g;
                h -= f * g;
                a[(i, l)] = f - g;
                f = 0.0;
                for j in 1..=l {
                    a[(j, i)] = a[(i, j)] / h;
                    g = 0.0;
                    for k in 1..=j {
                        g += a[(j, k)] * a[(i, k)];
                    }
                    for k in j + 1..=l {
                        g += a[(k, j)] * a[(i, k)];
                    }
                    e[j] = g / h;
                    f += e[j] * a[(i, j)];
                }
                let hh = f / (h + h);
                for j in 1..=l {
                    let f = a[(i, j)];
                    let g = e[j] - hh * f;
                    e[j] = g;
                    for k in 1..=j {
                        a[(j, k)] -= f * e[k] + g * a[(i, k)];
                    }
                }
            }
        } else {
            e[i] = a[(i, l)];
        }
        d[i] = h;
    }
    d[1] = 0.0;
    e[1] = 0.0;
    for i in 1..=n {
        let l = i - 1;
        if d[i] != 0.0 {
            for j in 1..=l {
                let mut g = 0.0;
                for k in 1..=l {
                    g += a[(i, k)] * a[(k, j)];
                }
                for k in 1..=l {
                    a[(k, j)] -= g * a[(k, i)];
                }
            }
        }
        d[i] = a[(i, i)];
        a[(i, i)] = 1.0;
        for j in 1..=l {
            a[(j, i)] = 0.0;
            a[(i, j)] = 0.0;
        }
    }
}

/// Implicit QL on the tridiagonal `(d, e)` (1-based, `e[i]` couples `i−1, i`),
/// accumulating rotations into `z` when given.
fn tql2(d: &mut [f64], e: &mut [f64], mut z: Option<&mut W>) -> Result<()> {
    let n = d.len() - 1;
    let eps = f64::EPSILON;
    for i in 2..=n {
        e[i - 1] = e[i];
    }
    e[n] = 0.0;
    let tnorm = (1..=n).map(|i| d[i].abs() + e[i].abs()).fold(0.0, f64::max);
    for l in 1..=n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= eps * dd || e[m].abs() <= eps * tnorm {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            if iter == 50 {
                return Err(Error::EigenNoConvergence { index: l - 1, sweeps: iter });
            }
            iter += 1;
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + sign(r, g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut underflow = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if let Some(z) = z.as_deref_mut() {
                    for k in 1..=n {
                        let f = z[(k, i + 1)];
                        z[(k, i + 1)] = s * z[(k, i)] + c * f;
                        z[(k, i)] = c * z[(k, i)] - s * f;
                    }
                }
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

/// Eigenvalues (ascending) of the symmetric tridiagonal matrix with diagonal
/// `diag` and off-diagonal `off` (`off.len() == diag.len() − 1`).
pub(crate) fn tridiagonal_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = vec![0.0; n + 1];
    let mut e = vec![0.0; n + 1];
    d[1..].copy_from_slice(diag);
    e[2..].copy_from_slice(off);
    tql2(&mut d, &mut e, None)?;
    let mut v = d.split_off(1);
    v.sort_by(f64::total_cmp);
    Ok(v)
}
