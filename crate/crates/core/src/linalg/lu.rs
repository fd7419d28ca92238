//! LU factorization with partial pivoting.
//!
//! Local blocks are densified. When the block has a narrow band (true for
//! grid problems in natural ordering) the factorization is done in band
//! storage with room for pivoting fill-in; the pivot sequence and arithmetic
//! are those of dense partial pivoting, only the structural zeros are skipped.

use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, SparseMatrix};

#[derive(Debug, Clone)]
enum Storage {
    /// Row-major `n × n`, L below the diagonal (unit), U on and above.
    Dense(Vec<f64>),
    /// Row `i` holds columns `i - kl ..= i + kl + ku`; `pivots[k]` is the row
    /// exchanged with `k` at step `k`, multipliers of step `k` sit in column `k`.
    Band { kl: usize, ku: usize, data: Vec<f64>, pivots: Vec<usize> },
}

/// Packed LU factors `P·A = L·U` of a square matrix.
#[derive(Debug, Clone)]
pub struct LuFactors {
    n: usize,
    perm: Vec<usize>,
    storage: Storage,
}

impl LuFactors {
    pub fn dimension(&self) -> usize {
        self.n
    }

    /// Row permutation: row `k` of `P·A` is row `perm[k]` of `A`.
    pub fn permutation(&self) -> &[usize] {
        &self.perm
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        if b.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: b.len() });
        }
        let mut x = b.to_vec();
        self.solve_in_place(&mut x);
        Ok(x)
    }

    /// Solves `A x = b` overwriting `b`; panics on length mismatch.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        match &self.storage {
            Storage::Dense(lu) => {
                // Row interchanges were applied eagerly, so permute first.
                let y: Vec<f64> = self.perm.iter().map(|&p| b[p]).collect();
                b.copy_from_slice(&y);
                for i in 0..n {
                    let row = &lu[i * n..i * n + i];
                    let s: f64 = row.iter().zip(&b[..i]).map(|(l, x)| l * x).sum();
                    b[i] -= s;
                }
                for i in (0..n).rev() {
                    let row = &lu[i * n..(i + 1) * n];
                    let s: f64 = row[i + 1..].iter().zip(&b[i + 1..]).map(|(u, x)| u * x).sum();
                    b[i] = (b[i] - s) / row[i];
                }
            }
            Storage::Band { kl, ku, data, pivots } => {
                let (kl, ku) = (*kl, *ku);
                let w = 2 * kl + ku + 1;
                for k in 0..n {
                    b.swap(k, pivots[k]);
                    let bk = b[k];
                    if bk != 0.0 {
                        for i in k + 1..=(k + kl).min(n - 1) {
                            b[i] -= data[i * w + (k + kl - i)] * bk;
                        }
                    }
                }
                for i in (0..n).rev() {
                    let hi = (i + kl + ku).min(n - 1);
                    let mut s = 0.0;
                    for j in i + 1..=hi {
                        s += data[i * w + (j + kl - i)] * b[j];
                    }
                    b[i] = (b[i] - s) / data[i * w + kl];
                }
            }
        }
    }
}

/// Factors a sparse square block, choosing band storage when it is narrow.
pub fn lu_factor(a: &SparseMatrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    if a.values().iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    let (lower, upper) = a.bandwidths();
    let kl = lower.max(upper);
    // Band storage pays off once the band is a small fraction of n.
    if n > 0 && (3 * kl + 1) * 2 < n {
        band_factor(a, kl, kl)
    } else {
        lu_factor_dense(&a.to_dense())
    }
}

/// Dense partial-pivoting LU.
pub fn lu_factor_dense(a: &DenseMatrix) -> Result<LuFactors> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch { expected: a.nrows(), found: a.ncols() });
    }
    if !a.is_finite() {
        return Err(Error::NonFinite);
    }
    let n = a.nrows();
    let mut lu = a.data().to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    for k in 0..n {
        let mut p = k;
        let mut best = lu[k * n + k].abs();
        for i in k + 1..n {
            let v = lu[i * n + k].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Error::SingularMatrix { column: k });
        }
        if p != k {
            for j in 0..n {
                lu.swap(k * n + j, p * n + j);
            }
            perm.swap(k, p);
        }
        let pivot = lu[k * n + k];
        let (head, tail) = lu.split_at_mut((k + 1) * n);
        let krow = &head[k * n..(k + 1) * n];
        for i in 0..n - k - 1 {
            let row = &mut tail[i * n..(i + 1) * n];
            let l = row[k] / pivot;
            row[k] = l;
            if l != 0.0 {
                for j in k + 1..n {
                    row[j] -= l * krow[j];
                }
            }
        }
    }
    Ok(LuFactors { n, perm, storage: Storage::Dense(lu) })
}

fn band_factor(a: &SparseMatrix, kl: usize, ku: usize) -> Result<LuFactors> {
    let n = a.nrows();
    // After pivoting, U gains up to kl extra superdiagonals.
    let w = 2 * kl + ku + 1;
    let mut data = vec![0.0; n * w];
    for i in 0..n {
        let (cols, vals) = a.row(i);
        for (&j, &v) in cols.iter().zip(vals) {
            data[i * w + (j + kl - i)] = v;
        }
    }
    let mut perm: Vec<usize> = (0..n).collect();
    let mut pivots = Vec::with_capacity(n);
    for k in 0..n {
        let last = (k + kl).min(n - 1);
        let mut p = k;
        let mut best = data[k * w + kl].abs();
        for i in k + 1..=last {
            let v = data[i * w + (k + kl - i)].abs();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(Error::SingularMatrix { column: k });
        }
        let hi = (k + kl + ku).min(n - 1);
        pivots.push(p);
        if p != k {
            // Only the active columns move; multipliers of earlier steps stay
            // put and the interchange is replayed during the forward solve.
            for j in k..=hi {
                data.swap(k * w + (j + kl - k), p * w + (j + kl - p));
            }
            perm.swap(k, p);
        }
        let pivot = data[k * w + kl];
        for i in k + 1..=last {
            let li = i * w + (k + kl - i);
            let l = data[li] / pivot;
            data[li] = l;
            if l != 0.0 {
                for j in k + 1..=hi {
                    data[i * w + (j + kl - i)] -= l * data[k * w + (j + kl - k)];
                }
            }
        }
    }
    Ok(LuFactors { n, perm, storage: Storage::Band { kl, ku, data, pivots } })
}

/// Solves with precomputed factors.
pub fn lu_solve(f: &LuFactors, b: &[f64]) -> Result<Vec<f64>> {
    f.solve(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn laplacian_1d(n: usize) -> SparseMatrix {
        let mut t = Vec::new();
        for i in 0..n {
            t.push((i, i, 2.0));
            if i > 0 {
                t.push((i, i - 1, -1.0));
            }
            if i + 1 < n {
                t.push((i, i + 1, -1.0));
            }
        }
        SparseMatrix::from_triplets(n, n, &t).unwrap()
    }

    #[test]
    fn one_by_one() {
        let a = SparseMatrix::from_triplets(1, 1, &[(0, 0, 4.0)]).unwrap();
        assert_eq!(lu_solve(&lu_factor(&a).unwrap(), &[8.0]).unwrap(), vec![2.0]);
    }

    #[test]
    fn two_by_two() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 2.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 2.0)])
            .unwrap();
        let x = lu_solve(&lu_factor(&a).unwrap(), &[3.0, 3.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn laplacian_ones() {
        let a = laplacian_1d(10);
        let b = a.mul_vec(&[1.0; 10]);
        let x = lu_solve(&lu_factor(&a).unwrap(), &b).unwrap();
        for v in x {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn singular_detected() {
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 0, 1.0), (0, 1, 1.0), (1, 0, 1.0), (1, 1, 1.0)])
            .unwrap();
        assert!(matches!(lu_factor(&a), Err(Error::SingularMatrix { .. })));
    }

    /// Random banded nonsymmetric matrices with small diagonals force
    /// pivoting; band and dense paths must give the same answer.
    #[test]
    fn band_matches_dense_with_pivoting() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for &(n, bw) in &[(40usize, 3usize), (60, 5), (33, 1)] {
            let mut t = Vec::new();
            for i in 0..n {
                for j in i.saturating_sub(bw)..=(i + bw).min(n - 1) {
                    let v: f64 = rng.gen_range(-1.0..1.0);
                    t.push((i, j, if i == j { 0.01 * v } else { v }));
                }
            }
            let a = SparseMatrix::from_triplets(n, n, &t).unwrap();
            let b: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let band = lu_factor(&a).unwrap();
            assert!(matches!(band.storage, Storage::Band { .. }));
            let dense = lu_factor_dense(&a.to_dense()).unwrap();
            assert_eq!(band.permutation(), dense.permutation());
            let xb = band.solve(&b).unwrap();
            let xd = dense.solve(&b).unwrap();
            let r = a.mul_vec(&xb);
            let bn = b.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            for i in 0..n {
                assert!((r[i] - b[i]).abs() <= 1e-10 * bn, "residual too large");
                assert!((xb[i] - xd[i]).abs() <= 1e-9 * (1.0 + xd[i].abs()));
            }
        }
    }
}
