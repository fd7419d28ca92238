//! Vector Aitken acceleration and coarse interface spaces.

use std::io::{Read, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{dense_svd, lu_factor_dense, norm2, orthonormalize, DenseMatrix, SparseMatrix};
use crate::partition::OverlapPartition;
use crate::preconditioner::Preconditioner;
use crate::schwarz::{homogeneous_interface_iteration, richardson_run_with, Record, RichardsonOptions, RasPreconditioner};

/// Default truncation threshold on singular values of the iterate matrix.
pub const DEFAULT_SVD_TOL: f64 = 1e-12;

/// Condition number above which a difference matrix counts as singular.
pub const SINGULAR_CONDITION: f64 = 1e14;

/// Relative cutoff for the pseudo-inverse of the coefficient differences.
const PINV_CUTOFF: f64 = 1e-13;

/// How a coarse basis was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisOrigin {
    Random,
    Svd,
    FullPhysical,
    Analytic,
}

impl BasisOrigin {
    fn code(self) -> u8 {
        match self {
            BasisOrigin::Random => 0,
            BasisOrigin::Svd => 1,
            BasisOrigin::FullPhysical => 2,
            BasisOrigin::Analytic => 3,
        }
    }

    fn from_code(c: u8) -> Option<Self> {
        Some(match c {
            0 => BasisOrigin::Random,
            1 => BasisOrigin::Svd,
            2 => BasisOrigin::FullPhysical,
            3 => BasisOrigin::Analytic,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            BasisOrigin::Random => "random",
            BasisOrigin::Svd => "svd",
            BasisOrigin::FullPhysical => "full",
            BasisOrigin::Analytic => "eigen",
        }
    }
}

/// Orthonormal interface basis `𝕌_q` and its coarse operator `P̂ = 𝕌_qᵀ P 𝕌_q`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoarseInterfaceSpace {
    pub basis: DenseMatrix,
    /// `None` until the operator has been built (see [`build_coarse_operator`]).
    pub coarse_operator: Option<DenseMatrix>,
    pub origin: BasisOrigin,
    pub svd_tol: f64,
    /// Retained singular values when `origin` is [`BasisOrigin::Svd`].
    pub source_sigma: Vec<f64>,
}

const MAGIC: &[u8; 8] = b"ARASCIS1";

impl CoarseInterfaceSpace {
    /// Interface dimension `n`.
    pub fn n(&self) -> usize {
        self.basis.nrows()
    }

    /// Basis size `q`.
    pub fn q(&self) -> usize {
        self.basis.ncols()
    }

    /// Wraps an orthonormal basis and computes its coarse operator.
    pub fn from_basis(a: &SparseMatrix, m: &RasPreconditioner, basis: DenseMatrix, origin: BasisOrigin) -> Result<Self> {
        let p_hat = build_coarse_operator(a, m, &basis)?;
        Ok(Self { basis, coarse_operator: Some(p_hat), origin, svd_tol: 0.0, source_sigma: Vec::new() })
    }

    /// The identity basis of the whole interface (`q = n`, exact `P`).
    pub fn full(a: &SparseMatrix, m: &RasPreconditioner) -> Result<Self> {
        let n = m.partition().interface_len();
        Self::from_basis(a, m, DenseMatrix::identity(n), BasisOrigin::FullPhysical)
    }

    /// Keeps the first `k` basis vectors (and the matching block of `P̂`).
    pub fn truncate(&mut self, k: usize) {
        if k >= self.q() {
            return;
        }
        self.basis = self.basis.leading_columns(k);
        if let Some(p) = &self.coarse_operator {
            let mut t = DenseMatrix::zeros(k, k);
            for i in 0..k {
                for j in 0..k {
                    t[(i, j)] = p[(i, j)];
                }
            }
            self.coarse_operator = Some(t);
        }
        self.source_sigma.truncate(k);
    }

    /// Binary dump: magic, `n`, `q`, origin, tol, σ list, basis and `P̂`
    /// (row-major, little-endian `f64`).
    pub fn save<W: Write>(&self, mut w: W) -> Result<()> {
        let p_hat = self
            .coarse_operator
            .as_ref()
            .ok_or_else(|| Error::InvalidArgument("coarse operator has not been built".into()))?;
        w.write_all(MAGIC)?;
        w.write_all(&(self.n() as u64).to_le_bytes())?;
        w.write_all(&(self.q() as u64).to_le_bytes())?;
        w.write_all(&[self.origin.code()])?;
        w.write_all(&self.svd_tol.to_le_bytes())?;
        w.write_all(&(self.source_sigma.len() as u64).to_le_bytes())?;
        for v in self.source_sigma.iter().chain(self.basis.data()).chain(p_hat.data()) {
            w.write_all(&v.to_le_bytes())?;
        }
        Ok(())
    }

    pub fn load<R: Read>(mut r: R) -> Result<Self> {
        let bad = |m: &str| Error::Parse { line: 0, message: m.to_string() };
        let mut magic = [0u8; 8];
        r.read_exact(&mut magic)?;
        if &magic != MAGIC {
            return Err(bad("not a coarse-space file"));
        }
        let mut u = [0u8; 8];
        let mut read_u64 = |r: &mut R| -> Result<u64> {
            r.read_exact(&mut u)?;
            Ok(u64::from_le_bytes(u))
        };
        let n = read_u64(&mut r)? as usize;
        let q = read_u64(&mut r)? as usize;
        let mut code = [0u8; 1];
        r.read_exact(&mut code)?;
        let origin = BasisOrigin::from_code(code[0]).ok_or_else(|| bad("unknown basis origin"))?;
        let mut b8 = [0u8; 8];
        r.read_exact(&mut b8)?;
        let svd_tol = f64::from_le_bytes(b8);
        r.read_exact(&mut b8)?;
        let ns = u64::from_le_bytes(b8) as usize;
        if q > n || ns > q {
            return Err(bad("inconsistent header"));
        }
        let mut read_f64s = |r: &mut R, len: usize| -> Result<Vec<f64>> {
            let mut out = Vec::with_capacity(len);
            for _ in 0..len {
                r.read_exact(&mut b8)?;
                out.push(f64::from_le_bytes(b8));
            }
            Ok(out)
        };
        let source_sigma = read_f64s(&mut r, ns)?;
        let basis = DenseMatrix::from_row_major(n, q, read_f64s(&mut r, n * q)?)?;
        let p_hat = DenseMatrix::from_row_major(q, q, read_f64s(&mut r, q * q)?)?;
        Ok(Self { basis, coarse_operator: Some(p_hat), origin, svd_tol, source_sigma })
    }
}

/// Exact 1-norm condition number of a small square matrix (∞ when singular).
fn condition_1(a: &DenseMatrix) -> f64 {
    let n = a.nrows();
    let Ok(lu) = lu_factor_dense(a) else { return f64::INFINITY };
    let norm_a = (0..n).map(|j| (0..n).map(|i| a[(i, j)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut norm_inv = 0.0f64;
    for j in 0..n {
        let mut e = vec![0.0; n];
        e[j] = 1.0;
        lu.solve_in_place(&mut e);
        norm_inv = norm_inv.max(e.iter().map(|v| v.abs()).sum());
    }
    let c = norm_a * norm_inv;
    if c.is_finite() {
        c
    } else {
        f64::INFINITY
    }
}

/// `(I − P)⁻¹ (u_new − P u_old)`.
fn aitken_formula(p: &DenseMatrix, u_old: &[f64], u_new: &[f64]) -> Result<Vec<f64>> {
    let k = p.nrows();
    let i_minus_p = DenseMatrix::identity(k).sub(p);
    let lu = lu_factor_dense(&i_minus_p).map_err(|_| Error::SingularCoarseCorrection)?;
    let pu = p.mul_vec(u_old);
    let rhs: Vec<f64> = u_new.iter().zip(&pu).map(|(a, b)| a - b).collect();
    lu.solve(&rhs)
}

/// Vector Aitken acceleration in the physical space.
///
/// Uses the last `n + 2` iterates `u⁰..u^{n+1}` (each of length `n`) to
/// identify `P` from successive differences and returns the fixed point
/// `(I − P)⁻¹(u^{n+1} − P uⁿ)`.
pub fn aitken_physical(iterates: &[Vec<f64>]) -> Result<Vec<f64>> {
    let n = iterates.first().map_or(0, |v| v.len());
    if n == 0 {
        return Err(Error::InvalidArgument("empty iterate vectors".into()));
    }
    if iterates.len() < n + 2 {
        return Err(Error::InvalidArgument(format!("need {} iterates of length {n}, got {}", n + 2, iterates.len())));
    }
    if iterates.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidArgument("iterates have different lengths".into()));
    }
    let u = &iterates[iterates.len() - (n + 2)..];
    let diff = |k: usize| -> Vec<f64> { u[k + 1].iter().zip(&u[k]).map(|(a, b)| a - b).collect() };
    let e: Vec<Vec<f64>> = (0..=n).map(diff).collect();
    // Successive differences shrink like ‖P‖ᵏ; scaling column j of both D0 and
    // D1 by 1/‖e_j‖ leaves P D0 = D1 unchanged and removes that grading from
    // the conditioning.
    let scale = |cols: &[Vec<f64>], norms: &[f64]| -> Vec<Vec<f64>> {
        cols.iter().zip(norms).map(|(c, s)| c.iter().map(|v| v / s).collect()).collect()
    };
    let norms: Vec<f64> = e[..n].iter().map(|c| norm2(c)).collect();
    if norms.iter().any(|&s| !(s > 0.0)) {
        return Err(Error::SingularDifferences { condition: f64::INFINITY });
    }
    let d0 = DenseMatrix::from_columns(n, &scale(&e[..n], &norms))?;
    let d1 = DenseMatrix::from_columns(n, &scale(&e[1..], &norms))?;
    let condition = condition_1(&d0);
    if condition > SINGULAR_CONDITION {
        return Err(Error::SingularDifferences { condition });
    }
    // P D0 = D1  ⇔  D0ᵀ Pᵀ = D1ᵀ.
    let lu = lu_factor_dense(&d0.transpose()).map_err(|_| Error::SingularDifferences { condition })?;
    let mut p = DenseMatrix::zeros(n, n);
    for i in 0..n {
        let row = lu.solve(d1.row(i))?;
        for j in 0..n {
            p[(i, j)] = row[j];
        }
    }
    aitken_formula(&p, &u[n], &u[n + 1])
}

/// Splits `q` over subdomains in proportion to `|Γ_i|`, capped by `|Γ_i|`.
pub fn proportional_split(q: usize, part: &OverlapPartition) -> Vec<usize> {
    let p = part.num_subdomains();
    let sizes: Vec<usize> = (0..p).map(|i| part.interface_slice(i).len()).collect();
    let total: usize = sizes.iter().sum();
    if total == 0 {
        return vec![0; p];
    }
    let q = q.min(part.interface_len());
    let exact: Vec<f64> = sizes.iter().map(|&s| q as f64 * s as f64 / total as f64).collect();
    let mut out: Vec<usize> = exact.iter().zip(&sizes).map(|(e, &s)| (e.round() as usize).min(s)).collect();
    // Fix rounding drift: adjust the entries with the largest gaps first.
    loop {
        let sum: usize = out.iter().sum();
        if sum == q {
            break;
        }
        if sum < q {
            let i = (0..p)
                .filter(|&i| out[i] < sizes[i])
                .max_by(|&x, &y| (exact[x] - out[x] as f64).total_cmp(&(exact[y] - out[y] as f64)).then(y.cmp(&x)));
            match i {
                Some(i) => out[i] += 1,
                None => break,
            }
        } else {
            let i = (0..p)
                .filter(|&i| out[i] > 0)
                .max_by(|&x, &y| (out[x] as f64 - exact[x]).total_cmp(&(out[y] as f64 - exact[y])).then(y.cmp(&x)))
                .unwrap();
            out[i] -= 1;
        }
    }
    out
}

/// Random basis: `q_i` uniform `[0, 1]` vectors supported on each `Γ_i`,
/// orthonormalized together. Rank failures redraw up to three times.
pub fn random_basis(n: usize, q_per_subdomain: &[usize], seed: u64, part: &OverlapPartition) -> Result<DenseMatrix> {
    if n != part.interface_len() {
        return Err(Error::DimensionMismatch { expected: part.interface_len(), found: n });
    }
    if q_per_subdomain.len() != part.num_subdomains() {
        return Err(Error::DimensionMismatch { expected: part.num_subdomains(), found: q_per_subdomain.len() });
    }
    let q: usize = q_per_subdomain.iter().sum();
    if q > n {
        return Err(Error::InvalidArgument(format!("q = {q} exceeds the interface size {n}")));
    }
    for (i, &qi) in q_per_subdomain.iter().enumerate() {
        let gi = part.interface_slice(i).len();
        if qi > gi {
            return Err(Error::InvalidArgument(format!("q_{i} = {qi} exceeds |Γ_{i}| = {gi}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_err = None;
    for _ in 0..=3 {
        let mut v = DenseMatrix::zeros(n, q);
        let mut col = 0;
        for (i, &qi) in q_per_subdomain.iter().enumerate() {
            for _ in 0..qi {
                for &k in part.interface_slice(i) {
                    v[(k, col)] = rng.gen::<f64>();
                }
                col += 1;
            }
        }
        match orthonormalize(&v) {
            Ok(u) => return Ok(u),
            Err(e @ Error::RankDeficient { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.unwrap())
}

/// `P̂ = 𝕌ᵀ G(𝕌)`: one homogeneous Schwarz sweep per basis column.
pub fn build_coarse_operator(a: &SparseMatrix, m: &RasPreconditioner, basis: &DenseMatrix) -> Result<DenseMatrix> {
    let n = m.partition().interface_len();
    if basis.nrows() != n {
        return Err(Error::DimensionMismatch { expected: n, found: basis.nrows() });
    }
    let q = basis.ncols();
    let w_cols = (0..q)
        .into_par_iter()
        .map(|j| homogeneous_interface_iteration(a, m, &basis.column(j)))
        .collect::<Result<Vec<_>>>()?;
    let w = DenseMatrix::from_columns(n, &w_cols)?;
    basis.tmatmul(&w)
}

fn trace_matrix_newest_first(trace: &[Vec<f64>]) -> Result<DenseMatrix> {
    let n = trace.first().map_or(0, |v| v.len());
    if trace.iter().any(|v| v.len() != n) {
        return Err(Error::InvalidArgument("trace vectors have different lengths".into()));
    }
    let cols: Vec<Vec<f64>> = trace.iter().rev().cloned().collect();
    DenseMatrix::from_columns(n, &cols)
}

/// Shared first step of both SVD paths: left singular vectors of `Y = [u^K, …, u¹]` with `σ > tol`.
///
/// The operator is left unset. A converged (or empty) trace yields `l = 0`.
pub fn svd_basis_from_trace(trace: &[Vec<f64>], tol: f64) -> Result<CoarseInterfaceSpace> {
    if trace.is_empty() {
        return Err(Error::InvalidArgument("empty trace".into()));
    }
    let y = trace_matrix_newest_first(trace)?;
    let svd = dense_svd(&y)?;
    let l = svd.singular_values.iter().take_while(|&&s| s > tol).count();
    Ok(CoarseInterfaceSpace {
        basis: svd.left.leading_columns(l),
        coarse_operator: None,
        origin: BasisOrigin::Svd,
        svd_tol: tol,
        source_sigma: svd.singular_values[..l].to_vec(),
    })
}

fn coefficients(basis: &DenseMatrix, u: &[f64]) -> Vec<f64> {
    basis.tmul_vec(u)
}

/// Aitken acceleration in the SVD space by inversion, with `P̂` identified
/// from coefficient differences.
///
/// With `l` retained singular vectors, the most recent `l + 2` iterates are
/// projected (`α = 𝕌_lᵀ u`) and `P̂ = Ê₂ Ê₁⁺`, where the pseudo-inverse drops
/// singular values below `1e-13` of the largest. `l` is capped at `K − 2`.
pub fn aitken_svd_inversion(trace: &[Vec<f64>], tol: f64) -> Result<Vec<f64>> {
    if trace.len() < 3 {
        return Err(Error::InvalidArgument("SVD inversion needs at least 3 iterates".into()));
    }
    let mut space = svd_basis_from_trace(trace, tol)?;
    space.truncate(trace.len() - 2);
    let l = space.q();
    if l == 0 {
        return Ok(trace.last().unwrap().clone());
    }
    let recent = &trace[trace.len() - (l + 2)..];
    let c: Vec<Vec<f64>> = recent.iter().map(|u| coefficients(&space.basis, u)).collect();
    let e: Vec<Vec<f64>> = (0..=l).map(|k| c[k + 1].iter().zip(&c[k]).map(|(a, b)| a - b).collect()).collect();
    let e0 = DenseMatrix::from_columns(l, &e[..l])?;
    let e1 = DenseMatrix::from_columns(l, &e[1..])?;
    let svd = dense_svd(&e0)?;
    let smax = svd.singular_values[0];
    if !(smax > 0.0) {
        return Err(Error::SingularDifferences { condition: f64::INFINITY });
    }
    // P̂ = E1 V Σ⁺ Uᵀ
    let mut v_sinv = svd.right.clone();
    for j in 0..l {
        let s = svd.singular_values[j];
        let inv = if s > PINV_CUTOFF * smax { 1.0 / s } else { 0.0 };
        for i in 0..l {
            v_sinv[(i, j)] *= inv;
        }
    }
    let p_hat = e1.matmul(&v_sinv)?.matmul(&svd.left.transpose())?;
    let y_inf = aitken_formula(&p_hat, &c[l], &c[l + 1])?;
    Ok(space.basis.mul_vec(&y_inf))
}

/// Aitken acceleration in the SVD space by operator application, with `P̂ = 𝕌_lᵀ G(𝕌_l)`.
///
/// Consumes exactly `l` Schwarz sweeps (`p·l` local solves) and one SVD;
/// `l` is capped at `K − 1`. Returns the accelerated interface vector and the
/// coarse space, which can be reused by an ARAS preconditioner.
pub fn aitken_svd_application(
    a: &SparseMatrix,
    m: &RasPreconditioner,
    trace: &[Vec<f64>],
    tol: f64,
) -> Result<(Vec<f64>, CoarseInterfaceSpace)> {
    aitken_svd_application_capped(a, m, trace, tol, usize::MAX)
}

/// As [`aitken_svd_application`], additionally capping `l` at `max_rank`.
pub fn aitken_svd_application_capped(
    a: &SparseMatrix,
    m: &RasPreconditioner,
    trace: &[Vec<f64>],
    tol: f64,
    max_rank: usize,
) -> Result<(Vec<f64>, CoarseInterfaceSpace)> {
    if trace.len() < 2 {
        return Err(Error::InvalidArgument("SVD application needs at least 2 iterates".into()));
    }
    let n = m.partition().interface_len();
    if trace[0].len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: trace[0].len() });
    }
    let mut space = svd_basis_from_trace(trace, tol)?;
    m.counters().add_svd(1);
    space.truncate((trace.len() - 1).min(max_rank));
    let l = space.q();
    let p_hat = build_coarse_operator(a, m, &space.basis)?;
    let last = trace.len() - 1;
    let u_inf = if l == 0 {
        trace[last].clone()
    } else {
        let c_old = coefficients(&space.basis, &trace[last - 1]);
        let c_new = coefficients(&space.basis, &trace[last]);
        let y_inf = aitken_formula(&p_hat, &c_old, &c_new)?;
        space.basis.mul_vec(&y_inf)
    };
    space.coarse_operator = Some(p_hat);
    Ok((u_inf, space))
}

/// Runs `q + 2` RAS Richardson sweeps from `u0` and returns the interface
/// traces `R_Γ u¹ … R_Γ u^{q+2}`.
pub fn interface_trace(
    a: &SparseMatrix,
    m: &RasPreconditioner,
    f: &[f64],
    u0: &[f64],
    sweeps: usize,
) -> Result<Vec<Vec<f64>>> {
    let opts = RichardsonOptions {
        record: Record::Indices(m.partition().interface().to_vec()),
        divergence_factor: f64::INFINITY,
    };
    let run = richardson_run_with(a, m, f, u0, 0.0, sweeps, &opts)?;
    let mut h = run.history;
    h.remove(0);
    Ok(h)
}

/// SVD coarse space of size at most `q`, built from a `q + 2`-sweep RAS trace
/// (operator-application path: `p·(q+2) + p·l` local solves and one SVD).
pub fn build_svd_space(
    a: &SparseMatrix,
    m: &RasPreconditioner,
    f: &[f64],
    u0: &[f64],
    q: usize,
    tol: f64,
) -> Result<CoarseInterfaceSpace> {
    let trace = interface_trace(a, m, f, u0, q + 2)?;
    let (_, space) = aitken_svd_application_capped(a, m, &trace, tol, q)?;
    Ok(space)
}
