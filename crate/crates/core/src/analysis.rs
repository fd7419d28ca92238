//! Analytic two-subdomain Poisson oracle and spectral diagnostics.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::aitken::{build_coarse_operator, BasisOrigin, CoarseInterfaceSpace};
use crate::error::{Error, Result};
use crate::linalg::{dense_eigenvalues, norm2, singular_values, symmetric_eigen, DenseMatrix, SparseMatrix};
use crate::preconditioner::{check_dim, Preconditioner};
use crate::schwarz::{assemble_interface_operator, RasPreconditioner, ASSEMBLY_CAP};

/// Geometry of a band-split two-subdomain Poisson problem on `[0, 1] × [0, π]`.
///
/// Each half is a strip of `n_x[i]` mesh steps between its physical boundary
/// and its artificial Dirichlet line; the two artificial lines lie
/// `overlap_steps` apart.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoDomainPoissonSpec {
    pub n_x: [usize; 2],
    pub m_y: usize,
    pub h_x: f64,
    pub h_y: f64,
    pub overlap_steps: usize,
}

impl TwoDomainPoissonSpec {
    /// The geometry produced by a two-way band partition of the `m_x × m_y`
    /// grid with algebraic overlap `delta`.
    ///
    /// The `m_x − 2` interior lines are split with the larger half first;
    /// each extended subdomain spans `a_i + delta + 1` steps and the
    /// interfaces are `2·delta + 1` steps apart.
    pub fn band_split(m_x: usize, m_y: usize, delta: usize) -> Result<Self> {
        if m_x < 4 || m_y < 3 {
            return Err(Error::InvalidArgument(format!("grid {m_x}×{m_y} is too small for two subdomains")));
        }
        let lines = m_x - 2;
        let a = [(lines + 1) / 2, lines / 2];
        let spec = Self {
            n_x: [a[0] + delta + 1, a[1] + delta + 1],
            m_y,
            h_x: 1.0 / (m_x - 1) as f64,
            h_y: std::f64::consts::PI / (m_y - 1) as f64,
            overlap_steps: 2 * delta + 1,
        };
        if spec.overlap_steps > spec.n_x[1] {
            return Err(Error::InvalidArgument(format!("overlap {delta} saturates a half of {} lines", a[1])));
        }
        Ok(spec)
    }

    /// Number of interior modes in `y` (`m_y − 2`).
    pub fn num_modes(&self) -> usize {
        self.m_y - 2
    }

    /// `λ_l = (2/h_y²)(1 − cos(l h_y))`, eigenvalues of the discrete `−∂²/∂y²`.
    pub fn lambda(&self, l: usize) -> f64 {
        let hy = self.h_y;
        2.0 / (hy * hy) * (1.0 - (l as f64 * hy).cos())
    }

    /// Roots of `r² − (2 + λ_l h_x²) r + 1 = 0`, larger first.
    pub fn characteristic_roots(&self, l: usize) -> (f64, f64) {
        let a = self.lambda(l) * self.h_x * self.h_x;
        let s = (a * a + 4.0 * a).sqrt();
        let r1 = (2.0 + a + s) / 2.0;
        (r1, 1.0 / r1)
    }
}

/// `(r₁^{N−d} − r₂^{N−d}) / (r₁^N − r₂^N) = sinh((N−d)θ) / sinh(Nθ)` with
/// `r₁ = e^θ`, evaluated without forming large powers.
fn decay_factor(n: usize, d: usize, theta: f64) -> f64 {
    if d == 0 {
        return 1.0;
    }
    if d >= n {
        return 0.0;
    }
    let num = -(-2.0 * (n - d) as f64 * theta).exp_m1();
    let den = -(-2.0 * n as f64 * theta).exp_m1();
    (-(d as f64) * theta).exp() * num / den
}

/// Interface contraction factors `δ_1 ≥ … ≥ δ_n`, one per `y` mode.
///
/// Mode `l` is damped by `sinh((N_i − d)θ_l)/sinh(N_iθ_l)` in subdomain `i`,
/// with `cosh θ_l = 1 + λ_l h_x²/2`; the interface operator couples the two
/// halves, so its eigenvalues are `±δ_l` with `δ_l` the geometric mean of the
/// two factors.
pub fn analytic_interface_modes(spec: &TwoDomainPoissonSpec) -> Result<Vec<f64>> {
    let d = spec.overlap_steps;
    if spec.n_x.iter().any(|&n| d > n) {
        return Err(Error::InvalidArgument(format!("overlap {d} exceeds the strip width {:?}", spec.n_x)));
    }
    let mut modes: Vec<f64> = (1..=spec.num_modes())
        .map(|l| {
            let a = spec.lambda(l) * spec.h_x * spec.h_x;
            let theta = 2.0 * (a.sqrt() / 2.0).asinh();
            let f0 = decay_factor(spec.n_x[0], d, theta);
            let f1 = decay_factor(spec.n_x[1], d, theta);
            (f0 * f1).sqrt()
        })
        .collect();
    modes.sort_by(|a, b| b.total_cmp(a));
    Ok(modes)
}

/// `{±δ_l}`, ordered by decreasing modulus.
pub fn analytic_spectrum(spec: &TwoDomainPoissonSpec) -> Result<Vec<Complex64>> {
    Ok(analytic_interface_modes(spec)?
        .into_iter()
        .flat_map(|d| [Complex64::new(d, 0.0), Complex64::new(-d, 0.0)])
        .collect())
}

/// `(ρ(T_RAS), ρ(T_ARAS(q)), ρ(T_ARAS2(q))) = (δ_1, δ_{q+1}, δ_{q+1}²)`.
///
/// `q` counts modes, i.e. `±` pairs of interface eigenvalues: the coarse
/// space holds `2q` eigenvectors of `P`.
pub fn theoretical_rho(spec: &TwoDomainPoissonSpec, q: usize) -> Result<(f64, f64, f64)> {
    let modes = analytic_interface_modes(spec)?;
    if q > modes.len() {
        return Err(Error::InvalidArgument(format!("q = {q} exceeds the {} interface modes", modes.len())));
    }
    let next = modes.get(q).copied().unwrap_or(0.0);
    Ok((modes[0], next, next * next))
}

fn assemble_columns(
    a: &SparseMatrix,
    m: &dyn Preconditioner,
    cap: usize,
    map: impl Fn(usize, Vec<f64>) -> Vec<f64> + Sync,
) -> Result<DenseMatrix> {
    let n = a.nrows();
    check_dim(n, m.dim())?;
    if n > cap {
        return Err(Error::AssemblyCapExceeded { size: n, cap });
    }
    let at = a.transpose();
    let cols = (0..n)
        .into_par_iter()
        .map(|j| {
            let (idx, vals) = at.row(j);
            let mut col = vec![0.0; n];
            for (&i, &v) in idx.iter().zip(vals.iter()) {
                col[i] = v;
            }
            m.apply(&col).map(|y| map(j, y))
        })
        .collect::<Result<Vec<_>>>()?;
    DenseMatrix::from_columns(n, &cols)
}

/// `M⁻¹A`, column by column.
pub fn assemble_preconditioned_operator(a: &SparseMatrix, m: &dyn Preconditioner, cap: usize) -> Result<DenseMatrix> {
    assemble_columns(a, m, cap, |_, y| y)
}

/// `T = I − M⁻¹A`, column by column.
pub fn assemble_iteration_operator(a: &SparseMatrix, m: &dyn Preconditioner) -> Result<DenseMatrix> {
    assemble_iteration_operator_capped(a, m, ASSEMBLY_CAP)
}

pub fn assemble_iteration_operator_capped(a: &SparseMatrix, m: &dyn Preconditioner, cap: usize) -> Result<DenseMatrix> {
    assemble_columns(a, m, cap, |j, mut y| {
        y.iter_mut().for_each(|v| *v = -*v);
        y[j] += 1.0;
        y
    })
}

/// `max |λ(T)|` from the dense spectrum of the assembled iteration operator.
pub fn spectral_radius(a: &SparseMatrix, m: &dyn Preconditioner) -> Result<f64> {
    let t = assemble_iteration_operator(a, m)?;
    Ok(dense_eigenvalues(&t)?.first().map_or(0.0, |z| z.norm()))
}

/// `κ₂(M⁻¹A) = σ_max / σ_min` of the assembled preconditioned operator.
///
/// Uses the values-only bidiagonal path; [`crate::linalg::dense_svd`] gives the
/// same numbers with factors but is much slower at this size.
pub fn condition_number(a: &SparseMatrix, m: &dyn Preconditioner) -> Result<f64> {
    let b = assemble_preconditioned_operator(a, m, ASSEMBLY_CAP)?;
    let s = singular_values(&b)?;
    let (max, min) = (s[0], *s.last().unwrap());
    Ok(if min > 0.0 { max / min } else { f64::INFINITY })
}

/// Approximate `ρ(I − M⁻¹A)` without assembly: geometric mean of error
/// reduction over the second half of `iterations` homogeneous sweeps from a
/// seeded random start.
pub fn estimate_spectral_radius(a: &SparseMatrix, m: &dyn Preconditioner, iterations: usize, seed: u64) -> Result<f64> {
    let n = a.nrows();
    check_dim(n, m.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut e: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    let e0 = norm2(&e);
    e.iter_mut().for_each(|v| *v /= e0);
    let mut norms = vec![1.0];
    for _ in 0..iterations.max(2) {
        let z = m.apply(&a.mul_vec(&e))?;
        e.iter_mut().zip(&z).for_each(|(ei, zi)| *ei -= zi);
        let s = norm2(&e);
        norms.push(s);
        if !(s > 0.0) || !s.is_finite() {
            break;
        }
        // Renormalize to keep the iterate representable; the norms are
        // cumulative ratios.
        e.iter_mut().for_each(|v| *v /= s);
    }
    // norms[k] = ‖e^k‖ / ‖e^{k-1}‖ (k ≥ 1) after renormalization.
    let ratios = &norms[1..];
    if ratios.iter().any(|r| *r == 0.0) {
        return Ok(0.0);
    }
    let tail = &ratios[ratios.len() / 2..];
    Ok((tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64).exp())
}

/// Asymptotic contraction factor of a residual or error history: geometric
/// mean of the per-step ratio over the last even-length window still above
/// the round-off floor `floor · norms[0]`.
pub fn asymptotic_rate(norms: &[f64], floor: f64) -> Option<f64> {
    let first = *norms.first()?;
    let usable = norms.iter().take_while(|&&r| r > floor * first && r.is_finite()).count();
    if usable < 3 {
        return None;
    }
    let end = usable - 1;
    let width = ((end / 2) & !1).max(2).min(end);
    let start = end - width;
    Some((norms[end] / norms[start]).powf(1.0 / width as f64))
}

/// Orthonormal basis of the invariant subspace of the `k` eigenvalues of the
/// assembled interface operator `P` that are largest in modulus, and its
/// coarse operator.
///
/// A symmetric `P` is diagonalized directly; otherwise the subspace is found
/// by orthogonal iteration.
pub fn eigen_truncated_space(a: &SparseMatrix, m: &RasPreconditioner, k: usize) -> Result<CoarseInterfaceSpace> {
    let p = assemble_interface_operator(a, m, ASSEMBLY_CAP)?;
    let basis = dominant_invariant_subspace(&p, k)?;
    let p_hat = build_coarse_operator(a, m, &basis)?;
    Ok(CoarseInterfaceSpace {
        basis,
        coarse_operator: Some(p_hat),
        origin: BasisOrigin::Analytic,
        svd_tol: 0.0,
        source_sigma: Vec::new(),
    })
}

/// Dominant `k`-dimensional invariant subspace of a square matrix.
pub fn dominant_invariant_subspace(p: &DenseMatrix, k: usize) -> Result<DenseMatrix> {
    let n = p.nrows();
    if k > n {
        return Err(Error::InvalidArgument(format!("k = {k} exceeds the dimension {n}")));
    }
    if k == n {
        return Ok(DenseMatrix::identity(n));
    }
    let scale = p.max_abs().max(f64::MIN_POSITIVE);
    if p.is_symmetric(1e-12 * scale) {
        let eig = symmetric_eigen(p)?;
        let mut order: Vec<usize> = (0..n).collect();
        // Stable sort keeps first occurrence on ties.
        order.sort_by(|&i, &j| eig.values[j].abs().total_cmp(&eig.values[i].abs()));
        let cols: Vec<Vec<f64>> = order[..k].iter().map(|&j| eig.vectors.column(j)).collect();
        return DenseMatrix::from_columns(n, &cols);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let mut q = DenseMatrix::zeros(n, k);
    for i in 0..n {
        for j in 0..k {
            q[(i, j)] = rng.gen::<f64>() - 0.5;
        }
    }
    q = robust_orthonormalize(&q, &mut rng);
    let pnorm = p.frobenius_norm().max(f64::MIN_POSITIVE);
    for _ in 0..20_000 {
        let z = p.matmul(&q)?;
        let h = q.tmatmul(&z)?;
        let resid = z.sub(&q.matmul(&h)?).frobenius_norm();
        if resid <= 1e-12 * pnorm {
            break;
        }
        q = robust_orthonormalize(&z, &mut rng);
    }
    Ok(q)
}

/// Two-pass MGS that replaces numerically dependent columns by fresh random
/// directions.
fn robust_orthonormalize(v: &DenseMatrix, rng: &mut ChaCha8Rng) -> DenseMatrix {
    let (n, k) = (v.nrows(), v.ncols());
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(k);
    for j in 0..k {
        let mut c = v.column(j);
        let mut attempts = 0;
        loop {
            let orig = norm2(&c);
            for _ in 0..2 {
                for q in &cols {
                    let d: f64 = q.iter().zip(&c).map(|(a, b)| a * b).sum();
                    c.iter_mut().zip(q).for_each(|(ci, qi)| *ci -= d * qi);
                }
            }
            let nc = norm2(&c);
            if nc > 1e-10 * orig && nc > 0.0 {
                c.iter_mut().for_each(|x| *x /= nc);
                break;
            }
            attempts += 1;
            assert!(attempts < 100, "cannot complete an orthonormal basis");
            c = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
        }
        cols.push(c);
    }
    DenseMatrix::from_columns(n, &cols).expect("consistent column lengths")
}
