//! One-level restricted additive Schwarz and the Richardson iteration.

use std::sync::Arc;

use rayon::prelude::*;

use crate::counters::Counters;
use crate::error::{Error, Result};
use crate::krylov::gmres_operator;
use crate::linalg::{lu_factor, norm2, DenseMatrix, LuFactors, SparseMatrix};
use crate::partition::OverlapPartition;
use crate::preconditioner::{check_dim, Preconditioner};

/// Write-back rule for local solutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchwarzMode {
    /// Restricted: each subdomain writes only its owned rows.
    Ras,
    /// Additive: every extended row is written and overlaps are summed.
    As,
}

/// How local problems `A_{i,δ} x = b` are solved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LocalSolve {
    /// Partial-pivoting LU of the densified (or banded) block.
    Exact,
    /// Jacobi-preconditioned GMRES(50) to the given relative residual.
    Iterative { tol: f64 },
}

#[derive(Debug)]
enum LocalSolver {
    Lu(LuFactors),
    Iterative { block: SparseMatrix, inv_diag: Vec<f64>, tol: f64 },
}

impl LocalSolver {
    fn solve(&self, b: &[f64]) -> Vec<f64> {
        match self {
            LocalSolver::Lu(f) => {
                let mut x = b.to_vec();
                f.solve_in_place(&mut x);
                x
            }
            LocalSolver::Iterative { block, inv_diag, tol } => {
                let op = |x: &[f64]| block.mul_vec(x);
                let pc = |r: &[f64]| r.iter().zip(inv_diag).map(|(a, d)| a * d).collect::<Vec<_>>();
                let x0 = vec![0.0; b.len()];
                gmres_operator(&op, &pc, b, &x0, *tol, 10 * b.len().max(10), Some(50)).x
            }
        }
    }
}

/// `M⁻¹_{RAS,δ} = Σ R̃ᵢᵀ A_{i,δ}⁻¹ Rᵢ` (or the AS variant with full write-back).
#[derive(Debug)]
pub struct RasPreconditioner {
    part: Arc<OverlapPartition>,
    local: Vec<LocalSolver>,
    mode: SchwarzMode,
    counters: Arc<Counters>,
}

/// Factors every local block `A_{i,δ} = R_{i,δ} A R_{i,δ}ᵀ`.
pub fn build_ras(a: &SparseMatrix, part: Arc<OverlapPartition>, mode: SchwarzMode) -> Result<RasPreconditioner> {
    RasPreconditioner::build(a, part, mode, LocalSolve::Exact, Arc::new(Counters::new()))
}

impl RasPreconditioner {
    /// Full constructor; `counters` may be shared with other preconditioners.
    pub fn build(
        a: &SparseMatrix,
        part: Arc<OverlapPartition>,
        mode: SchwarzMode,
        local_solve: LocalSolve,
        counters: Arc<Counters>,
    ) -> Result<Self> {
        check_dim(part.dim(), a.nrows())?;
        check_dim(a.nrows(), a.ncols())?;
        let local = (0..part.num_subdomains())
            .into_par_iter()
            .map(|i| {
                let block = a.principal_submatrix(part.extended(i));
                match local_solve {
                    LocalSolve::Exact => lu_factor(&block).map(LocalSolver::Lu).map_err(|e| match e {
                        Error::SingularMatrix { column } => Error::SingularSubdomain { subdomain: i, column },
                        other => other,
                    }),
                    LocalSolve::Iterative { tol } => {
                        let diag = block.diagonal();
                        if let Some(column) = diag.iter().position(|&d| d == 0.0) {
                            return Err(Error::SingularSubdomain { subdomain: i, column });
                        }
                        let inv_diag = diag.iter().map(|d| 1.0 / d).collect();
                        Ok(LocalSolver::Iterative { block, inv_diag, tol })
                    }
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { part, local, mode, counters })
    }

    pub fn partition(&self) -> &Arc<OverlapPartition> {
        &self.part
    }

    pub fn mode(&self) -> SchwarzMode {
        self.mode
    }

    pub fn num_subdomains(&self) -> usize {
        self.local.len()
    }

    /// Dimension of local block `i`.
    pub fn local_dim(&self, i: usize) -> usize {
        self.part.extended(i).len()
    }
}

/// `M⁻¹ r` for a RAS/AS preconditioner.
pub fn apply_ras(m: &RasPreconditioner, r: &[f64]) -> Result<Vec<f64>> {
    m.apply(r)
}

impl Preconditioner for RasPreconditioner {
    fn dim(&self) -> usize {
        self.part.dim()
    }

    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.part.dim(), r.len())?;
        let part = &self.part;
        let solutions: Vec<Vec<f64>> = (0..self.local.len())
            .into_par_iter()
            .map(|i| {
                let b: Vec<f64> = part.extended(i).iter().map(|&g| r[g]).collect();
                self.local[i].solve(&b)
            })
            .collect();
        self.counters.add_local_solves(self.local.len() as u64);
        let mut y = vec![0.0; part.dim()];
        for (i, x) in solutions.iter().enumerate() {
            let ext = part.extended(i);
            match self.mode {
                SchwarzMode::Ras => {
                    for &k in part.owned_local(i) {
                        y[ext[k]] = x[k];
                    }
                }
                SchwarzMode::As => {
                    for (&g, &v) in ext.iter().zip(x) {
                        y[g] += v;
                    }
                }
            }
        }
        Ok(y)
    }

    fn label(&self) -> String {
        match self.mode {
            SchwarzMode::Ras => "RAS".into(),
            SchwarzMode::As => "AS".into(),
        }
    }

    fn counters(&self) -> &Arc<Counters> {
        &self.counters
    }
}

/// Outcome of a stationary run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RunStatus {
    Converged,
    MaxIterations,
    /// Residual exceeded the divergence threshold times its initial value.
    Diverged,
    /// An iterate overflowed; the history up to that point is kept.
    NonFinite,
}

/// Which part of each iterate to keep.
#[derive(Debug, Clone, Default)]
pub enum Record {
    #[default]
    None,
    Full,
    /// Keep only these global indices (e.g. the interface `Γ`).
    Indices(Vec<usize>),
}

/// Iterate history and residuals of a Richardson run.
#[derive(Debug, Clone)]
pub struct RichardsonTrace {
    /// Recorded iterates `u⁰..u^K` (empty when nothing was requested).
    pub history: Vec<Vec<f64>>,
    /// `‖f − A uᵏ‖₂ / ‖f‖₂` (absolute when `f = 0`), one per iterate.
    pub residual_norms: Vec<f64>,
    /// `‖M⁻¹(f − A uᵏ)‖₂` for every iterate a correction was computed from.
    pub correction_norms: Vec<f64>,
    pub iterations: usize,
    pub status: RunStatus,
    pub solution: Vec<f64>,
    /// Global matrix-vector products performed by the driver.
    pub spmv: u64,
}

impl RichardsonTrace {
    pub fn converged(&self) -> bool {
        self.status == RunStatus::Converged
    }
}

/// Options for [`richardson_run`] beyond the required arguments.
#[derive(Debug, Clone)]
pub struct RichardsonOptions {
    pub record: Record,
    /// Growth factor over the initial residual that counts as divergence.
    pub divergence_factor: f64,
}

impl Default for RichardsonOptions {
    fn default() -> Self {
        Self { record: Record::None, divergence_factor: 1e8 }
    }
}

/// `u^k = u^{k−1} + M⁻¹(f − A u^{k−1})` until the relative residual drops below `tol`.
pub fn richardson_run(
    a: &SparseMatrix,
    m: &dyn Preconditioner,
    f: &[f64],
    u0: &[f64],
    tol: f64,
    max_it: usize,
) -> Result<RichardsonTrace> {
    richardson_run_with(a, m, f, u0, tol, max_it, &RichardsonOptions::default())
}

pub fn richardson_run_with(
    a: &SparseMatrix,
    m: &dyn Preconditioner,
    f: &[f64],
    u0: &[f64],
    tol: f64,
    max_it: usize,
    opts: &RichardsonOptions,
) -> Result<RichardsonTrace> {
    let n = a.nrows();
    check_dim(n, f.len())?;
    check_dim(n, u0.len())?;
    check_dim(n, m.dim())?;
    let fnorm = norm2(f);
    let scale = if fnorm > 0.0 { fnorm } else { 1.0 };
    let record = |u: &[f64]| -> Option<Vec<f64>> {
        match &opts.record {
            Record::None => None,
            Record::Full => Some(u.to_vec()),
            Record::Indices(idx) => Some(idx.iter().map(|&g| u[g]).collect()),
        }
    };

    let mut u = u0.to_vec();
    let mut history = Vec::new();
    history.extend(record(&u));
    let mut r = vec![0.0; n];
    let mut spmv = 0u64;
    let residual = |u: &[f64], r: &mut [f64], spmv: &mut u64| {
        a.mul_vec_into(u, r);
        *spmv += 1;
        r.iter_mut().zip(f).for_each(|(ri, fi)| *ri = fi - *ri);
        norm2(r) / scale
    };
    let mut res = residual(&u, &mut r, &mut spmv);
    let initial = res;
    let mut residual_norms = vec![res];
    let mut correction_norms = Vec::new();
    let mut status = RunStatus::MaxIterations;
    let mut iterations = 0;
    if !res.is_finite() {
        status = RunStatus::NonFinite;
    } else if res <= tol {
        status = RunStatus::Converged;
    } else {
        while iterations < max_it {
            let z = m.apply(&r)?;
            correction_norms.push(norm2(&z));
            u.iter_mut().zip(&z).for_each(|(ui, zi)| *ui += zi);
            iterations += 1;
            res = residual(&u, &mut r, &mut spmv);
            residual_norms.push(res);
            history.extend(record(&u));
            if !res.is_finite() || u.iter().any(|v| !v.is_finite()) {
                status = RunStatus::NonFinite;
                break;
            }
            if res <= tol {
                status = RunStatus::Converged;
                break;
            }
            if res > opts.divergence_factor * initial {
                status = RunStatus::Diverged;
                break;
            }
        }
    }
    Ok(RichardsonTrace { history, residual_norms, correction_norms, iterations, status, solution: u, spmv })
}

/// Interface error-transfer action `P g = R_Γ (x − M⁻¹ A x)` with `x = R_Γᵀ g`.
///
/// This is one Schwarz sweep with zero right-hand side started from interface
/// data `g`: each local problem sees `g` as Dirichlet data, and the new
/// interface values are read back from the neighbors that own them.
pub fn homogeneous_interface_iteration(
    a: &SparseMatrix,
    m: &RasPreconditioner,
    g: &[f64],
) -> Result<Vec<f64>> {
    let part = m.partition();
    let x = part.prolong_interface(g)?;
    let ax = a.mul_vec(&x);
    m.counters().add_spmv(1);
    let z = m.apply(&ax)?;
    let y: Vec<f64> = x.iter().zip(&z).map(|(xi, zi)| xi - zi).collect();
    part.restrict_interface(&y)
}

/// Default cap on dense operator assembly.
pub const ASSEMBLY_CAP: usize = 5000;

/// Assembles the `n × n` interface operator `P` column by column.
pub fn assemble_interface_operator(a: &SparseMatrix, m: &RasPreconditioner, cap: usize) -> Result<DenseMatrix> {
    let n = m.partition().interface_len();
    if n > cap {
        return Err(Error::AssemblyCapExceeded { size: n, cap });
    }
    let cols = (0..n)
        .into_par_iter()
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            homogeneous_interface_iteration(a, m, &e)
        })
        .collect::<Result<Vec<_>>>()?;
    DenseMatrix::from_columns(n, &cols)
}
