//! Python module `aras`: problems, partitions, RAS/ARAS/ARAS2 preconditioners,
//! Krylov and Richardson solves, and spectral diagnostics.

use std::sync::Arc;

use aras_bench::{
    build_partition, build_preconditioner, generate, BasisSpec, Built, LoadedProblem, PartitionArgs, PartitionSpec,
    PrecondArgs, PrecondKind, ProblemSpec,
};
use aras_core::analysis::{condition_number, spectral_radius, theoretical_rho, TwoDomainPoissonSpec};
use aras_core::problems::Rhs;
use aras_core::{gcr, gmres, richardson_run, OverlapPartition, SparseMatrix};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A sparse linear system `A u = f`.
#[pyclass(frozen)]
struct Problem {
    inner: LoadedProblem,
}

#[pymethods]
impl Problem {
    /// Builds from CSR arrays; `rhs` defaults to `A·1`.
    #[new]
    #[pyo3(signature = (indptr, indices, data, rhs=None))]
    fn new(indptr: Vec<usize>, indices: Vec<usize>, data: Vec<f64>, rhs: Option<Vec<f64>>) -> PyResult<Self> {
        let n = indptr.len().checked_sub(1).ok_or_else(|| err("indptr must not be empty"))?;
        let matrix = SparseMatrix::new(n, n, indptr, indices, data).map_err(err)?;
        let rhs = match rhs {
            Some(f) if f.len() != n => return Err(err(format!("rhs has {} entries, matrix has {n} rows", f.len()))),
            Some(f) => f,
            None => aras_core::problems::rhs_for_matrix(&matrix, Rhs::Manufactured),
        };
        Ok(Self { inner: LoadedProblem { description: "csr".into(), matrix, rhs, grid: None } })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.matrix.nrows()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.matrix.nnz()
    }

    #[getter]
    fn rhs(&self) -> Vec<f64> {
        self.inner.rhs.clone()
    }

    /// `(indptr, indices, data)`.
    fn csr(&self) -> (Vec<usize>, Vec<usize>, Vec<f64>) {
        let a = &self.inner.matrix;
        (a.row_offsets().to_vec(), a.col_indices().to_vec(), a.values().to_vec())
    }

    fn matvec(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        aras_core::linalg::spmv(&self.inner.matrix, &x).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Problem({}, n={}, nnz={})", self.inner.description, self.n(), self.nnz())
    }
}

fn grid(spec: ProblemSpec, rhs: &str) -> PyResult<Problem> {
    let rhs: Rhs = rhs.parse().map_err(err)?;
    let g = generate(spec, rhs).map_err(err)?;
    Ok(Problem { inner: LoadedProblem { description: spec.to_string(), matrix: g.matrix.clone(), rhs: g.rhs.clone(), grid: Some(g) } })
}

/// 5-point Poisson on `[0,1]×[0,π]`; `m_x × m_y` grid points including the boundary.
#[pyfunction]
#[pyo3(signature = (m_x, m_y=None, rhs="manufactured"))]
fn poisson2d(m_x: usize, m_y: Option<usize>, rhs: &str) -> PyResult<Problem> {
    grid(ProblemSpec::Poisson { m_x, m_y: m_y.unwrap_or(m_x) }, rhs)
}

/// Shifted Laplacian on the unit square, `m × m` grid points.
#[pyfunction]
#[pyo3(signature = (m, rhs="manufactured"))]
fn helmholtz2d(m: usize, rhs: &str) -> PyResult<Problem> {
    grid(ProblemSpec::Helmholtz { m }, rhs)
}

/// Owned sets extended by `delta` graph layers.
#[pyclass(frozen)]
struct Partition {
    inner: Arc<OverlapPartition>,
}

#[pymethods]
impl Partition {
    /// `kind` is `band`, `greedy` or `file:<path>`.
    #[new]
    #[pyo3(signature = (problem, p=2, delta=1, kind="band", seed=0))]
    fn new(problem: &Problem, p: usize, delta: usize, kind: &str, seed: u64) -> PyResult<Self> {
        let partition: PartitionSpec = kind.parse().map_err(err)?;
        let args = PartitionArgs { partition, subdomains: p, delta, seed };
        Ok(Self { inner: Arc::new(build_partition(&problem.inner.matrix, &args).map_err(err)?) })
    }

    #[getter]
    fn num_subdomains(&self) -> usize {
        self.inner.num_subdomains()
    }

    #[getter]
    fn overlap(&self) -> usize {
        self.inner.overlap()
    }

    #[getter]
    fn interface_len(&self) -> usize {
        self.inner.interface_len()
    }

    fn owned(&self, i: usize) -> PyResult<Vec<usize>> {
        self.inner.owned_sets().get(i).cloned().ok_or_else(|| err(format!("no subdomain {i}")))
    }

    fn __repr__(&self) -> String {
        format!("Partition(p={}, delta={}, interface={})", self.num_subdomains(), self.overlap(), self.interface_len())
    }
}

/// A built RAS, ARAS or ARAS2 preconditioner.
#[pyclass(frozen)]
struct Precond {
    built: Built,
    q: Option<usize>,
}

#[pymethods]
impl Precond {
    #[getter]
    fn label(&self) -> String {
        self.built.preconditioner().label()
    }

    #[getter]
    fn q(&self) -> Option<usize> {
        self.q
    }

    /// `M⁻¹ r`.
    fn apply(&self, r: Vec<f64>) -> PyResult<Vec<f64>> {
        self.built.preconditioner().apply(&r).map_err(err)
    }

    /// `(local_solves, spmv, svd)` accumulated so far.
    fn counters(&self) -> (u64, u64, u64) {
        let c = self.built.preconditioner().counters().snapshot();
        (c.local_solves, c.spmv, c.svd)
    }

    fn __repr__(&self) -> String {
        format!("Precond({})", self.label())
    }
}

/// One-level restricted additive Schwarz.
#[pyfunction]
fn ras(problem: &Problem, partition: &Partition) -> PyResult<Precond> {
    let args = PrecondArgs { precond: PrecondKind::Ras, basis: None, build_local_tol: None, save_basis: None };
    let built = build_preconditioner(&problem.inner, partition.inner.clone(), &args).map_err(err)?;
    Ok(Precond { built, q: None })
}

/// ARAS (`variant="aras"`) or ARAS2 (`variant="aras2"`) with a coarse interface basis
/// `random:<q>[,<seed>]`, `svd:<q>[,<tol>]`, `analytic-eigen:<k>`, `full` or `file:<path>`.
#[pyfunction]
#[pyo3(signature = (problem, partition, basis, variant="aras2", build_local_tol=None))]
fn aras(problem: &Problem, partition: &Partition, basis: &str, variant: &str, build_local_tol: Option<f64>) -> PyResult<Precond> {
    let precond = match variant {
        "aras" => PrecondKind::Aras,
        "aras2" => PrecondKind::Aras2,
        other => return Err(err(format!("unknown variant '{other}' (expected aras or aras2)"))),
    };
    let basis: BasisSpec = basis.parse().map_err(err)?;
    let args = PrecondArgs { precond, basis: Some(basis), build_local_tol, save_basis: None };
    let built = build_preconditioner(&problem.inner, partition.inner.clone(), &args).map_err(err)?;
    let q = built.aras.as_ref().map(|m| m.q());
    Ok(Precond { built, q })
}

/// Solves `A u = f` from `u⁰ = 0`; returns a dict with `x`, `iterations`,
/// `converged`, `true_residuals` and `final_true_residual`.
#[pyfunction]
#[pyo3(signature = (problem, precond, solver="gcr", tol=1e-10, max_it=500, restart=None))]
fn solve<'py>(
    py: Python<'py>,
    problem: &Problem,
    precond: &Precond,
    solver: &str,
    tol: f64,
    max_it: usize,
    restart: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let a = &problem.inner.matrix;
    let f = &problem.inner.rhs;
    let m = precond.built.preconditioner();
    let x0 = vec![0.0; a.nrows()];
    let out = PyDict::new(py);
    match solver {
        "richardson" => {
            let t = richardson_run(a, m, f, &x0, tol, max_it).map_err(err)?;
            out.set_item("iterations", t.iterations)?;
            out.set_item("converged", t.converged())?;
            out.set_item("final_true_residual", *t.residual_norms.last().unwrap_or(&f64::NAN))?;
            out.set_item("true_residuals", t.residual_norms)?;
            out.set_item("x", t.solution)?;
        }
        "gcr" | "gmres" => {
            let r = if solver == "gcr" {
                gcr(a, m, f, &x0, tol, max_it)
            } else {
                gmres(a, m, f, &x0, tol, max_it, restart)
            }
            .map_err(err)?;
            out.set_item("iterations", r.iterations)?;
            out.set_item("converged", r.converged)?;
            out.set_item("final_true_residual", r.final_true_residual)?;
            out.set_item("true_residuals", r.true_residuals)?;
            out.set_item("precond_residuals", r.precond_residuals)?;
            out.set_item("x", r.x)?;
        }
        other => return Err(err(format!("unknown solver '{other}' (expected richardson, gcr or gmres)"))),
    }
    Ok(out)
}

/// `ρ(I − M⁻¹A)` from the assembled operator.
#[pyfunction(name = "spectral_radius")]
fn py_spectral_radius(problem: &Problem, precond: &Precond) -> PyResult<f64> {
    spectral_radius(&problem.inner.matrix, precond.built.preconditioner()).map_err(err)
}

/// `κ₂(M⁻¹A)` from the assembled operator.
#[pyfunction(name = "condition_number")]
fn py_condition_number(problem: &Problem, precond: &Precond) -> PyResult<f64> {
    condition_number(&problem.inner.matrix, precond.built.preconditioner()).map_err(err)
}

/// Analytic `(ρ_RAS, ρ_ARAS(q), ρ_ARAS2(q))` for the two-domain band split of an
/// `m_x × m_y` Poisson grid with overlap `delta`; `q` counts ± mode pairs.
#[pyfunction(name = "theoretical_rho")]
fn py_theoretical_rho(m_x: usize, m_y: usize, delta: usize, q: usize) -> PyResult<(f64, f64, f64)> {
    let spec = TwoDomainPoissonSpec::band_split(m_x, m_y, delta).map_err(err)?;
    theoretical_rho(&spec, q).map_err(err)
}

#[pymodule(name = "aras")]
fn aras_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Problem>()?;
    m.add_class::<Partition>()?;
    m.add_class::<Precond>()?;
    m.add_function(wrap_pyfunction!(poisson2d, m)?)?;
    m.add_function(wrap_pyfunction!(helmholtz2d, m)?)?;
    m.add_function(wrap_pyfunction!(ras, m)?)?;
    m.add_function(wrap_pyfunction!(aras, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(py_spectral_radius, m)?)?;
    m.add_function(wrap_pyfunction!(py_condition_number, m)?)?;
    m.add_function(wrap_pyfunction!(py_theoretical_rho, m)?)?;
    Ok(())
}
