use std::sync::Arc;

use crate::counters::{CounterSnapshot, Counters};
use crate::error::{Error, Result};
use crate::linalg::{lu_factor, LuFactors, SparseMatrix};

/// Action of an approximate inverse `M⁻¹`.
///
/// Implementations are immutable after construction; `apply` may be called
/// concurrently.
pub trait Preconditioner: Send + Sync {
    fn dim(&self) -> usize;

    /// `y = M⁻¹ r`.
    fn apply(&self, r: &[f64]) -> Result<Vec<f64>>;

    /// Short human-readable name, e.g. `RAS` or `ARAS2(q=15)`.
    fn label(&self) -> String;

    /// Shared operation counters.
    fn counters(&self) -> &Arc<Counters>;

    fn cost_report(&self) -> CounterSnapshot {
        self.counters().snapshot()
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `M = I`.
#[derive(Debug)]
pub struct Identity {
    n: usize,
    counters: Arc<Counters>,
}

impl Identity {
    pub fn new(n: usize) -> Self {
        Self { n, counters: Arc::new(Counters::new()) }
    }
}

impl Preconditioner for Identity {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.n, r.len())?;
        Ok(r.to_vec())
    }

    fn label(&self) -> String {
        "none".into()
    }

    fn counters(&self) -> &Arc<Counters> {
        &self.counters
    }
}

/// `M = A`, applied through a global LU factorization.
#[derive(Debug)]
pub struct DirectSolve {
    lu: LuFactors,
    counters: Arc<Counters>,
}

impl DirectSolve {
    pub fn new(a: &SparseMatrix) -> Result<Self> {
        Ok(Self { lu: lu_factor(a)?, counters: Arc::new(Counters::new()) })
    }
}

impl Preconditioner for DirectSolve {
    fn dim(&self) -> usize {
        self.lu.dimension()
    }

    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        self.counters.add_local_solves(1);
        self.lu.solve(r)
    }

    fn label(&self) -> String {
        "exact".into()
    }

    fn counters(&self) -> &Arc<Counters> {
        &self.counters
    }
}

impl<P: Preconditioner + ?Sized> Preconditioner for Arc<P> {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        (**self).apply(r)
    }
    fn label(&self) -> String {
        (**self).label()
    }
    fn counters(&self) -> &Arc<Counters> {
        (**self).counters()
    }
}
