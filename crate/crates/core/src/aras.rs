//! Aitken-accelerated RAS preconditioners ARAS(q) and ARAS2(q).

use std::sync::Arc;

use crate::aitken::CoarseInterfaceSpace;
use crate::counters::{CounterSnapshot, Counters};
use crate::error::{Error, Result};
use crate::linalg::{lu_factor_dense, DenseMatrix, LuFactors, SparseMatrix};
use crate::preconditioner::{check_dim, Preconditioner};
use crate::schwarz::RasPreconditioner;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArasVariant {
    /// `M⁻¹_{ARAS(q)} = (I + R_Γᵀ 𝕌 ((I − P̂)⁻¹ − I) 𝕌ᵀ R_Γ) M⁻¹_{RAS}`.
    Aras,
    /// `2 M⁻¹_{ARAS(q)} − M⁻¹_{ARAS(q)} A M⁻¹_{ARAS(q)}`.
    Aras2,
}

impl ArasVariant {
    pub fn name(self) -> &'static str {
        match self {
            ArasVariant::Aras => "ARAS",
            ArasVariant::Aras2 => "ARAS2",
        }
    }
}

/// Two-level preconditioner: RAS followed by an Aitken correction on a
/// coarse interface space.
#[derive(Debug)]
pub struct ArasPreconditioner {
    a: SparseMatrix,
    ras: Arc<RasPreconditioner>,
    coarse: CoarseInterfaceSpace,
    variant: ArasVariant,
    /// LU of `I_q − P̂`; `None` when `q = 0`.
    correction: Option<LuFactors>,
}

/// Factors `I_q − P̂` once for repeated applications.
pub fn build_aras(
    a: &SparseMatrix,
    ras: Arc<RasPreconditioner>,
    coarse: CoarseInterfaceSpace,
    variant: ArasVariant,
) -> Result<ArasPreconditioner> {
    check_dim(ras.dim(), a.nrows())?;
    check_dim(ras.partition().interface_len(), coarse.n())?;
    let p_hat = coarse
        .coarse_operator
        .as_ref()
        .ok_or_else(|| Error::InvalidArgument("coarse space has no operator; build it first".into()))?;
    let q = coarse.q();
    check_dim(q, p_hat.nrows())?;
    let correction = if q == 0 {
        None
    } else {
        let i_minus_p = DenseMatrix::identity(q).sub(p_hat);
        Some(lu_factor_dense(&i_minus_p).map_err(|_| Error::SingularCoarseCorrection)?)
    };
    Ok(ArasPreconditioner { a: a.clone(), ras, coarse, variant, correction })
}

impl ArasPreconditioner {
    pub fn ras(&self) -> &Arc<RasPreconditioner> {
        &self.ras
    }

    pub fn coarse(&self) -> &CoarseInterfaceSpace {
        &self.coarse
    }

    pub fn variant(&self) -> ArasVariant {
        self.variant
    }

    pub fn q(&self) -> usize {
        self.coarse.q()
    }

    /// One ARAS(q) application: `y = z + R_Γᵀ 𝕌 (v − w)` with `z = M⁻¹_{RAS} r`,
    /// `w = 𝕌ᵀ R_Γ z` and `(I − P̂) v = w`.
    fn apply_once(&self, r: &[f64]) -> Result<Vec<f64>> {
        let mut z = self.ras.apply(r)?;
        if let Some(lu) = &self.correction {
            let part = self.ras.partition();
            let zg = part.restrict_interface(&z)?;
            let w = self.coarse.basis.tmul_vec(&zg);
            let v = lu.solve(&w)?;
            let dv: Vec<f64> = v.iter().zip(&w).map(|(a, b)| a - b).collect();
            let corr = self.coarse.basis.mul_vec(&dv);
            for (&g, c) in part.interface().iter().zip(&corr) {
                z[g] += c;
            }
        }
        Ok(z)
    }
}

/// `y = M⁻¹_{ARAS} r` (or the ARAS2 composition).
pub fn apply_aras(m: &ArasPreconditioner, r: &[f64]) -> Result<Vec<f64>> {
    m.apply(r)
}

impl Preconditioner for ArasPreconditioner {
    fn dim(&self) -> usize {
        self.ras.dim()
    }

    fn apply(&self, r: &[f64]) -> Result<Vec<f64>> {
        check_dim(self.dim(), r.len())?;
        let y1 = self.apply_once(r)?;
        match self.variant {
            ArasVariant::Aras => Ok(y1),
            ArasVariant::Aras2 => {
                let ay = self.a.mul_vec(&y1);
                self.counters().add_spmv(1);
                let y2 = self.apply_once(&ay)?;
                Ok(y1.iter().zip(&y2).map(|(a, b)| 2.0 * a - b).collect())
            }
        }
    }

    fn label(&self) -> String {
        format!("{}(q={})", self.variant.name(), self.coarse.q())
    }

    fn counters(&self) -> &Arc<Counters> {
        self.ras.counters()
    }
}

/// Operation counts and the complexity model for building and applying a
/// preconditioner, in units of one-level RAS applications.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CostReport {
    pub measured: CounterSnapshot,
    pub subdomains: usize,
    /// RAS applications per preconditioner application (1 or 2).
    pub ras_per_apply: usize,
    /// Global products per preconditioner application (0 or 1).
    pub spmv_per_apply: usize,
    /// Upper bound on RAS applications to build an SVD coarse space of size `q`
    /// through operator application: `2(q + 1)`.
    pub build_bound_application: usize,
    /// RAS applications used by the inversion path: `q + 2`.
    pub build_bound_inversion: usize,
}

/// Counters plus the predicted cost decomposition for `m`.
pub fn cost_report(m: &ArasPreconditioner) -> CostReport {
    let q = m.q();
    let (ras_per_apply, spmv_per_apply) = match m.variant {
        ArasVariant::Aras => (1, 0),
        ArasVariant::Aras2 => (2, 1),
    };
    CostReport {
        measured: m.cost_report(),
        subdomains: m.ras.num_subdomains(),
        ras_per_apply,
        spmv_per_apply,
        build_bound_application: 2 * (q + 1),
        build_bound_inversion: q + 2,
    }
}
