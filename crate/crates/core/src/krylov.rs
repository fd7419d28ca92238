//! Left-preconditioned GCR and GMRES.

use std::time::Instant;

use crate::counters::CounterSnapshot;
use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, norm2, SparseMatrix};
use crate::preconditioner::{check_dim, Preconditioner};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Richardson,
    Gcr,
    Gmres,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Richardson => "richardson",
            Method::Gcr => "gcr",
            Method::Gmres => "gmres",
        }
    }
}

/// Result of a preconditioned solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub method: Method,
    pub preconditioner: String,
    pub iterations: usize,
    pub converged: bool,
    /// Norm of `M⁻¹(b − A xᵏ)` relative to `‖M⁻¹ b‖`, one entry per iterate.
    pub precond_residuals: Vec<f64>,
    /// `‖b − A xᵏ‖₂ / ‖b‖₂`, one entry per iterate.
    pub true_residuals: Vec<f64>,
    pub final_true_residual: f64,
    pub wall_time_secs: f64,
    /// Preconditioner counters accumulated during this solve.
    pub counters: CounterSnapshot,
    /// Global products with `A` issued by the driver (including residual monitoring).
    pub spmv: u64,
    pub x: Vec<f64>,
}

fn true_residual(a: &SparseMatrix, b: &[f64], x: &[f64], bnorm: f64) -> f64 {
    let ax = a.mul_vec(x);
    let r: f64 = ax.iter().zip(b).map(|(p, q)| (q - p) * (q - p)).sum::<f64>().sqrt();
    r / bnorm
}

/// Full-memory left-preconditioned GCR.
///
/// Stops when `‖M⁻¹(b − A x)‖ ≤ tol · ‖M⁻¹ b‖`.
pub fn gcr(
    a: &SparseMatrix,
    m: &dyn Preconditioner,
    b: &[f64],
    x0: &[f64],
    tol: f64,
    max_it: usize,
) -> Result<SolveReport> {
    let n = a.nrows();
    check_dim(n, b.len())?;
    check_dim(n, x0.len())?;
    check_dim(n, m.dim())?;
    let start = Instant::now();
    let before = m.counters().snapshot();
    let mut spmv = 0u64;
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);

    let mut x = x0.to_vec();
    let ax = a.mul_vec(&x);
    spmv += 1;
    let r0: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut r = m.apply(&r0)?;
    // With a zero initial guess M⁻¹b is the first residual; avoid a second apply.
    let mb_norm = if x0.iter().all(|v| *v == 0.0) { norm2(&r) } else { norm2(&m.apply(b)?) };
    let scale = if mb_norm > 0.0 { mb_norm } else { 1.0 };
    let mut precond = vec![norm2(&r) / scale];
    let mut truth = vec![true_residual(a, b, &x, bnorm)];
    spmv += 1;

    let mut ps: Vec<Vec<f64>> = Vec::new();
    let mut qs: Vec<Vec<f64>> = Vec::new();
    let initial_q = norm2(&r);
    let mut iterations = 0;
    let mut converged = precond[0] <= tol;
    while !converged && iterations < max_it {
        let mut p = r.clone();
        let ap = a.mul_vec(&p);
        spmv += 1;
        let mut q = m.apply(&ap)?;
        for (pp, qq) in ps.iter().zip(&qs) {
            let beta = dot(&q, qq);
            axpy(-beta, pp, &mut p);
            axpy(-beta, qq, &mut q);
        }
        let qn = norm2(&q);
        if !(qn > 1e-14 * initial_q) {
            let partial = report(Method::Gcr, m, iterations, false, precond, truth, start, before, spmv, x);
            return Err(Error::Breakdown { iteration: iterations, partial: Box::new(partial) });
        }
        p.iter_mut().for_each(|v| *v /= qn);
        q.iter_mut().for_each(|v| *v /= qn);
        let alpha = dot(&r, &q);
        axpy(alpha, &p, &mut x);
        axpy(-alpha, &q, &mut r);
        ps.push(p);
        qs.push(q);
        iterations += 1;
        precond.push(norm2(&r) / scale);
        truth.push(true_residual(a, b, &x, bnorm));
        spmv += 1;
        converged = *precond.last().unwrap() <= tol;
    }
    Ok(report(Method::Gcr, m, iterations, converged, precond, truth, start, before, spmv, x))
}

#[allow(clippy::too_many_arguments)]
fn report(
    method: Method,
    m: &dyn Preconditioner,
    iterations: usize,
    converged: bool,
    precond_residuals: Vec<f64>,
    true_residuals: Vec<f64>,
    start: Instant,
    before: CounterSnapshot,
    spmv: u64,
    x: Vec<f64>,
) -> SolveReport {
    SolveReport {
        method,
        preconditioner: m.label(),
        iterations,
        converged,
        final_true_residual: *true_residuals.last().unwrap(),
        precond_residuals,
        true_residuals,
        wall_time_secs: start.elapsed().as_secs_f64(),
        counters: m.counters().snapshot() - before,
        spmv,
        x,
    }
}

/// Left-preconditioned GMRES with modified Gram–Schmidt Arnoldi.
///
/// `restart = None` runs full GMRES. A happy breakdown counts as convergence.
pub fn gmres(
    a: &SparseMatrix,
    m: &dyn Preconditioner,
    b: &[f64],
    x0: &[f64],
    tol: f64,
    max_it: usize,
    restart: Option<usize>,
) -> Result<SolveReport> {
    let n = a.nrows();
    check_dim(n, b.len())?;
    check_dim(n, x0.len())?;
    check_dim(n, m.dim())?;
    let start = Instant::now();
    let before = m.counters().snapshot();
    let bnorm = norm2(b).max(f64::MIN_POSITIVE);
    let failure = std::cell::RefCell::new(None);
    let spmv = std::cell::Cell::new(0u64);
    let op = |x: &[f64]| {
        spmv.set(spmv.get() + 1);
        a.mul_vec(x)
    };
    let pc = |r: &[f64]| match m.apply(r) {
        Ok(v) => v,
        Err(e) => {
            failure.borrow_mut().get_or_insert(e);
            vec![0.0; r.len()]
        }
    };
    let mut truth = Vec::new();
    let mut monitor = |x: &[f64]| {
        spmv.set(spmv.get() + 1);
        truth.push(true_residual(a, b, x, bnorm));
    };
    let out = gmres_core(&op, &pc, b, x0, tol, max_it, restart, Some(&mut monitor));
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(report(Method::Gmres, m, out.iterations, out.converged, out.residuals, truth, start, before, spmv.get(), out.x))
}

/// Outcome of [`gmres_operator`].
#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// Preconditioned residual norms relative to `‖M⁻¹ b‖`.
    pub residuals: Vec<f64>,
}

/// GMRES on closures: `op` applies the matrix, `pc` the left preconditioner.
pub fn gmres_operator(
    op: &dyn Fn(&[f64]) -> Vec<f64>,
    pc: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: &[f64],
    tol: f64,
    max_it: usize,
    restart: Option<usize>,
) -> GmresOutcome {
    gmres_core(op, pc, b, x0, tol, max_it, restart, None)
}

#[allow(clippy::too_many_arguments)]
fn gmres_core(
    op: &dyn Fn(&[f64]) -> Vec<f64>,
    pc: &dyn Fn(&[f64]) -> Vec<f64>,
    b: &[f64],
    x0: &[f64],
    tol: f64,
    max_it: usize,
    restart: Option<usize>,
    mut monitor: Option<&mut dyn FnMut(&[f64])>,
) -> GmresOutcome {
    let mut x = x0.to_vec();
    let precond_residual = |x: &[f64]| -> Vec<f64> {
        let ax = op(x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        pc(&r)
    };
    let mut r = precond_residual(&x);
    let mut beta = norm2(&r);
    let mb_norm = if x0.iter().all(|v| *v == 0.0) { beta } else { norm2(&pc(b)) };
    let scale = if mb_norm > 0.0 { mb_norm } else { 1.0 };
    let mut residuals = vec![beta / scale];
    if let Some(mon) = monitor.as_mut() {
        mon(&x);
    }
    let mut iterations = 0;
    let cycle = restart.unwrap_or(max_it).max(1);
    let mut converged = beta / scale <= tol;

    while !converged && iterations < max_it {
        let k_max = cycle.min(max_it - iterations);
        let mut v: Vec<Vec<f64>> = Vec::with_capacity(k_max + 1);
        v.push(r.iter().map(|ri| ri / beta).collect());
        // Hessenberg columns, Givens rotations and rotated rhs.
        let mut h: Vec<Vec<f64>> = Vec::with_capacity(k_max);
        let mut cs: Vec<f64> = Vec::with_capacity(k_max);
        let mut sn: Vec<f64> = Vec::with_capacity(k_max);
        let mut g = vec![beta];
        let mut k = 0;
        let mut happy = false;
        while k < k_max {
            let mut w = pc(&op(&v[k]));
            let mut col = vec![0.0; k + 2];
            for (j, vj) in v.iter().enumerate() {
                let hij = dot(&w, vj);
                col[j] = hij;
                axpy(-hij, vj, &mut w);
            }
            let wn = norm2(&w);
            col[k + 1] = wn;
            for j in 0..k {
                let t = cs[j] * col[j] + sn[j] * col[j + 1];
                col[j + 1] = -sn[j] * col[j] + cs[j] * col[j + 1];
                col[j] = t;
            }
            let denom = col[k].hypot(col[k + 1]);
            let (c, s) = if denom == 0.0 { (1.0, 0.0) } else { (col[k] / denom, col[k + 1] / denom) };
            col[k] = denom;
            col[k + 1] = 0.0;
            cs.push(c);
            sn.push(s);
            g.push(-s * g[k]);
            g[k] *= c;
            h.push(col);
            k += 1;
            iterations += 1;
            let res = g[k].abs() / scale;
            happy = wn <= 1e-14 * beta;
            if monitor.is_some() {
                let xk = update(&x, &h, &g, &v, k);
                if let Some(mon) = monitor.as_mut() {
                    mon(&xk);
                }
            }
            residuals.push(res);
            if res <= tol || happy {
                break;
            }
            v.push(w.iter().map(|wi| wi / wn).collect());
        }
        x = update(&x, &h, &g, &v, k);
        r = precond_residual(&x);
        beta = norm2(&r);
        converged = *residuals.last().unwrap() <= tol || happy;
        if happy || beta == 0.0 {
            converged = true;
        }
    }
    GmresOutcome { x, iterations, converged, residuals }
}

/// `x + V_k y` with `H_k y = g_k` (upper triangular after rotations).
fn update(x: &[f64], h: &[Vec<f64>], g: &[f64], v: &[Vec<f64>], k: usize) -> Vec<f64> {
    let mut y = vec![0.0; k];
    for i in (0..k).rev() {
        let mut s = g[i];
        for j in i + 1..k {
            s -= h[j][i] * y[j];
        }
        y[i] = s / h[i][i];
    }
    let mut out = x.to_vec();
    for (j, yj) in y.iter().enumerate() {
        axpy(*yj, &v[j], &mut out);
    }
    out
}
