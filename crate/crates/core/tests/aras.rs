mod common;

use aras_core::aitken::{proportional_split, random_basis, BasisOrigin, CoarseInterfaceSpace};
use aras_core::analysis::{assemble_iteration_operator, eigen_truncated_space};
use aras_core::aras::{apply_aras, build_aras, cost_report, ArasVariant};
use aras_core::linalg::{dense_eigenvalues, DenseMatrix, SparseMatrix};
use aras_core::preconditioner::Preconditioner;
use aras_core::schwarz::richardson_run;
use aras_core::Error;
use common::*;

fn full_space(s: &Setup) -> CoarseInterfaceSpace {
    CoarseInterfaceSpace::full(s.a(), &s.ras).unwrap()
}

fn random_space(s: &Setup, q: usize) -> CoarseInterfaceSpace {
    let n = s.part.interface_len();
    let u = random_basis(n, &proportional_split(q, &s.part), 7, &s.part).unwrap();
    CoarseInterfaceSpace::from_basis(s.a(), &s.ras, u, BasisOrigin::Random).unwrap()
}

#[test]
fn empty_coarse_space_is_plain_ras() {
    let s = poisson_band(12, 2, 1);
    let mut sp = random_space(&s, 3);
    sp.truncate(0);
    let m = build_aras(s.a(), s.ras.clone(), sp, ArasVariant::Aras).unwrap();
    let r: Vec<f64> = (0..s.a().nrows()).map(|i| (i as f64).sin()).collect();
    assert_eq!(m.apply(&r).unwrap(), s.ras.apply(&r).unwrap());
    assert_eq!(m.label(), "ARAS(q=0)");
}

#[test]
fn zero_maps_to_zero_and_apply_is_linear() {
    let s = poisson_band(12, 2, 1);
    for variant in [ArasVariant::Aras, ArasVariant::Aras2] {
        let m = build_aras(s.a(), s.ras.clone(), random_space(&s, 4), variant).unwrap();
        let n = s.a().nrows();
        assert!(apply_aras(&m, &vec![0.0; n]).unwrap().iter().all(|v| *v == 0.0));
        let x: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let y: Vec<f64> = (0..n).map(|i| (i as f64 * 0.7).cos()).collect();
        let c: Vec<f64> = x.iter().zip(&y).map(|(a, b)| 1.5 * a - 2.0 * b).collect();
        let (mx, my, mc) = (m.apply(&x).unwrap(), m.apply(&y).unwrap(), m.apply(&c).unwrap());
        let e: Vec<f64> = mx.iter().zip(&my).map(|(a, b)| 1.5 * a - 2.0 * b).collect();
        assert!(max_diff(&mc, &e) < 1e-12 * norm(&e).max(1.0));
    }
}

#[test]
fn matches_dense_formula() {
    let s = poisson_band(16, 2, 1);
    let a = s.a();
    let nn = a.nrows();
    let sp = random_space(&s, 4);
    let m = build_aras(a, s.ras.clone(), sp.clone(), ArasVariant::Aras).unwrap();
    let n = s.part.interface_len();
    let mut rg = DenseMatrix::zeros(n, nn);
    for (k, &g) in s.part.interface().iter().enumerate() {
        rg[(k, g)] = 1.0;
    }
    let p_hat = sp.coarse_operator.as_ref().unwrap();
    let inv = dense_inverse(&SparseMatrix::from_dense(&DenseMatrix::identity(4).sub(p_hat)));
    let mid = inv.sub(&DenseMatrix::identity(4));
    let u = &sp.basis;
    let corr = rg.transpose().matmul(&u.matmul(&mid).unwrap().matmul(&u.transpose()).unwrap()).unwrap().matmul(&rg).unwrap();
    let m_ras = assemble(nn, |e| s.ras.apply(e).unwrap());
    let expect = DenseMatrix::identity(nn).add(&corr).matmul(&m_ras).unwrap();
    let got = assemble(nn, |e| m.apply(e).unwrap());
    assert!(got.sub(&expect).max_abs() < 1e-10);
}

#[test]
fn aras2_is_the_square_of_aras() {
    let s = poisson_band(16, 2, 1);
    let sp = random_space(&s, 4);
    let m1 = build_aras(s.a(), s.ras.clone(), sp.clone(), ArasVariant::Aras).unwrap();
    let m2 = build_aras(s.a(), s.ras.clone(), sp, ArasVariant::Aras2).unwrap();
    let t1 = assemble_iteration_operator(s.a(), &m1).unwrap();
    let t2 = assemble_iteration_operator(s.a(), &m2).unwrap();
    assert!(t2.sub(&t1.matmul(&t1).unwrap()).max_abs() < 1e-9);
}

#[test]
fn exact_coarse_space_two_and_one_steps() {
    let s = poisson_band(16, 2, 1);
    let a = s.a();
    let x0 = vec![0.0; a.nrows()];
    let m1 = build_aras(a, s.ras.clone(), full_space(&s), ArasVariant::Aras).unwrap();
    let m2 = build_aras(a, s.ras.clone(), full_space(&s), ArasVariant::Aras2).unwrap();
    assert_eq!(richardson_run(a, &m1, &s.problem.rhs, &x0, 1e-10, 10).unwrap().iterations, 2);
    assert_eq!(richardson_run(a, &m2, &s.problem.rhs, &x0, 1e-10, 10).unwrap().iterations, 1);
    let t = assemble_iteration_operator(a, &m1).unwrap();
    assert!(dense_eigenvalues(&t).unwrap().iter().all(|z| z.norm() <= 1e-7));
}

#[test]
fn coarse_correction_improves_the_spectrum() {
    let s = poisson_band(20, 2, 1);
    let a = s.a();
    let rho = |m: &dyn Preconditioner| dense_eigenvalues(&assemble_iteration_operator(a, m).unwrap()).unwrap()[0].norm();
    let base = rho(&*s.ras);
    let mut prev = base;
    for k in [2, 6, 12] {
        let sp = eigen_truncated_space(a, &s.ras, k).unwrap();
        let m = build_aras(a, s.ras.clone(), sp, ArasVariant::Aras).unwrap();
        let r = rho(&m);
        assert!(r < base && r <= prev + 1e-12, "k={k}: {r} vs {base}");
        prev = r;
    }
}

#[test]
fn counter_contract() {
    let s = poisson_band(16, 4, 1);
    let r = vec![1.0; s.a().nrows()];
    for (variant, solves, spmv) in [(ArasVariant::Aras, 4, 0), (ArasVariant::Aras2, 8, 1)] {
        let m = build_aras(s.a(), s.ras.clone(), random_space(&s, 6), variant).unwrap();
        let before = m.cost_report();
        m.apply(&r).unwrap();
        let d = m.cost_report() - before;
        assert_eq!((d.local_solves, d.spmv, d.svd), (solves, spmv, 0), "{variant:?}");
        let c = cost_report(&m);
        assert_eq!(c.subdomains, 4);
        assert_eq!(c.build_bound_application, 14);
    }
}

#[test]
fn singular_correction_is_rejected() {
    let s = poisson_band(12, 2, 1);
    let mut sp = random_space(&s, 2);
    sp.coarse_operator = Some(DenseMatrix::identity(2));
    assert!(matches!(build_aras(s.a(), s.ras.clone(), sp.clone(), ArasVariant::Aras), Err(Error::SingularCoarseCorrection)));
    sp.coarse_operator = None;
    assert!(build_aras(s.a(), s.ras.clone(), sp, ArasVariant::Aras).is_err());
}
