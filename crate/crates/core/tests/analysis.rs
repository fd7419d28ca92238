mod common;

use aras_core::analysis::*;
use aras_core::aras::{build_aras, ArasVariant};
use aras_core::linalg::dense_eigenvalues;
use aras_core::preconditioner::DirectSolve;
use aras_core::schwarz::{assemble_interface_operator, ASSEMBLY_CAP};
use aras_core::Error;
use common::*;

#[test]
fn analytic_spectrum_matches_assembled_interface_operator() {
    for (m, delta) in [(16, 1), (16, 2), (12, 1), (20, 3)] {
        let s = poisson_band(m, 2, delta);
        let spec = TwoDomainPoissonSpec::band_split(m, m, delta).unwrap();
        let p = assemble_interface_operator(s.a(), &s.ras, ASSEMBLY_CAP).unwrap();
        let numeric = dense_eigenvalues(&p).unwrap();
        let analytic = analytic_spectrum(&spec).unwrap();
        assert_eq!(numeric.len(), analytic.len());
        for (x, y) in numeric.iter().zip(&analytic) {
            assert!((x.norm() - y.norm()).abs() < 1e-6, "{m} {delta}: {x} vs {y}");
            assert!(x.im.abs() < 1e-8);
        }
    }
}

#[test]
fn modes_are_strictly_decreasing_contractions() {
    for delta in 1..4 {
        let spec = TwoDomainPoissonSpec::band_split(24, 20, delta).unwrap();
        let modes = analytic_interface_modes(&spec).unwrap();
        assert!(modes.windows(2).all(|w| w[0] > w[1]));
        assert!(modes.iter().all(|&d| d > 0.0 && d < 1.0));
    }
}

#[test]
fn theoretical_rho_is_monotone_in_q() {
    let spec = TwoDomainPoissonSpec::band_split(32, 32, 1).unwrap();
    let mut prev = f64::INFINITY;
    for q in 0..=30 {
        let (_, r, r2) = theoretical_rho(&spec, q).unwrap();
        assert!(r <= prev);
        assert!((r2 - r * r).abs() < 1e-15);
        prev = r;
    }
    assert!(theoretical_rho(&spec, 31).is_err());
}

#[test]
fn exact_inverse_diagnostics() {
    let s = poisson_band(10, 2, 1);
    let m = DirectSolve::new(s.a()).unwrap();
    assert!(spectral_radius(s.a(), &m).unwrap() <= 1e-12);
    assert!((condition_number(s.a(), &m).unwrap() - 1.0).abs() < 1e-4);
}

#[test]
fn eigen_truncation_hits_truncation_predictions() {
    let s = poisson_band(16, 2, 1);
    let spec = TwoDomainPoissonSpec::band_split(16, 16, 1).unwrap();
    for q in [1, 3, 5] {
        let sp = eigen_truncated_space(s.a(), &s.ras, 2 * q).unwrap();
        let m = build_aras(s.a(), s.ras.clone(), sp.clone(), ArasVariant::Aras).unwrap();
        let m2 = build_aras(s.a(), s.ras.clone(), sp, ArasVariant::Aras2).unwrap();
        let (_, r, r2) = theoretical_rho(&spec, q).unwrap();
        assert!((spectral_radius(s.a(), &m).unwrap() - r).abs() < 1e-6);
        assert!((spectral_radius(s.a(), &m2).unwrap() - r2).abs() < 1e-6);
    }
}

#[test]
fn power_estimate_approximates_the_radius() {
    let s = poisson_band(16, 2, 1);
    let exact = spectral_radius(s.a(), &*s.ras).unwrap();
    let est = estimate_spectral_radius(s.a(), &*s.ras, 200, 1).unwrap();
    assert!((est - exact).abs() < 1e-2 * exact, "{est} vs {exact}");
}

#[test]
fn assembly_cap_is_enforced() {
    let s = poisson_band(10, 2, 1);
    match assemble_iteration_operator_capped(s.a(), &*s.ras, 10) {
        Err(Error::AssemblyCapExceeded { size, cap }) => assert_eq!((size, cap), (64, 10)),
        other => panic!("unexpected {other:?}"),
    }
}
