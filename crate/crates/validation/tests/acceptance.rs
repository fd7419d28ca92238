//! Acceptance criteria. Each test writes one `criterion N: PASS|FAIL` line
//! (plus indented detail lines) straight to stderr so the verdicts show up
//! in a plain `cargo test` log, then asserts.

use std::io::Write;
use std::sync::Arc;

use aras_core::aitken::{aitken_physical, aitken_svd_application, aitken_svd_inversion, build_svd_space, interface_trace, CoarseInterfaceSpace};
use aras_core::analysis::*;
use aras_core::linalg::{dense_svd, lu_factor, singular_values, DenseMatrix, SparseMatrix};
use aras_core::partition::{band_partition, extend_overlap, greedy_graph_partition};
use aras_core::problems::{helmholtz2d, poisson2d, GridProblem, Rhs};
use aras_core::schwarz::{richardson_run, richardson_run_with, Record, RichardsonOptions, RunStatus};
use aras_core::{build_aras, build_ras, gcr, ArasPreconditioner, ArasVariant, Preconditioner, RasPreconditioner, SchwarzMode};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

// Reference values and tolerances.
const REF_DELTA1: f64 = 0.8106;
const REF_DELTA1_TOL: f64 = 5e-4;
const REF_MODES: usize = 30;
const REF_RHO: [f64; 3] = [0.8106, 0.2535, 0.0643];
const REF_RHO_TOL: f64 = 5e-3;
const REF_KAPPA: [f64; 4] = [30.0083, 5.2358, 1.1451, 1.0000];
const REF_KAPPA_REL: f64 = 0.05;
const REF_KAPPA_FULL_ABS: f64 = 1e-3;
const REF_RICHARDSON: [usize; 4] = [96, 14, 7, 1];
const REF_GCR: [usize; 4] = [18, 7, 5, 1];
const REF_COUNT_TOL: usize = 2;
const SOLVE_TOL: f64 = 1e-10;
const EXACT_P_TOL: f64 = 1e-8;
const AITKEN_TRIALS: usize = 200;
const AITKEN_MAX_SIZE: usize = 12;
const AITKEN_MAX_NORM: f64 = 0.9;
const AITKEN_TOL: f64 = 1e-10;
const ALG34_TRACES: usize = 20;
const ALG34_SVD_TOL: f64 = 1e-12;
const ALG34_TOL: f64 = 1e-8;
const CONTRACTION_SWEEPS: usize = 200;
const HELMHOLTZ_M: usize = 164;
const HELMHOLTZ_P: usize = 8;
const HELMHOLTZ_Q: usize = 24;
const HELMHOLTZ_GCR_MAX: usize = 20;
/// Growth of the Richardson residual over its initial value that counts as divergence.
const DIVERGENCE_FACTOR: f64 = 10.0;
const HELMHOLTZ_KAPPA_INF: f64 = 1.7918e7;
const SVD_TRIALS: usize = 100;
const SVD_ORTHO_TOL: f64 = 1e-12;
const SVD_RECON_TOL: f64 = 1e-10;
const SVD_PERM_TOL: f64 = 1e-10;
const SVD_FAN_SLACK: f64 = 1e-12;

fn report(line: &str) {
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{line}");
}

/// Collects sub-checks and prints the verdict for one criterion.
struct Verdict {
    name: String,
    lines: Vec<String>,
    failed: Vec<String>,
}

impl Verdict {
    fn new(name: &str) -> Self {
        Self { name: name.to_string(), lines: Vec::new(), failed: Vec::new() }
    }

    fn note(&mut self, msg: String) {
        self.lines.push(format!("    {msg}"));
    }

    fn check(&mut self, ok: bool, msg: String) {
        self.lines.push(format!("    [{}] {msg}", if ok { "ok" } else { "FAIL" }));
        if !ok {
            self.failed.push(msg);
        }
    }

    fn finish(self) {
        let status = if self.failed.is_empty() { "PASS" } else { "FAIL" };
        let mut out = format!("{}: {status}", self.name);
        for l in &self.lines {
            out.push('\n');
            out.push_str(l);
        }
        report(&out);
        assert!(self.failed.is_empty(), "{} failed: {:?}", self.name, self.failed);
    }
}

struct Setup {
    problem: GridProblem,
    ras: Arc<RasPreconditioner>,
}

fn band_setup(problem: GridProblem, p: usize, delta: usize) -> Setup {
    let owned = band_partition(problem.matrix.nrows(), p).unwrap();
    let part = Arc::new(extend_overlap(&problem.matrix, &owned, delta).unwrap());
    let ras = Arc::new(build_ras(&problem.matrix, part, SchwarzMode::Ras).unwrap());
    Setup { problem, ras }
}

fn aras(s: &Setup, space: CoarseInterfaceSpace, variant: ArasVariant) -> ArasPreconditioner {
    build_aras(&s.problem.matrix, s.ras.clone(), space, variant).unwrap()
}

fn rel_close(x: f64, reference: f64, rel: f64) -> bool {
    (x - reference).abs() <= rel * reference.abs()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn diff_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

fn assemble(n: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            f(&e)
        })
        .collect();
    DenseMatrix::from_columns(n, &cols).unwrap()
}

/// Agreement to two significant digits of the prediction.
fn two_digits(measured: f64, predicted: f64) -> bool {
    let unit = 10f64.powf(predicted.abs().log10().floor() - 1.0);
    (measured - predicted).abs() <= 0.5 * unit
}

fn random_dense(rng: &mut ChaCha8Rng, m: usize, n: usize) -> DenseMatrix {
    DenseMatrix::from_row_major(m, n, (0..m * n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect()).unwrap()
}

fn two_norm(x: &DenseMatrix) -> f64 {
    singular_values(x).unwrap().first().copied().unwrap_or(0.0)
}

#[test]
fn criterion_1_two_domain_reference_values() {
    let mut v = Verdict::new("criterion 1 (two-domain Poisson reference values)");

    // Calibrate the geometry on the analytic oracle.
    let mut frozen = None;
    'sweep: for m in 31..=34 {
        for delta in 1..=3 {
            let spec = TwoDomainPoissonSpec::band_split(m, m, delta).unwrap();
            let d1 = analytic_interface_modes(&spec).unwrap()[0];
            v.note(format!("sweep m={m} δ={delta}: modes={} δ₁={d1:.5}", spec.num_modes()));
            if spec.num_modes() == REF_MODES && (d1 - REF_DELTA1).abs() <= REF_DELTA1_TOL {
                frozen = Some((m, delta, spec));
                break 'sweep;
            }
        }
    }
    let (m, delta, spec) = frozen.expect("no sweep point reproduces δ₁; fallback protocol required");
    v.note(format!("frozen geometry: {m}×{m}, p=2 band, δ={delta} (no fallback needed)"));

    let s = band_setup(poisson2d(m, m).unwrap().with_rhs(Rhs::Ones), 2, delta);
    let a = &s.problem.matrix;
    let f = &s.problem.rhs;
    let x0 = vec![0.0; a.nrows()];
    // q counts ± mode pairs of the interface operator: 2q eigenvectors.
    let half = eigen_truncated_space(a, &s.ras, 30).unwrap();
    let full = eigen_truncated_space(a, &s.ras, 60).unwrap();
    let aras15 = aras(&s, half.clone(), ArasVariant::Aras);
    let aras2_15 = aras(&s, half, ArasVariant::Aras2);
    let aras2_30 = aras(&s, full, ArasVariant::Aras2);
    let rows: [(&str, &dyn Preconditioner); 4] =
        [("RAS", &*s.ras), ("ARAS(15)", &aras15), ("ARAS2(15)", &aras2_15), ("ARAS2(30)", &aras2_30)];

    let (_, r15, r2_15) = theoretical_rho(&spec, 15).unwrap();
    v.note(format!("analytic ρ: RAS {:.4}, ARAS(15) {r15:.4}, ARAS2(15) {r2_15:.4}", theoretical_rho(&spec, 0).unwrap().1));

    for (k, (label, m)) in rows.iter().enumerate() {
        if k < 3 {
            let rho = spectral_radius(a, *m).unwrap();
            let ok = (rho - REF_RHO[k]).abs() <= REF_RHO_TOL;
            v.check(ok, format!("ρ {label} = {rho:.4} (reference {:.4} ± {REF_RHO_TOL})", REF_RHO[k]));
        }
        let kappa = condition_number(a, *m).unwrap();
        let ok = if k == 3 {
            (kappa - REF_KAPPA[3]).abs() <= REF_KAPPA_FULL_ABS
        } else {
            rel_close(kappa, REF_KAPPA[k], REF_KAPPA_REL)
        };
        v.check(ok, format!("κ {label} = {kappa:.4} (reference {:.4})", REF_KAPPA[k]));

        let rich = richardson_run(a, *m, f, &x0, SOLVE_TOL, 1000).unwrap();
        let ok = rich.converged() && rich.iterations.abs_diff(REF_RICHARDSON[k]) <= REF_COUNT_TOL;
        v.check(ok, format!("Richardson {label}: {} it (reference {} ± {REF_COUNT_TOL})", rich.iterations, REF_RICHARDSON[k]));
        let g = gcr(a, *m, f, &x0, SOLVE_TOL, 500).unwrap();
        let ok = g.converged && g.iterations.abs_diff(REF_GCR[k]) <= REF_COUNT_TOL;
        v.check(ok, format!("GCR {label}: {} it (reference {} ± {REF_COUNT_TOL})", g.iterations, REF_GCR[k]));
    }
    v.finish();
}

#[test]
fn criterion_2_exact_coarse_space() {
    let mut v = Verdict::new("criterion 2 (exact-P properties)");
    let s = band_setup(poisson2d(16, 16).unwrap().with_rhs(Rhs::Ones), 2, 1);
    let a = &s.problem.matrix;
    let n = a.nrows();
    let full = CoarseInterfaceSpace::full(a, &s.ras).unwrap();
    let m1 = aras(&s, full.clone(), ArasVariant::Aras);
    let m2 = aras(&s, full, ArasVariant::Aras2);

    let t = assemble_iteration_operator(a, &m1).unwrap();
    let t2 = t.matmul(&t).unwrap().max_abs();
    v.check(t2 <= EXACT_P_TOL, format!("‖T_ARAS²‖_max = {t2:.2e} (≤ {EXACT_P_TOL:.0e})"));

    let lu = lu_factor(a).unwrap();
    let a_inv = assemble(n, |e| lu.solve(e).unwrap());
    let m2_dense = assemble(n, |e| m2.apply(e).unwrap());
    let gap = m2_dense.sub(&a_inv).max_abs();
    let bound = EXACT_P_TOL * a_inv.max_abs();
    v.check(gap <= bound, format!("‖M⁻¹_ARAS2 − A⁻¹‖_max = {gap:.2e} (≤ {bound:.2e})"));

    let x0 = vec![0.0; n];
    let r1 = richardson_run(a, &m1, &s.problem.rhs, &x0, SOLVE_TOL, 10).unwrap();
    let r2 = richardson_run(a, &m2, &s.problem.rhs, &x0, SOLVE_TOL, 10).unwrap();
    v.check(r1.converged() && r1.iterations == 2, format!("Richardson ARAS: {} it (exactly 2)", r1.iterations));
    v.check(r2.converged() && r2.iterations == 1, format!("Richardson ARAS2: {} it (exactly 1)", r2.iterations));
    v.finish();
}

#[test]
fn criterion_3_aitken_exactness() {
    let mut v = Verdict::new("criterion 3 (Aitken exactness)");
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut worst = 0.0f64;
    let mut failures = 0;
    for _ in 0..AITKEN_TRIALS {
        let n = rng.gen_range(1..=AITKEN_MAX_SIZE);
        let mut p = random_dense(&mut rng, n, n);
        let target = rng.gen_range(0.05..AITKEN_MAX_NORM);
        p.scale(target / two_norm(&p));
        let xi: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect();
        let px = p.mul_vec(&xi);
        let c: Vec<f64> = xi.iter().zip(&px).map(|(a, b)| a - b).collect();
        let mut u = vec![(0..n).map(|_| rng.gen::<f64>() * 2.0 - 1.0).collect::<Vec<f64>>()];
        for _ in 0..=n {
            let pu = p.mul_vec(u.last().unwrap());
            u.push(pu.iter().zip(&c).map(|(a, b)| a + b).collect());
        }
        let err = match aitken_physical(&u) {
            Ok(x) => diff_norm(&x, &xi) / norm(&xi),
            Err(_) => f64::INFINITY,
        };
        if !(err <= AITKEN_TOL) {
            failures += 1;
        }
        worst = worst.max(err);
    }
    v.check(failures == 0, format!("{AITKEN_TRIALS} trials, n ≤ {AITKEN_MAX_SIZE}, ‖P‖₂ ≤ {AITKEN_MAX_NORM}: worst rel. error {worst:.2e}, {failures} above {AITKEN_TOL:.0e}"));
    v.finish();
}

#[test]
fn criterion_4_svd_inversion_matches_application() {
    let mut v = Verdict::new("criterion 4 (SVD inversion ≡ SVD application)");
    let mut count = 0;
    let mut worst = 0.0f64;
    for m in [10, 12, 14, 16, 18] {
        for delta in [1, 2] {
            for rhs in [Rhs::Ones, Rhs::Random(m as u64 * 10 + delta as u64)] {
                let s = band_setup(poisson2d(m, m).unwrap().with_rhs(rhs), 2, delta);
                let a = &s.problem.matrix;
                let n = s.ras.partition().interface_len();
                let trace = interface_trace(a, &s.ras, &s.problem.rhs, &vec![0.0; a.nrows()], n + 4).unwrap();
                let x3 = aitken_svd_inversion(&trace, ALG34_SVD_TOL).unwrap();
                let (x4, _) = aitken_svd_application(a, &s.ras, &trace, ALG34_SVD_TOL).unwrap();
                let rel = diff_norm(&x3, &x4) / norm(&x4);
                worst = worst.max(rel);
                count += 1;
                if !(rel <= ALG34_TOL) {
                    v.check(false, format!("m={m} δ={delta} {rhs:?}: rel. gap {rel:.2e}"));
                }
            }
        }
    }
    v.check(count == ALG34_TRACES && worst <= ALG34_TOL, format!("{count} traces: worst rel. gap {worst:.2e} (≤ {ALG34_TOL:.0e})"));
    v.finish();
}

#[test]
fn criterion_5_truncated_coarse_space() {
    let mut v = Verdict::new("criterion 5 (truncated coarse space contraction)");
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for m in [12, 16, 24] {
        for delta in [1, 2] {
            let s = band_setup(poisson2d(m, m).unwrap(), 2, delta);
            let a = &s.problem.matrix;
            let spec = TwoDomainPoissonSpec::band_split(m, m, delta).unwrap();
            for q in [2, 4, 8] {
                let (_, pred, pred2) = theoretical_rho(&spec, q).unwrap();
                let space = eigen_truncated_space(a, &s.ras, 2 * q).unwrap();
                let m1 = aras(&s, space.clone(), ArasVariant::Aras);
                let m2 = aras(&s, space, ArasVariant::Aras2);
                // Homogeneous Richardson sweeps from a random start, renormalized
                // each step so the asymptotic regime is reached before round-off.
                let rate = estimate_spectral_radius(a, &m1, CONTRACTION_SWEEPS, rng.gen()).unwrap();
                let rho2 = spectral_radius(a, &m2).unwrap();
                v.check(
                    two_digits(rate, pred),
                    format!("{m}² δ={delta} q={q}: ARAS contraction {rate:.4} vs δ_(q+1) {pred:.4}"),
                );
                v.check(
                    two_digits(rho2, pred2),
                    format!("{m}² δ={delta} q={q}: ρ(T_ARAS2) {rho2:.3e} vs δ²_(q+1) {pred2:.3e}"),
                );
            }
        }
    }
    v.finish();
}

#[test]
fn criterion_6_helmholtz_partition_robustness() {
    let mut v = Verdict::new("criterion 6 (Helmholtz band vs greedy partition)");
    let problem = helmholtz2d(HELMHOLTZ_M).unwrap().with_rhs(Rhs::Ones);
    let a = &problem.matrix;
    let n = a.nrows();
    let x0 = vec![0.0; n];
    let f = &problem.rhs;
    for (kind, owned) in [
        ("band", band_partition(n, HELMHOLTZ_P).unwrap()),
        ("greedy", greedy_graph_partition(a, HELMHOLTZ_P, 1).unwrap()),
    ] {
        let part = Arc::new(extend_overlap(a, &owned, 1).unwrap());
        let ras = Arc::new(build_ras(a, part.clone(), SchwarzMode::Ras).unwrap());
        let space = build_svd_space(a, &ras, f, &x0, HELMHOLTZ_Q, 1e-12).unwrap();
        v.note(format!("{kind}: |Γ| = {}, coarse size {}", part.interface_len(), space.q()));
        let m2 = build_aras(a, ras.clone(), space, ArasVariant::Aras2).unwrap();
        let g_ras = gcr(a, &*ras, f, &x0, SOLVE_TOL, 1000).unwrap();
        let g_aras2 = gcr(a, &m2, f, &x0, SOLVE_TOL, 1000).unwrap();
        let beats = g_aras2.converged && g_ras.converged && g_aras2.iterations < g_ras.iterations;
        let msg = format!("{kind}: GCR+ARAS2 {} it vs GCR+RAS {} it", g_aras2.iterations, g_ras.iterations);
        if kind == "band" {
            v.check(beats && g_aras2.iterations <= HELMHOLTZ_GCR_MAX, format!("{msg} (ARAS2 ≤ {HELMHOLTZ_GCR_MAX})"));
        } else {
            v.check(beats, msg);
            let opts = RichardsonOptions { record: Record::None, divergence_factor: DIVERGENCE_FACTOR };
            let rich = richardson_run_with(a, &m2, f, &x0, SOLVE_TOL, 200, &opts).unwrap();
            let peak = rich.residual_norms.iter().cloned().fold(0.0, f64::max);
            v.check(
                rich.status == RunStatus::Diverged,
                format!("greedy: Richardson+ARAS2 {:?} after {} it, peak residual {peak:.2e} × initial", rich.status, rich.iterations),
            );
        }
    }
    v.finish();
}

#[test]
fn criterion_7_cost_counters() {
    let mut v = Verdict::new("criterion 7 (cost-counter contract)");
    for (p, q) in [(2, 4), (4, 6)] {
        let s = band_setup(poisson2d(18, 18).unwrap().with_rhs(Rhs::Random(p as u64)), p, 1);
        let a = &s.problem.matrix;
        let x0 = vec![0.0; a.nrows()];
        let before = s.ras.counters().snapshot();
        let space = build_svd_space(a, &s.ras, &s.problem.rhs, &x0, q, 1e-12).unwrap();
        let d = s.ras.counters().snapshot() - before;
        let l = space.q() as u64;
        let (pp, qq) = (p as u64, q as u64);
        v.check(
            d.local_solves == pp * (qq + 2) + pp * l && d.svd == 1,
            format!("p={p} q={q}: build {} solves, {} SVD (expected {} = p(q+2)+p·l with l={l}, 1)", d.local_solves, d.svd, pp * (qq + 2) + pp * l),
        );
        for (variant, solves, spmv) in [(ArasVariant::Aras, pp, 0), (ArasVariant::Aras2, 2 * pp, 1)] {
            let m = aras(&s, space.clone(), variant);
            let before = m.counters().snapshot();
            m.apply(&s.problem.rhs).unwrap();
            let d = m.counters().snapshot() - before;
            v.check(
                d.local_solves == solves && d.spmv == spmv && d.svd == 0,
                format!("p={p} {}: {} solves, {} spmv per apply (expected {solves}, {spmv})", variant.name(), d.local_solves, d.spmv),
            );
        }
    }
    v.finish();
}

#[test]
fn criterion_8_svd_properties() {
    let mut v = Verdict::new("criterion 8 (SVD property suite)");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut ortho, mut recon, mut perm, mut fan) = (0.0f64, 0.0f64, 0.0f64, f64::NEG_INFINITY);
    let mut ordered = true;
    for trial in 0..SVD_TRIALS {
        let (m, n) = if trial == 0 { (64, 32) } else { (rng.gen_range(1..=64), rng.gen_range(1..=32)) };
        let x = random_dense(&mut rng, m, n);
        let svd = dense_svd(&x).unwrap();
        let k = m.min(n);
        let s = &svd.singular_values;
        let s1 = s[0].max(f64::MIN_POSITIVE);
        ordered &= s.len() == k && s.iter().all(|&x| x >= 0.0) && s.windows(2).all(|w| w[0] >= w[1]);
        for f in [&svd.left, &svd.right] {
            ortho = ortho.max(f.tmatmul(f).unwrap().sub(&DenseMatrix::identity(k)).max_abs());
        }
        let mut us = svd.left.clone();
        for j in 0..k {
            let col: Vec<f64> = us.column(j).iter().map(|c| c * s[j]).collect();
            us.set_column(j, &col);
        }
        recon = recon.max(two_norm(&x.sub(&us.matmul(&svd.right.transpose()).unwrap())) / s1);

        let rows = shuffled(&mut rng, m);
        let cols = shuffled(&mut rng, n);
        let mut xp = DenseMatrix::zeros(m, n);
        for i in 0..m {
            for j in 0..n {
                xp[(i, j)] = x[(rows[i], cols[j])];
            }
        }
        let sp = dense_svd(&xp).unwrap().singular_values;
        perm = perm.max(s.iter().zip(&sp).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max) / s1);

        let eps = 10f64.powf(rng.gen_range(-8.0..-1.0)) * s1;
        let mut e = random_dense(&mut rng, m, n);
        e.scale(eps / two_norm(&e));
        let se = dense_svd(&x.add(&e)).unwrap().singular_values;
        let slack = s.iter().zip(&se).map(|(a, b)| (a - b).abs() - eps).fold(f64::NEG_INFINITY, f64::max);
        fan = fan.max(slack);
    }
    v.check(ordered, format!("{SVD_TRIALS} matrices up to 64×32: σ non-negative, non-increasing, economy length"));
    v.check(ortho <= SVD_ORTHO_TOL, format!("orthonormality ‖UᵀU − I‖_max, ‖VᵀV − I‖_max ≤ {ortho:.2e} (≤ {SVD_ORTHO_TOL:.0e})"));
    v.check(recon <= SVD_RECON_TOL, format!("reconstruction ‖X − UΣVᵀ‖₂/σ₁ ≤ {recon:.2e} (≤ {SVD_RECON_TOL:.0e})"));
    v.check(perm <= SVD_PERM_TOL, format!("permutation invariance rel. {perm:.2e} (≤ {SVD_PERM_TOL:.0e})"));
    v.check(fan <= SVD_FAN_SLACK, format!("perturbation bound: max |σᵢ(X+E) − σᵢ(X)| − ‖E‖₂ = {fan:.2e} (≤ {SVD_FAN_SLACK:.0e})"));
    v.finish();
}

fn shuffled(rng: &mut ChaCha8Rng, n: usize) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(rng);
    v
}

/// Generator example pinned to a reference value (not a numbered criterion).
#[test]
fn helmholtz_condition_number_example() {
    let mut v = Verdict::new("generator example (Helmholtz κ_∞ at m=164)");
    let a: SparseMatrix = helmholtz2d(HELMHOLTZ_M).unwrap().matrix;
    let lu = lu_factor(&a).unwrap();
    // A is symmetric positive definite with non-positive off-diagonals, so
    // A⁻¹ ≥ 0 entrywise and ‖A⁻¹‖_∞ = max(A⁻¹·1).
    let inv_norm = lu.solve(&vec![1.0; a.nrows()]).unwrap().into_iter().fold(0.0, f64::max);
    let kappa = a.norm_inf() * inv_norm;
    let ok = kappa >= HELMHOLTZ_KAPPA_INF / 2.0 && kappa <= HELMHOLTZ_KAPPA_INF * 2.0;
    v.check(ok, format!("κ_∞(A) = {kappa:.4e} (reference {HELMHOLTZ_KAPPA_INF:.4e}, within a factor of 2)"));
    v.finish();
}
