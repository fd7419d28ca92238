#![allow(dead_code)]

use std::sync::Arc;

use aras_core::linalg::{lu_factor, DenseMatrix, SparseMatrix};
use aras_core::partition::{band_partition, extend_overlap, OverlapPartition};
use aras_core::problems::{poisson2d, GridProblem};
use aras_core::schwarz::{build_ras, RasPreconditioner, SchwarzMode};

pub struct Setup {
    pub problem: GridProblem,
    pub part: Arc<OverlapPartition>,
    pub ras: Arc<RasPreconditioner>,
}

impl Setup {
    pub fn a(&self) -> &SparseMatrix {
        &self.problem.matrix
    }
}

/// Band-split `p`-domain Poisson problem on an `m × m` grid.
pub fn poisson_band(m: usize, p: usize, delta: usize) -> Setup {
    let problem = poisson2d(m, m).unwrap();
    let owned = band_partition(problem.matrix.nrows(), p).unwrap();
    let part = Arc::new(extend_overlap(&problem.matrix, &owned, delta).unwrap());
    let ras = Arc::new(build_ras(&problem.matrix, part.clone(), SchwarzMode::Ras).unwrap());
    Setup { problem, part, ras }
}

pub fn laplacian_1d(m: usize) -> SparseMatrix {
    let mut t = Vec::new();
    for i in 0..m {
        t.push((i, i, 2.0));
        if i > 0 {
            t.push((i, i - 1, -1.0));
        }
        if i + 1 < m {
            t.push((i, i + 1, -1.0));
        }
    }
    SparseMatrix::from_triplets(m, m, &t).unwrap()
}

pub fn dense_inverse(a: &SparseMatrix) -> DenseMatrix {
    let n = a.nrows();
    let lu = lu_factor(a).unwrap();
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            lu.solve(&e).unwrap()
        })
        .collect();
    DenseMatrix::from_columns(n, &cols).unwrap()
}

/// Assembles any linear map column by column.
pub fn assemble(n: usize, f: impl Fn(&[f64]) -> Vec<f64>) -> DenseMatrix {
    let cols: Vec<Vec<f64>> = (0..n)
        .map(|j| {
            let mut e = vec![0.0; n];
            e[j] = 1.0;
            f(&e)
        })
        .collect();
    DenseMatrix::from_columns(n, &cols).unwrap()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn norm(a: &[f64]) -> f64 {
    a.iter().map(|x| x * x).sum::<f64>().sqrt()
}
