//! Sparse and small dense linear algebra kernels.

pub mod dense;
pub mod eigen;
pub mod lu;
pub mod mmio;
pub mod ortho;
pub mod sparse;
pub mod svd;

pub use dense::DenseMatrix;
pub use eigen::{dense_eigenvalues, symmetric_eigen, SymmetricEigen};
pub use lu::{lu_factor, lu_factor_dense, lu_solve, LuFactors};
pub use mmio::{read_matrix_market, read_vector, write_matrix_market, write_vector};
pub use ortho::orthonormalize;
pub use sparse::{spmv, SparseMatrix};
pub use svd::{dense_svd, singular_values, SvdFactors};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}
