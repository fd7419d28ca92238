use crate::error::{Error, Result};
use crate::linalg::{dot, DenseMatrix};

/// Orthonormal basis of the column span of `v`, by modified Gram–Schmidt
/// with one reorthogonalization pass.
///
/// Fails with [`Error::RankDeficient`] when a column loses all but a
/// `1e-13` fraction of its norm to the previous ones.
pub fn orthonormalize(v: &DenseMatrix) -> Result<DenseMatrix> {
    if !v.is_finite() {
        return Err(Error::NonFinite);
    }
    let m = v.nrows();
    let mut cols: Vec<Vec<f64>> = Vec::with_capacity(v.ncols());
    for j in 0..v.ncols() {
        let mut c = v.column(j);
        let original = dot(&c, &c).sqrt();
        for _ in 0..2 {
            for q in &cols {
                let h = dot(q, &c);
                c.iter_mut().zip(q).for_each(|(x, qv)| *x -= h * qv);
            }
        }
        let nrm = dot(&c, &c).sqrt();
        if original == 0.0 || nrm < 1e-13 * original {
            return Err(Error::RankDeficient { column: j });
        }
        c.iter_mut().for_each(|x| *x /= nrm);
        cols.push(c);
    }
    DenseMatrix::from_columns(m, &cols)
}
