//! Dense decompositions routed through faer, converted back to nalgebra types.

use faer::{Mat, Side};
use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Result, WalkError};

fn to_faer<T: Copy>(m: &DMatrix<T>) -> Mat<T> {
    Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

fn failed(what: &str) -> WalkError {
    WalkError::Domain(format!("{what} did not converge"))
}

/// Thin SVD `m = u diag(sigma) v_t`, singular values in nonincreasing order.
pub(crate) struct ThinSvd {
    pub u: DMatrix<f64>,
    pub sigma: Vec<f64>,
    pub v_t: DMatrix<f64>,
}

pub(crate) fn thin_svd(m: &DMatrix<f64>) -> Result<ThinSvd> {
    let svd = to_faer(m).thin_svd().map_err(|_| failed("SVD"))?;
    let (u, s, v) = (svd.U(), svd.S().column_vector(), svd.V());
    Ok(ThinSvd {
        u: DMatrix::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]),
        sigma: s.iter().copied().collect(),
        v_t: DMatrix::from_fn(v.ncols(), v.nrows(), |i, j| v[(j, i)]),
    })
}

pub(crate) fn singular_values(m: &DMatrix<f64>) -> Result<Vec<f64>> {
    to_faer(m).singular_values().map_err(|_| failed("SVD"))
}

pub(crate) fn complex_singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    to_faer(m).singular_values().map_err(|_| failed("SVD"))
}

/// Eigenvalues of a Hermitian matrix in nondecreasing order; only the lower triangle is read.
pub(crate) fn hermitian_eigenvalues(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    to_faer(m)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| failed("eigensolver"))
}
