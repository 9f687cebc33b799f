//! Thin wrappers around LAPACK-backed decompositions for small dense
//! symmetric/Hermitian matrices.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, SVD, UPLO};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

/// Eigendecomposition of a real symmetric matrix, eigenvalues ascending,
/// eigenvectors as columns.
pub(crate) fn sym_eigh(m: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    let (vals, vecs) = m.eigh(UPLO::Lower)?;
    Ok((vals, vecs))
}

/// Eigendecomposition of a complex Hermitian matrix, eigenvalues ascending.
pub(crate) fn herm_eigh(m: &Array2<C64>) -> Result<(Array1<f64>, Array2<C64>)> {
    let (vals, vecs) = m.eigh(UPLO::Lower)?;
    Ok((vals, vecs))
}

/// Apply a scalar function to a real symmetric matrix through its
/// eigendecomposition: `V f(Λ) Vᵀ`.
pub(crate) fn sym_matrix_func(
    m: &Array2<f64>,
    f: impl Fn(f64) -> Result<f64>,
) -> Result<Array2<f64>> {
    let (vals, vecs) = sym_eigh(m)?;
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let fv = f(v)?;
        scaled.column_mut(j).mapv_inplace(|x| x * fv);
    }
    Ok(scaled.dot(&vecs.t()))
}

/// Singular values of a real matrix, descending.
pub(crate) fn singular_values(m: &Array2<f64>) -> Result<Array1<f64>> {
    let (_, s, _) = m.svd(false, false)?;
    Ok(s)
}

/// Hermitian square root of a PSD complex matrix. Eigenvalues slightly
/// negative from roundoff are clamped to zero; anything below `-tol` is an
/// error.
pub(crate) fn herm_sqrt(m: &Array2<C64>, tol: f64) -> Result<Array2<C64>> {
    let (vals, vecs) = herm_eigh(m)?;
    if let Some(&bad) = vals.iter().find(|&&v| v < -tol) {
        return Err(Error::InvalidState(format!(
            "matrix is not positive semidefinite (eigenvalue {bad:.3e})"
        )));
    }
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let s = v.max(0.0).sqrt();
        scaled.column_mut(j).mapv_inplace(|x| x * s);
    }
    let vecs_h = vecs.t().mapv(|z| z.conj());
    Ok(scaled.dot(&vecs_h))
}
