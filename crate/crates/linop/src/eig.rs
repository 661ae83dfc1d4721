use crate::{CMat, LinopError, Result};
use ndarray::Array1;
use ndarray_linalg::{Eigh, UPLO};
use num_complex::Complex64;

/// Eigendecomposition of a Hermitian matrix: `a = V diag(w) V*` with
/// eigenvectors in the columns of `V`. Eigenvalues ascending.
pub fn eigh(a: &CMat) -> Result<(Array1<f64>, CMat)> {
    // LAPACK works column-major; on a row-major complex array the backend
    // effectively diagonalizes the transpose, so the honest eigenvectors
    // are the conjugated columns of what comes back.
    let std = a.as_standard_layout().to_owned();
    let (w, v) = std
        .eigh(UPLO::Lower)
        .map_err(|e| LinopError::EigFailure(e.to_string()))?;
    Ok((w, v.mapv(|z| z.conj())))
}

pub fn eigvalsh(a: &CMat) -> Result<Array1<f64>> {
    Ok(eigh(a)?.0)
}

pub fn min_eigval(a: &CMat) -> Result<f64> {
    let w = eigvalsh(a)?;
    Ok(w.iter().cloned().fold(f64::INFINITY, f64::min))
}

pub fn max_eigval(a: &CMat) -> Result<f64> {
    let w = eigvalsh(a)?;
    Ok(w.iter().cloned().fold(f64::NEG_INFINITY, f64::max))
}

/// Apply `f` to the spectrum of a Hermitian matrix.
pub fn funm(a: &CMat, f: impl Fn(f64) -> f64) -> Result<CMat> {
    let (w, v) = eigh(a)?;
    let d = a.nrows();
    let mut scaled = v.clone();
    for (j, &wj) in w.iter().enumerate() {
        let fw = Complex64::new(f(wj), 0.0);
        for i in 0..d {
            scaled[[i, j]] *= fw;
        }
    }
    Ok(scaled.dot(&crate::dag(&v)))
}

/// Hermitian matrix power with spectral cutoff: eigenvalues below `cutoff`
/// are sent to zero (pseudo-inverse convention for negative powers).
pub fn herm_pow(a: &CMat, p: f64, cutoff: f64) -> Result<CMat> {
    funm(a, |w| if w <= cutoff { 0.0 } else { w.powf(p) })
}

pub fn herm_sqrt(a: &CMat) -> Result<CMat> {
    funm(a, |w| if w <= 0.0 { 0.0 } else { w.sqrt() })
}
