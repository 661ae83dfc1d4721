use crate::CMat;
use ndarray::Array2;
use num_complex::Complex64;

pub fn zeros(d: usize) -> CMat {
    Array2::from_elem((d, d), Complex64::ZERO)
}

pub fn identity(d: usize) -> CMat {
    let mut m = zeros(d);
    for i in 0..d {
        m[[i, i]] = Complex64::ONE;
    }
    m
}

/// Conjugate transpose.
pub fn dag(a: &CMat) -> CMat {
    let (r, c) = a.dim();
    let mut out = Array2::from_elem((c, r), Complex64::ZERO);
    for i in 0..r {
        for j in 0..c {
            out[[j, i]] = a[[i, j]].conj();
        }
    }
    out
}

pub fn trace(a: &CMat) -> Complex64 {
    a.diag().sum()
}

pub fn matmul(a: &CMat, b: &CMat) -> CMat {
    a.dot(b)
}

pub fn frob_norm(a: &CMat) -> f64 {
    a.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// (A + A*)/2.
pub fn hermitian_part(a: &CMat) -> CMat {
    let ad = dag(a);
    (a + &ad).mapv(|z| z * 0.5)
}

/// Largest entrywise deviation from Hermiticity.
pub fn herm_defect(a: &CMat) -> f64 {
    let (r, c) = a.dim();
    if r != c {
        return f64::INFINITY;
    }
    let mut worst = 0.0f64;
    for i in 0..r {
        for j in i..c {
            let d = (a[[i, j]] - a[[j, i]].conj()).norm();
            worst = worst.max(d);
        }
    }
    worst
}

pub fn is_hermitian(a: &CMat, tol: f64) -> bool {
    herm_defect(a) <= tol
}

/// Kronecker product a (x) b.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    let mut out = Array2::from_elem((ar * br, ac * bc), Complex64::ZERO);
    for i in 0..ar {
        for j in 0..ac {
            let aij = a[[i, j]];
            if aij == Complex64::ZERO {
                continue;
            }
            for k in 0..br {
                for l in 0..bc {
                    out[[i * br + k, j * bc + l]] = aij * b[[k, l]];
                }
            }
        }
    }
    out
}
