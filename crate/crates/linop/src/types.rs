use crate::mat::herm_defect;
use crate::{dag, eigh, eigvalsh, CMat, LinopError, Result, HERM_TOL, SUPPORT_CUTOFF};
use ndarray::Array2;
use num_complex::Complex64;

/// A validated Hermitian matrix.
#[derive(Debug, Clone)]
pub struct HermitianOperator {
    mat: CMat,
}

impl HermitianOperator {
    /// Validates Hermiticity to within [`HERM_TOL`] and stores the
    /// symmetrized matrix so downstream eigensolves see an exactly
    /// Hermitian input.
    pub fn new(mat: CMat) -> Result<Self> {
        let (r, c) = mat.dim();
        if r != c {
            return Err(LinopError::DimensionMismatch(format!("{r}x{c} not square")));
        }
        let defect = herm_defect(&mat);
        if defect > HERM_TOL {
            return Err(LinopError::NotHermitian(defect));
        }
        Ok(Self {
            mat: crate::hermitian_part(&mat),
        })
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn mat(&self) -> &CMat {
        &self.mat
    }

    pub fn into_mat(self) -> CMat {
        self.mat
    }

    pub fn is_psd(&self, tol: f64) -> Result<bool> {
        Ok(crate::min_eigval(&self.mat)? >= -tol)
    }

    pub fn require_psd(&self, tol: f64) -> Result<()> {
        let w = crate::min_eigval(&self.mat)?;
        if w < -tol {
            return Err(LinopError::NotPsd(w));
        }
        Ok(())
    }
}

/// A density operator together with a declared tensor factorization of its
/// Hilbert space.
#[derive(Debug, Clone)]
pub struct DensityState {
    op: HermitianOperator,
    subsystem_dims: Vec<usize>,
}

impl DensityState {
    pub fn new(mat: CMat, subsystem_dims: Vec<usize>) -> Result<Self> {
        let op = HermitianOperator::new(mat)?;
        let dim = op.dim();
        if subsystem_dims.iter().product::<usize>() != dim || subsystem_dims.is_empty() {
            return Err(LinopError::BadSubsystemDims {
                dims: subsystem_dims,
                dim,
            });
        }
        op.require_psd(SUPPORT_CUTOFF)?;
        let tr = crate::trace(op.mat()).re;
        if (tr - 1.0).abs() > 1e-10 {
            return Err(LinopError::TraceNotOne(tr));
        }
        Ok(Self {
            op,
            subsystem_dims,
        })
    }

    /// Density state on a single unfactored space.
    pub fn unipartite(mat: CMat) -> Result<Self> {
        let d = mat.nrows();
        Self::new(mat, vec![d])
    }

    pub fn from_pure(ket: &[Complex64], subsystem_dims: Vec<usize>) -> Result<Self> {
        let d = ket.len();
        let mut mat = Array2::from_elem((d, d), Complex64::ZERO);
        for i in 0..d {
            for j in 0..d {
                mat[[i, j]] = ket[i] * ket[j].conj();
            }
        }
        Self::new(mat, subsystem_dims)
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn subsystem_dims(&self) -> &[usize] {
        &self.subsystem_dims
    }

    pub fn mat(&self) -> &CMat {
        self.op.mat()
    }
}

/// A CPTP map given by its Kraus operators.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    kraus: Vec<CMat>,
    dim_in: usize,
    dim_out: usize,
}

impl KrausChannel {
    pub fn new(kraus: Vec<CMat>) -> Result<Self> {
        if kraus.is_empty() {
            return Err(LinopError::DimensionMismatch("no Kraus operators".into()));
        }
        let (dim_out, dim_in) = kraus[0].dim();
        for k in &kraus {
            if k.dim() != (dim_out, dim_in) {
                return Err(LinopError::DimensionMismatch(
                    "Kraus operators have mixed shapes".into(),
                ));
            }
        }
        let mut acc = Array2::from_elem((dim_in, dim_in), Complex64::ZERO);
        for k in &kraus {
            acc = acc + dag(k).dot(k);
        }
        let mut defect = 0.0f64;
        for i in 0..dim_in {
            for j in 0..dim_in {
                let expect = if i == j { Complex64::ONE } else { Complex64::ZERO };
                defect = defect.max((acc[[i, j]] - expect).norm());
            }
        }
        if defect > 1e-10 {
            return Err(LinopError::NotCptp(defect));
        }
        Ok(Self {
            kraus,
            dim_in,
            dim_out,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn apply(&self, rho: &CMat) -> Result<CMat> {
        if rho.dim() != (self.dim_in, self.dim_in) {
            return Err(LinopError::DimensionMismatch(
                "channel input dimension".into(),
            ));
        }
        let mut out = Array2::from_elem((self.dim_out, self.dim_out), Complex64::ZERO);
        for k in &self.kraus {
            out = out + k.dot(rho).dot(&dag(k));
        }
        Ok(out)
    }
}

/// A finite probability distribution.
#[derive(Debug, Clone)]
pub struct ProbabilityVector {
    weights: Vec<f64>,
}

impl ProbabilityVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|&w| w < 0.0) {
            return Err(LinopError::BadProbability("negative entry".into()));
        }
        let s: f64 = weights.iter().sum();
        if (s - 1.0).abs() > 1e-12 {
            return Err(LinopError::BadProbability(format!("sum {s} != 1")));
        }
        Ok(Self { weights })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

/// Projects `rho` and `sigma` onto the support of `sigma`, with eigenvalue
/// cutoff [`SUPPORT_CUTOFF`]. Errors if `rho` has weight outside that
/// support beyond `leak_tol`.
pub fn support_reduce(rho: &CMat, sigma: &CMat, leak_tol: f64) -> Result<(CMat, CMat)> {
    let (w, v) = eigh(sigma)?;
    let d = sigma.nrows();
    let keep: Vec<usize> = (0..d).filter(|&i| w[i] > SUPPORT_CUTOFF).collect();
    if keep.len() == d {
        return Ok((rho.clone(), sigma.clone()));
    }
    // isometry onto supp(sigma)
    let mut iso = Array2::from_elem((d, keep.len()), Complex64::ZERO);
    for (col, &i) in keep.iter().enumerate() {
        for r in 0..d {
            iso[[r, col]] = v[[r, i]];
        }
    }
    let iso_d = dag(&iso);
    let rho_p = iso_d.dot(rho).dot(&iso);
    let sig_p = iso_d.dot(sigma).dot(&iso);
    let leak = (crate::trace(rho).re - crate::trace(&rho_p).re).abs();
    if leak > leak_tol {
        return Err(LinopError::SupportViolation(leak));
    }
    Ok((rho_p, sig_p))
}

/// Rank of a Hermitian PSD matrix at the support cutoff.
pub fn psd_rank(a: &CMat) -> Result<usize> {
    let w = eigvalsh(a)?;
    Ok(w.iter().filter(|&&x| x > SUPPORT_CUTOFF).count())
}
