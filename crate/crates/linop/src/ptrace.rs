use crate::{eigh, CMat, LinopError, Result, SUPPORT_CUTOFF};
use ndarray::Array2;
use num_complex::Complex64;

/// Partial trace over the subsystems NOT listed in `keep`. Subsystem order
/// within `keep` is preserved in the output.
pub fn partial_trace(mat: &CMat, dims: &[usize], keep: &[usize]) -> Result<CMat> {
    let n = dims.len();
    let total: usize = dims.iter().product();
    if mat.dim() != (total, total) {
        return Err(LinopError::DimensionMismatch(format!(
            "matrix {}x{} vs dims product {total}",
            mat.nrows(),
            mat.ncols()
        )));
    }
    for &k in keep {
        if k >= n {
            return Err(LinopError::InvalidSubsystem { index: k, count: n });
        }
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.len() == n {
        return Ok(mat.clone());
    }

    let traced: Vec<usize> = (0..n).filter(|i| !keep_sorted.contains(i)).collect();
    let dk: usize = keep_sorted.iter().map(|&i| dims[i]).product();
    let dt: usize = traced.iter().map(|&i| dims[i]).product();

    // strides of each subsystem index in the flat row index
    let mut strides = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * dims[i + 1];
    }
    let flat = |kept_idx: usize, traced_idx: usize| -> usize {
        let mut rem_k = kept_idx;
        let mut rem_t = traced_idx;
        let mut idx = 0usize;
        for (pos, &sub) in keep_sorted.iter().enumerate().rev() {
            let d = dims[sub];
            let _ = pos;
            idx += (rem_k % d) * strides[sub];
            rem_k /= d;
        }
        for &sub in traced.iter().rev() {
            let d = dims[sub];
            idx += (rem_t % d) * strides[sub];
            rem_t /= d;
        }
        idx
    };

    let mut out = Array2::from_elem((dk, dk), Complex64::ZERO);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = Complex64::ZERO;
            for t in 0..dt {
                acc += mat[[flat(a, t), flat(b, t)]];
            }
            out[[a, b]] = acc;
        }
    }
    Ok(out)
}

/// Purifies a density matrix: returns a ket on `H (x) C^r` (r = rank) whose
/// reduction onto the first factor is the input, together with r.
pub fn purify(rho: &CMat) -> Result<(Vec<Complex64>, usize)> {
    let (w, v) = eigh(rho)?;
    let d = rho.nrows();
    let keep: Vec<usize> = (0..d).filter(|&i| w[i] > SUPPORT_CUTOFF).collect();
    let r = keep.len().max(1);
    let mut ket = vec![Complex64::ZERO; d * r];
    for (e, &i) in keep.iter().enumerate() {
        let amp = Complex64::new(w[i].max(0.0).sqrt(), 0.0);
        for row in 0..d {
            ket[row * r + e] = amp * v[[row, i]];
        }
    }
    Ok((ket, r))
}
