use crate::ProbabilityVector;

/// Classical Renyi divergence `(1/(alpha-1)) log2 sum p^alpha q^(1-alpha)`
/// in bits, for `alpha > 1`. Support violations (some `p_x > 0` with
/// `q_x = 0`) yield `+inf`.
pub fn classical_renyi(p: &ProbabilityVector, q: &[f64], alpha: f64) -> f64 {
    assert!(alpha > 1.0, "classical_renyi requires alpha > 1");
    let mut acc = 0.0f64;
    for (&pi, &qi) in p.weights().iter().zip(q.iter()) {
        if pi <= 0.0 {
            continue;
        }
        if qi <= 0.0 {
            return f64::INFINITY;
        }
        acc += pi.powf(alpha) * qi.powf(1.0 - alpha);
    }
    acc.log2() / (alpha - 1.0)
}

/// Shannon entropy in bits of an arbitrary nonnegative weight vector
/// (normalization is the caller's concern; zeros are skipped).
pub fn shannon_entropy_bits(weights: &[f64]) -> f64 {
    let mut h = 0.0f64;
    for &w in weights {
        if w > 0.0 {
            h -= w * w.log2();
        }
    }
    h
}
