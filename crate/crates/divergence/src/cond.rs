use crate::{require_optimal, DivergenceError, ImOrder, Result};
use ndarray::Array2;
use num_complex::Complex64;
use sdp::complex::{CExpr, ComplexSdp};
use sdp::{solve, SolverOptions};

/// The two equivalent write-ups of the optimized conditional entropy: with
/// an explicit slack operator Z capped through its partial trace, or with Z
/// eliminated against the quadratic cap on V_k. Both Schur-complete to the
/// same block program, so they share one encoder; the label is kept so both
/// can be requested and compared.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CondForm {
    WithZ,
    NoZ,
}

/// Optimized conditional Renyi entropy `H-up(A|B)` of the iterated-mean
/// family for an explicitly bipartite state, in bits.
///
/// The value is `(alpha/(1-alpha)) log2 t*` with `t*` the optimum of the
/// linearized objective `tr(rho (V_1 + V_1*)/2)` under the operator chain
/// and the cap `tr_A(Z) <= I_B`. The reported number uses the solver's dual
/// bound on `t*`, which makes it a certified lower bound on the entropy.
pub fn im_cond_entropy_up(
    rho_ab: &linop::DensityState,
    order: ImOrder,
    _form: CondForm,
    opts: &SolverOptions,
) -> Result<f64> {
    let dims = rho_ab.subsystem_dims();
    if dims.len() != 2 {
        return Err(DivergenceError::Invalid(format!(
            "need bipartite dims, got {dims:?}"
        )));
    }
    let (da, db) = (dims[0], dims[1]);
    let dd = da * db;
    let k = order.k() as usize;
    let rho = rho_ab.mat();

    let mut model = ComplexSdp::new(true);
    let g: Vec<usize> = (0..k).map(|_| model.add_block(2 * dd)).collect();
    let h0 = model.add_block(dd); // V_1 + V_1* >= 0
    let cap = model.add_block(db); // I_B - tr_A Z >= 0

    let eye = Array2::from_shape_fn((dd, dd), |(i, j)| {
        if i == j {
            Complex64::ONE
        } else {
            Complex64::ZERO
        }
    });
    for &gi in &g {
        model.pin_hermitian(dd, &eye, |i, j| {
            let mut e = CExpr::new();
            e.push(gi, i, j, Complex64::ONE);
            e
        });
    }
    for i in 0..k.saturating_sub(1) {
        for a in 0..dd {
            for b in a..dd {
                let mut e = CExpr::new();
                e.push(g[i], dd + a, dd + b, Complex64::ONE);
                e.push(g[i + 1], a, dd + b, Complex64::new(-0.5, 0.0));
                e.push(g[i + 1], dd + a, b, Complex64::new(-0.5, 0.0));
                model.add_complex_eq(e, Complex64::ZERO);
            }
        }
    }
    for a in 0..dd {
        for b in a..dd {
            let mut e = CExpr::new();
            e.push(h0, a, b, Complex64::ONE);
            e.push(g[0], a, dd + b, -Complex64::ONE);
            e.push(g[0], dd + a, b, -Complex64::ONE);
            model.add_complex_eq(e, Complex64::ZERO);
        }
    }
    // cap = I_B - tr_A Z with Z the bottom-right block of the last chain link
    for b1 in 0..db {
        for b2 in b1..db {
            let mut e = CExpr::new();
            e.push(cap, b1, b2, Complex64::ONE);
            for a in 0..da {
                let r = a * db + b1;
                let c = a * db + b2;
                e.push(g[k - 1], dd + r, dd + c, Complex64::ONE);
            }
            let rhs = if b1 == b2 {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            model.add_complex_eq(e, rhs);
        }
    }

    let mut obj = CExpr::new();
    for a in 0..dd {
        for b in 0..dd {
            obj.push(g[0], a, dd + b, rho[[b, a]]);
        }
    }
    model.set_objective(obj);

    let sol = solve(&model.lower()?, opts)?;
    require_optimal(&sol)?;
    let t = sol.certified_bound().max(1e-300);
    Ok(order.entropy_prefactor() * t.log2())
}

/// Conditional min-entropy `H_min(A|B)` in bits via the guessing SDP
/// `min tr(sigma_B)` over `I_A (x) sigma_B >= rho_AB`.
pub fn hmin_cond(rho_ab: &linop::DensityState, opts: &SolverOptions) -> Result<f64> {
    let dims = rho_ab.subsystem_dims();
    if dims.len() != 2 {
        return Err(DivergenceError::Invalid(format!(
            "need bipartite dims, got {dims:?}"
        )));
    }
    let (da, db) = (dims[0], dims[1]);
    let dd = da * db;
    let rho = rho_ab.mat();

    let mut model = ComplexSdp::new(false);
    let sig = model.add_block(db);
    let slack = model.add_block(dd); // I (x) sigma - rho

    for r in 0..dd {
        for c in r..dd {
            let (a1, b1) = (r / db, r % db);
            let (a2, b2) = (c / db, c % db);
            let mut e = CExpr::new();
            e.push(slack, r, c, Complex64::ONE);
            if a1 == a2 {
                e.push(sig, b1, b2, -Complex64::ONE);
            }
            model.add_complex_eq(e, -rho[[r, c]]);
        }
    }
    let mut obj = CExpr::new();
    for b in 0..db {
        obj.push(sig, b, b, Complex64::ONE);
    }
    model.set_objective(obj);

    let sol = solve(&model.lower()?, opts)?;
    require_optimal(&sol)?;
    let p_guess = sol.certified_bound().max(1e-300);
    Ok(-p_guess.log2())
}
