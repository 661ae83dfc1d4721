use crate::{require_optimal, DivergenceError, ImOrder, Result};
use linop::{iterated_geometric_mean, min_eigval, support_reduce, CMat, DensityState};
use ndarray::Array2;
use num_complex::Complex64;
use sdp::complex::{CExpr, ComplexSdp};
use sdp::{solve, Sense, SolverOptions};

/// Which formulation of the divergence to solve.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImForm {
    /// Maximization over the operator chain (V_1..V_k, Z).
    Primal,
    /// Minimization with weighted traces and the alpha/2-scaled first block.
    DualA,
    /// Minimization of the dyadically weighted trace sum.
    DualB,
    /// Minimization of tr A_1 under equal-trace constraints.
    DualC,
    /// DualC, with the nested geometric-mean feasibility verified post hoc.
    DualD,
}

/// Witness of the maximization form.
#[derive(Debug, Clone)]
pub struct ImWitness {
    pub vs: Vec<CMat>,
    pub z: CMat,
}

/// Witness of the minimization forms.
#[derive(Debug, Clone)]
pub struct DualWitness {
    pub a_mats: Vec<CMat>,
    pub c_mats: Vec<CMat>,
}

#[derive(Debug, Clone)]
pub enum Witness {
    Primal(ImWitness),
    Dual(DualWitness),
}

#[derive(Debug, Clone)]
pub struct ImValue {
    /// Divergence in bits.
    pub bits: f64,
    /// Optimal value of the inner optimization (the quantity under the log).
    pub q_value: f64,
    pub witness: Witness,
}

/// Options beyond the defaults; `drop_v1_psd` removes the `V_1 + V_1* >= 0`
/// constraint from the primal, which at k = 1 turns the divergence into the
/// Petz quantity.
#[derive(Debug, Clone, Copy, Default)]
pub struct ImOptions {
    pub drop_v1_psd: bool,
}

fn one() -> Complex64 {
    Complex64::ONE
}

/// Primal form: blocks G_i = [[I, V_i], [V_i*, B_i]] with B_i the symmetrized
/// next operator and B_k = Z, plus a PSD block for V_1 + V_1*.
fn solve_primal(
    rho: &CMat,
    sigma: &CMat,
    order: ImOrder,
    opts: &SolverOptions,
    im_opts: ImOptions,
) -> Result<ImValue> {
    let d = rho.nrows();
    let k = order.k() as usize;
    let alpha = order.alpha();
    let mut model = ComplexSdp::new(true);
    let g: Vec<usize> = (0..k).map(|_| model.add_block(2 * d)).collect();
    let h0 = if im_opts.drop_v1_psd {
        None
    } else {
        Some(model.add_block(d))
    };

    // top-left of every chain block is the identity
    for &gi in &g {
        let eye = Array2::from_shape_fn((d, d), |(i, j)| {
            if i == j {
                one()
            } else {
                Complex64::ZERO
            }
        });
        model.pin_hermitian(d, &eye, |i, j| {
            let mut e = CExpr::new();
            e.push(gi, i, j, one());
            e
        });
    }
    // bottom-right of G_i equals (V_{i+1} + V_{i+1}*)/2
    for i in 0..k.saturating_sub(1) {
        for a in 0..d {
            for b in a..d {
                let mut e = CExpr::new();
                e.push(g[i], d + a, d + b, one());
                e.push(g[i + 1], a, d + b, -0.5 * one());
                e.push(g[i + 1], d + a, b, -0.5 * one());
                model.add_complex_eq(e, Complex64::ZERO);
            }
        }
    }
    // V_1 + V_1* is PSD via the tied block
    if let Some(h0) = h0 {
        for a in 0..d {
            for b in a..d {
                let mut e = CExpr::new();
                e.push(h0, a, b, one());
                e.push(g[0], a, d + b, -one());
                e.push(g[0], d + a, b, -one());
                model.add_complex_eq(e, Complex64::ZERO);
            }
        }
    }
    // objective: alpha tr(rho (V_1+V_1*)/2) - (alpha-1) tr(sigma Z)
    let mut obj = CExpr::new();
    for a in 0..d {
        for b in 0..d {
            obj.push(g[0], a, d + b, alpha * rho[[b, a]]);
            obj.push(g[k - 1], d + a, d + b, -(alpha - 1.0) * sigma[[b, a]]);
        }
    }
    model.set_objective(obj);

    let sol = solve(&model.lower()?, opts)?;
    require_optimal(&sol)?;
    let q = sol.certified_bound();
    let mut vs = Vec::with_capacity(k);
    for (i, &gi) in g.iter().enumerate() {
        let big = model.recover_block(&sol, gi);
        let mut v = Array2::from_elem((d, d), Complex64::ZERO);
        for a in 0..d {
            for b in 0..d {
                v[[a, b]] = big[[a, d + b]];
            }
        }
        vs.push(v);
        if i == k - 1 {
            let mut z = Array2::from_elem((d, d), Complex64::ZERO);
            for a in 0..d {
                for b in 0..d {
                    z[[a, b]] = big[[d + a, d + b]];
                }
            }
            return Ok(ImValue {
                bits: q.max(1e-300).log2() / (alpha - 1.0),
                q_value: q,
                witness: Witness::Primal(ImWitness { vs, z }),
            });
        }
    }
    unreachable!("k >= 1")
}

enum DualFlavor {
    A,
    B,
    C,
}

/// Dual forms: blocks D_i = [[A_i, C_i], [C_i*, E_i]] plus a PSD slack block
/// for C_1 - rho; flavors differ in the scaling of the off-diagonal ties and
/// the objective weights.
fn solve_dual(
    rho: &CMat,
    sigma: &CMat,
    order: ImOrder,
    opts: &SolverOptions,
    flavor: DualFlavor,
) -> Result<ImValue> {
    let d = rho.nrows();
    let k = order.k() as usize;
    let alpha = order.alpha();
    let mut model = ComplexSdp::new(false);
    let blocks: Vec<usize> = (0..k).map(|_| model.add_block(2 * d)).collect();
    let f0 = model.add_block(d); // C_1 - rho >= 0

    // sigma scale of the last bottom-right block and C-off-diagonal scale
    let (first_off_scale, mid_off_scale, sigma_scale) = match flavor {
        DualFlavor::A => (alpha / 2.0, 0.5, alpha - 1.0),
        DualFlavor::B | DualFlavor::C => (1.0, 1.0, 1.0),
    };

    // off(D_1) = first_off_scale * (rho + F0), all ordered pairs
    for a in 0..d {
        for b in 0..d {
            if a > b {
                continue;
            }
            // handle (a,b) and (b,a) jointly via two complex equations when
            // a != b; the big-block Hermiticity does not relate them.
            let pairs: &[(usize, usize)] = if a == b { &[(a, b)] } else { &[(a, b), (b, a)] };
            for &(r, s) in pairs {
                let mut e = CExpr::new();
                e.push(blocks[0], r, d + s, one());
                e.push(f0, r, s, -first_off_scale * one());
                model.add_complex_eq(e, first_off_scale * rho[[r, s]]);
            }
        }
    }
    // chain ties: off(D_{i+1}) = mid_off_scale * br(D_i)
    for i in 0..k - 1 {
        for r in 0..d {
            for s in 0..d {
                let mut e = CExpr::new();
                e.push(blocks[i + 1], r, d + s, one());
                e.push(blocks[i], d + r, d + s, -mid_off_scale * one());
                model.add_complex_eq(e, Complex64::ZERO);
            }
        }
    }
    // last bottom-right block pinned to sigma_scale * sigma
    {
        let target = sigma.mapv(|z| z * sigma_scale);
        model.pin_hermitian(d, &target, |i, j| {
            let mut e = CExpr::new();
            e.push(blocks[k - 1], d + i, d + j, one());
            e
        });
    }
    // equal traces for flavor C
    if matches!(flavor, DualFlavor::C) {
        for i in 1..k {
            let mut e = CExpr::new();
            for a in 0..d {
                e.push(blocks[0], a, a, one());
                e.push(blocks[i], a, a, -one());
            }
            model.add_scalar(e, Sense::Eq, 0.0);
        }
    }
    // objective
    let mut obj = CExpr::new();
    match flavor {
        DualFlavor::A => {
            for (i, &bl) in blocks.iter().enumerate() {
                let _ = i;
                for a in 0..d {
                    obj.push(bl, a, a, one());
                }
            }
        }
        DualFlavor::B => {
            let denom = ((1u64 << k) - 1) as f64;
            for (i, &bl) in blocks.iter().enumerate() {
                let w = (1u64 << (k - 1 - i)) as f64 / denom;
                for a in 0..d {
                    obj.push(bl, a, a, w * one());
                }
            }
        }
        DualFlavor::C => {
            for a in 0..d {
                obj.push(blocks[0], a, a, one());
            }
        }
    }
    model.set_objective(obj);

    let sol = solve(&model.lower()?, opts)?;
    require_optimal(&sol)?;
    let q = sol.certified_bound();
    let mut a_mats = Vec::with_capacity(k);
    let mut c_mats = Vec::with_capacity(k);
    for (i, &bl) in blocks.iter().enumerate() {
        let big = model.recover_block(&sol, bl);
        let mut am = Array2::from_elem((d, d), Complex64::ZERO);
        let mut cm = Array2::from_elem((d, d), Complex64::ZERO);
        for r in 0..d {
            for s in 0..d {
                am[[r, s]] = big[[r, s]];
                cm[[r, s]] = big[[r, d + s]];
            }
        }
        // undo the off-diagonal scalings of the A flavor: off(D_1) carries
        // (alpha/2) C_1 and later blocks carry C_i / 2
        if matches!(flavor, DualFlavor::A) {
            if i == 0 {
                cm.mapv_inplace(|z| z / (alpha / 2.0));
            } else {
                cm.mapv_inplace(|z| z * 2.0);
            }
        }
        a_mats.push(am);
        c_mats.push(cm);
    }
    Ok(ImValue {
        bits: q.max(1e-300).log2() / (alpha - 1.0),
        q_value: q,
        witness: Witness::Dual(DualWitness { a_mats, c_mats }),
    })
}

/// Iterated-mean divergence of order `alpha_k` between `rho` and `sigma`,
/// in the requested formulation. Inputs are projected onto the support of
/// `sigma` first; weight of `rho` outside that support is a support
/// violation.
pub fn im_divergence(
    rho: &DensityState,
    sigma: &CMat,
    order: ImOrder,
    form: ImForm,
    opts: &SolverOptions,
) -> Result<ImValue> {
    im_divergence_with(rho, sigma, order, form, opts, ImOptions::default())
}

pub fn im_divergence_with(
    rho: &DensityState,
    sigma: &CMat,
    order: ImOrder,
    form: ImForm,
    opts: &SolverOptions,
    im_opts: ImOptions,
) -> Result<ImValue> {
    if rho.dim() != sigma.nrows() {
        return Err(DivergenceError::Invalid(
            "rho and sigma dimensions differ".into(),
        ));
    }
    let (rho_r, sigma_r) = support_reduce(rho.mat(), sigma, 1e-9)?;
    match form {
        ImForm::Primal => solve_primal(&rho_r, &sigma_r, order, opts, im_opts),
        ImForm::DualA => solve_dual(&rho_r, &sigma_r, order, opts, DualFlavor::A),
        ImForm::DualB => solve_dual(&rho_r, &sigma_r, order, opts, DualFlavor::B),
        ImForm::DualC => solve_dual(&rho_r, &sigma_r, order, opts, DualFlavor::C),
        ImForm::DualD => {
            let val = solve_dual(&rho_r, &sigma_r, order, opts, DualFlavor::C)?;
            let Witness::Dual(w) = &val.witness else {
                unreachable!()
            };
            // the nested geometric-mean inequality rho <= A_1 # (... # (A_k # sigma))
            let mean = iterated_geometric_mean(&w.a_mats, &sigma_r)?;
            let slack = &mean - &rho_r;
            let gap = min_eigval(&linop::hermitian_part(&slack))?;
            if gap < -1e-6 {
                return Err(DivergenceError::GeometricMeanCheck(gap));
            }
            Ok(val)
        }
    }
}
