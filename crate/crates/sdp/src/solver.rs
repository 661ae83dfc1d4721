use crate::{BlockKind, Residuals, Result, SdpError, SdpProblem, SdpSolution, Sense, SolveStatus};
use ndarray::{Array1, Array2};
use ndarray_linalg::{Cholesky, Eigh, UPLO};
use rayon::prelude::*;

/// Forward substitution `L y = b` for lower-triangular `L` (row-major).
fn tri_lower_solve_vec(l: &Array2<f64>, b: &Array1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut y = b.clone();
    for i in 0..n {
        let row = l.row(i);
        let mut acc = y[i];
        for j in 0..i {
            acc -= row[j] * y[j];
        }
        y[i] = acc / row[i];
    }
    y
}

/// Back substitution `L^T x = y`.
fn tri_lower_t_solve_vec(l: &Array2<f64>, y: &Array1<f64>) -> Array1<f64> {
    let n = l.nrows();
    let mut x = y.clone();
    for i in (0..n).rev() {
        let mut acc = x[i];
        for j in (i + 1)..n {
            acc -= l[[j, i]] * x[j];
        }
        x[i] = acc / l[[i, i]];
    }
    x
}

/// `L X = B` columnwise for a matrix right-hand side.
fn tri_lower_solve_mat(l: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let n = l.nrows();
    let cols = b.ncols();
    let mut x = b.clone();
    for i in 0..n {
        let lii = l[[i, i]];
        for j in 0..i {
            let lij = l[[i, j]];
            if lij == 0.0 {
                continue;
            }
            for k in 0..cols {
                let t = lij * x[[j, k]];
                x[[i, k]] -= t;
            }
        }
        for k in 0..cols {
            x[[i, k]] /= lii;
        }
    }
    x
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    pub feas_tol: f64,
    pub gap_tol: f64,
    pub max_iter: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_frac: f64,
    pub verbose: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            feas_tol: 1e-8,
            gap_tol: 1e-8,
            max_iter: 120,
            step_frac: 0.98,
            verbose: false,
        }
    }
}

/// Internal cone: dense PSD blocks followed by one nonnegative-orthant block
/// that collects diagonal problem blocks and inequality slacks.
#[derive(Clone)]
struct ConeElem {
    mats: Vec<Array2<f64>>,
    lp: Array1<f64>,
}

impl ConeElem {
    fn zeros_like(shape: &ConeShape) -> Self {
        ConeElem {
            mats: shape.psd.iter().map(|&n| Array2::zeros((n, n))).collect(),
            lp: Array1::zeros(shape.lp),
        }
    }

    fn identity(shape: &ConeShape) -> Self {
        ConeElem {
            mats: shape.psd.iter().map(|&n| Array2::eye(n)).collect(),
            lp: Array1::ones(shape.lp),
        }
    }

    fn dot(&self, other: &ConeElem) -> f64 {
        let mut acc = self.lp.dot(&other.lp);
        for (a, b) in self.mats.iter().zip(other.mats.iter()) {
            acc += a.iter().zip(b.iter()).map(|(x, y)| x * y).sum::<f64>();
        }
        acc
    }

    fn axpy(&mut self, alpha: f64, other: &ConeElem) {
        for (a, b) in self.mats.iter_mut().zip(other.mats.iter()) {
            a.zip_mut_with(b, |x, &y| *x += alpha * y);
        }
        self.lp.zip_mut_with(&other.lp, |x, &y| *x += alpha * y);
    }

    fn scale(&mut self, s: f64) {
        for a in self.mats.iter_mut() {
            a.mapv_inplace(|x| x * s);
        }
        self.lp.mapv_inplace(|x| x * s);
    }

    fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }
}

struct ConeShape {
    psd: Vec<usize>,
    lp: usize,
    /// barrier degree
    nu: f64,
}

/// One constraint row in internal coordinates.
struct Row {
    /// entries (psd_block, r, c, v) with r <= c; coefficient matrix has the
    /// value at both (r,c) and (c,r)
    psd: Vec<(usize, usize, usize, f64)>,
    /// entries (lp_index, v)
    lp: Vec<(usize, f64)>,
}

struct Internal {
    shape: ConeShape,
    rows: Vec<Row>,
    b: Array1<f64>,
    c: ConeElem,
    /// problem block -> internal location
    block_map: Vec<BlockLoc>,
}

#[derive(Clone, Copy)]
enum BlockLoc {
    Psd(usize),
    Lp(usize), // offset of the diagonal block inside the lp part
}

fn build_internal(p: &SdpProblem) -> Internal {
    let mut psd = Vec::new();
    let mut block_map = Vec::with_capacity(p.blocks.len());
    let mut lp_len = 0usize;
    for &(kind, n) in &p.blocks {
        match kind {
            BlockKind::Psd => {
                block_map.push(BlockLoc::Psd(psd.len()));
                psd.push(n);
            }
            BlockKind::Diagonal => {
                block_map.push(BlockLoc::Lp(lp_len));
                lp_len += n;
            }
        }
    }
    let n_ineq = p
        .constraints
        .iter()
        .filter(|c| c.sense == Sense::Ge)
        .count();
    let slack_base = lp_len;
    lp_len += n_ineq;

    let nu = psd.iter().sum::<usize>() as f64 + lp_len as f64;
    let shape = ConeShape { psd, lp: lp_len, nu };

    let sign = if p.maximize { -1.0 } else { 1.0 };
    let mut c = ConeElem::zeros_like(&shape);
    for &(b, r, cc, v) in p.objective.entries() {
        match block_map[b] {
            BlockLoc::Psd(k) => {
                c.mats[k][[r, cc]] += sign * v;
                if r != cc {
                    c.mats[k][[cc, r]] += sign * v;
                }
            }
            BlockLoc::Lp(off) => c.lp[off + r] += sign * v,
        }
    }

    let mut rows = Vec::with_capacity(p.constraints.len());
    let mut b_vec = Array1::zeros(p.constraints.len());
    let mut slack_next = slack_base;
    for (i, con) in p.constraints.iter().enumerate() {
        let mut row = Row {
            psd: Vec::new(),
            lp: Vec::new(),
        };
        for &(b, r, cc, v) in con.mat.entries() {
            match block_map[b] {
                BlockLoc::Psd(k) => row.psd.push((k, r, cc, v)),
                BlockLoc::Lp(off) => row.lp.push((off + r, v)),
            }
        }
        if con.sense == Sense::Ge {
            row.lp.push((slack_next, -1.0));
            slack_next += 1;
        }
        b_vec[i] = con.rhs;
        rows.push(row);
    }

    Internal {
        shape,
        rows,
        b: b_vec,
        c,
        block_map,
    }
}

/// `A x` for a cone element.
fn apply_a(internal: &Internal, x: &ConeElem) -> Array1<f64> {
    let m = internal.rows.len();
    let mut out = Array1::zeros(m);
    for (i, row) in internal.rows.iter().enumerate() {
        let mut acc = 0.0;
        for &(k, r, c, v) in &row.psd {
            acc += if r == c {
                v * x.mats[k][[r, r]]
            } else {
                2.0 * v * x.mats[k][[r, c]]
            };
        }
        for &(j, v) in &row.lp {
            acc += v * x.lp[j];
        }
        out[i] = acc;
    }
    out
}

/// `A^T y` as a cone element.
fn apply_at(internal: &Internal, y: &Array1<f64>) -> ConeElem {
    let mut out = ConeElem::zeros_like(&internal.shape);
    for (i, row) in internal.rows.iter().enumerate() {
        let yi = y[i];
        if yi == 0.0 {
            continue;
        }
        for &(k, r, c, v) in &row.psd {
            out.mats[k][[r, c]] += yi * v;
            if r != c {
                out.mats[k][[c, r]] += yi * v;
            }
        }
        for &(j, v) in &row.lp {
            out.lp[j] += yi * v;
        }
    }
    out
}

/// NT scaling data per PSD block plus the LP vector scaling.
struct Scaling {
    w: Vec<Array2<f64>>,
    /// w^{1/2} and w^{-1/2}, used by the scaled-space corrector
    w_half: Vec<Array2<f64>>,
    w_inv_half: Vec<Array2<f64>>,
    /// spectral data of z per block for z^{-1}
    zinv: Vec<Array2<f64>>,
    wlp: Array1<f64>,
    zinv_lp: Array1<f64>,
}

fn sym(m: &Array2<f64>) -> Array2<f64> {
    let t = m.t().to_owned();
    (m + &t) * 0.5
}

fn herm_fun(m: &Array2<f64>, f: impl Fn(f64) -> f64) -> Result<Array2<f64>> {
    let (w, v) = sym(m)
        .eigh(UPLO::Lower)
        .map_err(|e| SdpError::Numerical(format!("eigh: {e}")))?;
    let n = m.nrows();
    let mut scaled = v.clone();
    for j in 0..n {
        let fw = f(w[j]);
        for i in 0..n {
            scaled[[i, j]] *= fw;
        }
    }
    Ok(scaled.dot(&v.t()))
}

fn nt_scaling(x: &ConeElem, z: &ConeElem) -> Result<Scaling> {
    let nb = x.mats.len();
    let mut w = Vec::with_capacity(nb);
    let mut w_half = Vec::with_capacity(nb);
    let mut w_inv_half = Vec::with_capacity(nb);
    let mut zinv = Vec::with_capacity(nb);
    for (xb, zb) in x.mats.iter().zip(z.mats.iter()) {
        let z_half = herm_fun(zb, |t| t.max(1e-300).sqrt())?;
        let z_neg_half = herm_fun(zb, |t| 1.0 / t.max(1e-300).sqrt())?;
        let inner = sym(&z_half.dot(xb).dot(&z_half));
        let inner_half = herm_fun(&inner, |t| t.max(0.0).sqrt())?;
        let wb = sym(&z_neg_half.dot(&inner_half).dot(&z_neg_half));
        w_half.push(herm_fun(&wb, |t| t.max(1e-300).sqrt())?);
        w_inv_half.push(herm_fun(&wb, |t| 1.0 / t.max(1e-300).sqrt())?);
        zinv.push(herm_fun(zb, |t| 1.0 / t.max(1e-300))?);
        w.push(wb);
    }
    let wlp = x
        .lp
        .iter()
        .zip(z.lp.iter())
        .map(|(&xi, &zi)| (xi / zi).sqrt())
        .collect::<Array1<f64>>();
    let zinv_lp = z.lp.mapv(|zi| 1.0 / zi);
    Ok(Scaling {
        w,
        w_half,
        w_inv_half,
        zinv,
        wlp,
        zinv_lp,
    })
}

/// `W G W` per block (with the LP part scaled by w^2).
fn sandwich(sc: &Scaling, g: &ConeElem) -> ConeElem {
    let mats = sc
        .w
        .iter()
        .zip(g.mats.iter())
        .map(|(w, gb)| sym(&w.dot(gb).dot(w)))
        .collect();
    let lp = g
        .lp
        .iter()
        .zip(sc.wlp.iter())
        .map(|(&gi, &wi)| gi * wi * wi)
        .collect();
    ConeElem { mats, lp }
}

/// Schur complement matrix `M = A W(.)W A^T`, exploiting row sparsity.
fn schur(internal: &Internal, sc: &Scaling) -> Array2<f64> {
    let m = internal.rows.len();
    let mut out = Array2::<f64>::zeros((m, m));

    // PSD part, one cone block at a time
    for (k, w) in sc.w.iter().enumerate() {
        let touching: Vec<usize> = (0..m)
            .filter(|&i| internal.rows[i].psd.iter().any(|&(kk, ..)| kk == k))
            .collect();
        if touching.is_empty() {
            continue;
        }
        let n = w.nrows();
        let cols: Vec<Vec<(usize, f64)>> = touching
            .par_iter()
            .map(|&j| {
                // G = W F_j W via rank-one accumulation over sparse entries
                let mut g = Array2::<f64>::zeros((n, n));
                for &(kk, r, c, v) in &internal.rows[j].psd {
                    if kk != k {
                        continue;
                    }
                    let wr = w.row(r);
                    let wc = w.row(c);
                    if r == c {
                        for a in 0..n {
                            let s = v * wr[a];
                            if s == 0.0 {
                                continue;
                            }
                            for bcol in 0..n {
                                g[[a, bcol]] += s * wc[bcol];
                            }
                        }
                    } else {
                        for a in 0..n {
                            let s1 = v * wr[a];
                            let s2 = v * wc[a];
                            for bcol in 0..n {
                                g[[a, bcol]] += s1 * wc[bcol] + s2 * wr[bcol];
                            }
                        }
                    }
                }
                // inner products against all touching rows i with i >= j
                let mut col = Vec::new();
                for &i in &touching {
                    if i < j {
                        continue;
                    }
                    let mut acc = 0.0;
                    for &(kk, r, c, v) in &internal.rows[i].psd {
                        if kk != k {
                            continue;
                        }
                        acc += if r == c { v * g[[r, r]] } else { 2.0 * v * g[[r, c]] };
                    }
                    col.push((i, acc));
                }
                col
            })
            .collect();
        for (jj, col) in cols.into_iter().enumerate() {
            let j = touching[jj];
            for (i, val) in col {
                out[[i, j]] += val;
            }
        }
    }

    // LP part
    let mut lp_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); internal.shape.lp];
    for (i, row) in internal.rows.iter().enumerate() {
        for &(j, v) in &row.lp {
            lp_rows[j].push((i, v));
        }
    }
    for (j, users) in lp_rows.iter().enumerate() {
        let w2 = sc.wlp[j] * sc.wlp[j];
        for a in 0..users.len() {
            for b in a..users.len() {
                let (ia, va) = users[a];
                let (ib, vb) = users[b];
                let (hi, lo) = if ia >= ib { (ia, ib) } else { (ib, ia) };
                out[[hi, lo]] += va * vb * w2;
            }
        }
    }

    // mirror lower triangle
    let mcopy = out.clone();
    for i in 0..m {
        for j in (i + 1)..m {
            out[[i, j]] = mcopy[[j, i]];
        }
    }
    out
}

struct SchurFactor {
    l: Array2<f64>,
}

/// Cholesky factor normalized so that `m = l l^T` with `l` lower-triangular
/// under row-major indexing, regardless of the LAPACK layout convention.
fn chol_lower(m: &Array2<f64>) -> std::result::Result<Array2<f64>, ()> {
    let f = m.cholesky(UPLO::Lower).map_err(|_| ())?;
    let n = m.nrows();
    // decide whether the factor came back lower or upper in this layout
    let mut upper_mass = 0.0;
    let mut lower_mass = 0.0;
    for i in 0..n {
        for j in 0..n {
            if j > i {
                upper_mass += f[[i, j]].abs();
            } else if j < i {
                lower_mass += f[[i, j]].abs();
            }
        }
    }
    if upper_mass > lower_mass {
        Ok(f.t().to_owned())
    } else {
        Ok(f)
    }
}

impl SchurFactor {
    fn factor(mut m: Array2<f64>) -> Result<Self> {
        let n = m.nrows();
        let base: f64 = (0..n).map(|i| m[[i, i]]).fold(0.0, f64::max);
        let mut ridge = 0.0;
        for attempt in 0..6 {
            if attempt > 0 {
                let add = base.max(1.0) * 1e-14 * 100f64.powi(attempt);
                for i in 0..n {
                    m[[i, i]] += add - ridge;
                }
                ridge = add;
            }
            match chol_lower(&m) {
                Ok(l) => return Ok(SchurFactor { l }),
                Err(_) => continue,
            }
        }
        Err(SdpError::Numerical("Schur factorization failed".into()))
    }

    fn solve(&self, rhs: &Array1<f64>) -> Result<Array1<f64>> {
        let y = tri_lower_solve_vec(&self.l, rhs);
        Ok(tri_lower_t_solve_vec(&self.l, &y))
    }
}

/// Largest step `alpha` with `x + alpha dx` inside the cone.
fn step_to_boundary(x: &ConeElem, dx: &ConeElem) -> f64 {
    let mut alpha = f64::INFINITY;
    for (xb, db) in x.mats.iter().zip(dx.mats.iter()) {
        let a = match chol_lower(xb) {
            Ok(l) => {
                // lambda_min of L^{-1} dX L^{-T}
                let s1 = tri_lower_solve_mat(&l, db);
                let s1t = s1.t().to_owned();
                let s2t = tri_lower_solve_mat(&l, &s1t);
                let s = s2t.t().to_owned();
                match sym(&s).eigh(UPLO::Lower) {
                    Ok((w, _)) => {
                        let wmin = w.iter().cloned().fold(f64::INFINITY, f64::min);
                        if wmin >= 0.0 {
                            f64::INFINITY
                        } else {
                            1.0 / (-wmin)
                        }
                    }
                    Err(_) => 0.0,
                }
            }
            Err(_) => 0.0,
        };
        alpha = alpha.min(a);
    }
    for (&xi, &di) in x.lp.iter().zip(dx.lp.iter()) {
        if di < 0.0 {
            alpha = alpha.min(-xi / di);
        }
    }
    alpha
}

struct Direction {
    dx: ConeElem,
    dy: Array1<f64>,
    dz: ConeElem,
    dtau: f64,
    dkappa: f64,
}

struct State {
    x: ConeElem,
    y: Array1<f64>,
    z: ConeElem,
    tau: f64,
    kappa: f64,
}

#[allow(clippy::too_many_arguments)]
fn newton_direction(
    internal: &Internal,
    st: &State,
    sc: &Scaling,
    fac: &SchurFactor,
    u: &Array1<f64>,
    p_elem: &ConeElem,
    cp: f64,
    bu: f64,
    rp: &Array1<f64>,
    rd: &ConeElem,
    rg: f64,
    sigma: f64,
    mu: f64,
    corr: Option<(&Direction, f64)>,
) -> Result<Direction> {
    // complementarity targets
    let mut rc = ConeElem::zeros_like(&internal.shape);
    for ((rcb, zinv), xb) in rc
        .mats
        .iter_mut()
        .zip(sc.zinv.iter())
        .zip(st.x.mats.iter())
    {
        *rcb = zinv * (sigma * mu) - xb;
    }
    for ((rci, &zi), &xi) in rc
        .lp
        .iter_mut()
        .zip(sc.zinv_lp.iter())
        .zip(st.x.lp.iter())
    {
        *rci = sigma * mu * zi - xi;
    }
    let mut rtk = sigma * mu - st.tau * st.kappa;
    if let Some((aff, _alpha)) = corr {
        // second-order terms in the NT-scaled space: with R = W^{1/2} and
        // V = R Z R, the scaled equation carries -V^{-1} sym(dXhat dZhat),
        // mapped back as R [.] R. The LP analogue is dx dz / z.
        for (k, rcb) in rc.mats.iter_mut().enumerate() {
            let r = &sc.w_half[k];
            let rinv = &sc.w_inv_half[k];
            let dxhat = rinv.dot(&aff.dx.mats[k]).dot(rinv);
            let dzhat = r.dot(&aff.dz.mats[k]).dot(r);
            let s2 = sym(&dxhat.dot(&dzhat));
            let vinv = sym(&rinv.dot(&sc.zinv[k]).dot(rinv));
            let corr_hat = sym(&vinv.dot(&s2));
            *rcb -= &sym(&r.dot(&corr_hat).dot(r));
        }
        for ((rci, (&dxi, &dzi)), &zi) in rc
            .lp
            .iter_mut()
            .zip(aff.dx.lp.iter().zip(aff.dz.lp.iter()))
            .zip(sc.zinv_lp.iter())
        {
            *rci -= dxi * dzi * zi;
        }
        rtk -= aff.dtau * aff.dkappa;
    }

    let eta = 1.0 - sigma;

    // r = eta (A(W rd W) - rp) - A(Rc)
    let wrdw = sandwich(sc, rd);
    let a_wrdw = apply_a(internal, &wrdw);
    let a_rc = apply_a(internal, &rc);
    let mut r = Array1::zeros(internal.rows.len());
    for i in 0..r.len() {
        r[i] = eta * (a_wrdw[i] - rp[i]) - a_rc[i];
    }
    let v = fac.solve(&r)?;
    // one refinement pass
    // dy = u dtau + v; dx = P dtau + Q
    let atv = apply_at(internal, &v);
    let mut q_elem = sandwich(sc, &atv);
    {
        let mut tmp = wrdw.clone();
        tmp.scale(-eta);
        q_elem.axpy(1.0, &tmp);
        q_elem.axpy(1.0, &rc);
    }

    let cq = internal.c.dot(&q_elem);
    let bv = internal.b.dot(&v);
    let denom = cp - bu - st.kappa / st.tau;
    if denom.abs() < 1e-300 {
        return Err(SdpError::Numerical("degenerate tau equation".into()));
    }
    let dtau = (-eta * rg - cq + bv - rtk / st.tau) / denom;
    let mut dy = v.clone();
    dy.scaled_add(dtau, u);
    let mut dx = q_elem;
    dx.axpy(dtau, p_elem);
    // dz from dual feasibility: dz = eta rd - A^T dy + c dtau
    let mut dz = rd.clone();
    dz.scale(eta);
    let atdy = apply_at(internal, &dy);
    dz.axpy(-1.0, &atdy);
    dz.axpy(dtau, &internal.c);
    let dkappa = (rtk - st.kappa * dtau) / st.tau;
    Ok(Direction {
        dx,
        dy,
        dz,
        dtau,
        dkappa,
    })
}

pub fn solve(problem: &SdpProblem, opts: &SolverOptions) -> Result<SdpSolution> {
    problem.validate()?;
    let internal = build_internal(problem);
    let m = internal.rows.len();
    let shape = &internal.shape;

    let mut st = State {
        x: ConeElem::identity(shape),
        y: Array1::zeros(m),
        z: ConeElem::identity(shape),
        tau: 1.0,
        kappa: 1.0,
    };

    let bnorm = 1.0 + internal.b.iter().map(|v| v * v).sum::<f64>().sqrt();
    let cnorm = 1.0 + internal.c.norm();
    let sign = if problem.maximize { -1.0 } else { 1.0 };
    let mu0 = (st.x.dot(&st.z) + st.tau * st.kappa) / (shape.nu + 1.0);

    let mut best: Option<SdpSolution> = None;
    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0usize;

    for iter in 0..opts.max_iter {
        iterations = iter;
        // residuals
        let ax = apply_a(&internal, &st.x);
        let mut rp = Array1::zeros(m);
        for i in 0..m {
            rp[i] = ax[i] - internal.b[i] * st.tau;
        }
        let aty = apply_at(&internal, &st.y);
        let mut rd = internal.c.clone();
        rd.scale(st.tau);
        rd.axpy(-1.0, &aty);
        rd.axpy(-1.0, &st.z);
        let cx = internal.c.dot(&st.x);
        let by = internal.b.dot(&st.y);
        let rg = st.kappa + cx - by;
        let mu = (st.x.dot(&st.z) + st.tau * st.kappa) / (shape.nu + 1.0);

        // scaled (deflated) convergence measures
        let pres = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (st.tau * bnorm);
        let dres = rd.norm() / (st.tau * cnorm);
        let pobj = sign * cx / st.tau;
        let dobj = sign * by / st.tau;
        let gap_rel = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
        let compl = st.x.dot(&st.z) / (st.tau * st.tau);
        let compl_rel = compl / (1.0 + pobj.abs() + dobj.abs());

        if opts.verbose {
            eprintln!(
                "it {iter:3} mu {mu:9.2e} pres {pres:9.2e} dres {dres:9.2e} gap {gap_rel:9.2e} tau {:9.2e} kappa {:9.2e} pobj {pobj:+.8e}",
                st.tau, st.kappa
            );
        }

        let make_solution = |status: SolveStatus, iterations: usize| -> SdpSolution {
            extract_solution(
                problem, &internal, &st, status, pres, dres, gap_rel, iterations,
            )
        };

        if pres < opts.feas_tol && dres < opts.feas_tol && (gap_rel < opts.gap_tol || compl_rel < opts.gap_tol)
        {
            status = SolveStatus::Optimal;
            best = Some(make_solution(status, iter));
            break;
        }

        // infeasibility detection
        if st.tau < 1e-10 * st.kappa.max(1.0) || (mu < mu0 * 1e-14 && st.tau < 1e-7) {
            let infeas_status = if by > 0.0 && by.abs() > 1e-8 * (1.0 + st.y.iter().map(|v| v.abs()).fold(0.0, f64::max)) {
                // A^T y + z = 0-ish with b^T y > 0: no primal feasible point
                SolveStatus::PrimalInfeasible
            } else if cx < 0.0 {
                SolveStatus::DualInfeasible
            } else {
                SolveStatus::NumericalTrouble
            };
            status = infeas_status;
            best = Some(make_solution(status, iter));
            break;
        }

        // NT scaling and Schur factorization
        let sc = match nt_scaling(&st.x, &st.z) {
            Ok(s) => s,
            Err(_) => {
                status = SolveStatus::NumericalTrouble;
                best = Some(make_solution(status, iter));
                break;
            }
        };
        let mfact = match SchurFactor::factor(schur(&internal, &sc)) {
            Ok(f) => f,
            Err(_) => {
                status = SolveStatus::NumericalTrouble;
                best = Some(make_solution(status, iter));
                break;
            }
        };

        // tau-column data shared by both directions
        let wcw = sandwich(&sc, &internal.c);
        let a_wcw = apply_a(&internal, &wcw);
        let mut q_vec = a_wcw.clone();
        q_vec.zip_mut_with(&internal.b, |qi, &bi| *qi += bi);
        let u = match mfact.solve(&q_vec) {
            Ok(u) => u,
            Err(_) => {
                status = SolveStatus::NumericalTrouble;
                best = Some(make_solution(status, iter));
                break;
            }
        };
        let atu = apply_at(&internal, &u);
        let mut p_elem = sandwich(&sc, &atu);
        p_elem.axpy(-1.0, &wcw);
        let cp = internal.c.dot(&p_elem);
        let bu = internal.b.dot(&u);

        // predictor
        let aff = match newton_direction(
            &internal, &st, &sc, &mfact, &u, &p_elem, cp, bu, &rp, &rd, rg, 0.0, mu, None,
        ) {
            Ok(d) => d,
            Err(_) => {
                status = SolveStatus::NumericalTrouble;
                best = Some(make_solution(status, iter));
                break;
            }
        };
        let mut alpha_aff = step_to_boundary(&st.x, &aff.dx)
            .min(step_to_boundary(&st.z, &aff.dz));
        if aff.dtau < 0.0 {
            alpha_aff = alpha_aff.min(-st.tau / aff.dtau);
        }
        if aff.dkappa < 0.0 {
            alpha_aff = alpha_aff.min(-st.kappa / aff.dkappa);
        }
        alpha_aff = alpha_aff.min(1.0);

        // centering parameter
        let gap_now = st.x.dot(&st.z) + st.tau * st.kappa;
        let mut xa = st.x.clone();
        xa.axpy(alpha_aff, &aff.dx);
        let mut za = st.z.clone();
        za.axpy(alpha_aff, &aff.dz);
        let gap_aff = xa.dot(&za)
            + (st.tau + alpha_aff * aff.dtau) * (st.kappa + alpha_aff * aff.dkappa);
        let sigma = ((gap_aff / gap_now).max(0.0).powi(3)).clamp(1e-6, 0.999);

        // corrector, with a centering-only fallback when the second-order
        // term hurts the step
        let step_of = |d: &Direction| -> f64 {
            let mut a = step_to_boundary(&st.x, &d.dx).min(step_to_boundary(&st.z, &d.dz));
            if d.dtau < 0.0 {
                a = a.min(-st.tau / d.dtau);
            }
            if d.dkappa < 0.0 {
                a = a.min(-st.kappa / d.dkappa);
            }
            a.min(1.0)
        };
        let mut dir = match newton_direction(
            &internal,
            &st,
            &sc,
            &mfact,
            &u,
            &p_elem,
            cp,
            bu,
            &rp,
            &rd,
            rg,
            sigma,
            mu,
            Some((&aff, alpha_aff)),
        ) {
            Ok(d) => d,
            Err(_) => aff,
        };
        let mut alpha = step_of(&dir);
        if alpha < 0.8 * alpha_aff {
            if let Ok(plain) = newton_direction(
                &internal, &st, &sc, &mfact, &u, &p_elem, cp, bu, &rp, &rd, rg, sigma, mu, None,
            ) {
                let alpha_plain = step_of(&plain);
                if alpha_plain > alpha {
                    dir = plain;
                    alpha = alpha_plain;
                }
            }
        }
        alpha = (alpha * opts.step_frac).min(1.0);
        if opts.verbose {
            eprintln!("      alpha_aff {alpha_aff:9.2e} sigma {sigma:9.2e} alpha {alpha:9.2e}");
        }
        if !alpha.is_finite() || alpha <= 1e-14 {
            status = SolveStatus::NumericalTrouble;
            best = Some(make_solution(status, iter));
            break;
        }

        st.x.axpy(alpha, &dir.dx);
        st.y.scaled_add(alpha, &dir.dy);
        st.z.axpy(alpha, &dir.dz);
        st.tau += alpha * dir.dtau;
        st.kappa += alpha * dir.dkappa;
    }

    let sol = match best {
        Some(s) => s,
        None => {
            // max_iter exhausted: report the final iterate
            let ax = apply_a(&internal, &st.x);
            let mut rp = Array1::zeros(m);
            for i in 0..m {
                rp[i] = ax[i] - internal.b[i] * st.tau;
            }
            let aty = apply_at(&internal, &st.y);
            let mut rd = internal.c.clone();
            rd.scale(st.tau);
            rd.axpy(-1.0, &aty);
            rd.axpy(-1.0, &st.z);
            let pres = rp.iter().map(|v| v * v).sum::<f64>().sqrt() / (st.tau * bnorm);
            let dres = rd.norm() / (st.tau * cnorm);
            let pobj = sign * internal.c.dot(&st.x) / st.tau;
            let dobj = sign * internal.b.dot(&st.y) / st.tau;
            let gap_rel = (pobj - dobj).abs() / (1.0 + pobj.abs() + dobj.abs());
            extract_solution(
                problem, &internal, &st, status, pres, dres, gap_rel, iterations,
            )
        }
    };
    Ok(sol)
}

#[allow(clippy::too_many_arguments)]
fn extract_solution(
    problem: &SdpProblem,
    internal: &Internal,
    st: &State,
    status: SolveStatus,
    pres: f64,
    dres: f64,
    gap: f64,
    iterations: usize,
) -> SdpSolution {
    let tau = if st.tau.abs() < 1e-300 { 1.0 } else { st.tau };
    let sign = if problem.maximize { -1.0 } else { 1.0 };
    let mut primal_blocks = Vec::with_capacity(problem.blocks.len());
    for (bi, &(kind, n)) in problem.blocks.iter().enumerate() {
        let mat = match (kind, internal.block_map[bi]) {
            (BlockKind::Psd, BlockLoc::Psd(k)) => st.x.mats[k].mapv(|v| v / tau),
            (BlockKind::Diagonal, BlockLoc::Lp(off)) => {
                let mut d = Array2::zeros((n, n));
                for i in 0..n {
                    d[[i, i]] = st.x.lp[off + i] / tau;
                }
                d
            }
            _ => unreachable!(),
        };
        primal_blocks.push(mat);
    }
    // multiplier convention: lambda = -y/tau for maximizations, +y/tau otherwise
    let lam_sign = if problem.maximize { -1.0 } else { 1.0 };
    let dual_vector: Vec<f64> = st.y.iter().map(|&v| lam_sign * v / tau).collect();
    let primal_value = sign * internal.c.dot(&st.x) / tau;
    let dual_value = sign * internal.b.dot(&st.y) / tau;
    SdpSolution {
        status,
        primal_blocks,
        dual_vector,
        primal_value,
        dual_value,
        residuals: Residuals {
            primal: pres,
            dual: dres,
            gap,
        },
        iterations,
    }
}
