use crate::moment::{ConstraintId, MomentProblem};
use crate::{NpaError, Result};
use ncpoly::{NcPolynomial, Word};
use num_complex::Complex64;
use sdp::{BlockKind, SdpProblem, Sense, SparseSym};
use std::collections::BTreeMap;

/// Real component of a moment: the real or imaginary part of the canonical
/// representative (the lexicographically smaller of a word and its adjoint).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Part {
    Re,
    Im,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct CompId {
    rep: usize,
    part: Part,
}

/// Where a component's value lives in the lowered problem.
#[derive(Debug, Clone, Copy)]
enum Anchor {
    /// cell (block, i, j): the component equals `sign *` (that part of the
    /// cell value)
    Cell {
        block: usize,
        i: usize,
        j: usize,
        part: Part,
        sign: f64,
    },
    /// difference of two entries of the free diagonal block
    Free { index: usize },
}

struct Reps {
    /// canonical word -> (rep index, conjugated?)
    map: BTreeMap<Word, (usize, bool)>,
    /// rep index -> self-adjoint?
    self_adjoint: Vec<bool>,
    words: Vec<Word>,
}

impl Reps {
    fn new() -> Self {
        Reps {
            map: BTreeMap::new(),
            self_adjoint: Vec::new(),
            words: Vec::new(),
        }
    }

    fn resolve(&mut self, mp: &MomentProblem, w: &Word) -> Result<(usize, bool)> {
        if let Some(&r) = self.map.get(w) {
            return Ok(r);
        }
        let adj_poly = mp
            .rules
            .canonicalize(&mp.algebra, &w.adjoint(&mp.algebra))
            .map_err(NpaError::from)?;
        if adj_poly.n_terms() != 1 {
            return Err(NpaError::Build(format!(
                "adjoint of canonical word '{}' is not a single monomial",
                mp.algebra.display_word(w)
            )));
        }
        let (wadj, c) = adj_poly.terms().next().unwrap();
        if (c - Complex64::ONE).norm() > 1e-12 {
            return Err(NpaError::Build(
                "adjoint canonicalization produced a nonunit coefficient".into(),
            ));
        }
        let self_adj = wadj == w;
        let rep_word = if w <= wadj { w.clone() } else { wadj.clone() };
        let idx = self.words.len();
        self.words.push(rep_word.clone());
        self.self_adjoint.push(self_adj);
        self.map.insert(w.clone(), (idx, w > wadj));
        if !self_adj {
            self.map.insert(wadj.clone(), (idx, wadj > &rep_word));
        }
        Ok(self.map[w])
    }
}

/// A complex-linear form over components plus a constant.
#[derive(Debug, Clone, Default)]
struct Form {
    terms: Vec<(CompId, Complex64)>,
    constant: Complex64,
}

impl Form {
    fn from_poly(mp: &MomentProblem, reps: &mut Reps, p: &NcPolynomial) -> Result<Form> {
        let mut acc: BTreeMap<CompId, Complex64> = BTreeMap::new();
        let mut constant = Complex64::ZERO;
        for (w, &c) in p.terms() {
            if w.is_identity() {
                constant += c;
                continue;
            }
            let (rep, conj) = reps.resolve(mp, w)?;
            // y_w = Re_rep + s i Im_rep with s = -1 when w is the adjoint side
            *acc.entry(CompId {
                rep,
                part: Part::Re,
            })
            .or_insert(Complex64::ZERO) += c;
            if !reps.self_adjoint[rep] {
                let s = if conj { -1.0 } else { 1.0 };
                *acc.entry(CompId {
                    rep,
                    part: Part::Im,
                })
                .or_insert(Complex64::ZERO) += c * Complex64::new(0.0, s);
            }
        }
        let terms = acc
            .into_iter()
            .filter(|(_, c)| c.norm_sqr() > 1e-28)
            .collect();
        Ok(Form { terms, constant })
    }

    fn is_single_pure(&self) -> Option<CompId> {
        if self.constant == Complex64::ZERO && self.terms.len() == 1 {
            let (id, c) = self.terms[0];
            if (c - Complex64::ONE).norm() < 1e-14 {
                return Some(id);
            }
        }
        None
    }
}

/// One cell of one PSD block, with its moment expansion.
struct CellInfo {
    block: usize,
    i: usize,
    j: usize,
    form: Form,
}

/// Index maps from the lowered SDP back to the moment problem.
#[derive(Debug, Clone)]
pub struct LoweredSdp {
    pub problem: SdpProblem,
    /// attribution of every SDP constraint row
    pub rows: Vec<ConstraintId>,
    /// sizes: moment block first, then localizing blocks, then the free
    /// diagonal block when present
    pub n_free_components: usize,
    pub complex_lift: bool,
}

struct Emitter {
    real_mode: bool,
    /// complex dims per matrix block (before any lift)
    dims: Vec<usize>,
}

impl Emitter {
    /// real row/col offsets of the lifted entry set for `w * Y[r, c]`
    fn accum(&self, s: &mut SparseSym, block: usize, r: usize, c: usize, w: f64) {
        if w == 0.0 {
            return;
        }
        if r == c {
            s.add(block, r, c, w);
        } else {
            s.add(block, r.min(c), r.max(c), w / 2.0);
        }
    }

    /// contribution `Re(coef * X_block[i, j])` of a Hermitian block entry
    fn add_entry(&self, s: &mut SparseSym, block: usize, i: usize, j: usize, coef: Complex64) {
        if self.real_mode {
            debug_assert!(coef.im.abs() < 1e-9, "complex data in real mode");
            self.accum(s, block, i, j, coef.re);
            return;
        }
        let n = self.dims[block];
        self.accum(s, block, i, j, coef.re / 2.0);
        self.accum(s, block, n + i, n + j, coef.re / 2.0);
        self.accum(s, block, n + i, j, -coef.im / 2.0);
        self.accum(s, block, i, n + j, coef.im / 2.0);
    }

    /// contribution of `w * part(cell)` for a real target part
    fn add_cell_part(
        &self,
        s: &mut SparseSym,
        block: usize,
        i: usize,
        j: usize,
        part: Part,
        w: f64,
    ) {
        match part {
            Part::Re => self.add_entry(s, block, i, j, Complex64::new(w, 0.0)),
            Part::Im => self.add_entry(s, block, i, j, Complex64::new(0.0, -w)),
        }
    }
}

/// Lowers a moment problem to a block SDP.
///
/// Every canonical moment gets either an anchor cell (a matrix entry whose
/// value it *is*) or a pair of free diagonal entries; all other occurrences
/// are tied to the anchor with equality rows. Complex Hermitian blocks are
/// lifted to real symmetric ones of twice the size; with
/// `real_certificate` the moments are real and blocks keep their size.
pub fn lower_to_sdp(mp: &MomentProblem) -> Result<LoweredSdp> {
    let mut reps = Reps::new();

    // moment-matrix cells
    let n = mp.monomials.len();
    let mut cells: Vec<CellInfo> = Vec::new();
    for i in 0..n {
        for j in i..n {
            let w = mp.monomials[i]
                .adjoint(&mp.algebra)
                .concat(&mp.monomials[j]);
            let poly = mp
                .rules
                .canonicalize(&mp.algebra, &w)
                .map_err(NpaError::from)?;
            let form = Form::from_poly(mp, &mut reps, &poly)?;
            cells.push(CellInfo {
                block: 0,
                i,
                j,
                form,
            });
        }
    }
    // localizing cells
    let mut dims = vec![n];
    for (li, lb) in mp.loc_blocks.iter().enumerate() {
        let m = lb.monomials.len();
        dims.push(m);
        for i in 0..m {
            for j in i..m {
                let ui = lb.monomials[i].adjoint(&mp.algebra);
                let mut poly = NcPolynomial::zero();
                for (t, c) in lb.poly.terms() {
                    let w = ui.concat(t).concat(&lb.monomials[j]);
                    let canon = mp
                        .rules
                        .canonicalize(&mp.algebra, &w)
                        .map_err(NpaError::from)?;
                    for (m2, c2) in canon.terms() {
                        poly.add_term(m2.clone(), c2 * c);
                    }
                }
                let form = Form::from_poly(mp, &mut reps, &poly)?;
                cells.push(CellInfo {
                    block: 1 + li,
                    i,
                    j,
                    form,
                });
            }
        }
    }

    let real_mode = mp.real_certificate;
    // pass 1: anchors
    let mut anchors: BTreeMap<CompId, Anchor> = BTreeMap::new();
    for cell in &cells {
        if real_mode {
            if let Some(id) = cell.form.is_single_pure() {
                debug_assert!(matches!(id.part, Part::Re));
                anchors.entry(id).or_insert(Anchor::Cell {
                    block: cell.block,
                    i: cell.i,
                    j: cell.j,
                    part: Part::Re,
                    sign: 1.0,
                });
            }
            continue;
        }
        // complex mode: a cell whose form is exactly y_w anchors both parts
        if cell.form.constant != Complex64::ZERO {
            continue;
        }
        let mut re_term: Option<(CompId, f64)> = None;
        let mut im_term: Option<(CompId, f64)> = None;
        let mut clean = true;
        for &(id, c) in &cell.form.terms {
            match id.part {
                Part::Re if (c - Complex64::ONE).norm() < 1e-14 => re_term = Some((id, 1.0)),
                Part::Im if (c.re.abs() < 1e-14) && ((c.im - 1.0).abs() < 1e-14) => {
                    im_term = Some((id, 1.0))
                }
                Part::Im if (c.re.abs() < 1e-14) && ((c.im + 1.0).abs() < 1e-14) => {
                    im_term = Some((id, -1.0))
                }
                _ => clean = false,
            }
        }
        if !clean || re_term.is_none() {
            continue;
        }
        let (re_id, _) = re_term.unwrap();
        if cell.form.terms.len() == 1 && mp_self_adjoint(&reps, re_id) {
            // diagonal-like cell: Re anchors; Im of the cell is pinned to 0
            // later
            anchors.entry(re_id).or_insert(Anchor::Cell {
                block: cell.block,
                i: cell.i,
                j: cell.j,
                part: Part::Re,
                sign: 1.0,
            });
        } else if cell.form.terms.len() == 2 {
            if let Some((im_id, s)) = im_term {
                if im_id.rep == re_id.rep {
                    anchors.entry(re_id).or_insert(Anchor::Cell {
                        block: cell.block,
                        i: cell.i,
                        j: cell.j,
                        part: Part::Re,
                        sign: 1.0,
                    });
                    anchors.entry(im_id).or_insert(Anchor::Cell {
                        block: cell.block,
                        i: cell.i,
                        j: cell.j,
                        part: Part::Im,
                        sign: s,
                    });
                }
            }
        }
    }

    // free components for everything unanchored
    let mut n_free = 0usize;
    {
        let mut comp_ids: Vec<CompId> = Vec::new();
        for cell in &cells {
            for &(id, _) in &cell.form.terms {
                comp_ids.push(id);
            }
        }
        let mut expr_ids = Vec::new();
        for con in &mp.constraints {
            let form = Form::from_poly(mp, &mut reps, &con.expr)?;
            for (id, _) in form.terms {
                expr_ids.push(id);
            }
        }
        let obj_form = Form::from_poly(mp, &mut reps, &mp.objective)?;
        for (id, _) in obj_form.terms {
            expr_ids.push(id);
        }
        comp_ids.extend(expr_ids);
        comp_ids.sort();
        comp_ids.dedup();
        for id in comp_ids {
            if real_mode && matches!(id.part, Part::Im) {
                continue;
            }
            if !anchors.contains_key(&id) {
                anchors.insert(id, Anchor::Free { index: n_free });
                n_free += 1;
            }
        }
    }

    // assemble blocks
    let lift = |d: usize| if real_mode { d } else { 2 * d };
    let mut blocks: Vec<(BlockKind, usize)> =
        dims.iter().map(|&d| (BlockKind::Psd, lift(d))).collect();
    let free_block = if n_free > 0 {
        blocks.push((BlockKind::Diagonal, 2 * n_free));
        Some(blocks.len() - 1)
    } else {
        None
    };
    let mut problem = SdpProblem::new(blocks, true);
    let emitter = Emitter {
        real_mode,
        dims: dims.clone(),
    };

    // helper: emit `w * component` into a sparse matrix
    let emit_component = |s: &mut SparseSym, id: CompId, w: f64| {
        if real_mode && matches!(id.part, Part::Im) {
            return; // imaginary parts vanish under the real certificate
        }
        match anchors[&id] {
            Anchor::Cell {
                block,
                i,
                j,
                part,
                sign,
            } => emitter.add_cell_part(s, block, i, j, part, w * sign),
            Anchor::Free { index } => {
                let fb = free_block.expect("free block exists");
                s.add(fb, 2 * index, 2 * index, w);
                s.add(fb, 2 * index + 1, 2 * index + 1, -w);
            }
        }
    };

    let mut rows: Vec<ConstraintId> = Vec::new();

    // tie rows: every cell equals its moment expansion
    for cell in &cells {
        let is_own_anchor = |part: Part| -> bool {
            cell.form.terms.iter().any(|&(id, _)| {
                matches!(anchors.get(&id), Some(Anchor::Cell { block, i, j, part: p, .. })
                    if *block == cell.block && *i == cell.i && *j == cell.j && *p == part)
            })
        };
        // real part row
        if !is_own_anchor(Part::Re) {
            let mut s = SparseSym::new();
            emitter.add_cell_part(&mut s, cell.block, cell.i, cell.j, Part::Re, 1.0);
            for &(id, c) in &cell.form.terms {
                emit_component(&mut s, id, -c.re);
            }
            s.consolidate();
            if !(s.is_empty() && cell.form.constant.re == 0.0) {
                problem.add_constraint(s, Sense::Eq, cell.form.constant.re);
                rows.push(ConstraintId::Tie);
            }
        }
        // imaginary part row (off-diagonal cells in complex mode)
        if !real_mode && cell.i != cell.j && !is_own_anchor(Part::Im) {
            let mut s = SparseSym::new();
            emitter.add_cell_part(&mut s, cell.block, cell.i, cell.j, Part::Im, 1.0);
            for &(id, c) in &cell.form.terms {
                emit_component(&mut s, id, -c.im);
            }
            s.consolidate();
            if !(s.is_empty() && cell.form.constant.im == 0.0) {
                problem.add_constraint(s, Sense::Eq, cell.form.constant.im);
                rows.push(ConstraintId::Tie);
            }
        }
    }

    // moment constraints
    for con in &mp.constraints {
        let form = Form::from_poly(mp, &mut reps, &con.expr)?;
        let mut s = SparseSym::new();
        for &(id, c) in &form.terms {
            debug_assert!(c.im.abs() < 1e-9, "statistic with complex coefficient");
            emit_component(&mut s, id, c.re);
        }
        s.consolidate();
        problem.add_constraint(s, con.sense, con.rhs - form.constant.re);
        rows.push(con.id.clone());
    }

    // objective
    let obj_form = Form::from_poly(mp, &mut reps, &mp.objective)?;
    let mut obj = SparseSym::new();
    for &(id, c) in &obj_form.terms {
        emit_component(&mut obj, id, c.re);
    }
    obj.consolidate();
    problem.set_objective(obj);

    Ok(LoweredSdp {
        problem,
        rows,
        n_free_components: n_free,
        complex_lift: !real_mode,
    })
}

fn mp_self_adjoint(reps: &Reps, id: CompId) -> bool {
    reps.self_adjoint[id.rep]
}
