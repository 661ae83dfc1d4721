use crate::moment::{ConstraintId, LocBlock, MomentConstraint, MomentProblem};
use crate::scenario::{ConstraintMode, EntropyTarget, Scenario, StatId};
use crate::{NpaError, Result};
use ncpoly::{generate_monomials, multiply, Algebra, LetterId, NcPolynomial, RuleSet, Word};
use num_complex::Complex64;
use sdp::Sense;

/// Which monomials index the main moment matrix.
#[derive(Debug, Clone)]
pub struct MonomialSpec {
    /// level over measurement letters alone
    pub meas_level: usize,
    /// level over the auxiliary (Eve) letters alone
    pub aux_level: usize,
    /// include products (measurement word of length <= this) x (aux letter)
    pub mixed_meas_len: usize,
    /// append the ordering monomials {meas . V* V}
    pub augment_ordering: bool,
    /// extra hand-picked monomials
    pub extras: Vec<Word>,
}

impl Default for MonomialSpec {
    fn default() -> Self {
        MonomialSpec {
            meas_level: 2,
            aux_level: 1,
            mixed_meas_len: 1,
            augment_ordering: true,
            extras: Vec::new(),
        }
    }
}

impl MonomialSpec {
    pub fn describe(&self) -> String {
        format!(
            "monomials: meas_level={} aux_level={} mixed_meas_len={} augment={} extras={}",
            self.meas_level,
            self.aux_level,
            self.mixed_meas_len,
            self.augment_ordering,
            self.extras.len()
        )
    }
}

#[derive(Debug, Clone)]
pub struct EntropyOptions {
    /// impose the coisometry relations V_a V_b* = delta_ab I (k = 1 only)
    pub dilation_constraints: bool,
    /// drop the V_1 + V_1* >= 0 operator constraints
    pub drop_v1_psd: Option<bool>,
    /// eliminate the last outcome of measurement families that do not
    /// appear in the objective
    pub eliminate_nonkey_outcomes: bool,
    /// weaken the k >= 2 chain constraints to trace inequalities and impose
    /// coisometry on the last level (experimental)
    pub k2_trace_dilation: bool,
    /// treat all moments as real (certificate averaging)
    pub real_certificate: bool,
}

impl Default for EntropyOptions {
    fn default() -> Self {
        EntropyOptions {
            dilation_constraints: true,
            drop_v1_psd: None,
            eliminate_nonkey_outcomes: true,
            k2_trace_dilation: false,
            real_certificate: true,
        }
    }
}

/// Letters of one measurement family (one party input); `eliminated` marks
/// the dropped last outcome under completeness elimination.
struct Family {
    letters: Vec<Option<LetterId>>, // None = eliminated
    party: u8,
}

pub(crate) struct DeviceAlgebra {
    pub alg: Algebra,
    pub rules: RuleSet,
    /// alice[x][a], bob[y][b]; None where eliminated
    pub alice: Vec<Vec<Option<LetterId>>>,
    pub bob: Vec<Vec<Option<LetterId>>>,
    pub meas_letters: Vec<LetterId>,
}

/// Polynomial for a single projector: the letter itself, or `I - sum rest`
/// when eliminated.
fn projector_poly(fam: &[Option<LetterId>], a: usize) -> NcPolynomial {
    match fam[a] {
        Some(l) => NcPolynomial::monomial(Word::single(l), Complex64::ONE),
        None => {
            let mut p = NcPolynomial::one();
            for l in fam.iter().flatten() {
                p.add_term(Word::single(*l), -Complex64::ONE);
            }
            p
        }
    }
}

/// Declares measurement letters for both parties with projective structure,
/// cross-party commutation, and optional completeness elimination. `keep_x`
/// and `keep_y` are inputs whose families must keep every outcome letter.
fn device_algebra(
    scenario: &Scenario,
    x_inputs: &[usize],
    y_inputs: &[usize],
    keep_x: &[usize],
    keep_y: &[usize],
    eliminate: bool,
) -> Result<DeviceAlgebra> {
    let mut alg = Algebra::new();
    let mut rules = RuleSet::new();
    let mut meas_letters = Vec::new();

    let mut declare_family = |alg: &mut Algebra,
                              rules: &mut RuleSet,
                              meas: &mut Vec<LetterId>,
                              prefix: &str,
                              input: usize,
                              n_out: usize,
                              party: u8,
                              keep_all: bool|
     -> Result<Family> {
        let n_letters = if eliminate && !keep_all {
            n_out - 1
        } else {
            n_out
        };
        let mut letters: Vec<Option<LetterId>> = Vec::with_capacity(n_out);
        for a in 0..n_out {
            if a < n_letters {
                let id = alg
                    .add_letter(&format!("{prefix}{a}|{input}"), true, Some(party))
                    .map_err(NpaError::from)?;
                rules.idempotent(id);
                letters.push(Some(id));
                meas.push(id);
            } else {
                letters.push(None);
            }
        }
        for i in 0..n_letters {
            for j in (i + 1)..n_letters {
                rules.orthogonal(letters[i].unwrap(), letters[j].unwrap());
            }
        }
        // eliminated outcome rewrites to I - sum(others); as a word rule it
        // never appears (no letter), so nothing to substitute
        Ok(Family { letters, party })
    };

    let mut alice = Vec::new();
    for &x in x_inputs {
        let fam = declare_family(
            &mut alg,
            &mut rules,
            &mut meas_letters,
            "A",
            x,
            scenario.na,
            0,
            keep_x.contains(&x),
        )?;
        alice.push(fam.letters);
    }
    let mut bob = Vec::new();
    for &y in y_inputs {
        let fam = declare_family(
            &mut alg,
            &mut rules,
            &mut meas_letters,
            "B",
            y,
            scenario.nb,
            1,
            keep_y.contains(&y),
        )?;
        bob.push(fam.letters);
    }
    // cross-party commutation
    let alice_ids: Vec<LetterId> = alice.iter().flatten().flatten().copied().collect();
    let bob_ids: Vec<LetterId> = bob.iter().flatten().flatten().copied().collect();
    for &a in &alice_ids {
        for &b in &bob_ids {
            rules.commute(a, b);
        }
    }
    Ok(DeviceAlgebra {
        alg,
        rules,
        alice,
        bob,
        meas_letters,
    })
}

pub(crate) fn canon(da: &DeviceAlgebra, p: &NcPolynomial) -> Result<NcPolynomial> {
    da.rules.canonicalize_poly(&da.alg, p).map_err(NpaError::from)
}

pub(crate) fn mul(da: &DeviceAlgebra, p: &NcPolynomial, q: &NcPolynomial) -> Result<NcPolynomial> {
    multiply(&da.alg, &da.rules, p, q).map_err(NpaError::from)
}

/// Moment polynomial of `p(a,b|x,y)` in local test-input indexing.
fn joint_poly(da: &DeviceAlgebra, a: usize, b: usize, x: usize, y: usize) -> Result<NcPolynomial> {
    let pa = projector_poly(&da.alice[x], a);
    let pb = projector_poly(&da.bob[y], b);
    mul(da, &pa, &pb)
}

fn statistic_poly(da: &DeviceAlgebra, stat: &StatId, scenario: &Scenario) -> Result<NcPolynomial> {
    match stat {
        StatId::PA { a, x } => canon(da, &projector_poly(&da.alice[*x], *a)),
        StatId::PB { b, y } => canon(da, &projector_poly(&da.bob[*y], *b)),
        StatId::Joint { a, b, x, y } => joint_poly(da, *a, *b, *x, *y),
        StatId::Chsh => {
            let mut expr = NcPolynomial::zero();
            for x in 0..2 {
                for y in 0..2 {
                    for a in 0..scenario.na.min(2) {
                        for b in 0..scenario.nb.min(2) {
                            if (a ^ b) == (x & y) {
                                let p = joint_poly(da, a, b, x, y)?;
                                expr = expr.add(&p.scale(Complex64::new(0.25, 0.0)));
                            }
                        }
                    }
                }
            }
            Ok(expr)
        }
    }
}

fn statistic_value(stat: &StatId, scenario: &Scenario) -> f64 {
    match (&scenario.mode, stat) {
        (ConstraintMode::FullDistribution { statistics }, StatId::PA { a, x }) => {
            statistics.marginal_a(*a, *x)
        }
        (ConstraintMode::FullDistribution { statistics }, StatId::PB { b, y }) => {
            statistics.marginal_b(*b, *y)
        }
        (ConstraintMode::FullDistribution { statistics }, StatId::Joint { a, b, x, y }) => {
            statistics.value(*a, *b, *x, *y)
        }
        (ConstraintMode::ChshScore { omega }, StatId::Chsh) => *omega,
        _ => f64::NAN,
    }
}

/// Adds the scenario's statistical constraints.
fn add_statistics(
    da: &DeviceAlgebra,
    scenario: &Scenario,
    constraints: &mut Vec<MomentConstraint>,
) -> Result<()> {
    match &scenario.mode {
        ConstraintMode::ChshScore { .. } => {
            let id = StatId::Chsh;
            constraints.push(MomentConstraint {
                expr: statistic_poly(da, &id, scenario)?,
                sense: Sense::Ge,
                rhs: statistic_value(&id, scenario),
                id: ConstraintId::Statistic(id),
            });
        }
        ConstraintMode::FullDistribution { .. } => {
            for id in scenario.cg_stat_ids() {
                constraints.push(MomentConstraint {
                    expr: statistic_poly(da, &id, scenario)?,
                    sense: Sense::Eq,
                    rhs: statistic_value(&id, scenario),
                    id: ConstraintId::Statistic(id),
                });
            }
        }
        ConstraintMode::Custom { functionals } => {
            for (ci, f) in functionals.iter().enumerate() {
                let mut expr = NcPolynomial::zero();
                for &(a, b, x, y, w) in &f.terms {
                    expr = expr.add(&joint_poly(da, a, b, x, y)?.scale(Complex64::new(w, 0.0)));
                }
                let sense = match f.sense.as_str() {
                    "ge" => Sense::Ge,
                    "eq" => Sense::Eq,
                    other => {
                        return Err(NpaError::Build(format!(
                            "custom functional {ci}: unknown sense '{other}'"
                        )))
                    }
                };
                constraints.push(MomentConstraint {
                    expr,
                    sense,
                    rhs: f.rhs,
                    id: ConstraintId::Statistic(StatId::Joint {
                        a: ci,
                        b: usize::MAX,
                        x: usize::MAX,
                        y: usize::MAX,
                    }),
                });
            }
        }
    }
    Ok(())
}

/// Normalization row `Gamma_(I,I) = 1` and the row-identity completeness
/// relations for families that kept every outcome letter.
fn add_structural_rows(
    da: &DeviceAlgebra,
    monomials: &[Word],
    kept_x: &[usize],
    kept_y: &[usize],
    constraints: &mut Vec<MomentConstraint>,
) -> Result<()> {
    constraints.push(MomentConstraint {
        expr: NcPolynomial::one(),
        sense: Sense::Eq,
        rhs: 1.0,
        id: ConstraintId::Normalization,
    });
    let mut complete = |fam: &Vec<Option<LetterId>>| -> Result<()> {
        for w in monomials {
            let wp = NcPolynomial::monomial(w.clone(), Complex64::ONE);
            let mut expr = NcPolynomial::zero();
            for l in fam.iter().flatten() {
                let ml = NcPolynomial::monomial(Word::single(*l), Complex64::ONE);
                expr = expr.add(&mul(da, &ml, &wp)?);
            }
            expr.add_term(w.clone(), -Complex64::ONE);
            if !expr.is_zero() {
                constraints.push(MomentConstraint {
                    expr,
                    sense: Sense::Eq,
                    rhs: 0.0,
                    id: ConstraintId::Completeness,
                });
            }
        }
        Ok(())
    };
    for &x in kept_x {
        complete(&da.alice[x])?;
    }
    for &y in kept_y {
        complete(&da.bob[y])?;
    }
    Ok(())
}

/// Entropy relaxation of the iterated-mean conditional entropy: builds the
/// moment problem whose maximum upper-bounds the device-independent
/// optimization, so that `prefactor * log2(optimum)` lower-bounds the
/// entropy.
pub fn build_entropy_relaxation(
    scenario: &Scenario,
    k: u32,
    target: EntropyTarget,
    spec: &MonomialSpec,
    options: &EntropyOptions,
) -> Result<MomentProblem> {
    scenario.validate().map_err(NpaError::Build)?;
    let k = k as usize;
    let drop_v1 = options
        .drop_v1_psd
        .unwrap_or(k == 1 && options.dilation_constraints);

    // participating inputs: test inputs, plus key inputs when they matter
    let mut x_inputs: Vec<usize> = (0..scenario.nx).collect();
    let mut y_inputs: Vec<usize> = (0..scenario.ny).collect();
    if !x_inputs.contains(&scenario.x_key) {
        x_inputs.push(scenario.x_key);
    }
    if target == EntropyTarget::GlobalAb && !y_inputs.contains(&scenario.y_key) {
        y_inputs.push(scenario.y_key);
    }
    let keep_x = vec![scenario.x_key];
    let keep_y = match target {
        EntropyTarget::GlobalAb => vec![scenario.y_key],
        EntropyTarget::LocalA => vec![],
    };
    let mut da = device_algebra(
        scenario,
        &x_inputs,
        &y_inputs,
        &keep_x,
        &keep_y,
        options.eliminate_nonkey_outcomes,
    )?;

    // outcome alphabet the chain runs over
    let outcomes: Vec<(usize, Option<usize>)> = match target {
        EntropyTarget::LocalA => (0..scenario.na).map(|a| (a, None)).collect(),
        EntropyTarget::GlobalAb => (0..scenario.na)
            .flat_map(|a| (0..scenario.nb).map(move |b| (a, Some(b))))
            .collect(),
    };

    // chain letters V_{i,c}
    let mut v_letters: Vec<Vec<LetterId>> = Vec::with_capacity(k);
    for i in 0..k {
        let mut level = Vec::with_capacity(outcomes.len());
        for (ci, _) in outcomes.iter().enumerate() {
            let id = da
                .alg
                .add_letter(&format!("V{}_{ci}", i + 1), false, Some(2))
                .map_err(NpaError::from)?;
            level.push(id);
        }
        v_letters.push(level);
    }
    for &m in &da.meas_letters.clone() {
        for level in &v_letters {
            for &v in level {
                da.rules.commute(m, v);
            }
        }
    }
    if options.dilation_constraints && k == 1 {
        da.rules.coisometry_family(&v_letters[0]);
    }
    if options.k2_trace_dilation && k >= 2 {
        da.rules.coisometry_family(&v_letters[k - 1]);
    }

    // objective: sum_c <Pi_c (V_{1,c} + V_{1,c}*)/2>
    let mut objective = NcPolynomial::zero();
    let x_local = x_inputs.iter().position(|&x| x == scenario.x_key).unwrap();
    let y_local = y_inputs.iter().position(|&y| y == scenario.y_key);
    for (ci, &(a, b)) in outcomes.iter().enumerate() {
        let proj = match b {
            None => canon(&da, &projector_poly(&da.alice[x_local], a))?,
            Some(b) => {
                let pa = projector_poly(&da.alice[x_local], a);
                let pb = projector_poly(&da.bob[y_local.unwrap()], b);
                mul(&da, &pa, &pb)?
            }
        };
        let mut vsym = NcPolynomial::monomial(Word::single(v_letters[0][ci]), Complex64::ONE);
        vsym.add_term(Word::single_adj(v_letters[0][ci]), Complex64::ONE);
        let term = mul(&da, &proj, &vsym)?;
        objective = objective.add(&term.scale(Complex64::new(0.5, 0.0)));
    }

    // moment matrix monomials
    let monomials = assemble_monomials(&da, &v_letters, spec)?;

    // localizing blocks
    let mut loc_blocks = Vec::new();
    let loc_monomials = loc_monomial_set(&da, &v_letters)?;
    {
        // cap: I - sum_c V_{k,c}* V_{k,c}
        let mut q = NcPolynomial::one();
        for &v in &v_letters[k - 1] {
            let vv = Word::single_adj(v).concat(&Word::single(v));
            q.add_term(vv, -Complex64::ONE);
        }
        loc_blocks.push(LocBlock {
            label: "cap".into(),
            poly: canon(&da, &q)?,
            monomials: loc_monomials.clone(),
        });
    }
    for i in 0..k - 1 {
        for (ci, _) in outcomes.iter().enumerate() {
            if options.k2_trace_dilation {
                continue;
            }
            // V_{i+1} + V_{i+1}* - 2 V_i* V_i >= 0
            let mut q = NcPolynomial::monomial(
                Word::single(v_letters[i + 1][ci]),
                Complex64::ONE,
            );
            q.add_term(Word::single_adj(v_letters[i + 1][ci]), Complex64::ONE);
            q.add_term(
                Word::single_adj(v_letters[i][ci]).concat(&Word::single(v_letters[i][ci])),
                -2.0 * Complex64::ONE,
            );
            loc_blocks.push(LocBlock {
                label: format!("chain{}_{ci}", i + 1),
                poly: canon(&da, &q)?,
                monomials: loc_monomials.clone(),
            });
        }
    }
    if !drop_v1 {
        for (ci, _) in outcomes.iter().enumerate() {
            let mut q = NcPolynomial::monomial(Word::single(v_letters[0][ci]), Complex64::ONE);
            q.add_term(Word::single_adj(v_letters[0][ci]), Complex64::ONE);
            loc_blocks.push(LocBlock {
                label: format!("v1psd_{ci}"),
                poly: canon(&da, &q)?,
                monomials: loc_monomials.clone(),
            });
        }
    }

    let mut constraints = Vec::new();
    add_structural_rows(&da, &monomials, &[x_local], &keep_y_local(&y_inputs, &keep_y), &mut constraints)?;
    add_statistics(&da, scenario, &mut constraints)?;
    if options.k2_trace_dilation && k >= 2 {
        for i in 0..k - 1 {
            for (ci, _) in outcomes.iter().enumerate() {
                let mut expr = NcPolynomial::monomial(
                    Word::single(v_letters[i + 1][ci]),
                    Complex64::new(0.5, 0.0),
                );
                expr.add_term(
                    Word::single_adj(v_letters[i + 1][ci]),
                    Complex64::new(0.5, 0.0),
                );
                expr.add_term(
                    Word::single_adj(v_letters[i][ci]).concat(&Word::single(v_letters[i][ci])),
                    -Complex64::ONE,
                );
                constraints.push(MomentConstraint {
                    expr: canon(&da, &expr)?,
                    sense: Sense::Ge,
                    rhs: 0.0,
                    id: ConstraintId::TraceIneq(format!("chain{}_{ci}", i + 1)),
                });
            }
        }
    }

    let metadata = vec![
        format!("entropy relaxation: k={k} target={target:?}"),
        spec.describe(),
        format!(
            "options: dilation={} drop_v1_psd={drop_v1} eliminate={} k2_trace={}",
            options.dilation_constraints, options.eliminate_nonkey_outcomes, options.k2_trace_dilation
        ),
    ];
    Ok(MomentProblem {
        algebra: da.alg,
        rules: da.rules,
        monomials,
        loc_blocks,
        constraints,
        objective: canon_obj(&da, objective)?,
        real_certificate: options.real_certificate,
        metadata,
    })
}

fn canon_obj(da: &DeviceAlgebra, p: NcPolynomial) -> Result<NcPolynomial> {
    canon(da, &p)
}

fn keep_y_local(y_inputs: &[usize], keep_y: &[usize]) -> Vec<usize> {
    keep_y
        .iter()
        .filter_map(|ky| y_inputs.iter().position(|y| y == ky))
        .collect()
}

fn assemble_monomials(
    da: &DeviceAlgebra,
    v_letters: &[Vec<LetterId>],
    spec: &MonomialSpec,
) -> Result<Vec<Word>> {
    let meas = generate_monomials(&da.alg, &da.rules, &da.meas_letters, spec.meas_level, &[])
        .map_err(NpaError::from)?;
    let aux_ids: Vec<LetterId> = v_letters.iter().flatten().copied().collect();
    let aux = generate_monomials(&da.alg, &da.rules, &aux_ids, spec.aux_level, &[])
        .map_err(NpaError::from)?;

    let mut out: Vec<Word> = Vec::new();
    let mut push = |w: Word, out: &mut Vec<Word>| {
        if !out.contains(&w) {
            out.push(w);
        }
    };
    for w in &meas {
        push(w.clone(), &mut out);
    }
    for w in &aux {
        push(w.clone(), &mut out);
    }
    // mixed products meas x aux-letter
    for w in meas.iter().filter(|w| w.len() <= spec.mixed_meas_len) {
        if w.is_identity() {
            continue;
        }
        for g in aux.iter().filter(|g| g.len() == 1) {
            let prod = w.concat(g);
            let canonized = da.rules.canonicalize(&da.alg, &prod).map_err(NpaError::from)?;
            if canonized.n_terms() == 1 {
                let (m, c) = canonized.terms().next().unwrap();
                if (c - Complex64::ONE).norm() < 1e-12 {
                    push(m.clone(), &mut out);
                }
            }
        }
    }
    // ordering monomials {meas . V_{i,c}* V_{i,c}}
    if spec.augment_ordering {
        for w in meas.iter().filter(|w| w.len() <= 1) {
            for level in v_letters {
                for &v in level {
                    let vv = Word::single_adj(v).concat(&Word::single(v));
                    let prod = w.concat(&vv);
                    let canonized =
                        da.rules.canonicalize(&da.alg, &prod).map_err(NpaError::from)?;
                    if canonized.n_terms() == 1 {
                        let (m, c) = canonized.terms().next().unwrap();
                        if (c - Complex64::ONE).norm() < 1e-12 {
                            push(m.clone(), &mut out);
                        }
                    }
                }
            }
        }
    }
    for e in &spec.extras {
        push(e.clone(), &mut out);
    }
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    Ok(out)
}

fn loc_monomial_set(da: &DeviceAlgebra, v_letters: &[Vec<LetterId>]) -> Result<Vec<Word>> {
    let mut out = vec![Word::identity()];
    for &m in &da.meas_letters {
        out.push(Word::single(m));
    }
    for level in v_letters {
        for &v in level {
            out.push(Word::single(v));
            out.push(Word::single_adj(v));
        }
    }
    Ok(out)
}

/// Min-entropy relaxation: guessing-probability program with Eve POVM
/// elements `W_a >= 0`, `sum W_a <= I`, commuting with the measurements.
pub fn build_hmin_relaxation(
    scenario: &Scenario,
    target: EntropyTarget,
    level: usize,
    options: &EntropyOptions,
) -> Result<MomentProblem> {
    scenario.validate().map_err(NpaError::Build)?;
    let mut x_inputs: Vec<usize> = (0..scenario.nx).collect();
    let mut y_inputs: Vec<usize> = (0..scenario.ny).collect();
    if !x_inputs.contains(&scenario.x_key) {
        x_inputs.push(scenario.x_key);
    }
    if target == EntropyTarget::GlobalAb && !y_inputs.contains(&scenario.y_key) {
        y_inputs.push(scenario.y_key);
    }
    let keep_x = vec![scenario.x_key];
    let keep_y = match target {
        EntropyTarget::GlobalAb => vec![scenario.y_key],
        EntropyTarget::LocalA => vec![],
    };
    let mut da = device_algebra(
        scenario,
        &x_inputs,
        &y_inputs,
        &keep_x,
        &keep_y,
        options.eliminate_nonkey_outcomes,
    )?;

    let outcomes: Vec<(usize, Option<usize>)> = match target {
        EntropyTarget::LocalA => (0..scenario.na).map(|a| (a, None)).collect(),
        EntropyTarget::GlobalAb => (0..scenario.na)
            .flat_map(|a| (0..scenario.nb).map(move |b| (a, Some(b))))
            .collect(),
    };
    let mut w_letters = Vec::with_capacity(outcomes.len());
    for (ci, _) in outcomes.iter().enumerate() {
        let id = da
            .alg
            .add_letter(&format!("W_{ci}"), true, Some(2))
            .map_err(NpaError::from)?;
        w_letters.push(id);
    }
    for &m in &da.meas_letters.clone() {
        for &w in &w_letters {
            da.rules.commute(m, w);
        }
    }

    let x_local = x_inputs.iter().position(|&x| x == scenario.x_key).unwrap();
    let y_local = y_inputs.iter().position(|&y| y == scenario.y_key);
    let mut objective = NcPolynomial::zero();
    for (ci, &(a, b)) in outcomes.iter().enumerate() {
        let proj = match b {
            None => canon(&da, &projector_poly(&da.alice[x_local], a))?,
            Some(b) => {
                let pa = projector_poly(&da.alice[x_local], a);
                let pb = projector_poly(&da.bob[y_local.unwrap()], b);
                mul(&da, &pa, &pb)?
            }
        };
        let wm = NcPolynomial::monomial(Word::single(w_letters[ci]), Complex64::ONE);
        objective = objective.add(&mul(&da, &proj, &wm)?);
    }

    let spec = MonomialSpec {
        meas_level: level,
        aux_level: 1,
        mixed_meas_len: 1,
        augment_ordering: false,
        extras: Vec::new(),
    };
    let v_like = vec![w_letters.clone()];
    let monomials = assemble_monomials(&da, &v_like, &spec)?;

    let loc_monomials = loc_monomial_set(&da, &v_like)?;
    let mut loc_blocks = Vec::new();
    {
        let mut q = NcPolynomial::one();
        for &w in &w_letters {
            q.add_term(Word::single(w), -Complex64::ONE);
        }
        loc_blocks.push(LocBlock {
            label: "cap".into(),
            poly: canon(&da, &q)?,
            monomials: loc_monomials.clone(),
        });
    }
    for (ci, &w) in w_letters.iter().enumerate() {
        loc_blocks.push(LocBlock {
            label: format!("wpsd_{ci}"),
            poly: NcPolynomial::monomial(Word::single(w), Complex64::ONE),
            monomials: loc_monomials.clone(),
        });
    }

    let mut constraints = Vec::new();
    add_structural_rows(
        &da,
        &monomials,
        &[x_local],
        &keep_y_local(&y_inputs, &keep_y),
        &mut constraints,
    )?;
    add_statistics(&da, scenario, &mut constraints)?;

    let metadata = vec![
        format!("hmin relaxation: target={target:?} level={level}"),
        spec.describe(),
    ];
    Ok(MomentProblem {
        algebra: da.alg,
        rules: da.rules,
        monomials,
        loc_blocks,
        constraints,
        objective: canon_obj(&da, objective)?,
        real_certificate: options.real_certificate,
        metadata,
    })
}

/// Moment problem that just maximizes the CHSH winning probability at
/// level 1 plus the cross products (the classic tight relaxation).
pub fn build_chsh_max(scenario: &Scenario, options: &EntropyOptions) -> Result<MomentProblem> {
    let da = device_algebra(
        scenario,
        &(0..scenario.nx).collect::<Vec<_>>(),
        &(0..scenario.ny).collect::<Vec<_>>(),
        &[],
        &[],
        options.eliminate_nonkey_outcomes,
    )?;
    let objective = statistic_poly(&da, &StatId::Chsh, scenario)?;
    // level 1 + AB: singles plus cross-party pairs
    let mut monomials = generate_monomials(&da.alg, &da.rules, &da.meas_letters, 1, &[])
        .map_err(NpaError::from)?;
    let alice_ids: Vec<LetterId> = da.alice.iter().flatten().flatten().copied().collect();
    let bob_ids: Vec<LetterId> = da.bob.iter().flatten().flatten().copied().collect();
    for &a in &alice_ids {
        for &b in &bob_ids {
            let w = Word::single(a).concat(&Word::single(b));
            if !monomials.contains(&w) {
                monomials.push(w);
            }
        }
    }
    let mut constraints = vec![MomentConstraint {
        expr: NcPolynomial::one(),
        sense: Sense::Eq,
        rhs: 1.0,
        id: ConstraintId::Normalization,
    }];
    // no statistical constraints: the objective itself is the functional
    let _ = &mut constraints;
    Ok(MomentProblem {
        algebra: da.alg,
        rules: da.rules,
        monomials,
        loc_blocks: Vec::new(),
        constraints,
        objective: canon(&da, &objective)?,
        real_certificate: options.real_certificate,
        metadata: vec!["chsh maximization at level 1+AB".into()],
    })
}

/// Ordering augmentation: adds to `higher` every monomial `X . V_{i,c}* V_{i,c}`
/// mirroring a monomial `X . (eve op c)` of `lower`, and measurement
/// monomials to every localizing set. Returns the words actually added to
/// the moment index (empty when already augmented).
pub fn augment_for_ordering(lower: &MomentProblem, higher: &mut MomentProblem) -> Vec<Word> {
    // eve letters of both problems, identified by outcome index order
    let eve_of = |mp: &MomentProblem| -> Vec<Vec<LetterId>> {
        let mut by_prefix: std::collections::BTreeMap<String, Vec<(usize, LetterId)>> =
            Default::default();
        for id in 0..mp.algebra.n_letters() {
            let lid = LetterId(id as u32);
            let info = mp.algebra.info(lid);
            if info.party == Some(2) {
                // names are V{level}_{c} or W_{c}
                let (prefix, c) = match info.name.rsplit_once('_') {
                    Some((p, c)) => (p.to_string(), c.parse::<usize>().unwrap_or(0)),
                    None => (info.name.clone(), 0),
                };
                by_prefix.entry(prefix).or_default().push((c, lid));
            }
        }
        by_prefix
            .into_values()
            .map(|mut v| {
                v.sort();
                v.into_iter().map(|(_, l)| l).collect()
            })
            .collect()
    };
    let lower_eve: Vec<LetterId> = eve_of(lower).into_iter().flatten().collect();
    let higher_eve = eve_of(higher);

    // measurement words X with X . (eve letter) in the lower index
    let mut xs: Vec<Word> = Vec::new();
    for w in &lower.monomials {
        let fs = w.factors();
        if fs.is_empty() {
            continue;
        }
        let last = fs[fs.len() - 1];
        if lower_eve.contains(&last.letter) {
            let prefix = Word::from_factors(fs[..fs.len() - 1].to_vec());
            let pure_meas = prefix
                .factors()
                .iter()
                .all(|f| lower.algebra.info(f.letter).party != Some(2));
            if pure_meas && !xs.contains(&prefix) {
                xs.push(prefix);
            }
        }
    }

    let mut added = Vec::new();
    for x in &xs {
        // map the measurement word across algebras by letter name
        let mapped: Option<Vec<LetterId>> = x
            .factors()
            .iter()
            .map(|f| higher.algebra.lookup(&lower.algebra.info(f.letter).name))
            .collect();
        let Some(mapped) = mapped else { continue };
        for level in &higher_eve {
            for &v in level {
                let mut factors: Vec<ncpoly::Factor> = mapped
                    .iter()
                    .map(|&l| ncpoly::Factor {
                        letter: l,
                        adjoint: false,
                    })
                    .collect();
                factors.push(ncpoly::Factor {
                    letter: v,
                    adjoint: true,
                });
                factors.push(ncpoly::Factor {
                    letter: v,
                    adjoint: false,
                });
                let w = Word::from_factors(factors);
                let canonized = match higher.rules.canonicalize(&higher.algebra, &w) {
                    Ok(c) => c,
                    Err(_) => continue,
                };
                if canonized.n_terms() != 1 {
                    continue;
                }
                let (m, c) = canonized.terms().next().unwrap();
                if (c - Complex64::ONE).norm() > 1e-12 {
                    continue;
                }
                if !higher.monomials.contains(m) {
                    higher.monomials.push(m.clone());
                    added.push(m.clone());
                }
            }
        }
    }
    // make sure measurement singles index every localizing block
    let meas_singles: Vec<Word> = (0..higher.algebra.n_letters())
        .map(|i| LetterId(i as u32))
        .filter(|&l| higher.algebra.info(l).party != Some(2))
        .map(Word::single)
        .collect();
    for lb in &mut higher.loc_blocks {
        for m in &meas_singles {
            if !lb.monomials.contains(m) {
                lb.monomials.push(m.clone());
            }
        }
    }
    higher.monomials.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    added
}
