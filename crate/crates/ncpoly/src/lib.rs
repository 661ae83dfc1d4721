//! Words and polynomials over noncommuting operator letters, with
//! canonicalization under a terminating rewrite system.
//!
//! Letters model measurement projectors and auxiliary operators; rules cover
//! idempotency, same-measurement orthogonality, cross-party commutation,
//! one-sided coisometry relations `V_a V_b* -> delta_ab I`, and
//! monomial-to-polynomial substitutions (used for completeness
//! eliminations). The rewrite order is: substitutions, then length-reducing
//! pair rules, then commutation swaps toward the party-sorted order, which
//! strictly decreases (eliminable occurrences, length, lexicographic rank)
//! and therefore terminates.

use num_complex::Complex64;
use std::collections::{BTreeMap, BTreeSet};

#[derive(Debug, thiserror::Error)]
pub enum NcError {
    #[error("letter '{0}' already declared")]
    DuplicateLetter(String),
    #[error("rewrite budget exceeded while canonicalizing '{0}' (possible rule cycle)")]
    RuleBudget(String),
    #[error("unknown letter id")]
    UnknownLetter,
}

pub type Result<T> = std::result::Result<T, NcError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LetterId(pub u32);

#[derive(Debug, Clone)]
pub struct LetterInfo {
    pub name: String,
    pub hermitian: bool,
    pub party: Option<u8>,
}

/// The declared alphabet. Letter ids are dense indices in declaration
/// order; canonical commutation order is (party, id).
#[derive(Debug, Clone, Default)]
pub struct Algebra {
    letters: Vec<LetterInfo>,
    by_name: BTreeMap<String, LetterId>,
}

impl Algebra {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_letter(&mut self, name: &str, hermitian: bool, party: Option<u8>) -> Result<LetterId> {
        if self.by_name.contains_key(name) {
            return Err(NcError::DuplicateLetter(name.to_string()));
        }
        let id = LetterId(self.letters.len() as u32);
        self.letters.push(LetterInfo {
            name: name.to_string(),
            hermitian,
            party,
        });
        self.by_name.insert(name.to_string(), id);
        Ok(id)
    }

    pub fn info(&self, id: LetterId) -> &LetterInfo {
        &self.letters[id.0 as usize]
    }

    pub fn is_hermitian(&self, id: LetterId) -> bool {
        self.letters[id.0 as usize].hermitian
    }

    pub fn n_letters(&self) -> usize {
        self.letters.len()
    }

    pub fn lookup(&self, name: &str) -> Option<LetterId> {
        self.by_name.get(name).copied()
    }

    fn sort_key(&self, f: &Factor) -> (u8, u32, bool) {
        let info = &self.letters[f.letter.0 as usize];
        (info.party.unwrap_or(u8::MAX), f.letter.0, f.adjoint)
    }

    pub fn display_word(&self, w: &Word) -> String {
        if w.is_identity() {
            return "I".to_string();
        }
        w.factors
            .iter()
            .map(|f| {
                let n = &self.letters[f.letter.0 as usize].name;
                if f.adjoint {
                    format!("{n}*")
                } else {
                    n.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(".")
    }
}

/// One factor of a word. For Hermitian letters the adjoint flag is always
/// stored as `false`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Factor {
    pub letter: LetterId,
    pub adjoint: bool,
}

/// A product of factors; the empty product is the identity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Word {
    factors: Vec<Factor>,
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn single(letter: LetterId) -> Self {
        Word {
            factors: vec![Factor {
                letter,
                adjoint: false,
            }],
        }
    }

    pub fn single_adj(letter: LetterId) -> Self {
        Word {
            factors: vec![Factor {
                letter,
                adjoint: true,
            }],
        }
    }

    pub fn from_factors(factors: Vec<Factor>) -> Self {
        Word { factors }
    }

    pub fn factors(&self) -> &[Factor] {
        &self.factors
    }

    pub fn len(&self) -> usize {
        self.factors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut f = self.factors.clone();
        f.extend_from_slice(&other.factors);
        Word { factors: f }
    }

    /// Reverses the factors and flips adjoint flags (normalized for
    /// Hermitian letters).
    pub fn adjoint(&self, alg: &Algebra) -> Word {
        let factors = self
            .factors
            .iter()
            .rev()
            .map(|f| Factor {
                letter: f.letter,
                adjoint: if alg.is_hermitian(f.letter) {
                    false
                } else {
                    !f.adjoint
                },
            })
            .collect();
        Word { factors }
    }
}

/// Complex-linear combination of canonical words.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct NcPolynomial {
    terms: BTreeMap<Word, Complex64>,
}

impl NcPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(w: Word, c: Complex64) -> Self {
        let mut p = Self::default();
        p.add_term(w, c);
        p
    }

    pub fn one() -> Self {
        Self::monomial(Word::identity(), Complex64::ONE)
    }

    pub fn add_term(&mut self, w: Word, c: Complex64) {
        if c == Complex64::ZERO {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(w) {
            Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.norm_sqr() < 1e-28 {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
            Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &Complex64)> {
        self.terms.iter()
    }

    pub fn n_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = Self::default();
        for (w, v) in &self.terms {
            out.add_term(w.clone(), *v * c);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (w, v) in &other.terms {
            out.add_term(w.clone(), *v);
        }
        out
    }

    /// Term-wise adjoint with conjugated coefficients (canonical output).
    pub fn adjoint(&self, alg: &Algebra, rules: &RuleSet) -> Result<Self> {
        let mut out = Self::default();
        for (w, c) in &self.terms {
            let wa = w.adjoint(alg);
            let canon = rules.canonicalize(alg, &wa)?;
            for (w2, c2) in canon.terms() {
                out.add_term(w2.clone(), c2 * c.conj());
            }
        }
        Ok(out)
    }

    /// Whether the polynomial equals its adjoint.
    pub fn is_hermitian(&self, alg: &Algebra, rules: &RuleSet) -> Result<bool> {
        let adj = self.adjoint(alg, rules)?;
        Ok(self.approx_eq(&adj, 1e-12))
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        let mut keys: BTreeSet<&Word> = self.terms.keys().collect();
        keys.extend(other.terms.keys());
        keys.into_iter().all(|k| {
            let a = self.terms.get(k).copied().unwrap_or(Complex64::ZERO);
            let b = other.terms.get(k).copied().unwrap_or(Complex64::ZERO);
            (a - b).norm() <= tol
        })
    }
}

/// Multiplies two canonical polynomials, canonicalizing the products.
pub fn multiply(
    alg: &Algebra,
    rules: &RuleSet,
    p: &NcPolynomial,
    q: &NcPolynomial,
) -> Result<NcPolynomial> {
    let mut out = NcPolynomial::default();
    for (wp, cp) in p.terms() {
        for (wq, cq) in q.terms() {
            let prod = wp.concat(wq);
            let canon = rules.canonicalize(alg, &prod)?;
            for (w, c) in canon.terms() {
                out.add_term(w.clone(), c * cp * cq);
            }
        }
    }
    Ok(out)
}

/// The rewrite system.
#[derive(Debug, Clone, Default)]
pub struct RuleSet {
    idempotent: BTreeSet<LetterId>,
    /// ordered pairs that annihilate: a then b gives 0
    orthogonal: BTreeSet<(LetterId, LetterId)>,
    /// unordered commuting pairs (stored both ways)
    commute: BTreeSet<(LetterId, LetterId)>,
    /// coisometry families: within a family, `a b* -> delta_ab I`
    coisometry: Vec<BTreeSet<LetterId>>,
    /// monomial -> polynomial substitutions, keyed by the (short) monomial
    substitutions: BTreeMap<Word, NcPolynomial>,
    budget: usize,
}

impl RuleSet {
    pub fn new() -> Self {
        RuleSet {
            budget: 10_000,
            ..Default::default()
        }
    }

    pub fn idempotent(&mut self, l: LetterId) {
        self.idempotent.insert(l);
    }

    /// `a b -> 0` and `b a -> 0` (distinct outcomes of one measurement).
    pub fn orthogonal(&mut self, a: LetterId, b: LetterId) {
        self.orthogonal.insert((a, b));
        self.orthogonal.insert((b, a));
    }

    pub fn commute(&mut self, a: LetterId, b: LetterId) {
        self.commute.insert((a, b));
        self.commute.insert((b, a));
    }

    pub fn coisometry_family(&mut self, members: &[LetterId]) {
        self.coisometry.push(members.iter().copied().collect());
    }

    /// Registers `word -> polynomial` (completeness eliminations and other
    /// custom identities). The key must be a nonempty word.
    pub fn substitute(&mut self, key: Word, value: NcPolynomial) {
        self.substitutions.insert(key, value);
    }

    fn commutes(&self, a: LetterId, b: LetterId) -> bool {
        self.commute.contains(&(a, b))
    }

    /// Applies one rewrite step at the leftmost applicable position.
    /// Returns the replacement polynomial for the whole word, or None if the
    /// word is canonical.
    fn step(&self, alg: &Algebra, w: &Word) -> Option<NcPolynomial> {
        let fs = w.factors();
        // substitutions at any position, deterministic key order
        if !self.substitutions.is_empty() {
            for i in 0..fs.len() {
                for (key, val) in self.substitutions.iter() {
                    let kl = key.len();
                    if kl == 0 || i + kl > fs.len() {
                        continue;
                    }
                    if &fs[i..i + kl] == key.factors() {
                        let prefix = Word::from_factors(fs[..i].to_vec());
                        let suffix = Word::from_factors(fs[i + kl..].to_vec());
                        let mut out = NcPolynomial::default();
                        for (m, c) in val.terms() {
                            out.add_term(prefix.concat(m).concat(&suffix), *c);
                        }
                        return Some(out);
                    }
                }
            }
        }
        for i in 0..fs.len().saturating_sub(1) {
            let (f, g) = (fs[i], fs[i + 1]);
            let plain = |x: Factor| !x.adjoint;
            // orthogonality: both plain projector letters
            if plain(f) && plain(g) && self.orthogonal.contains(&(f.letter, g.letter)) {
                return Some(NcPolynomial::zero());
            }
            // idempotency
            if f == g && plain(f) && self.idempotent.contains(&f.letter) {
                let mut v = fs.to_vec();
                v.remove(i + 1);
                return Some(NcPolynomial::monomial(
                    Word::from_factors(v),
                    Complex64::ONE,
                ));
            }
            // coisometry: a b* within one family
            if !f.adjoint && g.adjoint {
                for fam in &self.coisometry {
                    if fam.contains(&f.letter) && fam.contains(&g.letter) {
                        if f.letter == g.letter {
                            let mut v = fs.to_vec();
                            v.drain(i..=i + 1);
                            return Some(NcPolynomial::monomial(
                                Word::from_factors(v),
                                Complex64::ONE,
                            ));
                        }
                        return Some(NcPolynomial::zero());
                    }
                }
            }
            // commutation toward the (party, id, adjoint) order
            if f.letter != g.letter
                && self.commutes(f.letter, g.letter)
                && alg.sort_key(&g) < alg.sort_key(&f)
            {
                let mut v = fs.to_vec();
                v.swap(i, i + 1);
                return Some(NcPolynomial::monomial(
                    Word::from_factors(v),
                    Complex64::ONE,
                ));
            }
        }
        None
    }

    /// Rewrites to the canonical normal form, distributing over polynomial
    /// substitutions. Errors if the step budget is exhausted.
    pub fn canonicalize(&self, alg: &Algebra, w: &Word) -> Result<NcPolynomial> {
        let mut done = NcPolynomial::default();
        let mut work: Vec<(Word, Complex64)> = vec![(w.clone(), Complex64::ONE)];
        let mut steps = 0usize;
        while let Some((cur, coef)) = work.pop() {
            match self.step(alg, &cur) {
                None => done.add_term(cur, coef),
                Some(repl) => {
                    steps += 1;
                    if steps > self.budget {
                        return Err(NcError::RuleBudget(alg.display_word(w)));
                    }
                    for (m, c) in repl.terms() {
                        work.push((m.clone(), coef * c));
                    }
                }
            }
        }
        Ok(done)
    }

    /// Canonicalizes every term of a polynomial.
    pub fn canonicalize_poly(&self, alg: &Algebra, p: &NcPolynomial) -> Result<NcPolynomial> {
        let mut out = NcPolynomial::default();
        for (w, c) in p.terms() {
            let canon = self.canonicalize(alg, w)?;
            for (m, cm) in canon.terms() {
                out.add_term(m.clone(), cm * c);
            }
        }
        Ok(out)
    }
}

/// All canonical monomials of length at most `level` over the given
/// generators (adjoints included for non-Hermitian letters), deduplicated,
/// identity first, in a stable deterministic order; `extras` are appended
/// after deduplication.
pub fn generate_monomials(
    alg: &Algebra,
    rules: &RuleSet,
    letters: &[LetterId],
    level: usize,
    extras: &[Word],
) -> Result<Vec<Word>> {
    let mut gens: Vec<Factor> = Vec::new();
    for &l in letters {
        gens.push(Factor {
            letter: l,
            adjoint: false,
        });
        if !alg.is_hermitian(l) {
            gens.push(Factor {
                letter: l,
                adjoint: true,
            });
        }
    }
    let mut seen: BTreeSet<Word> = BTreeSet::new();
    seen.insert(Word::identity());
    let mut frontier: Vec<Word> = vec![Word::identity()];
    for _ in 0..level {
        let mut next = Vec::new();
        for w in &frontier {
            for g in &gens {
                let cand = w.concat(&Word::from_factors(vec![*g]));
                let canon = rules.canonicalize(alg, &cand)?;
                if canon.n_terms() != 1 {
                    continue;
                }
                let (m, c) = canon.terms().next().unwrap();
                if (c - Complex64::ONE).norm() > 1e-12 {
                    continue;
                }
                if m.len() <= level && seen.insert(m.clone()) {
                    next.push(m.clone());
                }
            }
        }
        frontier = next;
        if frontier.is_empty() {
            break;
        }
    }
    let mut out: Vec<Word> = seen.into_iter().collect();
    out.sort_by(|a, b| (a.len(), a).cmp(&(b.len(), b)));
    for e in extras {
        let canon = rules.canonicalize(alg, e)?;
        if canon.n_terms() != 1 {
            continue;
        }
        let (m, c) = canon.terms().next().unwrap();
        if (c - Complex64::ONE).norm() > 1e-12 {
            continue;
        }
        if !out.contains(m) {
            out.push(m.clone());
        }
    }
    Ok(out)
}
