use ncpoly::{generate_monomials, multiply, Algebra, NcPolynomial, RuleSet, Word};
use num_complex::Complex64;
use proptest::prelude::*;

fn one() -> Complex64 {
    Complex64::ONE
}

/// CHSH-style setup: two projective letters per party input, one Eve
/// operator pair.
fn chsh_algebra() -> (Algebra, RuleSet, Vec<ncpoly::LetterId>) {
    let mut alg = Algebra::new();
    let mut ids = Vec::new();
    for x in 0..2 {
        for a in 0..2 {
            ids.push(alg.add_letter(&format!("M{a}|{x}"), true, Some(0)).unwrap());
        }
    }
    for y in 0..2 {
        for b in 0..2 {
            ids.push(alg.add_letter(&format!("N{b}|{y}"), true, Some(1)).unwrap());
        }
    }
    let v0 = alg.add_letter("V0", false, Some(2)).unwrap();
    let v1 = alg.add_letter("V1", false, Some(2)).unwrap();
    ids.push(v0);
    ids.push(v1);

    let mut rules = RuleSet::new();
    for x in 0..2usize {
        let m0 = ids[2 * x];
        let m1 = ids[2 * x + 1];
        rules.idempotent(m0);
        rules.idempotent(m1);
        rules.orthogonal(m0, m1);
    }
    for y in 0..2usize {
        let n0 = ids[4 + 2 * y];
        let n1 = ids[4 + 2 * y + 1];
        rules.idempotent(n0);
        rules.idempotent(n1);
        rules.orthogonal(n0, n1);
    }
    // cross-party commutation and measurement-vs-eve commutation
    for i in 0..4 {
        for j in 4..8 {
            rules.commute(ids[i], ids[j]);
        }
        rules.commute(ids[i], v0);
        rules.commute(ids[i], v1);
    }
    for j in 4..8 {
        rules.commute(ids[j], v0);
        rules.commute(ids[j], v1);
    }
    (alg, rules, ids)
}

#[test]
fn projector_rules() {
    let (alg, rules, ids) = chsh_algebra();
    let m = ids[0];
    // M.M -> M
    let w = Word::single(m).concat(&Word::single(m));
    let canon = rules.canonicalize(&alg, &w).unwrap();
    assert_eq!(canon, NcPolynomial::monomial(Word::single(m), one()));
    // orthogonal outcomes annihilate
    let w = Word::single(ids[0]).concat(&Word::single(ids[1]));
    assert!(rules.canonicalize(&alg, &w).unwrap().is_zero());
}

#[test]
fn party_ordering_swaps() {
    let (alg, rules, ids) = chsh_algebra();
    let (m, n) = (ids[0], ids[4]);
    // N.M -> M.N
    let w = Word::single(n).concat(&Word::single(m));
    let canon = rules.canonicalize(&alg, &w).unwrap();
    let want = Word::single(m).concat(&Word::single(n));
    assert_eq!(canon, NcPolynomial::monomial(want, one()));
    // V.M -> M.V
    let v = ids[8];
    let w = Word::single(v).concat(&Word::single(m));
    let canon = rules.canonicalize(&alg, &w).unwrap();
    let want = Word::single(m).concat(&Word::single(v));
    assert_eq!(canon, NcPolynomial::monomial(want, one()));
}

#[test]
fn coisometry_is_one_sided() {
    let (alg, mut rules, ids) = chsh_algebra();
    let (v0, v1) = (ids[8], ids[9]);
    rules.coisometry_family(&[v0, v1]);
    // V0 V1* -> 0, V0 V0* -> I
    let w = Word::single(v0).concat(&Word::single_adj(v1));
    assert!(rules.canonicalize(&alg, &w).unwrap().is_zero());
    let w = Word::single(v0).concat(&Word::single_adj(v0));
    assert_eq!(
        rules.canonicalize(&alg, &w).unwrap(),
        NcPolynomial::one()
    );
    // V0* V0 is untouched (rule never expands)
    let w = Word::single_adj(v0).concat(&Word::single(v0));
    let canon = rules.canonicalize(&alg, &w).unwrap();
    assert_eq!(canon, NcPolynomial::monomial(w, one()));
}

#[test]
fn completeness_substitution_expands() {
    let (alg, mut rules, ids) = chsh_algebra();
    // eliminate M1|0 = I - M0|0
    let mut val = NcPolynomial::one();
    val.add_term(Word::single(ids[0]), -one());
    rules.substitute(Word::single(ids[1]), val);
    let w = Word::single(ids[1]).concat(&Word::single(ids[4]));
    let canon = rules.canonicalize(&alg, &w).unwrap();
    // = N0|0 - M0|0 N0|0
    assert_eq!(canon.n_terms(), 2);
    let n = Word::single(ids[4]);
    let mn = Word::single(ids[0]).concat(&Word::single(ids[4]));
    let mut want = NcPolynomial::monomial(n, one());
    want.add_term(mn, -one());
    assert!(canon.approx_eq(&want, 1e-12));
}

#[test]
fn monomial_counts() {
    // 4 Hermitian letters, level 1, no rules: {I, X1..X4}
    let mut alg = Algebra::new();
    let ids: Vec<_> = (0..4)
        .map(|i| alg.add_letter(&format!("X{i}"), true, None).unwrap())
        .collect();
    let rules = RuleSet::new();
    let m1 = generate_monomials(&alg, &rules, &ids, 1, &[]).unwrap();
    assert_eq!(m1.len(), 5);
    assert!(m1[0].is_identity());
    let m0 = generate_monomials(&alg, &rules, &ids, 0, &[]).unwrap();
    assert_eq!(m0.len(), 1);
    // free level-2 count: 1 + n + n^2
    let m2 = generate_monomials(&alg, &rules, &ids, 2, &[]).unwrap();
    assert_eq!(m2.len(), 1 + 4 + 16);
}

#[test]
fn chsh_level2_count_matches_brute_force() {
    let (alg, rules, ids) = chsh_algebra();
    let meas: Vec<_> = ids[..8].to_vec();
    let got = generate_monomials(&alg, &rules, &meas, 2, &[]).unwrap();

    // brute force: enumerate all raw words of length <= 2 and canonicalize
    let mut set = std::collections::BTreeSet::new();
    set.insert(Word::identity());
    for &a in &meas {
        let c = rules.canonicalize(&alg, &Word::single(a)).unwrap();
        if c.n_terms() == 1 {
            set.insert(c.terms().next().unwrap().0.clone());
        }
        for &b in &meas {
            let w = Word::single(a).concat(&Word::single(b));
            let c = rules.canonicalize(&alg, &w).unwrap();
            if c.n_terms() == 1 {
                set.insert(c.terms().next().unwrap().0.clone());
            }
        }
    }
    assert_eq!(got.len(), set.len());
    // expected: I + 8 singles + (within-party cross-input 2*2*2*2=8 per party) + 16 cross
    assert_eq!(got.len(), 1 + 8 + 8 + 8 + 16);
}

#[test]
fn product_adjoint_antihomomorphism() {
    let (alg, rules, ids) = chsh_algebra();
    let p = NcPolynomial::monomial(
        Word::single(ids[0]).concat(&Word::single(ids[8])),
        Complex64::new(0.5, 0.25),
    );
    let q = NcPolynomial::monomial(
        Word::single_adj(ids[9]).concat(&Word::single(ids[4])),
        Complex64::new(-1.0, 2.0),
    );
    let pq = multiply(&alg, &rules, &p, &q).unwrap();
    let lhs = pq.adjoint(&alg, &rules).unwrap();
    let rhs = multiply(
        &alg,
        &rules,
        &q.adjoint(&alg, &rules).unwrap(),
        &p.adjoint(&alg, &rules).unwrap(),
    )
    .unwrap();
    assert!(lhs.approx_eq(&rhs, 1e-12), "(pq)* != q* p*");

    // (p+q)* = p* + q*
    let sum_adj = p.add(&q).adjoint(&alg, &rules).unwrap();
    let adj_sum = p
        .adjoint(&alg, &rules)
        .unwrap()
        .add(&q.adjoint(&alg, &rules).unwrap());
    assert!(sum_adj.approx_eq(&adj_sum, 1e-12));

    // multiply by I is the identity
    let pi = multiply(&alg, &rules, &p, &NcPolynomial::one()).unwrap();
    assert!(pi.approx_eq(&p, 1e-15));
}

#[test]
fn hermitian_class_preserved_by_rewriting() {
    let (alg, rules, ids) = chsh_algebra();
    // N.M + M.N is Hermitian; canonicalization keeps it so
    let nm = Word::single(ids[4]).concat(&Word::single(ids[0]));
    let mn = Word::single(ids[0]).concat(&Word::single(ids[4]));
    let mut p = NcPolynomial::monomial(nm, one());
    p.add_term(mn, one());
    let canon = rules.canonicalize_poly(&alg, &p).unwrap();
    assert!(canon.is_hermitian(&alg, &rules).unwrap());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn canonicalization_is_idempotent(seed in 0u64..10_000) {
        let (alg, rules, ids) = chsh_algebra();
        // pseudo-random word from the seed
        let mut s = seed;
        let mut factors = Vec::new();
        for _ in 0..(1 + seed % 5) {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let pick = (s >> 33) as usize % 12;
            let adj = pick >= 10 && (s & 1) == 1;
            let letter = ids[pick.min(9)];
            factors.push(if adj {
                Word::single_adj(letter)
            } else if pick >= 8 && (s & 2) == 2 && !alg.is_hermitian(letter) {
                Word::single_adj(letter)
            } else {
                Word::single(letter)
            });
        }
        let mut w = Word::identity();
        for f in &factors {
            w = w.concat(f);
        }
        let once = rules.canonicalize(&alg, &w).unwrap();
        let twice = rules.canonicalize_poly(&alg, &once).unwrap();
        prop_assert!(once.approx_eq(&twice, 1e-12));
    }
}
