use linop::rng::{random_density, random_psd, seeded};
use linop::{
    classical_renyi, dag, geometric_mean, identity, iterated_geometric_mean, kron, partial_trace,
    purify, schur_psd_check, schur_psd_check_detailed, trace, zeros, CMat, DensityState,
    ProbabilityVector,
};
use ndarray::array;
use num_complex::Complex64;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn diag(vals: &[f64]) -> CMat {
    let mut m = zeros(vals.len());
    for (i, &v) in vals.iter().enumerate() {
        m[[i, i]] = c(v);
    }
    m
}

fn assert_close(a: &CMat, b: &CMat, tol: f64) {
    assert_eq!(a.dim(), b.dim());
    let d = linop::frob_norm(&(a - b));
    assert!(d <= tol, "matrices differ by {d:.3e} > {tol:.3e}");
}

#[test]
fn geometric_mean_identity_cases() {
    let i2 = identity(2);
    assert_close(&geometric_mean(&i2, &i2).unwrap(), &i2, 1e-12);

    let four = i2.mapv(|z| z * c(4.0));
    let two = i2.mapv(|z| z * c(2.0));
    assert_close(&geometric_mean(&four, &i2).unwrap(), &two, 1e-10);

    // commuting closed form sqrt(ab)
    let a = diag(&[1.0, 4.0]);
    let b = diag(&[9.0, 1.0]);
    assert_close(&geometric_mean(&a, &b).unwrap(), &diag(&[3.0, 2.0]), 1e-10);
}

#[test]
fn geometric_mean_symmetry_and_monotone() {
    let mut rng = seeded(7);
    for _ in 0..10 {
        let a = random_psd(&mut rng, 3);
        let b = random_psd(&mut rng, 3);
        let ab = geometric_mean(&a, &b).unwrap();
        let ba = geometric_mean(&b, &a).unwrap();
        assert_close(&ab, &ba, 1e-8);

        // monotone: C <= D => A#C <= A#D
        let extra = random_psd(&mut rng, 3);
        let d = &b + &extra;
        let ad = geometric_mean(&a, &d).unwrap();
        let gap = linop::min_eigval(&(&ad - &ab)).unwrap();
        assert!(gap >= -1e-8, "monotonicity violated by {gap:.3e}");
    }
}

#[test]
fn geometric_mean_singular_inputs() {
    // commuting singular: diag(1,0) # diag(1,1) = diag(1,0)
    let a = diag(&[1.0, 0.0]);
    let b = diag(&[1.0, 1.0]);
    let g = geometric_mean(&a, &b).unwrap();
    assert_close(&g, &diag(&[1.0, 0.0]), 1e-6);
}

#[test]
fn iterated_geometric_mean_cases() {
    let i2 = identity(2);
    assert_close(
        &iterated_geometric_mean(&[i2.clone()], &i2).unwrap(),
        &i2,
        1e-12,
    );

    // [4I, I], I -> 4I # (I # I) = 4I # I = 2I
    let four = i2.mapv(|z| z * c(4.0));
    let got = iterated_geometric_mean(&[four, i2.clone()], &i2).unwrap();
    assert_close(&got, &i2.mapv(|z| z * c(2.0)), 1e-10);

    // commuting diagonals: entrywise a1^(1/2) a2^(1/4) sigma^(1/4)
    let a1 = diag(&[2.0, 3.0]);
    let a2 = diag(&[5.0, 0.5]);
    let sg = diag(&[0.25, 4.0]);
    let got = iterated_geometric_mean(&[a1.clone(), a2.clone()], &sg).unwrap();
    let mut want = zeros(2);
    for i in 0..2 {
        want[[i, i]] = c(a1[[i, i]].re.powf(0.5) * a2[[i, i]].re.powf(0.25) * sg[[i, i]].re.powf(0.25));
    }
    assert_close(&got, &want, 1e-9);
}

#[test]
fn schur_check_examples() {
    let i2 = identity(2);
    assert!(schur_psd_check(&i2, &i2, &i2).unwrap());

    let two = i2.mapv(|z| z * c(2.0));
    assert!(!schur_psd_check(&i2, &two, &i2).unwrap());

    // support condition failure
    let a = diag(&[1.0, 0.0]);
    let b = diag(&[0.0, 1.0]);
    assert!(!schur_psd_check(&a, &b, &i2).unwrap());
}

#[test]
fn schur_routes_agree_on_random_instances() {
    let mut rng = seeded(11);
    for t in 0..20 {
        let a = random_psd(&mut rng, 3);
        let cc = random_psd(&mut rng, 3);
        let b = linop::rng::ginibre(&mut rng, 3, 3).mapv(|z| z * c(0.3));
        let (direct, lemma) = schur_psd_check_detailed(&a, &b, &cc, 1e-9).unwrap();
        assert_eq!(direct, lemma, "routes disagree on instance {t}");
    }
}

#[test]
fn psd_to_mgm_both_directions() {
    let mut rng = seeded(13);
    for _ in 0..10 {
        let a = random_psd(&mut rng, 3);
        let b = random_psd(&mut rng, 3);
        let g = geometric_mean(&a, &b).unwrap();
        // W = A#B is a witness for T = A#B - eps I
        let (direct, _) = schur_psd_check_detailed(&a, &g, &b, 1e-7).unwrap();
        assert!(direct, "[[A, A#B],[A#B, B]] should be PSD");
        // conversely: block PSD with witness W implies A#B >= W
        let w = g.mapv(|z| z * c(0.9));
        let (ok, _) = schur_psd_check_detailed(&a, &w, &b, 1e-9).unwrap();
        assert!(ok);
        let gap = linop::min_eigval(&(&g - &w)).unwrap();
        assert!(gap >= -1e-8, "A#B >= W violated by {gap:.3e}");
    }
}

#[test]
fn partial_trace_cases() {
    let mut rng = seeded(17);
    let ra = random_density(&mut rng, 2);
    let rb = random_density(&mut rng, 3);
    let joint = kron(ra.mat(), rb.mat());
    let got_a = partial_trace(&joint, &[2, 3], &[0]).unwrap();
    assert_close(&got_a, ra.mat(), 1e-12);
    let got_b = partial_trace(&joint, &[2, 3], &[1]).unwrap();
    assert_close(&got_b, rb.mat(), 1e-12);

    // maximally entangled marginal
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi = [c(s), c(0.0), c(0.0), c(s)];
    let st = DensityState::from_pure(&phi, vec![2, 2]).unwrap();
    let marg = partial_trace(st.mat(), &[2, 2], &[1]).unwrap();
    assert_close(&marg, &identity(2).mapv(|z| z * c(0.5)), 1e-12);

    // trace over empty set keeps the input
    let kept = partial_trace(&joint, &[2, 3], &[0, 1]).unwrap();
    assert_close(&kept, &joint, 1e-15);

    // linearity + trace preservation
    let x = random_density(&mut rng, 4);
    let t = partial_trace(x.mat(), &[2, 2], &[0]).unwrap();
    assert!((trace(&t).re - 1.0).abs() < 1e-12);
}

#[test]
fn classical_renyi_examples() {
    let p = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
    assert!((classical_renyi(&p, &[0.5, 0.5], 2.0)).abs() < 1e-14);

    let v = classical_renyi(&p, &[0.25, 0.75], 2.0);
    let expect = (4.0f64 / 3.0).log2(); // 0.4150374992788438
    assert!((v - expect).abs() < 1e-12, "got {v}, want {expect}");

    let point = ProbabilityVector::new(vec![1.0, 0.0]).unwrap();
    let v = classical_renyi(&point, &[0.5, 0.5], 2.0);
    assert!((v - 1.0).abs() < 1e-12);

    // support violation signals +inf
    let v = classical_renyi(&point, &[0.0, 1.0], 2.0);
    assert!(v.is_infinite() && v > 0.0);
}

#[test]
fn purification_reduces_back() {
    let mut rng = seeded(23);
    let rho = random_density(&mut rng, 3);
    let (ket, r) = purify(rho.mat()).unwrap();
    assert_eq!(r, 3);
    let st = DensityState::from_pure(&ket, vec![3, r]).unwrap();
    let red = partial_trace(st.mat(), &[3, r], &[0]).unwrap();
    assert_close(&red, rho.mat(), 1e-10);
}

#[test]
fn channel_preserves_trace_and_psd() {
    let mut rng = seeded(29);
    let ch = linop::rng::random_channel(&mut rng, 3, 2);
    let rho = random_density(&mut rng, 3);
    let out = ch.apply(rho.mat()).unwrap();
    assert!((trace(&out).re - 1.0).abs() < 1e-10);
    assert!(linop::min_eigval(&out).unwrap() >= -1e-10);
}

#[test]
fn hermitian_validation_rejects_bad_input() {
    let m = array![[c(1.0), c(2.0)], [c(3.0), c(1.0)]];
    assert!(linop::HermitianOperator::new(m).is_err());
    let g = array![[c(1.0), Complex64::new(0.0, 1.0)], [Complex64::new(0.0, -1.0), c(1.0)]];
    let h = linop::HermitianOperator::new(g.clone()).unwrap();
    assert_close(h.mat(), &g, 1e-15);
    // eigendecomposition reproduces the matrix
    let (w, v) = linop::eigh(h.mat()).unwrap();
    let mut rebuilt = zeros(2);
    for k in 0..2 {
        for i in 0..2 {
            for j in 0..2 {
                rebuilt[[i, j]] += v[[i, k]] * c(w[k]) * v[[j, k]].conj();
            }
        }
    }
    let rel = linop::frob_norm(&(&rebuilt - h.mat())) / linop::frob_norm(h.mat());
    assert!(rel < 1e-10);
    let _ = dag(&g);
}
