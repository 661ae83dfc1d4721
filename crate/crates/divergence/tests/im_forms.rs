use divergence::{
    hmin_cond, im_cond_entropy_up, im_divergence, reference_divergence, CondForm, ImForm, ImOrder,
    RefKind,
};
use linop::rng::{random_density, random_psd, seeded};
use linop::{classical_renyi, identity, CMat, DensityState, ProbabilityVector};
use num_complex::Complex64;
use sdp::SolverOptions;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

fn diag(vals: &[f64]) -> CMat {
    let mut m = linop::zeros(vals.len());
    for (i, &v) in vals.iter().enumerate() {
        m[[i, i]] = c(v);
    }
    m
}

fn opts() -> SolverOptions {
    SolverOptions::default()
}

const ALL_FORMS: [ImForm; 5] = [
    ImForm::Primal,
    ImForm::DualA,
    ImForm::DualB,
    ImForm::DualC,
    ImForm::DualD,
];

#[test]
fn divergence_of_state_from_itself_vanishes() {
    let rho = DensityState::unipartite(identity(2).mapv(|z| z * c(0.5))).unwrap();
    let sigma = identity(2).mapv(|z| z * c(0.5));
    for k in 1..=3 {
        for form in ALL_FORMS {
            let v = im_divergence(&rho, &sigma, ImOrder::new(k), form, &opts()).unwrap();
            assert!(
                v.bits.abs() < 1e-6,
                "k={k} form={form:?}: {} bits",
                v.bits
            );
        }
    }
}

#[test]
fn commuting_pair_reduces_to_classical_value() {
    let rho = DensityState::unipartite(diag(&[0.5, 0.5])).unwrap();
    let sigma = diag(&[0.25, 0.75]);
    let expect = (4.0f64 / 3.0).log2();
    for form in ALL_FORMS {
        let v = im_divergence(&rho, &sigma, ImOrder::new(1), form, &opts()).unwrap();
        assert!(
            (v.bits - expect).abs() < 1e-6,
            "form {form:?}: {} vs {expect}",
            v.bits
        );
    }
    // higher orders against the classical formula directly
    for k in 2..=3 {
        let alpha = ImOrder::new(k).alpha();
        let p = ProbabilityVector::new(vec![0.5, 0.5]).unwrap();
        let classical = classical_renyi(&p, &[0.25, 0.75], alpha);
        let v = im_divergence(&rho, &sigma, ImOrder::new(k), ImForm::Primal, &opts()).unwrap();
        assert!(
            (v.bits - classical).abs() < 1e-6,
            "k={k}: {} vs classical {classical}",
            v.bits
        );
    }
}

#[test]
fn all_forms_agree_on_noncommuting_qubit_pair() {
    let mut rng = seeded(101);
    for trial in 0..4 {
        let rho = random_density(&mut rng, 2);
        let sigma = random_psd(&mut rng, 2);
        for k in 1..=2 {
            let vals: Vec<f64> = ALL_FORMS
                .iter()
                .map(|&f| {
                    im_divergence(&rho, &sigma, ImOrder::new(k), f, &opts())
                        .unwrap()
                        .q_value
                })
                .collect();
            let base = vals[0];
            for (f, v) in ALL_FORMS.iter().zip(&vals) {
                let rel = (v - base).abs() / (1.0 + base.abs());
                assert!(rel < 1e-5, "trial {trial} k={k} {f:?}: {v} vs {base}");
            }
        }
    }
}

#[test]
fn witness_chain_constraints_hold() {
    let mut rng = seeded(7);
    let rho = random_density(&mut rng, 2);
    let sigma = random_psd(&mut rng, 2);
    let v = im_divergence(&rho, &sigma, ImOrder::new(2), ImForm::Primal, &opts()).unwrap();
    let divergence::Witness::Primal(w) = &v.witness else {
        panic!()
    };
    // V_1 + V_1* >= 0
    let h = linop::hermitian_part(&(&w.vs[0] + &linop::dag(&w.vs[0])));
    assert!(linop::min_eigval(&h).unwrap() >= -1e-7);
    // (V_2 + V_2*)/2 >= V_1* V_1
    let lhs = linop::hermitian_part(&(&w.vs[1] + &linop::dag(&w.vs[1]))).mapv(|z| z * c(0.5));
    let rhs = linop::dag(&w.vs[0]).dot(&w.vs[0]);
    assert!(linop::min_eigval(&(&lhs - &rhs)).unwrap() >= -1e-7);
    // Z >= V_2* V_2
    let rhs2 = linop::dag(&w.vs[1]).dot(&w.vs[1]);
    assert!(linop::min_eigval(&(&w.z - &rhs2)).unwrap() >= -1e-7);
}

#[test]
fn dual_witness_constraints_hold() {
    let mut rng = seeded(8);
    let rho = random_density(&mut rng, 2);
    let sigma = random_psd(&mut rng, 2);
    let v = im_divergence(&rho, &sigma, ImOrder::new(2), ImForm::DualC, &opts()).unwrap();
    let divergence::Witness::Dual(w) = &v.witness else {
        panic!()
    };
    // C_1 >= rho
    assert!(linop::min_eigval(&(&w.c_mats[0] - rho.mat())).unwrap() >= -1e-7);
    // equal traces
    let t0 = linop::trace(&w.a_mats[0]).re;
    let t1 = linop::trace(&w.a_mats[1]).re;
    assert!((t0 - t1).abs() <= 1e-6 * (1.0 + t0.abs()));
    // block chain [[A_i, C_i], [C_i, C_{i+1}]] >= 0 with C_3 = sigma,
    // at the solver's feasibility tolerance
    let (ok1, _) =
        linop::schur_psd_check_detailed(&w.a_mats[0], &w.c_mats[0], &w.c_mats[1], 1e-6).unwrap();
    let (ok2, _) =
        linop::schur_psd_check_detailed(&w.a_mats[1], &w.c_mats[1], &sigma, 1e-6).unwrap();
    assert!(ok1 && ok2);
}

#[test]
fn petz_equality_when_v1_constraint_dropped() {
    use divergence::im_divergence_with;
    let mut rng = seeded(9);
    let rho = random_density(&mut rng, 2);
    let sigma = random_psd(&mut rng, 2);
    let petz = reference_divergence(&rho, &sigma, 2.0, RefKind::Petz).unwrap();
    let dropped = im_divergence_with(
        &rho,
        &sigma,
        ImOrder::new(1),
        ImForm::Primal,
        &opts(),
        divergence::ImOptions { drop_v1_psd: true },
    )
    .unwrap();
    assert!(
        (dropped.bits - petz.bits).abs() < 1e-5,
        "{} vs {}",
        dropped.bits,
        petz.bits
    );
    // with the constraint, the divergence is dominated by Petz
    let with = im_divergence(&rho, &sigma, ImOrder::new(1), ImForm::Primal, &opts()).unwrap();
    assert!(with.bits <= petz.bits + 1e-6);
}

#[test]
fn cond_entropy_examples() {
    let mut rng = seeded(21);
    // uniform independent classical register: 1 bit for every k
    let sigma_b = random_density(&mut rng, 2);
    let joint = linop::kron(&identity(2).mapv(|z| z * c(0.5)), sigma_b.mat());
    let rho = DensityState::new(joint, vec![2, 2]).unwrap();
    for k in 1..=3 {
        for form in [CondForm::WithZ, CondForm::NoZ] {
            let h = im_cond_entropy_up(&rho, ImOrder::new(k), form, &opts()).unwrap();
            assert!((h - 1.0).abs() < 1e-5, "k={k}: {h}");
        }
    }

    // perfectly correlated: 0 bits
    let mut m = linop::zeros(4);
    m[[0, 0]] = c(0.5);
    m[[3, 3]] = c(0.5);
    let rho = DensityState::new(m, vec![2, 2]).unwrap();
    for k in 1..=2 {
        let h = im_cond_entropy_up(&rho, ImOrder::new(k), CondForm::WithZ, &opts()).unwrap();
        assert!(h.abs() < 1e-5, "k={k}: {h}");
    }

    // maximally entangled: -1 bit at k=1 (bracketed by H_min and H(A|B))
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi = [c(s), c(0.0), c(0.0), c(s)];
    let rho = DensityState::from_pure(&phi, vec![2, 2]).unwrap();
    let h = im_cond_entropy_up(&rho, ImOrder::new(1), CondForm::WithZ, &opts()).unwrap();
    assert!((h + 1.0).abs() < 1e-4, "{h}");
}

#[test]
fn hmin_examples() {
    let mut rng = seeded(23);
    let sigma_b = random_density(&mut rng, 2);
    let joint = linop::kron(&identity(2).mapv(|z| z * c(0.5)), sigma_b.mat());
    let rho = DensityState::new(joint, vec![2, 2]).unwrap();
    let h = hmin_cond(&rho, &opts()).unwrap();
    assert!((h - 1.0).abs() < 1e-6, "{h}");

    let mut m = linop::zeros(4);
    m[[0, 0]] = c(0.5);
    m[[3, 3]] = c(0.5);
    let rho = DensityState::new(m, vec![2, 2]).unwrap();
    let h = hmin_cond(&rho, &opts()).unwrap();
    assert!(h.abs() < 1e-6, "{h}");

    let s = std::f64::consts::FRAC_1_SQRT_2;
    let phi = [c(s), c(0.0), c(0.0), c(s)];
    let rho = DensityState::from_pure(&phi, vec![2, 2]).unwrap();
    let h = hmin_cond(&rho, &opts()).unwrap();
    assert!((h + 1.0).abs() < 1e-6, "{h}");
}

#[test]
fn reference_divergences_basics() {
    let mut rng = seeded(31);
    let rho = random_density(&mut rng, 2);
    let sig_self = rho.mat().clone();
    for kind in [
        RefKind::Petz,
        RefKind::Sandwiched,
        RefKind::Geometric,
        RefKind::Measured,
        RefKind::Max,
    ] {
        let v = reference_divergence(&rho, &sig_self, 2.0, kind).unwrap();
        assert!(v.bits.abs() < 1e-6, "{kind:?}: {}", v.bits);
    }

    // commuting collapse to the classical value
    let rho = DensityState::unipartite(diag(&[0.3, 0.7])).unwrap();
    let sigma = diag(&[0.6, 0.4]);
    let p = ProbabilityVector::new(vec![0.3, 0.7]).unwrap();
    for alpha in [2.0, 4.0 / 3.0] {
        let classical = classical_renyi(&p, &[0.6, 0.4], alpha);
        for kind in [
            RefKind::Petz,
            RefKind::Sandwiched,
            RefKind::Geometric,
            RefKind::Measured,
        ] {
            let v = reference_divergence(&rho, &sigma, alpha, kind).unwrap();
            assert!(
                (v.bits - classical).abs() < 1e-7,
                "{kind:?} alpha={alpha}: {} vs {classical}",
                v.bits
            );
        }
    }

    // D_max(diag(1/2,1/2) || diag(1/4,3/4)) = 1 bit
    let rho = DensityState::unipartite(diag(&[0.5, 0.5])).unwrap();
    let sigma = diag(&[0.25, 0.75]);
    let v = reference_divergence(&rho, &sigma, 2.0, RefKind::Max).unwrap();
    assert!((v.bits - 1.0).abs() < 1e-10, "{}", v.bits);
}

#[test]
fn support_violation_is_reported() {
    let rho = DensityState::unipartite(diag(&[0.5, 0.5])).unwrap();
    let sigma = diag(&[1.0, 0.0]);
    let r = im_divergence(&rho, &sigma, ImOrder::new(1), ImForm::Primal, &opts());
    assert!(r.is_err());
}
