use ndarray::Array2;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sdp::{solve, BlockKind, SdpProblem, Sense, SolveStatus, SolverOptions, SparseSym};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

#[test]
fn scalar_max_with_unit_cap() {
    // maximize x s.t. x <= 1 on a 1x1 block; spec dual sign: lambda = -1
    let mut p = SdpProblem::new(vec![(BlockKind::Psd, 1)], true);
    let mut obj = SparseSym::new();
    obj.add(0, 0, 0, 1.0);
    p.set_objective(obj);
    let mut f = SparseSym::new();
    f.add(0, 0, 0, -1.0); // -x >= -1
    p.add_constraint(f, Sense::Ge, -1.0);
    let sol = solve(&p, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_value - 1.0).abs() < 1e-7, "{}", sol.primal_value);
    assert!((sol.dual_vector[0] + 1.0).abs() < 1e-6, "{}", sol.dual_vector[0]);
    // weak duality: dual bounds from above for a maximization
    assert!(sol.dual_value >= sol.primal_value - 1e-7 * (1.0 + sol.primal_value.abs()));
}

#[test]
fn min_trace_dominating_psd() {
    // minimize tr X s.t. X >= rho elementwise in the PSD order, via
    // X - rho >= 0 encoded with an auxiliary slack block:
    // entries tie S = X - rho, so tr(F_i (X (+) S)) = rho_ij.
    // optimum X = rho.
    let rho = [[0.6, 0.2], [0.2, 0.4]];
    let mut p = SdpProblem::new(vec![(BlockKind::Psd, 2), (BlockKind::Psd, 2)], false);
    let mut obj = SparseSym::new();
    obj.add(0, 0, 0, 1.0);
    obj.add(0, 1, 1, 1.0);
    p.set_objective(obj);
    for i in 0..2 {
        for j in i..2 {
            let mut f = SparseSym::new();
            let w = if i == j { 1.0 } else { 0.5 };
            f.add(0, i, j, w);
            f.add(1, i, j, -w);
            p.add_constraint(f, Sense::Eq, rho[i][j]);
        }
    }
    let sol = solve(&p, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_value - 1.0).abs() < 1e-7, "{}", sol.primal_value);
    // minimization: dual lower-bounds
    assert!(sol.dual_value <= sol.primal_value + 1e-9);
}

#[test]
fn hmin_of_perfectly_correlated_cq_state() {
    // rho_AE = (|00><00| + |11><11|)/2; guessing SDP:
    // min tr(sigma) s.t. I_A (x) sigma >= rho  ->  value 1, H_min = 0.
    // blocks: sigma (2x2), T = I (x) sigma - rho (4x4)
    let mut p = SdpProblem::new(vec![(BlockKind::Psd, 2), (BlockKind::Psd, 4)], false);
    let mut obj = SparseSym::new();
    obj.add(0, 0, 0, 1.0);
    obj.add(0, 1, 1, 1.0);
    p.set_objective(obj);
    let rho = {
        let mut r = Array2::<f64>::zeros((4, 4));
        r[[0, 0]] = 0.5;
        r[[3, 3]] = 0.5;
        r
    };
    for i in 0..4 {
        for j in i..4 {
            let mut f = SparseSym::new();
            let w = if i == j { 1.0 } else { 0.5 };
            f.add(1, i, j, w);
            // I (x) sigma has entry sigma[i%2, j%2] when i/2 == j/2
            if i / 2 == j / 2 {
                f.add(0, i % 2, j % 2, -w);
            }
            p.add_constraint(f, Sense::Eq, -rho[[i, j]]);
        }
    }
    let sol = solve(&p, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_value - 1.0).abs() < 1e-6, "{}", sol.primal_value);
    let hmin = -sol.primal_value.log2();
    assert!(hmin.abs() < 1e-6);
}

/// Generates a random problem with a known optimal primal-dual pair by
/// construction: pick complementary x*, z* on the cone boundary, a free y*,
/// and back out b = A x*, C from the dual feasibility equation.
fn random_known_optimum(seed: u64, maximize: bool) -> (SdpProblem, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = 3usize;
    let m = 5usize;

    let randmat = |rng: &mut ChaCha8Rng| {
        let mut a = Array2::<f64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                a[[i, j]] = rng.random::<f64>() * 2.0 - 1.0;
            }
        }
        a
    };
    // x* = u diag(d1,d2,0) u^T, z* = u diag(0,0,d3) u^T for orthonormal u
    let g = randmat(&mut rng);
    let (q, _) = qr(&g);
    let mut xs = Array2::<f64>::zeros((n, n));
    let mut zs = Array2::<f64>::zeros((n, n));
    let d1 = 0.5 + rng.random::<f64>();
    let d2 = 0.5 + rng.random::<f64>();
    let d3 = 0.5 + rng.random::<f64>();
    for i in 0..n {
        for j in 0..n {
            xs[[i, j] ] = d1 * q[[i, 0]] * q[[j, 0]] + d2 * q[[i, 1]] * q[[j, 1]];
            zs[[i, j]] = d3 * q[[i, 2]] * q[[j, 2]];
        }
    }

    // random sparse-ish symmetric constraint matrices
    let mut mats = Vec::with_capacity(m);
    for _ in 0..m {
        let a = randmat(&mut rng);
        let at = a.t().to_owned();
        mats.push((&a + &at) * 0.5);
    }
    let ys: Vec<f64> = (0..m).map(|_| rng.random::<f64>() * 2.0 - 1.0).collect();

    // internal convention: min <c,x>, dual slack z = c - A^T y  >= 0
    // spec convention for a minimize problem: C_int = C. For maximize, C = -C_int.
    let mut c_int = zs.clone();
    for (k, mat) in mats.iter().enumerate() {
        c_int = c_int + &(mat * ys[k]);
    }

    let mut p = SdpProblem::new(vec![(BlockKind::Psd, n)], maximize);
    let sign = if maximize { -1.0 } else { 1.0 };
    let mut obj = SparseSym::new();
    for i in 0..n {
        for j in i..n {
            obj.add(0, i, j, sign * c_int[[i, j]]);
        }
    }
    p.set_objective(obj);
    let mut opt_val = 0.0;
    for i in 0..n {
        for j in 0..n {
            opt_val += c_int[[i, j]] * xs[[i, j]];
        }
    }
    for mat in &mats {
        let mut f = SparseSym::new();
        for i in 0..n {
            for j in i..n {
                f.add(0, i, j, mat[[i, j]]);
            }
        }
        let rhs: f64 = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .map(|(i, j)| mat[[i, j]] * xs[[i, j]])
            .sum();
        p.add_constraint(f, Sense::Eq, rhs);
    }
    (p, sign * opt_val)
}

fn qr(a: &Array2<f64>) -> (Array2<f64>, Array2<f64>) {
    // Gram-Schmidt, enough for random full-rank inputs
    let n = a.nrows();
    let mut q = a.clone();
    for j in 0..n {
        for k in 0..j {
            let dot: f64 = (0..n).map(|i| q[[i, k]] * q[[i, j]]).sum();
            for i in 0..n {
                let t = dot * q[[i, k]];
                q[[i, j]] -= t;
            }
        }
        let nrm: f64 = (0..n).map(|i| q[[i, j]] * q[[i, j]]).sum::<f64>().sqrt();
        for i in 0..n {
            q[[i, j]] /= nrm;
        }
    }
    (q, Array2::zeros((n, n)))
}

#[test]
fn random_problems_reach_constructed_optimum() {
    for seed in 0..10u64 {
        let maximize = seed % 2 == 0;
        let (p, want) = random_known_optimum(seed, maximize);
        let sol = solve(&p, &opts()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal, "seed {seed}");
        let err = (sol.primal_value - want).abs() / (1.0 + want.abs());
        assert!(err < 1e-6, "seed {seed}: got {} want {want}", sol.primal_value);
        // gap and residuals certified
        assert!(sol.residuals.gap < 1e-7, "seed {seed}");
        assert!(sol.residuals.primal < 1e-7 && sol.residuals.dual < 1e-7);
        // weak duality on the certified side
        if maximize {
            assert!(sol.dual_value >= sol.primal_value - 1e-7);
        } else {
            assert!(sol.dual_value <= sol.primal_value + 1e-7);
        }
    }
}

#[test]
fn dual_bound_transfers_to_perturbed_rhs() {
    // Appendix-style transfer: a dual vector obtained at rhs b bounds the
    // optimum of the problem at any other rhs b-hat.
    for seed in 100..104u64 {
        let (p, _) = random_known_optimum(seed, true);
        let sol = solve(&p, &opts()).unwrap();
        assert_eq!(sol.status, SolveStatus::Optimal);
        let lam = sol.dual_vector.clone();

        let mut rng = ChaCha8Rng::seed_from_u64(seed * 7 + 1);
        for _ in 0..3 {
            let mut p2 = p.clone();
            for con in p2.constraints.iter_mut() {
                con.rhs += 0.05 * (rng.random::<f64>() - 0.5);
            }
            let sol2 = solve(&p2, &opts()).unwrap();
            if sol2.status != SolveStatus::Optimal {
                continue;
            }
            let bound: f64 = lam
                .iter()
                .zip(p2.constraints.iter())
                .map(|(l, c)| l * c.rhs)
                .sum();
            assert!(
                bound >= sol2.primal_value - 1e-6,
                "transfer bound {bound} < optimum {}",
                sol2.primal_value
            );
        }
    }
}

#[test]
fn complementarity_at_optimum() {
    let (p, _) = random_known_optimum(42, false);
    let sol = solve(&p, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    // <X, S> with S = C - sum lambda_i F_i (minimize convention)
    let x = &sol.primal_blocks[0];
    let n = x.nrows();
    let dense = |s: &SparseSym| {
        let mut m = Array2::<f64>::zeros((n, n));
        for &(_, r, c, v) in s.entries() {
            m[[r, c]] += v;
            if r != c {
                m[[c, r]] += v;
            }
        }
        m
    };
    let mut slack = dense(&p.objective);
    for (k, con) in p.constraints.iter().enumerate() {
        slack = slack - &(dense(&con.mat) * sol.dual_vector[k]);
    }
    let ip: f64 = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| x[[i, j]] * slack[[i, j]])
        .sum();
    assert!(ip.abs() < 1e-6, "complementarity <X,S> = {ip}");
}

#[test]
fn infeasible_problem_is_flagged() {
    // x >= 1 and -x >= 0 simultaneously: infeasible
    let mut p = SdpProblem::new(vec![(BlockKind::Psd, 1)], true);
    let mut obj = SparseSym::new();
    obj.add(0, 0, 0, 1.0);
    p.set_objective(obj);
    let mut f1 = SparseSym::new();
    f1.add(0, 0, 0, 1.0);
    p.add_constraint(f1, Sense::Ge, 1.0);
    let mut f2 = SparseSym::new();
    f2.add(0, 0, 0, -1.0);
    p.add_constraint(f2, Sense::Ge, 0.0);
    let sol = solve(&p, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::PrimalInfeasible);
}

#[test]
fn unbounded_problem_is_flagged() {
    // maximize x, no upper bound
    let mut p = SdpProblem::new(vec![(BlockKind::Psd, 1)], true);
    let mut obj = SparseSym::new();
    obj.add(0, 0, 0, 1.0);
    p.set_objective(obj);
    let mut f = SparseSym::new();
    f.add(0, 0, 0, 1.0);
    p.add_constraint(f, Sense::Ge, 1.0);
    let sol = solve(&p, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::DualInfeasible);
}

#[test]
fn diagonal_blocks_behave_like_lp() {
    // maximize x1 + 2 x2 s.t. x1 + x2 <= 1, x diag block -> optimum 2
    let mut p = SdpProblem::new(vec![(BlockKind::Diagonal, 2)], true);
    let mut obj = SparseSym::new();
    obj.add(0, 0, 0, 1.0);
    obj.add(0, 1, 1, 2.0);
    p.set_objective(obj);
    let mut f = SparseSym::new();
    f.add(0, 0, 0, -1.0);
    f.add(0, 1, 1, -1.0);
    p.add_constraint(f, Sense::Ge, -1.0);
    let sol = solve(&p, &opts()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_value - 2.0).abs() < 1e-7);
}
