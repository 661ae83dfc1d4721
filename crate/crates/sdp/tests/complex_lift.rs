use ndarray::Array2;
use num_complex::Complex64;
use sdp::complex::{CExpr, ComplexSdp};
use sdp::{solve, Sense, SolveStatus, SolverOptions};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn lift_doubles_eigenvalue_multiplicity() {
    // Hermitian 2x2 complex block pinned entrywise: its real lift is 4x4
    // with each eigenvalue twice.
    let mut model = ComplexSdp::new(false);
    let b = model.add_block(2);
    let target = {
        let mut t = Array2::from_elem((2, 2), Complex64::ZERO);
        t[[0, 0]] = c(2.0, 0.0);
        t[[1, 1]] = c(1.0, 0.0);
        t[[0, 1]] = c(0.3, 0.4);
        t[[1, 0]] = c(0.3, -0.4);
        t
    };
    model.pin_hermitian(2, &target, |i, j| {
        let mut e = CExpr::new();
        e.push(b, i, j, Complex64::ONE);
        e
    });
    let mut obj = CExpr::new();
    obj.push(b, 0, 0, Complex64::ONE);
    obj.push(b, 1, 1, Complex64::ONE);
    model.set_objective(obj);
    let lowered = model.lower().unwrap();
    assert_eq!(lowered.blocks[0].1, 4);
    let sol = solve(&lowered, &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_value - 3.0).abs() < 1e-6);

    let rec = model.recover_block(&sol, b);
    for i in 0..2 {
        for j in 0..2 {
            assert!(
                (rec[[i, j]] - target[[i, j]]).norm() < 1e-6,
                "entry ({i},{j}): {} vs {}",
                rec[[i, j]],
                target[[i, j]]
            );
        }
    }
}

#[test]
fn psd_constraint_sees_imaginary_parts() {
    // maximize Re X01 subject to diag pinned to 1: optimum |X01| = 1 reached
    // at X01 = 1 (rank-one), so the lift must couple real and imaginary
    // parts correctly.
    let mut model = ComplexSdp::new(true);
    let b = model.add_block(2);
    for i in 0..2 {
        let mut e = CExpr::new();
        e.push(b, i, i, Complex64::ONE);
        model.add_scalar(e, Sense::Eq, 1.0);
    }
    let mut obj = CExpr::new();
    obj.push(b, 0, 1, c(0.5, 0.0));
    obj.push(b, 1, 0, c(0.5, 0.0));
    model.set_objective(obj);
    let sol = solve(&model.lower().unwrap(), &SolverOptions::default()).unwrap();
    assert_eq!(sol.status, SolveStatus::Optimal);
    assert!((sol.primal_value - 1.0).abs() < 1e-6, "{}", sol.primal_value);
}
