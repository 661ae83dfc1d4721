use proptest::prelude::*;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sdp::{export_sdpa, import_sdpa, BlockKind, SdpProblem, Sense, SparseSym};

fn random_problem(seed: u64) -> SdpProblem {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nb = 1 + (rng.random::<u32>() % 3) as usize;
    let mut blocks = Vec::new();
    for _ in 0..nb {
        let n = 1 + (rng.random::<u32>() % 4) as usize;
        let kind = if rng.random::<f64>() < 0.3 {
            BlockKind::Diagonal
        } else {
            BlockKind::Psd
        };
        blocks.push((kind, n));
    }
    let maximize = rng.random::<f64>() < 0.5;
    let mut p = SdpProblem::new(blocks.clone(), maximize);
    let rand_mat = |rng: &mut ChaCha8Rng| {
        let mut s = SparseSym::new();
        for (b, &(kind, n)) in blocks.iter().enumerate() {
            for i in 0..n {
                for j in i..n {
                    if kind == BlockKind::Diagonal && i != j {
                        continue;
                    }
                    if rng.random::<f64>() < 0.4 {
                        s.add(b, i, j, rng.random::<f64>() * 4.0 - 2.0);
                    }
                }
            }
        }
        s.consolidate();
        s
    };
    p.set_objective(rand_mat(&mut rng));
    let m = 1 + (rng.random::<u32>() % 5) as usize;
    for _ in 0..m {
        let sense = if rng.random::<f64>() < 0.4 {
            Sense::Eq
        } else {
            Sense::Ge
        };
        let mut mat = rand_mat(&mut rng);
        if mat.is_empty() {
            mat.add(0, 0, 0, 1.0);
            mat.consolidate();
        }
        p.add_constraint(mat, sense, rng.random::<f64>() * 2.0 - 1.0);
    }
    p
}

#[test]
fn import_export_identity_on_random_problems() {
    for seed in 0..20u64 {
        let p = random_problem(seed);
        let text = export_sdpa(&p);
        let q = import_sdpa(&text).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert_eq!(p, q, "round trip mismatch at seed {seed}");
        // and byte identity on re-export
        assert_eq!(text, export_sdpa(&q), "byte mismatch at seed {seed}");
    }
}

#[test]
fn golden_file_byte_exact() {
    let golden = include_str!("data/golden.dat-s");
    let p = import_sdpa(golden).expect("golden file parses");
    let out = export_sdpa(&p);
    assert_eq!(out, golden, "golden file round trip is not byte-exact");
}

#[test]
fn tiny_problem_emits_five_line_header_plus_entries() {
    let mut p = SdpProblem::new(vec![(BlockKind::Psd, 1)], true);
    let mut obj = SparseSym::new();
    obj.add(0, 0, 0, 1.0);
    p.set_objective(obj);
    let mut f = SparseSym::new();
    f.add(0, 0, 0, -1.0);
    p.add_constraint(f, Sense::Ge, -1.0);
    let text = export_sdpa(&p);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7); // comment + 4 header lines + 2 entries
    assert_eq!(lines[1], "1");
    assert_eq!(lines[2], "1");
    assert_eq!(lines[3], "1");
}

#[test]
fn equalities_become_paired_rows() {
    let mut p = SdpProblem::new(vec![(BlockKind::Psd, 2)], true);
    let mut obj = SparseSym::new();
    obj.add(0, 0, 0, 1.0);
    p.set_objective(obj);
    let mut f = SparseSym::new();
    f.add(0, 0, 1, 2.5);
    p.add_constraint(f, Sense::Eq, 0.75);
    let text = export_sdpa(&p);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "2", "equality expands to two rows");
    assert!(lines[4].split_whitespace().count() == 2);
    let back = import_sdpa(&text).unwrap();
    assert_eq!(back.constraints.len(), 1);
    assert_eq!(back.constraints[0].sense, Sense::Eq);
}

#[test]
fn malformed_block_line_names_the_line() {
    let bad = "2\n1\nnot_a_number\n1.0 2.0\n0 1 1 1 1.0\n";
    match import_sdpa(bad) {
        Err(sdp::SdpError::Parse { line, .. }) => assert_eq!(line, 3),
        other => panic!("expected parse error with line number, got {other:?}"),
    }
}

#[test]
fn entry_collision_is_rejected() {
    let bad = "1\n1\n2\n1.0\n0 1 1 2 1.0\n0 1 2 1 2.0\n";
    match import_sdpa(bad) {
        Err(sdp::SdpError::EntryCollision { .. }) => {}
        other => panic!("expected collision error, got {other:?}"),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    #[test]
    fn roundtrip_preserves_values(seed in 0u64..5000) {
        let p = random_problem(seed);
        let q = import_sdpa(&export_sdpa(&p)).unwrap();
        prop_assert_eq!(p, q);
    }
}
