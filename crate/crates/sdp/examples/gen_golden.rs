use sdp::{export_sdpa, BlockKind, SdpProblem, Sense, SparseSym};

// Emits the pinned golden SDPA file: a two-block problem with one equality
// (expands to a paired row) and one inequality.
fn main() {
    let mut p = SdpProblem::new(vec![(BlockKind::Psd, 2), (BlockKind::Diagonal, 2)], true);
    let mut obj = SparseSym::new();
    obj.add(0, 0, 0, 1.0);
    obj.add(0, 0, 1, 0.5);
    obj.add(1, 1, 1, -0.25);
    p.set_objective(obj);
    let mut f1 = SparseSym::new();
    f1.add(0, 0, 0, 1.0);
    f1.add(0, 1, 1, 1.0);
    p.add_constraint(f1, Sense::Eq, 1.0);
    let mut f2 = SparseSym::new();
    f2.add(0, 0, 1, -1.0);
    f2.add(1, 0, 0, 1.0);
    p.add_constraint(f2, Sense::Ge, -0.125);
    print!("{}", export_sdpa(&p));
}
