use crate::{BlockKind, Constraint, Result, SdpError, SdpProblem, Sense, SparseSym};
use std::collections::BTreeMap;
use std::fmt::Write as _;

/// Serializes a problem in SDPA sparse (.dat-s) layout.
///
/// Layout: an optional leading comment, then the number of constraint rows,
/// the number of blocks, the block sizes (negative = diagonal), the rhs
/// vector, and one `constraint block row col value` 5-tuple per upper
/// triangle entry, with `constraint 0` holding the objective. Equality
/// constraints are emitted as adjacent `>=` / `<=` row pairs; values carry 17
/// significant digits so re-import is bit-exact.
pub fn export_sdpa(problem: &SdpProblem) -> String {
    let mut rows: Vec<(&SparseSym, bool, f64)> = Vec::new(); // (mat, negate, rhs)
    for con in &problem.constraints {
        match con.sense {
            Sense::Ge => rows.push((&con.mat, false, con.rhs)),
            Sense::Eq => {
                rows.push((&con.mat, false, con.rhs));
                rows.push((&con.mat, true, -con.rhs));
            }
        }
    }
    let mut out = String::new();
    let _ = writeln!(
        out,
        "*objective {}",
        if problem.maximize { "maximize" } else { "minimize" }
    );
    let _ = writeln!(out, "{}", rows.len());
    let _ = writeln!(out, "{}", problem.blocks.len());
    let sizes: Vec<String> = problem
        .blocks
        .iter()
        .map(|&(kind, n)| match kind {
            BlockKind::Psd => format!("{n}"),
            BlockKind::Diagonal => format!("-{n}"),
        })
        .collect();
    let _ = writeln!(out, "{}", sizes.join(" "));
    let rhs: Vec<String> = rows.iter().map(|&(_, _, r)| fmt_val(r)).collect();
    let _ = writeln!(out, "{}", rhs.join(" "));

    let emit = |idx: usize, mat: &SparseSym, negate: bool, out: &mut String| {
        for &(b, r, c, v) in mat.entries() {
            let v = if negate { -v } else { v };
            let _ = writeln!(
                out,
                "{} {} {} {} {}",
                idx,
                b + 1,
                r + 1,
                c + 1,
                fmt_val(v)
            );
        }
    };
    emit(0, &problem.objective, false, &mut out);
    for (i, &(mat, negate, _)) in rows.iter().enumerate() {
        emit(i + 1, mat, negate, &mut out);
    }
    out
}

fn fmt_val(v: f64) -> String {
    format!("{v:.16e}")
}

/// Parses SDPA sparse text back into a problem. Adjacent `>=`/`<=` row pairs
/// that mirror each other are merged back into a single equality constraint,
/// so `import(export(p)) == p`.
pub fn import_sdpa(text: &str) -> Result<SdpProblem> {
    let mut maximize = true;
    let mut lines = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('*') || line.starts_with('"') {
            if line.contains("objective minimize") {
                maximize = false;
            } else if line.contains("objective maximize") {
                maximize = true;
            }
            continue;
        }
        lines.push((lineno + 1, line));
    }
    if lines.len() < 4 {
        return Err(SdpError::Parse {
            line: lines.last().map(|&(n, _)| n).unwrap_or(0),
            msg: "file truncated before data lines".into(),
        });
    }

    let parse_usize = |tok: &str, line: usize| -> Result<usize> {
        tok.parse::<usize>().map_err(|_| SdpError::Parse {
            line,
            msg: format!("expected integer, got '{tok}'"),
        })
    };
    let parse_f64 = |tok: &str, line: usize| -> Result<f64> {
        tok.replace(['d', 'D'], "e")
            .parse::<f64>()
            .map_err(|_| SdpError::Parse {
                line,
                msg: format!("expected number, got '{tok}'"),
            })
    };

    let (l0, s0) = lines[0];
    let m_rows = parse_usize(s0.split_whitespace().next().unwrap_or(""), l0)?;
    let (l1, s1) = lines[1];
    let n_blocks = parse_usize(s1.split_whitespace().next().unwrap_or(""), l1)?;

    let (l2, s2) = lines[2];
    let toks: Vec<&str> = s2
        .split(|c: char| c.is_whitespace() || c == ',' || c == '(' || c == ')' || c == '{' || c == '}')
        .filter(|t| !t.is_empty())
        .collect();
    if toks.len() != n_blocks {
        return Err(SdpError::Parse {
            line: l2,
            msg: format!("expected {n_blocks} block sizes, found {}", toks.len()),
        });
    }
    let mut blocks = Vec::with_capacity(n_blocks);
    for t in toks {
        let v: i64 = t.parse().map_err(|_| SdpError::Parse {
            line: l2,
            msg: format!("bad block size '{t}'"),
        })?;
        if v == 0 {
            return Err(SdpError::Parse {
                line: l2,
                msg: "zero block size".into(),
            });
        }
        if v > 0 {
            blocks.push((BlockKind::Psd, v as usize));
        } else {
            blocks.push((BlockKind::Diagonal, (-v) as usize));
        }
    }

    let (l3, s3) = lines[3];
    let rhs_toks: Vec<&str> = s3
        .split(|c: char| c.is_whitespace() || c == ',')
        .filter(|t| !t.is_empty())
        .collect();
    if rhs_toks.len() != m_rows {
        return Err(SdpError::Parse {
            line: l3,
            msg: format!("expected {m_rows} rhs values, found {}", rhs_toks.len()),
        });
    }
    let mut rhs = Vec::with_capacity(m_rows);
    for t in rhs_toks {
        rhs.push(parse_f64(t, l3)?);
    }

    // entry maps, with collision detection
    let mut maps: Vec<BTreeMap<(usize, usize, usize), f64>> =
        vec![BTreeMap::new(); m_rows + 1];
    for &(lineno, line) in &lines[4..] {
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 5 {
            return Err(SdpError::Parse {
                line: lineno,
                msg: format!("expected 5 fields, found {}", toks.len()),
            });
        }
        let ci = parse_usize(toks[0], lineno)?;
        let bi = parse_usize(toks[1], lineno)?;
        let ri = parse_usize(toks[2], lineno)?;
        let cj = parse_usize(toks[3], lineno)?;
        let v = parse_f64(toks[4], lineno)?;
        if ci > m_rows {
            return Err(SdpError::Parse {
                line: lineno,
                msg: format!("constraint index {ci} exceeds {m_rows}"),
            });
        }
        if bi == 0 || bi > n_blocks {
            return Err(SdpError::Parse {
                line: lineno,
                msg: format!("block index {bi} out of range"),
            });
        }
        let (kind, size) = blocks[bi - 1];
        if ri == 0 || cj == 0 || ri > size || cj > size {
            return Err(SdpError::Parse {
                line: lineno,
                msg: format!("entry ({ri},{cj}) outside block of size {size}"),
            });
        }
        if kind == BlockKind::Diagonal && ri != cj {
            return Err(SdpError::Parse {
                line: lineno,
                msg: "off-diagonal entry in diagonal block".into(),
            });
        }
        let (r, c) = if ri <= cj { (ri, cj) } else { (cj, ri) };
        let key = (bi - 1, r - 1, c - 1);
        if let Some(&old) = maps[ci].get(&key) {
            if old != v {
                return Err(SdpError::EntryCollision {
                    line: lineno,
                    block: bi,
                    row: r,
                    col: c,
                });
            }
        } else {
            maps[ci].insert(key, v);
        }
    }

    let to_sparse = |map: &BTreeMap<(usize, usize, usize), f64>| -> SparseSym {
        let mut s = SparseSym::new();
        for (&(b, r, c), &v) in map {
            s.add(b, r, c, v);
        }
        s.consolidate();
        s
    };

    let mut problem = SdpProblem::new(blocks, maximize);
    problem.set_objective(to_sparse(&maps[0]));

    // merge adjacent (F, b), (-F, -b) pairs back into equalities
    let mut i = 1usize;
    while i <= m_rows {
        let mat = to_sparse(&maps[i]);
        if i + 1 <= m_rows && rhs[i] == -rhs[i - 1] {
            let next = to_sparse(&maps[i + 1]);
            let negated = {
                let mut n = SparseSym::new();
                for &(b, r, c, v) in mat.entries() {
                    n.add(b, r, c, -v);
                }
                n.consolidate();
                n
            };
            if negated == next {
                problem.constraints.push(Constraint {
                    mat,
                    sense: Sense::Eq,
                    rhs: rhs[i - 1],
                });
                i += 2;
                continue;
            }
        }
        problem.constraints.push(Constraint {
            mat,
            sense: Sense::Ge,
            rhs: rhs[i - 1],
        });
        i += 1;
    }
    Ok(problem)
}
