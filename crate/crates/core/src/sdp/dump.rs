use std::io::{self, Write};

use super::{LinearFunctional, SdpProblem};

/// Plain sparse text dump for cross-checking against external solvers.
///
/// ```text
/// # blocks <d1> <d2> ...
/// # free <k>
/// <constraint-id> <block-id> <row> <col> <value>     block entry (row <= col)
/// <constraint-id> free <var> - <value>               free-variable term
/// <constraint-id> rhs - - <value>                    right-hand side
/// obj ...                                             objective (maximize)
/// ```
pub fn write_sparse_dump<W: Write>(p: &SdpProblem, mut w: W) -> io::Result<()> {
    let dims: Vec<String> = p.blocks.iter().map(|d| d.to_string()).collect();
    writeln!(w, "# blocks {}", dims.join(" "))?;
    writeln!(w, "# free {}", p.free_vars)?;
    let emit = |w: &mut W, id: &str, f: &LinearFunctional| -> io::Result<()> {
        for e in &f.entries {
            writeln!(w, "{id} {} {} {} {:e}", e.block, e.row, e.col, e.coef)?;
        }
        for &(k, c) in &f.free {
            writeln!(w, "{id} free {k} - {c:e}")?;
        }
        Ok(())
    };
    for (i, c) in p.constraints.iter().enumerate() {
        emit(&mut w, &i.to_string(), &c.functional)?;
        writeln!(w, "{i} rhs - - {:e}", c.rhs)?;
    }
    emit(&mut w, "obj", &p.objective)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sdp::SdpConstraint;

    #[test]
    fn dump_lines() {
        let mut f = LinearFunctional::default();
        f.add_entry(0, 1, 0, 2.0);
        f.add_free(0, -1.0);
        let mut obj = LinearFunctional::default();
        obj.add_free(0, 1.0);
        let p = SdpProblem {
            blocks: vec![2],
            free_vars: 1,
            constraints: vec![SdpConstraint { functional: f, rhs: 0.5 }],
            objective: obj,
        };
        let mut out = Vec::new();
        write_sparse_dump(&p, &mut out).unwrap();
        let s = String::from_utf8(out).unwrap();
        assert_eq!(
            s,
            "# blocks 2\n# free 1\n0 0 0 1 2e0\n0 free 0 - -1e0\n0 rhs - - 5e-1\nobj free 0 - 1e0\n"
        );
    }
}
