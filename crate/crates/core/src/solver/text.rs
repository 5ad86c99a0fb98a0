use std::fmt::Write as _;

use super::{ConicProblem, LinearForm, Sense};

fn form(f: &LinearForm) -> String {
    let mut s = format!("{:e}", f.constant);
    for &(i, c) in &f.terms {
        let _ = write!(s, " {i}:{c:e}");
    }
    s
}

pub(super) fn render(p: &ConicProblem) -> String {
    let mut out = String::new();
    let sense = match p.sense {
        Sense::Minimize => "min",
        Sense::Maximize => "max",
    };
    let _ = writeln!(out, "CONIC 1");
    let _ = writeln!(out, "SENSE {sense}");
    let _ = writeln!(out, "VARIABLES {}", p.variables.len());
    for (i, v) in p.variables.iter().enumerate() {
        let _ = writeln!(out, "{i} {v}");
    }
    let _ = writeln!(out, "OBJECTIVE {}", form(&p.objective));
    let _ = writeln!(out, "EQ {}", p.equalities.len());
    for f in &p.equalities {
        let _ = writeln!(out, "{}", form(f));
    }
    let _ = writeln!(out, "GE {}", p.inequalities.len());
    for f in &p.inequalities {
        let _ = writeln!(out, "{}", form(f));
    }
    let _ = writeln!(out, "BLOCKS {}", p.blocks.len());
    for b in &p.blocks {
        let _ = writeln!(out, "BLOCK {} {}", b.name, b.size);
        for i in 0..b.size {
            for j in i..b.size {
                let e = b.entry(i, j);
                if e.constant != 0.0 || !e.terms.is_empty() {
                    let _ = writeln!(out, "{i} {j} {}", form(e));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::super::*;

    #[test]
    fn identical_problems_render_identically() {
        let build = || {
            let mut p = ConicProblem::new(Sense::Maximize);
            let x = p.add_variable("x");
            let y = p.add_variable("y");
            p.objective = LinearForm::from_terms(0.5, [(y, 1.0), (x, 2.0)]);
            p.add_equality(LinearForm::from_terms(-1.0, [(x, 1.0), (y, 1.0)]));
            p.add_block(PsdBlock::new("g", 2, |i, j| if i == j { LinearForm::constant(1.0) } else { LinearForm::var(x) }));
            p
        };
        let a = build().to_canonical_text();
        assert_eq!(a, build().to_canonical_text());
        assert!(a.contains("OBJECTIVE 5e-1 0:2e0 1:1e0"));
        assert!(a.contains("BLOCK g 2\n0 0 1e0\n0 1 0e0 0:1e0\n1 1 1e0\n"));
    }
}
