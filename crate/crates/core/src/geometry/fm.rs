use num_traits::{Signed, Zero};
use rayon::prelude::*;

use super::{is_trivially_true, normalize_inequality, remove_redundant, row_cmp, LinearSystem, Row};
use crate::error::Result;

fn drop_column(r: &Row, j: usize) -> Row {
    let mut a = r.a.clone();
    a.remove(j);
    Row::new(a, r.c.clone())
}

/// Projects out variable `j`. An equality involving `j` is used for direct
/// substitution; otherwise every positive-coefficient inequality is paired
/// with every negative one. Rows are normalized and deduplicated but not
/// otherwise pruned.
pub fn fm_eliminate_index(sys: &LinearSystem, j: usize) -> LinearSystem {
    let mut labels = sys.labels.clone();
    labels.remove(j);
    let mut out = LinearSystem::new(labels);

    if let Some(k) = sys.equalities.iter().position(|e| !e.a[j].is_zero()) {
        let e = &sys.equalities[k];
        // x_j = -(rest . x + c) / e_j
        let subst = |r: &Row| {
            if r.a[j].is_zero() {
                return drop_column(r, j);
            }
            let f = &r.a[j] / &e.a[j];
            let a = r.a.iter().zip(&e.a).map(|(v, w)| v - &f * w).collect();
            drop_column(&Row::new(a, &r.c - &f * &e.c), j)
        };
        out.equalities = sys.equalities.iter().enumerate().filter(|&(i, _)| i != k).map(|(_, r)| subst(r)).collect();
        out.inequalities = sys.inequalities.iter().map(subst).collect();
    } else {
        out.equalities = sys.equalities.iter().map(|r| drop_column(r, j)).collect();
        let (mut pos, mut neg) = (Vec::new(), Vec::new());
        for r in &sys.inequalities {
            if r.a[j].is_positive() {
                pos.push(r);
            } else if r.a[j].is_negative() {
                neg.push(r);
            } else {
                out.inequalities.push(drop_column(r, j));
            }
        }
        let combos: Vec<Row> = pos
            .par_iter()
            .flat_map_iter(|p| {
                neg.iter().map(move |n| {
                    let (s, t) = (p.a[j].clone(), -n.a[j].clone());
                    let a = p.a.iter().zip(&n.a).map(|(u, w)| &t * u + &s * w).collect();
                    drop_column(&Row::new(a, &t * &p.c + &s * &n.c), j)
                })
            })
            .collect();
        out.inequalities.extend(combos);
    }
    let mut ineq: Vec<Row> =
        out.inequalities.iter().map(normalize_inequality).filter(|r| !is_trivially_true(r)).collect();
    ineq.sort_by(row_cmp);
    ineq.dedup();
    out.inequalities = ineq;
    out
}

pub fn fm_eliminate(sys: &LinearSystem, var: &str) -> Result<LinearSystem> {
    Ok(fm_eliminate_index(sys, sys.var_index(var)?))
}

/// Eliminates `vars` in the given order, removing redundant rows after every
/// step to keep the intermediate systems small.
pub fn fm_project(sys: &LinearSystem, vars: &[&str]) -> Result<LinearSystem> {
    let mut cur = remove_redundant(sys);
    for v in vars {
        cur = remove_redundant(&fm_eliminate(&cur, v)?);
    }
    Ok(cur)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::is_contradiction;
    use crate::rational::int;

    #[test]
    fn substitution_through_equality() {
        let mut s = LinearSystem::new(vec!["x".into(), "y".into()]);
        s.add_ge(vec![int(1), int(0)], int(0));
        s.add_ge(vec![int(-1), int(0)], int(1));
        s.add_eq(vec![int(-1), int(1)], int(0));
        let p = fm_eliminate(&s, "x").unwrap();
        assert_eq!(p.labels, vec!["y".to_string()]);
        assert!(p.equalities.is_empty());
        assert_eq!(p.inequalities, vec![Row::new(vec![int(-1)], int(1)), Row::new(vec![int(1)], int(0))]);
    }

    #[test]
    fn empty_projection_shows_contradiction() {
        let mut s = LinearSystem::new(vec!["x".into()]);
        s.add_ge(vec![int(1)], int(-1));
        s.add_ge(vec![int(-1)], int(0));
        let p = fm_eliminate(&s, "x").unwrap();
        assert_eq!(p.dim(), 0);
        assert_eq!(p.inequalities.len(), 1);
        assert!(is_contradiction(&p.inequalities[0]));
        assert_eq!(p.inequalities[0].c, int(-1));
    }
}
