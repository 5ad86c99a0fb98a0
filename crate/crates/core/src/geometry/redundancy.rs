use num_traits::{One, Zero};

use super::{echelon, is_contradiction, is_trivially_true, normalize_inequality, row_cmp, LinearSystem, Row};
use crate::solver::exact::{ExactLp, ExactOutcome, ExactRow};
use crate::solver::Sense;
use crate::rational::Rational;

/// Minimum of `sum y_r c_r` over multipliers with `sum y_r a_r = target`,
/// `y >= 0` on `ge` rows and free on `eq` rows. `None` when no such
/// multipliers exist.
fn cheapest_combination(eq: &[&Row], ge: &[&Row], target: &[Rational], constant_row: Option<Rational>) -> Option<ExactOutcome> {
    let d = target.len();
    let n = eq.len() + ge.len();
    let cols: Vec<&Row> = eq.iter().chain(ge.iter()).copied().collect();
    let mut equalities: Vec<ExactRow> = (0..d)
        .map(|i| ExactRow::new(cols.iter().map(|r| r.a[i].clone()).collect(), -target[i].clone()))
        .collect();
    if let Some(c) = constant_row {
        equalities.push(ExactRow::new(cols.iter().map(|r| r.c.clone()).collect(), -c));
    }
    let lp = ExactLp {
        n,
        sense: Sense::Minimize,
        objective: cols.iter().map(|r| r.c.clone()).collect(),
        equalities,
        inequalities: Vec::new(),
        nonneg: (0..n).map(|i| i >= eq.len()).collect(),
    };
    match lp.solve() {
        ExactOutcome::Infeasible { .. } => None,
        other => Some(other),
    }
}

/// Exact feasibility, decided by the absence of a Farkas combination
/// `sum y a = 0`, `sum y c = -1`.
pub fn is_feasible(sys: &LinearSystem) -> bool {
    let eq: Vec<&Row> = sys.equalities.iter().collect();
    let ge: Vec<&Row> = sys.inequalities.iter().collect();
    let zero = vec![Rational::zero(); sys.dim()];
    cheapest_combination(&eq, &ge, &zero, Some(-Rational::one())).is_none()
}

fn implied_by(eq: &[&Row], ge: &[&Row], row: &Row) -> bool {
    if is_trivially_true(row) {
        return true;
    }
    match cheapest_combination(eq, ge, &row.a, None) {
        None => false,
        Some(ExactOutcome::Optimal { value, .. }) => value <= row.c,
        // unbounded below only happens for an infeasible system
        Some(_) => true,
    }
}

/// Whether every point of the (feasible) system satisfies `row >= 0`.
pub fn implies(sys: &LinearSystem, row: &Row) -> bool {
    let eq: Vec<&Row> = sys.equalities.iter().collect();
    let ge: Vec<&Row> = sys.inequalities.iter().collect();
    implied_by(&eq, &ge, row)
}

/// Drops every inequality implied by the others (one exact LP per row), and
/// returns the survivors in canonical form. Equalities are kept as an
/// independent echelon basis. An infeasible system reduces to `-1 >= 0`.
pub fn remove_redundant(sys: &LinearSystem) -> LinearSystem {
    let d = sys.dim();
    if !is_feasible(sys) {
        let mut out = LinearSystem::new(sys.labels.clone());
        out.add_ge(vec![Rational::zero(); d], -Rational::one());
        return out;
    }
    let c = sys.canonical();
    let eq: Vec<&Row> = c.equalities.iter().collect();
    let mut keep: Vec<bool> = vec![true; c.inequalities.len()];
    for i in 0..c.inequalities.len() {
        if is_contradiction(&c.inequalities[i]) {
            continue;
        }
        let others: Vec<&Row> = c
            .inequalities
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i && keep[j])
            .map(|(_, r)| r)
            .collect();
        if implied_by(&eq, &others, &c.inequalities[i]) {
            keep[i] = false;
        }
    }
    let mut inequalities: Vec<Row> = c
        .inequalities
        .into_iter()
        .zip(keep)
        .filter_map(|(r, k)| k.then(|| normalize_inequality(&r)))
        .collect();
    inequalities.sort_by(row_cmp);
    LinearSystem { labels: c.labels, equalities: echelon(&c.equalities), inequalities }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn drops_weaker_bound() {
        let mut s = LinearSystem::with_dim(1);
        s.add_ge(vec![int(1)], int(0));
        s.add_ge(vec![int(1)], int(1));
        s.add_ge(vec![int(-1)], int(1));
        let r = remove_redundant(&s);
        assert_eq!(r.inequalities, vec![Row::new(vec![int(-1)], int(1)), Row::new(vec![int(1)], int(0))]);
    }

    #[test]
    fn implied_through_equalities() {
        // x + y = 1, x >= 0, y >= 0 imply x <= 1
        let mut s = LinearSystem::with_dim(2);
        s.add_eq(vec![int(1), int(1)], int(-1));
        s.add_ge(vec![int(1), int(0)], int(0));
        s.add_ge(vec![int(0), int(1)], int(0));
        assert!(implies(&s, &Row::new(vec![int(-1), int(0)], int(1))));
        assert!(!implies(&s, &Row::new(vec![int(-1), int(0)], ratio(1, 2))));
        s.add_ge(vec![int(-1), int(0)], int(1));
        // after reducing against x = 1 - y only 0 <= y <= 1 remains
        assert_eq!(remove_redundant(&s).inequalities.len(), 2);
    }

    #[test]
    fn infeasible_collapses() {
        let mut s = LinearSystem::with_dim(1);
        s.add_ge(vec![int(1)], int(-1));
        s.add_ge(vec![int(-1)], int(0));
        assert!(!is_feasible(&s));
        let r = remove_redundant(&s);
        assert_eq!(r.inequalities.len(), 1);
        assert!(is_contradiction(&r.inequalities[0]));
    }
}
