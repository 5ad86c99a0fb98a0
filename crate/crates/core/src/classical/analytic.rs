use std::collections::BTreeSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cplus::reduced_labels;
use super::{correlator_row, Variant};
use crate::error::{Error, Result};
use crate::geometry::{remove_redundant, LinearSystem};
use crate::model::{ExactBehavior, Prior, Scenario};
use crate::rational::{int, Rational};

/// `sum_x e[x] E_x <= bound` for a single measurement.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorrelatorInequality {
    #[serde(with = "crate::rational::serde_rational_vec")]
    pub e: Vec<Rational>,
    #[serde(with = "crate::rational::serde_rational")]
    pub bound: Rational,
}

fn check_two(prior: &Prior, g: &Rational) -> Result<()> {
    if prior.len() != 2 {
        return Err(Error::InvalidPrior("closed forms need exactly two inputs".into()));
    }
    if *g < prior.max() || *g > int(1) {
        return Err(Error::OutOfRange(format!("G = {g} outside [q_max, 1]")));
    }
    Ok(())
}

/// Closed-form vertex list for two inputs and one measurement at fixed `G`.
/// Rows of each table are `p(.|x)`.
pub fn vertices_nx2(prior: &Prior, g: &Rational, n_b: usize) -> Result<Vec<ExactBehavior>> {
    check_two(prior, g)?;
    let s = Scenario::new(2, 1, n_b)?;
    let (q1, q2) = (prior.get(0), prior.get(1));
    let one = Rational::one();
    let r1 = (&one - g) / q1;
    let r2 = (&one - g) / q2;
    let unit = |b: usize| {
        let mut v = vec![Rational::zero(); n_b];
        v[b] = one.clone();
        v
    };
    let split = |b: usize, c: usize, w: &Rational| {
        let mut v = vec![Rational::zero(); n_b];
        v[b] += w;
        v[c] += &one - w;
        v
    };
    let mut out = BTreeSet::new();
    for b in 0..n_b {
        out.insert(vec![unit(b), unit(b)]);
        for c in (0..n_b).filter(|&c| c != b) {
            out.insert(vec![unit(b), split(b, c, &r2)]);
            out.insert(vec![split(b, c, &r1), unit(b)]);
            for d in (0..n_b).filter(|&d| d != b && d != c) {
                out.insert(vec![split(b, c, &r1), split(b, d, &r2)]);
            }
        }
    }
    Ok(out.into_iter().map(|rows| ExactBehavior::from_fn(s, |b, x, _| rows[x][b].clone())).collect())
}

/// The two nontrivial facets for two inputs, one measurement and two outcomes.
pub fn facets_212_analytic(prior: &Prior, g: &Rational, variant: Variant) -> Result<Vec<CorrelatorInequality>> {
    check_two(prior, g)?;
    let (q1, q2) = (prior.get(0).clone(), prior.get(1).clone());
    let (e, bound) = match variant {
        Variant::Stochastic => (vec![q1, -q2], int(2) * g - int(1)),
        Variant::Deterministic => (vec![int(1), int(-1)], int(2) * (g - prior.max()) / prior.min()),
    };
    let neg = e.iter().map(|v| -v).collect();
    Ok(vec![CorrelatorInequality { e, bound: bound.clone() }, CorrelatorInequality { e: neg, bound }])
}

/// Irredundant lifted description over `(p(1|1,1), p(1|2,1), G)` assembled
/// from the closed forms, positivity and `G >= q_max`.
pub fn facets_212_lifted(prior: &Prior, variant: Variant) -> Result<LinearSystem> {
    if prior.len() != 2 {
        return Err(Error::InvalidPrior("closed forms need exactly two inputs".into()));
    }
    let s = Scenario::new(2, 1, 2)?;
    let mut sys = LinearSystem::new(reduced_labels(s));
    let mut push = |e: Vec<Rational>, g: Rational, k: Rational| -> Result<()> {
        sys.inequalities.push(correlator_row(s, &e, g, k)?);
        Ok(())
    };
    for x in 0..2 {
        for sign in [1, -1] {
            let mut e = vec![int(0); 2];
            e[x] = int(sign);
            push(e, int(0), int(1))?;
        }
    }
    let (q1, q2) = (prior.get(0).clone(), prior.get(1).clone());
    for sign in [int(1), int(-1)] {
        match variant {
            // 2G - 1 -+ (q1 E1 - q2 E2) >= 0
            Variant::Stochastic => push(vec![-&sign * &q1, &sign * &q2], int(2), int(-1))?,
            // 2G - 2 q_max -+ q_min (E1 - E2) >= 0
            Variant::Deterministic => {
                let m = prior.min();
                push(vec![-&sign * &m, &sign * &m], int(2), int(-2) * prior.max())?
            }
        }
    }
    push(vec![int(0), int(0)], int(1), -prior.max())?;
    Ok(remove_redundant(&sys))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn uniform_at_q_max_has_identical_rows_only() {
        let v = vertices_nx2(&Prior::uniform(2), &ratio(1, 2), 3).unwrap();
        assert!(v.iter().all(|b| (0..3).all(|k| b.get(k, 0, 0) == b.get(k, 1, 0))));
        assert_eq!(v.len(), 3);
    }

    #[test]
    fn perfect_guessing_allows_disjoint_rows() {
        let v = vertices_nx2(&Prior::uniform(2), &int(1), 2).unwrap();
        assert_eq!(v.len(), 4);
    }

    #[test]
    fn closed_form_bounds() {
        let p = Prior::parse("2/3,1/3", 2).unwrap();
        let f = facets_212_analytic(&p, &ratio(3, 4), Variant::Stochastic).unwrap();
        assert_eq!(f[0].bound, ratio(1, 2));
        let d = facets_212_analytic(&p, &ratio(3, 4), Variant::Deterministic).unwrap();
        assert_eq!(d[0].bound, ratio(1, 2));
        assert!(facets_212_analytic(&p, &ratio(1, 2), Variant::Stochastic).is_err());
    }
}
