//! Classical sets with bounded guessing probability: exact vertex and facet
//! enumeration through the message polyhedron, and numerical membership
//! through linear programs.

mod analytic;
mod cplus;
mod membership;
mod mplus;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{normalize_inequality, Row};
use crate::model::{Prior, Scenario};
use crate::rational::Rational;

pub use analytic::{facets_212_analytic, facets_212_lifted, vertices_nx2, CorrelatorInequality};
pub use cplus::{
    complete_alphabet, cplus, cplus_facets, cplus_vertices, reduced_labels, row_at_g, system_at_g, CPlus, CPlusVertex,
    ResponseFunction,
};
pub use membership::{
    deterministic_strategies, max_witness_dimension, max_witness_exact, membership_exact, membership_lp, min_g_lp, ExactMembership, Membership,
    MembershipOptions, SeparatingInequality, Weight,
};
pub use mplus::{
    build_mplus, deterministic_mplus, message_guessing, mplus_system, set_partitions, MessagePolyhedron, MessageVertex,
};

/// Shared or unshared randomness between the encoding and the decoding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variant {
    /// Stochastic encodings, the set `C`.
    Stochastic,
    /// Mixtures of deterministic strategies, the set `C_det`.
    Deterministic,
}

impl std::str::FromStr for Variant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "c" | "stochastic" => Ok(Self::Stochastic),
            "c_det" | "cdet" | "det" | "deterministic" => Ok(Self::Deterministic),
            _ => Err(Error::Parse(format!("unknown classical variant `{s}`"))),
        }
    }
}

/// Symmetry of a scenario: input and outcome relabelings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relabeling {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    /// Outcome permutation for each `y`.
    pub b: Vec<Vec<usize>>,
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn rec(cur: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if cur.len() == used.len() {
            out.push(cur.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                cur.push(i);
                rec(cur, used, out);
                cur.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// All relabelings that leave the prior invariant.
pub fn relabelings(s: Scenario, prior: &Prior) -> Vec<Relabeling> {
    let xs: Vec<Vec<usize>> =
        permutations(s.n_x).into_iter().filter(|p| p.iter().enumerate().all(|(x, &px)| prior.get(x) == prior.get(px))).collect();
    let bs = permutations(s.n_b);
    let mut per_y: Vec<Vec<Vec<usize>>> = vec![vec![]];
    for _ in 0..s.n_y {
        per_y = per_y
            .into_iter()
            .flat_map(|acc| {
                bs.iter().map(move |p| {
                    let mut a = acc.clone();
                    a.push(p.clone());
                    a
                })
            })
            .collect();
    }
    let mut out = Vec::new();
    for x in &xs {
        for y in permutations(s.n_y) {
            for b in &per_y {
                out.push(Relabeling { x: x.clone(), y: y.clone(), b: b.clone() });
            }
        }
    }
    out
}

/// Full-table coefficients of a reduced row: the last outcome gets zero.
fn reduced_to_full(s: Scenario, a: &[Rational]) -> Vec<Rational> {
    let mut full = vec![Rational::zero(); s.behavior_len()];
    for x in 0..s.n_x {
        for y in 0..s.n_y {
            for b in 0..s.n_b - 1 {
                full[s.index(b, x, y)] = a[s.reduced_index(b, x, y)].clone();
            }
        }
    }
    full
}

/// Eliminates the last outcome from a full-table functional `c.p + k`.
fn full_to_reduced(s: Scenario, c: &[Rational], k: &Rational) -> (Vec<Rational>, Rational) {
    let mut a = vec![Rational::zero(); s.reduced_len()];
    let mut k = k.clone();
    for x in 0..s.n_x {
        for y in 0..s.n_y {
            let last = &c[s.index(s.n_b - 1, x, y)];
            k += last;
            for b in 0..s.n_b - 1 {
                a[s.reduced_index(b, x, y)] = &c[s.index(b, x, y)] - last;
            }
        }
    }
    (a, k)
}

/// Applies a relabeling to a row over reduced coordinates followed by `G`.
pub fn relabel_row(s: Scenario, r: &Row, t: &Relabeling) -> Row {
    let d = s.reduced_len();
    let full = reduced_to_full(s, &r.a[..d]);
    let mut moved = vec![Rational::zero(); s.behavior_len()];
    for x in 0..s.n_x {
        for y in 0..s.n_y {
            for b in 0..s.n_b {
                moved[s.index(t.b[y][b], t.x[x], t.y[y])] = full[s.index(b, x, y)].clone();
            }
        }
    }
    let (mut a, c) = full_to_reduced(s, &moved, &r.c);
    a.extend(r.a[d..].iter().cloned());
    normalize_inequality(&Row::new(a, c))
}

/// Orbit of a set of rows under all prior-preserving relabelings, sorted.
pub fn orbit(s: Scenario, prior: &Prior, rows: &[Row]) -> Vec<Row> {
    let mut out: Vec<Row> =
        relabelings(s, prior).iter().flat_map(|t| rows.iter().map(move |r| relabel_row(s, r, t))).collect();
    out.sort_by(crate::geometry::row_cmp);
    out.dedup();
    out
}

/// `sum_xy e[x][y] E_xy + g G + k >= 0` as a row over reduced coordinates and
/// `G`, with `E_xy = p(1|x,y) - p(2|x,y)`. Only for two outcomes.
pub fn correlator_row(s: Scenario, e: &[Rational], g: Rational, k: Rational) -> Result<Row> {
    if !s.has_correlators() || e.len() != s.n_x * s.n_y {
        return Err(Error::ShapeMismatch("correlator rows need two outcomes and one coefficient per (x,y)".into()));
    }
    let two = crate::rational::int(2);
    let mut a: Vec<Rational> = e.iter().map(|v| v * &two).collect();
    let k = k - e.iter().sum::<Rational>();
    a.push(g);
    Ok(normalize_inequality(&Row::new(a, k)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::int;

    #[test]
    fn group_sizes() {
        let s = Scenario::new(3, 2, 2).unwrap();
        assert_eq!(relabelings(s, &Prior::uniform(3)).len(), 6 * 2 * 4);
        let biased = Prior::parse("1/2,1/4,1/4", 3).unwrap();
        assert_eq!(relabelings(s, &biased).len(), 2 * 2 * 4);
    }

    #[test]
    fn outcome_flip_negates_correlator() {
        let s = Scenario::new(2, 1, 2).unwrap();
        let r = correlator_row(s, &[int(1), int(0)], int(0), int(1)).unwrap();
        let flip = Relabeling { x: vec![0, 1], y: vec![0], b: vec![vec![1, 0]] };
        let expect = correlator_row(s, &[int(-1), int(0)], int(0), int(1)).unwrap();
        assert_eq!(relabel_row(s, &r, &flip), expect);
        assert_eq!(orbit(s, &Prior::uniform(2), &[r]).len(), 4);
    }

    #[test]
    fn variant_names() {
        assert_eq!("C".parse::<Variant>().unwrap(), Variant::Stochastic);
        assert_eq!("c_det".parse::<Variant>().unwrap(), Variant::Deterministic);
        assert!("x".parse::<Variant>().is_err());
    }
}
