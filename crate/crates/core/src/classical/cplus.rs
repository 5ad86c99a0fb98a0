use std::collections::HashSet;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::mplus::{build_mplus, deterministic_mplus, MessagePolyhedron};
use super::Variant;
use crate::error::{Error, Result};
use crate::geometry::{normalize_inequality, v_to_h, DdOptions, LinearSystem, Row, VRep};
use crate::model::{next_assignment, ExactBehavior, Prior, Scenario};
use crate::rational::Rational;

/// Deterministic response `b = table[y * n_m + m]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ResponseFunction {
    pub n_m: usize,
    pub table: Vec<usize>,
}

impl ResponseFunction {
    pub fn get(&self, y: usize, m: usize) -> usize {
        self.table[y * self.n_m + m]
    }
}

#[derive(Clone, Debug)]
pub struct CPlusVertex {
    pub behavior: ExactBehavior,
    pub g: Rational,
    /// Index into the message polyhedron's vertex list.
    pub message_vertex: usize,
    pub response: ResponseFunction,
}

impl CPlusVertex {
    /// Reduced behavior coordinates followed by `G`.
    pub fn point(&self) -> Vec<Rational> {
        let mut v = self.behavior.reduced();
        v.push(self.g.clone());
        v
    }
}

/// Generators of the lifted classical set: points `(p, G)` plus the ray in `G`.
#[derive(Clone, Debug)]
pub struct CPlus {
    pub scenario: Scenario,
    pub variant: Variant,
    pub mplus: MessagePolyhedron,
    pub vertices: Vec<CPlusVertex>,
}

/// Message alphabet size that suffices for every extreme encoding.
pub fn complete_alphabet(n_x: usize) -> usize {
    1usize << n_x.saturating_sub(1)
}

/// Composes every message-polyhedron vertex with every deterministic response
/// on the messages it uses, deduplicating by `(p, G)`.
pub fn cplus_vertices(mp: &MessagePolyhedron, s: Scenario) -> Result<CPlus> {
    if mp.n_x() != s.n_x {
        return Err(Error::ShapeMismatch(format!("prior has {} inputs, scenario {}", mp.n_x(), s.n_x)));
    }
    let mut seen = HashSet::new();
    let mut vertices = Vec::new();
    for (k, mv) in mp.vertices().into_iter().enumerate() {
        let used = mv.used_messages();
        let mut digits = vec![0usize; used.len() * s.n_y];
        loop {
            let mut table = vec![0usize; s.n_y * mp.n_m];
            for (i, &m) in used.iter().enumerate() {
                for y in 0..s.n_y {
                    table[y * mp.n_m + m] = digits[y * used.len() + i];
                }
            }
            let response = ResponseFunction { n_m: mp.n_m, table };
            let behavior = ExactBehavior::from_fn(s, |b, x, y| {
                used.iter().filter(|&&m| response.get(y, m) == b).map(|&m| mv.p[m][x].clone()).sum()
            });
            if seen.insert((behavior.reduced(), mv.g.clone())) {
                vertices.push(CPlusVertex { behavior, g: mv.g.clone(), message_vertex: k, response });
            }
            if !next_assignment(&mut digits, s.n_b) {
                break;
            }
        }
    }
    Ok(CPlus { scenario: s, variant: if mp.deterministic { Variant::Deterministic } else { Variant::Stochastic }, mplus: mp.clone(), vertices })
}

/// Message polyhedron for the variant followed by composition.
pub fn cplus(s: Scenario, prior: &Prior, variant: Variant, opts: &DdOptions) -> Result<CPlus> {
    let mp = match variant {
        Variant::Stochastic => build_mplus(prior, complete_alphabet(s.n_x), opts)?,
        Variant::Deterministic => deterministic_mplus(prior, opts)?,
    };
    cplus_vertices(&mp, s)
}

/// Labels `p(b|x,y)` (one-based, last outcome omitted) followed by `G`.
pub fn reduced_labels(s: Scenario) -> Vec<String> {
    let mut l = vec![String::new(); s.reduced_len()];
    for x in 0..s.n_x {
        for y in 0..s.n_y {
            for b in 0..s.n_b - 1 {
                l[s.reduced_index(b, x, y)] = format!("p({}|{},{})", b + 1, x + 1, y + 1);
            }
        }
    }
    l.push("G".into());
    l
}

/// Irredundant facets of the lifted set over reduced coordinates and `G`.
pub fn cplus_facets(cp: &CPlus, opts: &DdOptions) -> Result<LinearSystem> {
    let d = cp.scenario.reduced_len() + 1;
    let mut ray = vec![Rational::zero(); d];
    ray[d - 1] = Rational::one();
    let v = VRep { vertices: cp.vertices.iter().map(CPlusVertex::point).collect(), rays: vec![ray], lines: vec![] };
    Ok(v_to_h(reduced_labels(cp.scenario), &v, opts)?.canonical())
}

/// Restricts a lifted row to a fixed `G`, over reduced coordinates only.
pub fn row_at_g(r: &Row, g: &Rational) -> Row {
    let d = r.a.len() - 1;
    normalize_inequality(&Row::new(r.a[..d].to_vec(), &r.c + &r.a[d] * g))
}

/// The lifted system sliced at `G`.
pub fn system_at_g(sys: &LinearSystem, g: &Rational) -> LinearSystem {
    let d = sys.dim() - 1;
    let mut out = LinearSystem::new(sys.labels[..d].to_vec());
    out.equalities = sys.equalities.iter().map(|r| {
        Row::new(r.a[..d].to_vec(), &r.c + &r.a[d] * g)
    }).collect();
    out.inequalities = sys.inequalities.iter().map(|r| row_at_g(r, g)).collect();
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn alphabet_sizes() {
        assert_eq!(complete_alphabet(1), 1);
        assert_eq!(complete_alphabet(3), 4);
        assert_eq!(complete_alphabet(4), 8);
    }

    #[test]
    fn lifted_212_has_trivial_and_guessing_facets() {
        let s = Scenario::new(2, 1, 2).unwrap();
        let cp = cplus(s, &Prior::uniform(2), Variant::Stochastic, &DdOptions::default()).unwrap();
        for v in &cp.vertices {
            v.behavior.validate_exact().unwrap();
        }
        let f = cplus_facets(&cp, &DdOptions::default()).unwrap();
        // the two-point behavior with distinct rows requires G = 1
        let perfect = vec![int(1), int(0), int(1)];
        let mut below = perfect.clone();
        below[2] = ratio(99, 100);
        assert!(f.contains(&perfect));
        assert!(!f.contains(&below));
        let mixed = vec![ratio(1, 2), ratio(1, 2), ratio(1, 2)];
        assert!(f.contains(&mixed));
    }

    #[test]
    fn slicing_substitutes_g() {
        let r = Row::new(vec![int(1), int(-2)], int(1));
        assert_eq!(row_at_g(&r, &ratio(1, 2)), Row::new(vec![int(1)], int(0)));
    }
}
