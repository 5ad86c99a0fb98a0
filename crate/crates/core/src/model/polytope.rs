//! Theory-independent check: `sum_b q_{x_b} p(b|x_b,y) <= G` for every `y`
//! and every assignment of an input `x_b` to each outcome.

use serde::Serialize;

use super::{Behavior, Prior};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub y: usize,
    /// `assignment[b]` is the input paired with outcome `b`.
    pub assignment: Vec<usize>,
    pub lhs: f64,
    /// `G - lhs`, negative for a violation.
    pub slack: f64,
}

/// Returns every violated `(y, assignment)` instance; an empty list means the
/// behavior satisfies the guessing constraint at `g` (up to `tol`).
pub fn check_polytope_g(p: &Behavior, prior: &Prior, g: f64, tol: f64) -> Result<Vec<Violation>> {
    let s = p.scenario();
    if prior.len() != s.n_x {
        return Err(Error::ShapeMismatch(format!("prior has {} entries, scenario {s}", prior.len())));
    }
    let q = prior.to_f64();
    let mut out = Vec::new();
    let mut assignment = vec![0usize; s.n_b];
    for y in 0..s.n_y {
        loop {
            let lhs: f64 = assignment.iter().enumerate().map(|(b, &x)| q[x] * p.get(b, x, y)).sum();
            if lhs > g + tol {
                out.push(Violation { y, assignment: assignment.clone(), lhs, slack: g - lhs });
            }
            if !next_assignment(&mut assignment, s.n_x) {
                break;
            }
        }
    }
    Ok(out)
}

/// Odometer increment over `{0..base}^len`; false once it wraps around.
pub(crate) fn next_assignment(a: &mut [usize], base: usize) -> bool {
    for v in a.iter_mut() {
        *v += 1;
        if *v < base {
            return true;
        }
        *v = 0;
    }
    false
}

/// Smallest `G` for which [`check_polytope_g`] passes.
pub fn min_polytope_g(p: &Behavior, prior: &Prior) -> f64 {
    let s = p.scenario();
    let q = prior.to_f64();
    // max over assignments decouples per outcome
    (0..s.n_y)
        .map(|y| {
            (0..s.n_b)
                .map(|b| (0..s.n_x).map(|x| q[x] * p.get(b, x, y)).fold(f64::MIN, f64::max))
                .sum::<f64>()
        })
        .fold(f64::MIN, f64::max)
}
