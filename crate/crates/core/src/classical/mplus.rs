use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::geometry::{DdOptions, LinearSystem, RationalPolyhedron, VRep};
use crate::model::{next_assignment, Prior};
use crate::rational::Rational;

/// Polyhedron of pairs `(p(m|x), G)` compatible with the guessing bound.
/// Coordinates are `p(m|x)` at `m * n_x + x`, followed by `G`.
#[derive(Clone, Debug)]
pub struct MessagePolyhedron {
    pub prior: Prior,
    pub n_m: usize,
    pub deterministic: bool,
    pub poly: RationalPolyhedron,
}

/// A vertex split into its message table `p[m][x]` and `G`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MessageVertex {
    pub p: Vec<Vec<Rational>>,
    pub g: Rational,
}

impl MessageVertex {
    /// Messages sent with nonzero probability for some input.
    pub fn used_messages(&self) -> Vec<usize> {
        (0..self.p.len()).filter(|&m| self.p[m].iter().any(|v| !v.is_zero())).collect()
    }
}

fn labels(n_x: usize, n_m: usize) -> Vec<String> {
    let mut l: Vec<String> = (0..n_m)
        .flat_map(|m| (0..n_x).map(move |x| format!("p({}|{})", m + 1, x + 1)))
        .collect();
    l.push("G".into());
    l
}

/// `sum_m max_x q_x p(m|x)`.
pub fn message_guessing(prior: &Prior, p: &[Vec<Rational>]) -> Rational {
    p.iter()
        .map(|row| row.iter().enumerate().map(|(x, v)| prior.get(x) * v).max().unwrap_or_else(Rational::zero))
        .sum()
}

impl MessagePolyhedron {
    pub fn n_x(&self) -> usize {
        self.prior.len()
    }

    pub fn vertices(&self) -> Vec<MessageVertex> {
        let (n_x, n_m) = (self.n_x(), self.n_m);
        self.poly
            .v
            .vertices
            .iter()
            .map(|v| MessageVertex {
                p: (0..n_m).map(|m| (0..n_x).map(|x| v[m * n_x + x].clone()).collect()).collect(),
                g: v[n_m * n_x].clone(),
            })
            .collect()
    }
}

/// H-representation of the message polyhedron: positivity, normalization and
/// one inequality `G - sum_m q_{x_m} p(m|x_m) >= 0` per assignment of an
/// input to every message.
pub fn mplus_system(prior: &Prior, n_m: usize) -> LinearSystem {
    let n_x = prior.len();
    let d = n_m * n_x + 1;
    let mut sys = LinearSystem::new(labels(n_x, n_m));
    let unit = |i: usize, v: Rational| {
        let mut a = vec![Rational::zero(); d];
        a[i] = v;
        a
    };
    for i in 0..n_m * n_x {
        sys.add_ge(unit(i, Rational::one()), Rational::zero());
    }
    for x in 0..n_x {
        let mut a = vec![Rational::zero(); d];
        for m in 0..n_m {
            a[m * n_x + x] = Rational::one();
        }
        sys.add_eq(a, -Rational::one());
    }
    let mut assign = vec![0usize; n_m];
    loop {
        let mut a = unit(n_m * n_x, Rational::one());
        for (m, &x) in assign.iter().enumerate() {
            a[m * n_x + x] = -prior.get(x).clone();
        }
        sys.add_ge(a, Rational::zero());
        if !next_assignment(&mut assign, n_x) {
            break;
        }
    }
    sys
}

/// Builds the message polyhedron and enumerates its vertices.
pub fn build_mplus(prior: &Prior, n_m: usize, opts: &DdOptions) -> Result<MessagePolyhedron> {
    if n_m == 0 {
        return Err(Error::OutOfRange("message alphabet must be nonempty".into()));
    }
    let n_x = prior.len();
    if (n_x as f64).powi(n_m as i32) > 1e6 {
        return Err(Error::EnumerationCap(format!("{n_x}^{n_m} guessing inequalities")));
    }
    let poly = RationalPolyhedron::from_h(&mplus_system(prior, n_m), opts)?;
    Ok(MessagePolyhedron { prior: prior.clone(), n_m, deterministic: false, poly })
}

/// Set partitions of `0..n` as block labels, first appearance order.
pub fn set_partitions(n: usize) -> Vec<Vec<usize>> {
    fn rec(i: usize, n: usize, cur: &mut Vec<usize>, blocks: usize, out: &mut Vec<Vec<usize>>) {
        if i == n {
            out.push(cur.clone());
            return;
        }
        for b in 0..=blocks {
            cur.push(b);
            rec(i + 1, n, cur, blocks.max(b + 1), out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(0, n, &mut Vec::with_capacity(n), 0, &mut out);
    out
}

/// Deterministic encodings `x -> m` with `n_m = n_x` canonical labels; one
/// vertex per set partition of the inputs, plus the ray `(0, 1)`.
pub fn deterministic_mplus(prior: &Prior, opts: &DdOptions) -> Result<MessagePolyhedron> {
    let n_x = prior.len();
    let n_m = n_x;
    let mut vertices = Vec::new();
    for part in set_partitions(n_x) {
        let mut v = vec![Rational::zero(); n_m * n_x + 1];
        for (x, &m) in part.iter().enumerate() {
            v[m * n_x + x] = Rational::one();
        }
        let p: Vec<Vec<Rational>> = (0..n_m).map(|m| (0..n_x).map(|x| v[m * n_x + x].clone()).collect()).collect();
        v[n_m * n_x] = message_guessing(prior, &p);
        vertices.push(v);
    }
    let mut ray = vec![Rational::zero(); n_m * n_x + 1];
    ray[n_m * n_x] = Rational::one();
    let poly = RationalPolyhedron::from_v(labels(n_x, n_m), VRep { vertices, rays: vec![ray], lines: vec![] }, opts)?;
    Ok(MessagePolyhedron { prior: prior.clone(), n_m, deterministic: true, poly })
}
