//! Fixtures shared by the integration suites. Everything here is written
//! from first principles so it can serve as an independent oracle.

#![allow(dead_code)]

use infocorr::classical::{correlator_row, orbit, row_at_g, system_at_g};
use infocorr::geometry::{remove_redundant, LinearSystem, Row};
use infocorr::model::{Prior, Scenario};
use infocorr::quantum::{random_state, CMatrix, C64};
use infocorr::rational::{int, ratio, Rational};
use num_traits::{One, Zero};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn s322() -> Scenario {
    Scenario::new(3, 2, 2).unwrap()
}

fn ints(v: &[i64]) -> Vec<Rational> {
    v.iter().map(|&x| int(x)).collect()
}

/// `|E_xy| <= 1` for all six correlators.
pub fn trivial_322() -> Vec<Row> {
    let s = s322();
    let mut out = Vec::new();
    for i in 0..6 {
        for sign in [1, -1] {
            let mut e = vec![0; 6];
            e[i] = sign;
            out.push(correlator_row(s, &ints(&e), int(0), int(1)).unwrap());
        }
    }
    out
}

// correlator order: E11 E12 E21 E22 E31 E32

/// `-E11 - E12 - E21 + E22 + E31 <= 6G - 1`
pub fn facet1() -> Row {
    correlator_row(s322(), &ints(&[1, 1, 1, -1, -1, 0]), int(6), int(-1)).unwrap()
}

/// `-E11 + E31 <= 6G - 2`
pub fn facet2() -> Row {
    correlator_row(s322(), &ints(&[1, 0, 0, 0, -1, 0]), int(6), int(-2)).unwrap()
}

/// `-E11 - E12 - E21 + E22 + 2 E31 <= 12G - 4`
pub fn det_facet2() -> Row {
    correlator_row(s322(), &ints(&[1, 1, 1, -1, -2, 0]), int(12), int(-4)).unwrap()
}

/// `G >= 1/3`
pub fn g_floor() -> Row {
    correlator_row(s322(), &ints(&[0; 6]), int(3), int(-1)).unwrap()
}

pub fn expected_stochastic() -> Vec<Row> {
    let mut base = trivial_322();
    base.push(facet1());
    base.push(facet2());
    orbit(s322(), &Prior::uniform(3), &base)
}

pub fn expected_deterministic() -> Vec<Row> {
    let mut base = trivial_322();
    base.push(facet1());
    base.push(facet2());
    base.push(det_facet2());
    orbit(s322(), &Prior::uniform(3), &base)
}

/// Rational in `(lo, hi)` with a small denominator.
pub fn random_between<R: Rng>(rng: &mut R, lo: &Rational, hi: &Rational) -> Rational {
    let den: i64 = rng.random_range(5..40);
    let t = ratio(rng.random_range(1..den), den);
    lo + (hi - lo) * t
}

/// Two-input prior with `q1 != q2`.
pub fn random_prior2<R: Rng>(rng: &mut R) -> Prior {
    loop {
        let q1 = random_between(rng, &ratio(1, 10), &ratio(9, 10));
        if q1 != ratio(1, 2) {
            return Prior::new(vec![q1.clone(), Rational::one() - q1]).unwrap();
        }
    }
}

/// Single-measurement polytope over `p(b|x)` (row-major in `x`) for two
/// inputs: positivity, normalization and `sum_b q_{a_b} p(b|a_b) <= G` for
/// every assignment `a` of inputs to outcomes.
pub fn nx2_polytope(prior: &Prior, g: &Rational, n_b: usize) -> LinearSystem {
    let d = 2 * n_b;
    let mut sys = LinearSystem::with_dim(d);
    for i in 0..d {
        let mut a = vec![Rational::zero(); d];
        a[i] = Rational::one();
        sys.add_ge(a, Rational::zero());
    }
    for x in 0..2 {
        let mut a = vec![Rational::zero(); d];
        for b in 0..n_b {
            a[x * n_b + b] = Rational::one();
        }
        sys.add_eq(a, -Rational::one());
    }
    for mask in 0..(1usize << n_b) {
        let mut a = vec![Rational::zero(); d];
        for b in 0..n_b {
            let x = (mask >> b) & 1;
            a[x * n_b + b] = -prior.get(x).clone();
        }
        sys.add_ge(a, g.clone());
    }
    sys
}

/// Exact rank by Gaussian elimination.
pub fn rank(mut m: Vec<Vec<Rational>>) -> usize {
    let cols = m.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = &m[i][c] / &m[r][c];
                let pivot = m[r].clone();
                for (v, pv) in m[i].iter_mut().zip(&pivot) {
                    *v -= &f * pv;
                }
            }
        }
        r += 1;
    }
    r
}

pub fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    dot / (na * nb)
}

/// Haar-random unitary from the QR decomposition of a complex Gaussian
/// matrix, with the phases of R's diagonal folded into Q.
pub fn random_unitary<R: Rng>(rng: &mut R, d: usize) -> CMatrix {
    let z = CMatrix::from_fn(d, d, |_, _| {
        C64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = z.qr();
    let (q, r) = (qr.q(), qr.r());
    let phases = CMatrix::from_diagonal(&r.diagonal().map(|v| if v.norm() > 0.0 { v / v.norm() } else { C64::new(1.0, 0.0) }));
    q * phases
}

/// Projective measurements: each setting splits the columns of a random
/// unitary into `n_b` groups, some possibly empty.
pub fn random_projective<R: Rng>(rng: &mut R, d: usize, n_y: usize, n_b: usize) -> Vec<Vec<CMatrix>> {
    (0..n_y)
        .map(|_| {
            let u = random_unitary(rng, d);
            let mut proj = vec![CMatrix::zeros(d, d); n_b];
            for k in 0..d {
                let col = u.column(k).into_owned();
                proj[rng.random_range(0..n_b)] += &col * col.adjoint();
            }
            proj
        })
        .collect()
}

/// Random ensemble of states (mixtures of two Haar pure states when `mixed`).
pub fn random_states<R: Rng>(rng: &mut R, n: usize, d: usize, mixed: bool) -> Vec<CMatrix> {
    (0..n)
        .map(|_| {
            if mixed {
                let w: f64 = rng.random_range(0.0..1.0);
                random_state(rng, d) * C64::new(w, 0.0) + random_state(rng, d) * C64::new(1.0 - w, 0.0)
            } else {
                random_state(rng, d)
            }
        })
        .collect()
}

/// Whether some relabeling of `target` survives as a facet of the slice of
/// the lifted facet list at `g`.
pub fn slice_keeps(facets: &LinearSystem, g: &Rational, target: &Row) -> bool {
    let members = orbit(s322(), &Prior::uniform(3), std::slice::from_ref(target));
    let slice = remove_redundant(&system_at_g(facets, g));
    members.iter().any(|m| slice.inequalities.contains(&row_at_g(m, g)))
}
