//! Exact rational polyhedra: double description, Fourier-Motzkin projection
//! and redundancy removal. No floating point is used anywhere in here.

mod dd;
mod fm;
mod polyhedron;
mod redundancy;
mod text;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

pub use crate::solver::exact::ExactRow as Row;
pub use dd::{cone_generators, h_to_v, v_to_h, ConeGenerators, DdOptions, VRep};
pub use fm::{fm_eliminate, fm_eliminate_index, fm_project};
pub use polyhedron::RationalPolyhedron;
pub use redundancy::{implies, is_feasible, remove_redundant};
pub use text::{parse_polyhedron, write_polyhedron};

/// `equalities: a.x + c = 0`, `inequalities: a.x + c >= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearSystem {
    pub labels: Vec<String>,
    pub equalities: Vec<Row>,
    pub inequalities: Vec<Row>,
}

impl LinearSystem {
    pub fn new(labels: Vec<String>) -> Self {
        Self { labels, equalities: Vec::new(), inequalities: Vec::new() }
    }

    /// Labels `x0, x1, ...`.
    pub fn with_dim(d: usize) -> Self {
        Self::new((0..d).map(|i| format!("x{i}")).collect())
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn add_eq(&mut self, a: Vec<Rational>, c: Rational) {
        debug_assert_eq!(a.len(), self.dim());
        self.equalities.push(Row::new(a, c));
    }

    pub fn add_ge(&mut self, a: Vec<Rational>, c: Rational) {
        debug_assert_eq!(a.len(), self.dim());
        self.inequalities.push(Row::new(a, c));
    }

    pub fn var_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownVariable(label.to_string()))
    }

    pub fn check_widths(&self) -> Result<()> {
        let d = self.dim();
        if self.equalities.iter().chain(&self.inequalities).any(|r| r.a.len() != d) {
            return Err(Error::ShapeMismatch("row width differs from the number of labels".into()));
        }
        Ok(())
    }

    pub fn contains(&self, x: &[Rational]) -> bool {
        self.equalities.iter().all(|r| r.eval(x).is_zero())
            && self.inequalities.iter().all(|r| !r.eval(x).is_negative())
    }

    /// Rows scaled to canonical form, sorted and deduplicated. Equalities are
    /// brought to reduced row echelon form and inequalities reduced against them.
    pub fn canonical(&self) -> Self {
        let equalities = echelon(&self.equalities);
        let mut inequalities: Vec<Row> = self
            .inequalities
            .iter()
            .map(|r| normalize_inequality(&reduce_against(r, &equalities)))
            .filter(|r| !is_trivially_true(r))
            .collect();
        inequalities.sort_by(row_cmp);
        inequalities.dedup();
        Self { labels: self.labels.clone(), equalities, inequalities }
    }
}

/// Scales by a positive factor so the first nonzero coefficient is `+-1`
/// (or the constant is `+-1` when all coefficients vanish).
pub fn normalize_inequality(r: &Row) -> Row {
    let pivot = r.a.iter().find(|v| !v.is_zero()).or(if r.c.is_zero() { None } else { Some(&r.c) });
    match pivot {
        Some(p) => {
            let s = rational::abs(p);
            Row::new(r.a.iter().map(|v| v / &s).collect(), &r.c / &s)
        }
        None => r.clone(),
    }
}

/// Scales so the first nonzero coefficient is exactly `1`.
pub fn normalize_equality(r: &Row) -> Row {
    let pivot = r.a.iter().find(|v| !v.is_zero()).or(if r.c.is_zero() { None } else { Some(&r.c) });
    match pivot {
        Some(p) => {
            let p = p.clone();
            Row::new(r.a.iter().map(|v| v / &p).collect(), &r.c / &p)
        }
        None => r.clone(),
    }
}

/// `0.x + c >= 0` with `c >= 0`.
pub fn is_trivially_true(r: &Row) -> bool {
    r.a.iter().all(Zero::is_zero) && !r.c.is_negative()
}

/// `0.x + c >= 0` with `c < 0`.
pub fn is_contradiction(r: &Row) -> bool {
    r.a.iter().all(Zero::is_zero) && r.c.is_negative()
}

pub(crate) fn row_cmp(a: &Row, b: &Row) -> std::cmp::Ordering {
    a.a.iter().cmp(b.a.iter()).then_with(|| a.c.cmp(&b.c))
}

/// Reduced row echelon form of the equalities, pivoting on coefficients
/// before the constant; zero rows dropped, a contradictory row kept once.
pub(crate) fn echelon(rows: &[Row]) -> Vec<Row> {
    let d = rows.first().map_or(0, |r| r.a.len());
    let mut m: Vec<Vec<Rational>> = rows
        .iter()
        .map(|r| r.a.iter().cloned().chain(std::iter::once(r.c.clone())).collect())
        .collect();
    let mut rank = 0;
    for col in 0..=d {
        let Some(p) = (rank..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(rank, p);
        let piv = m[rank][col].clone();
        for v in m[rank].iter_mut() {
            *v /= &piv;
        }
        let prow = m[rank].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != rank && !row[col].is_zero() {
                let f = row[col].clone();
                for (v, pv) in row.iter_mut().zip(&prow) {
                    *v -= &f * pv;
                }
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m.into_iter()
        .map(|mut v| {
            let c = v.pop().unwrap();
            Row::new(v, c)
        })
        .collect()
}

/// Subtracts multiples of echelon rows so pivot coefficients vanish.
pub(crate) fn reduce_against(r: &Row, echelon_rows: &[Row]) -> Row {
    let mut out = r.clone();
    for e in echelon_rows {
        let Some(p) = e.a.iter().position(|v| !v.is_zero()) else {
            continue;
        };
        if out.a[p].is_zero() {
            continue;
        }
        let f = out.a[p].clone();
        for (v, ev) in out.a.iter_mut().zip(&e.a) {
            *v -= &f * ev;
        }
        out.c -= &f * &e.c;
    }
    out
}

/// Integer multiple of a rational vector with coprime entries.
pub(crate) fn to_primitive_integers(v: &[Rational]) -> Vec<BigInt> {
    let lcm = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<BigInt> = v.iter().map(|x| x.numer() * (&lcm / x.denom())).collect();
    primitive(ints)
}

pub(crate) fn primitive(mut v: Vec<BigInt>) -> Vec<BigInt> {
    let g = v.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x));
    if !g.is_zero() && !g.is_one() {
        for x in v.iter_mut() {
            *x /= &g;
        }
    }
    v
}
