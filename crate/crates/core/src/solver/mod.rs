//! Solver-agnostic problem description. Float LPs and SDPs go to the
//! interior-point backend in [`conic`]; small LPs can be solved exactly with
//! the rational simplex in [`exact`].

mod conic;
pub mod exact;
mod text;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use conic::{solve, solve_lp, solve_sdp, SolverOptions};

/// `constant + sum_i coef_i x_i`, terms sorted by variable and merged.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct LinearForm {
    pub constant: f64,
    pub terms: Vec<(usize, f64)>,
}

impl LinearForm {
    pub fn constant(c: f64) -> Self {
        Self { constant: c, terms: Vec::new() }
    }

    pub fn var(i: usize) -> Self {
        Self { constant: 0.0, terms: vec![(i, 1.0)] }
    }

    pub fn from_terms(constant: f64, terms: impl IntoIterator<Item = (usize, f64)>) -> Self {
        let mut t: Vec<(usize, f64)> = terms.into_iter().collect();
        t.sort_by_key(|&(i, _)| i);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(t.len());
        for (i, c) in t {
            match merged.last_mut() {
                Some((j, acc)) if *j == i => *acc += c,
                _ => merged.push((i, c)),
            }
        }
        merged.retain(|&(_, c)| c != 0.0);
        Self { constant, terms: merged }
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::from_terms(self.constant * s, self.terms.iter().map(|&(i, c)| (i, c * s)))
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::from_terms(self.constant + other.constant, self.terms.iter().chain(&other.terms).copied())
    }

    pub fn minus(&self, other: &Self) -> Self {
        self.plus(&other.scaled(-1.0))
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(i, c)| c * x[i]).sum::<f64>()
    }

    pub fn max_var(&self) -> Option<usize> {
        self.terms.last().map(|&(i, _)| i)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Sense {
    Minimize,
    Maximize,
}

/// Symmetric matrix of linear forms required to be positive semidefinite.
/// `entries` holds the upper triangle row by row: `(0,0), (0,1), ..., (1,1), ...`.
#[derive(Clone, Debug, PartialEq)]
pub struct PsdBlock {
    pub name: String,
    pub size: usize,
    pub entries: Vec<LinearForm>,
}

impl PsdBlock {
    pub fn new(name: impl Into<String>, size: usize, entry: impl Fn(usize, usize) -> LinearForm) -> Self {
        let mut entries = Vec::with_capacity(size * (size + 1) / 2);
        for i in 0..size {
            for j in i..size {
                entries.push(entry(i, j));
            }
        }
        Self { name: name.into(), size, entries }
    }

    pub fn entry(&self, i: usize, j: usize) -> &LinearForm {
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        let row_start = i * (2 * self.size - i + 1) / 2;
        &self.entries[row_start + (j - i)]
    }

    /// Dense evaluation at `x`.
    pub fn eval(&self, x: &[f64]) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.size]; self.size];
        for i in 0..self.size {
            for j in i..self.size {
                let v = self.entry(i, j).eval(x);
                m[i][j] = v;
                m[j][i] = v;
            }
        }
        m
    }
}

/// `sense objective` subject to `equalities == 0`, `inequalities >= 0` and
/// every block PSD. Variables are free.
#[derive(Clone, Debug, PartialEq)]
pub struct ConicProblem {
    pub variables: Vec<String>,
    pub sense: Sense,
    pub objective: LinearForm,
    pub equalities: Vec<LinearForm>,
    pub inequalities: Vec<LinearForm>,
    pub blocks: Vec<PsdBlock>,
}

impl ConicProblem {
    pub fn new(sense: Sense) -> Self {
        Self {
            variables: Vec::new(),
            sense,
            objective: LinearForm::default(),
            equalities: Vec::new(),
            inequalities: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn add_variable(&mut self, label: impl Into<String>) -> usize {
        self.variables.push(label.into());
        self.variables.len() - 1
    }

    pub fn add_equality(&mut self, f: LinearForm) {
        self.equalities.push(f);
    }

    pub fn add_inequality(&mut self, f: LinearForm) {
        self.inequalities.push(f);
    }

    pub fn add_block(&mut self, b: PsdBlock) {
        self.blocks.push(b);
    }

    pub fn num_variables(&self) -> usize {
        self.variables.len()
    }

    /// Checks that every referenced variable exists and blocks are well sized.
    pub fn validate(&self) -> Result<()> {
        let n = self.variables.len();
        let forms = std::iter::once(&self.objective)
            .chain(&self.equalities)
            .chain(&self.inequalities)
            .chain(self.blocks.iter().flat_map(|b| &b.entries));
        for f in forms {
            if let Some(i) = f.max_var() {
                if i >= n {
                    return Err(Error::UnknownVariable(format!("variable {i} of {n}")));
                }
            }
        }
        for b in &self.blocks {
            if b.entries.len() != b.size * (b.size + 1) / 2 {
                return Err(Error::ShapeMismatch(format!("block `{}` has wrong entry count", b.name)));
            }
        }
        Ok(())
    }

    /// Canonical text rendering; identical problems give identical bytes.
    pub fn to_canonical_text(&self) -> String {
        text::render(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Optimal,
    Infeasible,
    Unbounded,
    Inaccurate,
    Failed,
}

/// Multipliers `y_eq` (free), `y_ge >= 0` and PSD `Z_k` such that the linear
/// parts of `sum y_eq f + sum y_ge g + sum <Z_k, F_k>` cancel. Their constant
/// parts then give [`Certificate::bound`], which is negative for a proof of
/// infeasibility.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub eq: Vec<f64>,
    pub ineq: Vec<f64>,
    /// Dense symmetric matrices, one per block.
    pub blocks: Vec<Vec<Vec<f64>>>,
}

impl Certificate {
    /// Constant part and the largest coefficient of the residual linear part.
    pub fn replay(&self, p: &ConicProblem) -> (f64, f64) {
        let mut lin = vec![0.0; p.num_variables()];
        let mut constant = 0.0;
        let mut add = |f: &LinearForm, w: f64| {
            constant += w * f.constant;
            for &(i, c) in &f.terms {
                lin[i] += w * c;
            }
        };
        for (f, &y) in p.equalities.iter().zip(&self.eq) {
            add(f, y);
        }
        for (f, &y) in p.inequalities.iter().zip(&self.ineq) {
            add(f, y);
        }
        for (b, z) in p.blocks.iter().zip(&self.blocks) {
            for i in 0..b.size {
                for j in i..b.size {
                    let w = if i == j { z[i][i] } else { 2.0 * z[i][j] };
                    add(b.entry(i, j), w);
                }
            }
        }
        let residual = lin.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        (constant, residual)
    }

    pub fn bound(&self, p: &ConicProblem) -> f64 {
        self.replay(p).0
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SolveResult {
    pub status: Status,
    /// Objective at the returned point, in the problem's own sense.
    pub primal: f64,
    pub dual: f64,
    pub x: Vec<f64>,
    /// Lagrange multipliers in the same layout as [`Certificate`]; for an
    /// optimal solve the objective gradient equals their combination of rows
    /// (up to sign for maximization).
    pub multipliers: Certificate,
    /// Present when `status` is `Infeasible`.
    pub certificate: Option<Certificate>,
    pub iterations: u32,
    pub solve_time: f64,
}

impl SolveResult {
    pub fn is_optimal(&self) -> bool {
        self.status == Status::Optimal
    }

    /// Optimal or inaccurate-but-solved; the value is usable with caution.
    pub fn has_value(&self) -> bool {
        matches!(self.status, Status::Optimal | Status::Inaccurate)
    }

    pub fn value(&self) -> Result<f64> {
        if self.has_value() {
            Ok(self.primal)
        } else {
            Err(Error::Solver(format!("no optimal value, status {:?}", self.status)))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn packed_entry_indexing() {
        let b = PsdBlock::new("t", 4, |i, j| LinearForm::constant((10 * i + j) as f64));
        for i in 0..4 {
            for j in 0..4 {
                let (a, c) = if i <= j { (i, j) } else { (j, i) };
                assert_eq!(b.entry(i, j).constant, (10 * a + c) as f64);
            }
        }
    }

    #[test]
    fn forms_merge_and_drop_zeros() {
        let f = LinearForm::from_terms(1.0, [(3, 1.0), (1, 2.0), (3, -1.0)]);
        assert_eq!(f.terms, vec![(1, 2.0)]);
        assert_eq!(f.eval(&[0.0, 5.0]), 11.0);
    }
}
