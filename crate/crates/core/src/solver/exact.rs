//! Dense two-phase simplex over exact rationals with Bland's rule. Meant for
//! the small systems met in facet work (tens of variables, hundreds of rows).

use num_traits::{One, Signed, Zero};

use super::Sense;
use crate::rational::Rational;

/// Row `a . x + c`, constrained to be `== 0` or `>= 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactRow {
    pub a: Vec<Rational>,
    pub c: Rational,
}

impl ExactRow {
    pub fn new(a: Vec<Rational>, c: Rational) -> Self {
        Self { a, c }
    }

    pub fn eval(&self, x: &[Rational]) -> Rational {
        &self.c + self.a.iter().zip(x).map(|(a, x)| a * x).sum::<Rational>()
    }
}

/// `sense objective . x` subject to the rows. Variables are free unless
/// flagged in `nonneg` (an empty `nonneg` means all free).
#[derive(Clone, Debug)]
pub struct ExactLp {
    pub n: usize,
    pub sense: Sense,
    pub objective: Vec<Rational>,
    pub equalities: Vec<ExactRow>,
    pub inequalities: Vec<ExactRow>,
    pub nonneg: Vec<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactOutcome {
    /// `eq` and `ineq` multipliers satisfy `objective = sum y_r a_r` (for
    /// minimization; negated objective for maximization) with `ineq >= 0`;
    /// on nonnegative variables the equality relaxes to `>=`.
    Optimal { x: Vec<Rational>, value: Rational, eq: Vec<Rational>, ineq: Vec<Rational> },
    /// Farkas multipliers: `sum y_r a_r = 0` (`<= 0` on nonnegative
    /// variables), `ineq >= 0` and `sum y_r c_r < 0`.
    Infeasible { eq: Vec<Rational>, ineq: Vec<Rational> },
    Unbounded,
}

impl ExactLp {
    pub fn feasibility(n: usize, equalities: Vec<ExactRow>, inequalities: Vec<ExactRow>) -> Self {
        Self { n, sense: Sense::Minimize, objective: vec![Rational::zero(); n], equalities, inequalities, nonneg: Vec::new() }
    }

    fn is_nonneg(&self, j: usize) -> bool {
        self.nonneg.get(j).copied().unwrap_or(false)
    }

    pub fn solve(&self) -> ExactOutcome {
        Tableau::build(self).run(self)
    }
}

struct Tableau {
    // rows of [A | b]; last row holds reduced costs and minus the objective
    t: Vec<Vec<Rational>>,
    basis: Vec<usize>,
    m: usize,
    n_struct: usize,
    signs: Vec<bool>,
    // column of x_j, and of its negative part when x_j is free
    pos: Vec<usize>,
    neg: Vec<Option<usize>>,
}

impl Tableau {
    fn build(lp: &ExactLp) -> Self {
        let n = lp.n;
        let ne = lp.equalities.len();
        let ni = lp.inequalities.len();
        let m = ne + ni;
        // columns: x parts, slack (ni), artificial (m), rhs
        let mut pos = Vec::with_capacity(n);
        let mut neg = Vec::with_capacity(n);
        let mut next = 0;
        for j in 0..n {
            pos.push(next);
            next += 1;
            if lp.is_nonneg(j) {
                neg.push(None);
            } else {
                neg.push(Some(next));
                next += 1;
            }
        }
        let n_slack0 = next;
        let n_struct = n_slack0 + ni;
        let width = n_struct + m + 1;
        let mut t = Vec::with_capacity(m + 1);
        let mut signs = Vec::with_capacity(m);
        for (r, row) in lp.equalities.iter().chain(&lp.inequalities).enumerate() {
            let mut line = vec![Rational::zero(); width];
            for j in 0..n {
                line[pos[j]] = row.a[j].clone();
                if let Some(k) = neg[j] {
                    line[k] = -row.a[j].clone();
                }
            }
            if r >= ne {
                line[n_slack0 + (r - ne)] = -Rational::one();
            }
            line[width - 1] = -row.c.clone();
            let neg = line[width - 1].is_negative();
            if neg {
                for v in line.iter_mut() {
                    *v = -v.clone();
                }
            }
            line[n_struct + r] = Rational::one();
            signs.push(neg);
            t.push(line);
        }
        let mut obj = vec![Rational::zero(); width];
        for line in &t {
            for j in 0..n_struct {
                obj[j] -= &line[j];
            }
            obj[width - 1] -= &line[width - 1];
        }
        t.push(obj);
        Self { t, basis: (0..m).map(|r| n_struct + r).collect(), m, n_struct, signs, pos, neg }
    }

    fn width(&self) -> usize {
        self.t[0].len()
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c].clone();
        for v in self.t[r].iter_mut() {
            *v /= &p;
        }
        let pivot_row = self.t[r].clone();
        for (i, line) in self.t.iter_mut().enumerate() {
            if i == r || line[c].is_zero() {
                continue;
            }
            let f = line[c].clone();
            for (v, pv) in line.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &f * pv;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Bland iterations over columns `< allowed`; false if unbounded.
    fn iterate(&mut self, allowed: usize) -> bool {
        let w = self.width();
        loop {
            let obj = &self.t[self.m];
            let Some(c) = (0..allowed).find(|&j| obj[j].is_negative()) else {
                return true;
            };
            let mut best: Option<(usize, Rational)> = None;
            for r in 0..self.m {
                let a = &self.t[r][c];
                if a.is_positive() {
                    let ratio = &self.t[r][w - 1] / a;
                    let better = match &best {
                        None => true,
                        Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                    };
                    if better {
                        best = Some((r, ratio));
                    }
                }
            }
            match best {
                Some((r, _)) => self.pivot(r, c),
                None => return false,
            }
        }
    }

    /// `y_r` in original row orientation read off the artificial columns,
    /// given the cost of each artificial in the current objective.
    fn row_duals(&self, art_cost: &Rational) -> Vec<Rational> {
        (0..self.m)
            .map(|r| {
                let y = art_cost - &self.t[self.m][self.n_struct + r];
                if self.signs[r] {
                    -y
                } else {
                    y
                }
            })
            .collect()
    }

    fn run(mut self, lp: &ExactLp) -> ExactOutcome {
        let n = lp.n;
        let ne = lp.equalities.len();
        let w = self.width();
        self.iterate(self.n_struct);
        // phase-one objective value is minus the last entry
        if !self.t[self.m][w - 1].is_zero() {
            let y = self.row_duals(&Rational::one());
            // y . b > 0 with b = -c, so y . c < 0
            return ExactOutcome::Infeasible { eq: y[..ne].to_vec(), ineq: y[ne..].to_vec() };
        }
        // drive zero-level artificials out where possible
        for r in 0..self.m {
            if self.basis[r] >= self.n_struct {
                if let Some(c) = (0..self.n_struct).find(|&c| !self.t[r][c].is_zero()) {
                    self.pivot(r, c);
                }
            }
        }
        let sign = match lp.sense {
            Sense::Minimize => Rational::one(),
            Sense::Maximize => -Rational::one(),
        };
        let mut cost = vec![Rational::zero(); w];
        for j in 0..n {
            let c = &sign * &lp.objective[j];
            if let Some(k) = self.neg[j] {
                cost[k] = -&c;
            }
            cost[self.pos[j]] = c;
        }
        let mut obj = cost.clone();
        for r in 0..self.m {
            let cb = cost[self.basis[r]].clone();
            if !cb.is_zero() {
                for (o, v) in obj.iter_mut().zip(&self.t[r]) {
                    *o -= &cb * v;
                }
            }
        }
        self.t[self.m] = obj;
        if !self.iterate(self.n_struct) {
            return ExactOutcome::Unbounded;
        }
        let mut std_x = vec![Rational::zero(); self.n_struct + self.m];
        for r in 0..self.m {
            std_x[self.basis[r]] = self.t[r][w - 1].clone();
        }
        let x: Vec<Rational> = (0..n)
            .map(|j| match self.neg[j] {
                Some(k) => &std_x[self.pos[j]] - &std_x[k],
                None => std_x[self.pos[j]].clone(),
            })
            .collect();
        let value: Rational = lp.objective.iter().zip(&x).map(|(c, x)| c * x).sum();
        let y = self.row_duals(&Rational::zero());
        // the tableau duals are those of the minimized objective sign * c
        ExactOutcome::Optimal { x, value, eq: y[..ne].to_vec(), ineq: y[ne..].to_vec() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn row(a: &[i64], c: i64) -> ExactRow {
        ExactRow::new(a.iter().map(|&v| int(v)).collect(), int(c))
    }

    #[test]
    fn max_x_below_one() {
        let lp = ExactLp {
            n: 1,
            sense: Sense::Maximize,
            objective: vec![int(1)],
            equalities: vec![],
            inequalities: vec![row(&[-1], 1)],
            nonneg: vec![],
        };
        match lp.solve() {
            ExactOutcome::Optimal { value, ineq, .. } => {
                assert_eq!(value, int(1));
                assert_eq!(ineq, vec![int(1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn farkas_certificate() {
        let lp = ExactLp::feasibility(1, vec![], vec![row(&[1], -1), row(&[-1], 0)]);
        match lp.solve() {
            ExactOutcome::Infeasible { ineq, .. } => {
                assert!(ineq.iter().all(|y| !y.is_negative()));
                let lin: Rational = ineq[0].clone() - ineq[1].clone();
                assert!(lin.is_zero());
                let c: Rational = -ineq[0].clone();
                assert!(c.is_negative());
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn equality_and_unbounded() {
        // min x + y s.t. x - y = 1/2, y >= -1
        let lp = ExactLp {
            n: 2,
            sense: Sense::Minimize,
            objective: vec![int(1), int(1)],
            equalities: vec![ExactRow::new(vec![int(1), int(-1)], ratio(-1, 2))],
            inequalities: vec![row(&[0, 1], 1)],
            nonneg: vec![],
        };
        match lp.solve() {
            ExactOutcome::Optimal { x, value, eq, ineq } => {
                assert_eq!(value, ratio(-3, 2));
                assert_eq!(x, vec![ratio(-1, 2), int(-1)]);
                // gradient (1,1) = eq * (1,-1) + ineq * (0,1)
                assert_eq!(eq[0], int(1));
                assert_eq!(ineq[0], int(2));
            }
            other => panic!("{other:?}"),
        }
        let lp = ExactLp {
            n: 1,
            sense: Sense::Maximize,
            objective: vec![int(1)],
            equalities: vec![],
            inequalities: vec![row(&[1], 0)],
            nonneg: vec![],
        };
        assert_eq!(lp.solve(), ExactOutcome::Unbounded);
    }

    #[test]
    fn nonnegative_variables() {
        // min x - y s.t. x + y = 1, x, y >= 0  ->  -1 at (0, 1)
        let lp = ExactLp {
            n: 2,
            sense: Sense::Minimize,
            objective: vec![int(1), int(-1)],
            equalities: vec![row(&[1, 1], -1)],
            inequalities: vec![],
            nonneg: vec![true, true],
        };
        match lp.solve() {
            ExactOutcome::Optimal { x, value, .. } => {
                assert_eq!(value, int(-1));
                assert_eq!(x, vec![int(0), int(1)]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn degenerate_redundant_rows() {
        // duplicated equality rows leave an artificial basic at zero
        let lp = ExactLp {
            n: 2,
            sense: Sense::Maximize,
            objective: vec![int(1), int(0)],
            equalities: vec![row(&[1, 1], -1), row(&[2, 2], -2)],
            inequalities: vec![row(&[1, 0], 0), row(&[0, 1], 0)],
            nonneg: vec![],
        };
        match lp.solve() {
            ExactOutcome::Optimal { value, .. } => assert_eq!(value, int(1)),
            other => panic!("{other:?}"),
        }
    }
}
