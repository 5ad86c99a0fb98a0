use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::filter::{level_basis, Filter};
use super::word::{add_term, canonicalize, trace_class, Mode, Poly, Sym, Word};
use crate::error::{Error, Result};
use crate::model::{Prior, Scenario, Witness};
use crate::quantum::CMatrix;
use crate::solver::{ConicProblem, LinearForm, PsdBlock, Sense, SolverOptions};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HierarchyConfig {
    pub mode: Mode,
    /// Relaxation level `k`; ignored for a matrix whose filter is given.
    pub level: usize,
    pub filter: Option<Filter>,
    pub localizer_filter: Option<Filter>,
    pub solver: SolverOptions,
}

impl HierarchyConfig {
    pub fn new(mode: Mode, level: usize) -> Self {
        Self { mode, level, filter: None, localizer_filter: None, solver: SolverOptions::default() }
    }

    /// The level-three monomial subsets shipped for the (3,2,2) scenario.
    pub fn fixed_322(mode: Mode) -> Self {
        Self {
            filter: Some(Filter::preset("fixed-322").unwrap()),
            localizer_filter: Some(Filter::preset("fixed-322-localizer").unwrap()),
            ..Self::new(mode, 3)
        }
    }

    /// Resolves a CLI-style filter name: `fixed-322` selects both presets,
    /// any other preset or inline list is used for the moment matrix only.
    pub fn with_filter(mut self, spec: &str) -> Result<Self> {
        if spec == "fixed-322" {
            let base = Self::fixed_322(self.mode);
            self.filter = base.filter;
            self.localizer_filter = base.localizer_filter;
            self.level = 3;
        } else {
            let f = Filter::resolve(spec)?;
            self.level = self.level.max(f.max_degree());
            self.filter = Some(f);
        }
        Ok(self)
    }

    pub fn filter_name(&self) -> String {
        match (&self.filter, &self.localizer_filter) {
            (None, None) => format!("level-{}", self.level),
            (Some(f), None) => f.name.clone(),
            (None, Some(l)) => format!("level-{}+{}", self.level, l.name),
            (Some(f), Some(l)) => format!("{}+{}", f.name, l.name),
        }
    }
}

/// One PSD constraint: the nominal monomial list and the rows kept after
/// dropping monomials equal to an earlier one (their rows coincide).
#[derive(Clone, Debug)]
pub struct MomentBlock {
    pub name: String,
    pub nominal: Vec<Word>,
    pub rows: Vec<Word>,
    pub block: PsdBlock,
}

/// One relaxation instance. Variables are the trace classes `L(w)`, one per
/// class representative; `L(1)` is free since the dimension is not fixed.
#[derive(Clone, Debug)]
pub struct MomentProblem {
    pub scenario: Scenario,
    pub mode: Mode,
    pub level: usize,
    pub filter_name: String,
    pub prior: Vec<f64>,
    pub g: f64,
    pub classes: Vec<Word>,
    pub blocks: Vec<MomentBlock>,
    pub state_traces: Vec<LinearForm>,
    pub sigma_trace: LinearForm,
    pub objective: LinearForm,
    /// `(witness form, target, tolerance)`: `|W - target| <= tolerance`.
    pub pin: Option<(LinearForm, f64, f64)>,
    pub witness: LinearForm,
}

struct Labels {
    mode: Mode,
    scenario: Scenario,
    index: HashMap<Word, usize>,
    classes: Vec<Word>,
}

impl Labels {
    fn class_of(&mut self, w: &Word) -> Option<usize> {
        let rep = trace_class(w, self.mode)?;
        if let Some(&i) = self.index.get(&rep) {
            return Some(i);
        }
        let i = self.classes.len();
        self.index.insert(rep.clone(), i);
        self.classes.push(rep);
        Some(i)
    }

    fn form(&mut self, p: &Poly) -> LinearForm {
        let terms: Vec<(usize, f64)> = p.iter().filter_map(|(w, &c)| self.class_of(w).map(|i| (i, c))).collect();
        LinearForm::from_terms(0.0, terms)
    }

    fn of_word(&mut self, w: &Word) -> LinearForm {
        let p = canonicalize(w, self.scenario, self.mode);
        self.form(&p)
    }

    /// `L(u^dagger p v)`.
    fn entry(&mut self, u: &Word, p: &Poly, v: &Word) -> LinearForm {
        let ua = u.adjoint();
        let mut total = Poly::new();
        for (w, &c) in p {
            for (t, d) in canonicalize(&Word::concat(&[&ua, w, v]), self.scenario, self.mode) {
                add_term(&mut total, t, c * d);
            }
        }
        self.form(&total)
    }

    fn block(&mut self, name: String, nominal: Vec<Word>, p: &Poly) -> MomentBlock {
        let mut seen = BTreeSet::new();
        let rows: Vec<Word> = nominal
            .iter()
            .filter(|u| {
                let c = canonicalize(u, self.scenario, self.mode);
                !c.is_empty() && seen.insert(c.into_iter().map(|(w, v)| (w, v.to_bits())).collect::<Vec<_>>())
            })
            .cloned()
            .collect();
        let n = rows.len();
        let mut entries = vec![LinearForm::default(); n * n];
        for i in 0..n {
            for j in i..n {
                entries[i * n + j] = self.entry(&rows[i], p, &rows[j]);
            }
        }
        let block = PsdBlock::new(name.clone(), n, |i, j| entries[i * n + j].clone());
        MomentBlock { name, nominal, rows, block }
    }
}

fn word(syms: &[Sym]) -> Word {
    Word(syms.to_vec())
}

/// Moment matrix over the filter (or all words up to the level), localizing
/// matrices over the localizer filter (or all words up to level minus one):
/// `rho_x - rho_x^2` (not for pure states), `sigma - q_x rho_x` and
/// `G - sigma`.
pub fn build_moment_problem(w: &Witness, prior: &Prior, g: f64, cfg: &HierarchyConfig) -> Result<MomentProblem> {
    let s = w.scenario();
    if prior.len() != s.n_x {
        return Err(Error::ShapeMismatch(format!("prior has {} entries, scenario needs {}", prior.len(), s.n_x)));
    }
    if cfg.level == 0 && cfg.filter.is_none() {
        return Err(Error::OutOfRange("relaxation level must be at least 1".into()));
    }
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::OutOfRange(format!("G = {g} is not a probability")));
    }
    let q = prior.to_f64();
    let mode = cfg.mode;
    let basis = match &cfg.filter {
        Some(f) => f.expand(s, mode)?,
        None => level_basis(s, cfg.level, mode),
    };
    let sub = match &cfg.localizer_filter {
        Some(f) => f.expand(s, mode)?,
        None => level_basis(s, cfg.level.saturating_sub(1), mode),
    };
    if let Some(f) = &cfg.filter {
        if f.max_degree() > cfg.level {
            return Err(Error::InvalidFilter(format!("filter {} exceeds level {}", f.name, cfg.level)));
        }
    }

    let mut labels = Labels { mode, scenario: s, index: HashMap::new(), classes: Vec::new() };
    labels.class_of(&Word::identity());
    let one = Poly::from([(Word::identity(), 1.0)]);
    let mut blocks = vec![labels.block("moment".into(), basis, &one)];
    if mode != Mode::Pure {
        for x in 0..s.n_x {
            let p = Poly::from([(word(&[Sym::Rho(x)]), 1.0), (word(&[Sym::Rho(x), Sym::Rho(x)]), -1.0)]);
            blocks.push(labels.block(format!("r{}-r{}^2", x + 1, x + 1), sub.clone(), &p));
        }
    }
    for x in 0..s.n_x {
        let mut p = Poly::from([(word(&[Sym::Sigma]), 1.0)]);
        add_term(&mut p, word(&[Sym::Rho(x)]), -q[x]);
        blocks.push(labels.block(format!("s-q{}r{}", x + 1, x + 1), sub.clone(), &p));
    }
    let mut p = Poly::from([(Word::identity(), g)]);
    add_term(&mut p, word(&[Sym::Sigma]), -1.0);
    blocks.push(labels.block("G-s".into(), sub, &p));

    let state_traces = (0..s.n_x).map(|x| labels.of_word(&word(&[Sym::Rho(x)]))).collect();
    let sigma_trace = labels.of_word(&word(&[Sym::Sigma]));
    let c = w.coefficients_f64();
    let mut witness = LinearForm::default();
    for x in 0..s.n_x {
        for y in 0..s.n_y {
            for b in 0..s.n_b {
                let cf = c[s.index(b, x, y)];
                if cf != 0.0 {
                    witness = witness.plus(&labels.of_word(&word(&[Sym::Rho(x), Sym::M { y, b }])).scaled(cf));
                }
            }
        }
    }
    Ok(MomentProblem {
        scenario: s,
        mode,
        level: cfg.level,
        filter_name: cfg.filter_name(),
        prior: q,
        g,
        classes: labels.classes,
        blocks,
        state_traces,
        sigma_trace,
        objective: witness.clone(),
        pin: None,
        witness,
    })
}

impl MomentProblem {
    /// `L` of a word, expanded and reduced; words whose classes do not
    /// appear in any block are rejected.
    pub fn moment(&self, w: &Word) -> Result<LinearForm> {
        let mut labels = Labels {
            mode: self.mode,
            scenario: self.scenario,
            index: self.classes.iter().cloned().enumerate().map(|(i, c)| (c, i)).collect(),
            classes: self.classes.clone(),
        };
        let f = labels.of_word(w);
        if labels.classes.len() != self.classes.len() {
            return Err(Error::InvalidFilter(format!("`{w}` is not covered by the relaxation")));
        }
        Ok(f)
    }

    /// `L(w) = Re Tr[w]` for explicit operators: states, `sigma` and
    /// projective measurements `projectors[y][b]`. Any strategy satisfying
    /// the algebra of the mode gives a feasible point this way.
    pub fn trace_moments(&self, states: &[CMatrix], sigma: &CMatrix, projectors: &[Vec<CMatrix>]) -> Vec<f64> {
        let d = sigma.nrows();
        self.classes
            .iter()
            .map(|w| {
                let mut m = CMatrix::identity(d, d);
                for sym in &w.0 {
                    let op = match *sym {
                        Sym::Rho(x) => &states[x],
                        Sym::Sigma => sigma,
                        Sym::M { y, b } => &projectors[y][b],
                    };
                    m = &m * op;
                }
                m.trace().re
            })
            .collect()
    }

    /// Smallest eigenvalue of every block at the point `x`.
    pub fn block_min_eigenvalues(&self, x: &[f64]) -> Vec<f64> {
        self.blocks
            .iter()
            .map(|b| {
                let n = b.rows.len();
                if n == 0 {
                    return 0.0;
                }
                let v = b.block.eval(x);
                let m = nalgebra::DMatrix::from_fn(n, n, |i, j| v[i][j]);
                m.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    pub fn moment_size(&self) -> usize {
        self.blocks[0].nominal.len()
    }

    pub fn to_conic(&self) -> ConicProblem {
        let mut p = ConicProblem::new(Sense::Maximize);
        for c in &self.classes {
            p.add_variable(format!("L({c})"));
        }
        for t in &self.state_traces {
            p.add_equality(t.minus(&LinearForm::constant(1.0)));
        }
        p.add_inequality(LinearForm::constant(self.g).minus(&self.sigma_trace));
        if let Some((f, target, tol)) = &self.pin {
            p.add_inequality(f.minus(&LinearForm::constant(target - tol)));
            p.add_inequality(LinearForm::constant(target + tol).minus(f));
        }
        for b in &self.blocks {
            p.add_block(b.block.clone());
        }
        p.objective = self.objective.clone();
        p
    }

    /// Deterministic text listing of monomials, classes and the final
    /// program; equal problems give equal text.
    pub fn to_canonical_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "moment-problem");
        let _ = writeln!(out, "scenario {}", self.scenario);
        let _ = writeln!(out, "mode {}", self.mode);
        let _ = writeln!(out, "level {}", self.level);
        let _ = writeln!(out, "filter {}", self.filter_name);
        let _ = writeln!(out, "prior {:?}", self.prior);
        let _ = writeln!(out, "G {:?}", self.g);
        let _ = writeln!(out, "classes {}", self.classes.len());
        for (i, c) in self.classes.iter().enumerate() {
            let _ = writeln!(out, "  {i} {c}");
        }
        for b in &self.blocks {
            let _ = writeln!(out, "block {} nominal {} rows {}", b.name, b.nominal.len(), b.rows.len());
            for r in &b.rows {
                let _ = writeln!(out, "  {r}");
            }
        }
        out.push_str(&self.to_conic().to_canonical_text());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn fixed_filter_blocks() {
        let prior = Prior::new(vec![ratio(2, 5), ratio(2, 5), ratio(1, 5)]).unwrap();
        let mp = build_moment_problem(&Witness::a322(), &prior, 0.8, &HierarchyConfig::fixed_322(Mode::Pure)).unwrap();
        assert_eq!(mp.moment_size(), 98);
        // pure states: three sigma localizers and the G localizer
        assert_eq!(mp.blocks.len(), 5);
        assert!(mp.blocks[1..].iter().all(|b| b.nominal.len() == 25));
        let general = build_moment_problem(&Witness::a322(), &prior, 0.8, &HierarchyConfig::fixed_322(Mode::General)).unwrap();
        assert_eq!(general.blocks.len(), 8);
        assert!(general.blocks[0].rows.len() < 98);
    }

    #[test]
    fn identity_row_and_symmetry() {
        let mp = build_moment_problem(&Witness::a322(), &Prior::uniform(3), 0.7, &HierarchyConfig::new(Mode::General, 2)).unwrap();
        let m = &mp.blocks[0];
        assert_eq!(m.rows[0], Word::identity());
        assert_eq!(*m.block.entry(0, 0), LinearForm::var(0));
        // L(r1 s) and L(s r1) share a variable
        let a = mp.moment(&Word::parse("r1 s").unwrap()).unwrap();
        let b = mp.moment(&Word::parse("s r1").unwrap()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn text_is_deterministic() {
        let cfg = HierarchyConfig::new(Mode::Pure, 2);
        let a = build_moment_problem(&Witness::a322(), &Prior::uniform(3), 0.7, &cfg).unwrap().to_canonical_text();
        let b = build_moment_problem(&Witness::a322(), &Prior::uniform(3), 0.7, &cfg).unwrap().to_canonical_text();
        assert_eq!(a, b);
        assert!(a.starts_with("moment-problem\n"));
    }
}
