use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::cplus::{complete_alphabet, cplus_vertices, CPlus, CPlusVertex};
use super::mplus::deterministic_mplus;
use super::Variant;
use crate::error::{Error, Result};
use crate::geometry::{DdOptions, Row};
use crate::model::{check_polytope_g, Behavior, ExactBehavior, Prior, Scenario, Witness};
use crate::rational::Rational;
use crate::solver::exact::{ExactLp, ExactOutcome, ExactRow};
use crate::solver::{solve_lp, ConicProblem, LinearForm, Sense, SolveResult, SolverOptions, Status};

/// Largest weight table the stochastic program will build.
const MAX_WEIGHTS: usize = 400_000;

#[derive(Clone, Debug)]
pub struct MembershipOptions {
    /// Slack allowed on every behavior equality and on the guessing bound.
    pub tol: f64,
    /// Message alphabet for the stochastic variant; `None` means `2^(n_x-1)`.
    /// A smaller alphabet gives an inner approximation: feasible verdicts stay
    /// sound, infeasible ones do not.
    pub n_m: Option<usize>,
    /// Require the response marginal to be independent of the input.
    pub marginal: bool,
    pub solver: SolverOptions,
}

impl Default for MembershipOptions {
    fn default() -> Self {
        Self { tol: 1e-8, n_m: None, marginal: true, solver: SolverOptions::default() }
    }
}

/// Stochastic variant: `p(k,m|x)` with `k` indexing response functions.
/// Deterministic variant: weight of strategy `k`, with `m` and `x` unused.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Weight {
    pub k: usize,
    pub m: usize,
    pub x: usize,
    pub value: f64,
}

/// `sum c_bxy p(b|x,y) <= bound` holds on the set and fails at the tested behavior.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeparatingInequality {
    /// Full table layout, see [`Scenario::index`].
    pub c: Vec<f64>,
    pub bound: f64,
    /// `c . p` at the tested behavior.
    pub value: f64,
    /// `polytope` when the guessing constraint alone excludes the behavior.
    pub origin: String,
}

impl SeparatingInequality {
    pub fn violation(&self) -> f64 {
        self.value - self.bound
    }

    /// Correlator coefficients `e_xy` for two outcomes, dropping the offset.
    pub fn correlators(&self, s: Scenario) -> Vec<f64> {
        (0..s.n_x)
            .flat_map(|x| (0..s.n_y).map(move |y| (x, y)))
            .map(|(x, y)| 0.5 * (self.c[s.index(0, x, y)] - self.c[s.index(1, x, y)]))
            .collect()
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Membership {
    pub feasible: bool,
    /// Smallest uniform slack that makes the program feasible.
    pub distance: f64,
    pub weights: Vec<Weight>,
    pub certificate: Option<SeparatingInequality>,
    /// Set when a truncated message alphabet was used.
    pub reduced_alphabet: bool,
}

enum Target {
    /// Minimize the uniform slack at fixed `G`.
    Distance(f64),
    /// Minimize `G` with the behavior matched exactly.
    MinG,
}

struct Program {
    lp: ConicProblem,
    /// Range of the behavior rows: `+` rows then `-` rows, one per entry.
    behavior_rows: std::ops::Range<usize>,
    n_weights: usize,
}

/// Distance mode: `sum_w - p + s >= 0` and `p - sum_w + s >= 0` for every
/// entry, returning their range. Minimum-G mode: plain equalities, skipping
/// the last outcome, which normalization already fixes.
fn behavior_rows(lp: &mut ConicProblem, p: &Behavior, sums: Vec<Vec<(usize, f64)>>, target: &Target, s_var: usize) -> std::ops::Range<usize> {
    let sc = p.scenario();
    let forms: Vec<LinearForm> = sums
        .into_iter()
        .enumerate()
        .map(|(i, terms)| LinearForm::from_terms(-p.as_slice()[i], terms))
        .collect();
    let start = lp.inequalities.len();
    match target {
        Target::Distance(_) => {
            let s = LinearForm::var(s_var);
            for f in &forms {
                lp.add_inequality(f.plus(&s));
            }
            for f in &forms {
                lp.add_inequality(f.scaled(-1.0).plus(&s));
            }
        }
        Target::MinG => {
            for (i, f) in forms.into_iter().enumerate() {
                if i % sc.n_b != sc.n_b - 1 {
                    lp.add_equality(f);
                }
            }
        }
    }
    start..lp.inequalities.len()
}

/// Slack on the guessing budget, zero when minimizing `G`.
fn budget_slack(target: &Target, s_var: usize) -> LinearForm {
    match target {
        Target::Distance(_) => LinearForm::var(s_var),
        Target::MinG => LinearForm::constant(0.0),
    }
}

fn stochastic_program(p: &Behavior, prior: &Prior, n_m: usize, target: &Target, opts: &MembershipOptions) -> Result<Program> {
    let s = p.scenario();
    let n_x = s.n_x;
    let slots = n_m * s.n_y;
    let n_k = (s.n_b as f64).powi(slots as i32);
    if n_k * (n_m * n_x) as f64 > MAX_WEIGHTS as f64 {
        return Err(Error::EnumerationCap(format!(
            "{} weights for a {n_m}-message alphabet; use a smaller alphabet",
            n_k * (n_m * n_x) as f64
        )));
    }
    let n_k = n_k as usize;
    let q = prior.to_f64();
    let mut lp = ConicProblem::new(Sense::Minimize);
    let w = |k: usize, m: usize, x: usize| (k * n_m + m) * n_x + x;
    for k in 0..n_k {
        for m in 0..n_m {
            for x in 0..n_x {
                lp.add_variable(format!("w[{k},{m},{x}]"));
            }
        }
    }
    let n_weights = n_k * n_m * n_x;
    for k in 0..n_k {
        for m in 0..n_m {
            lp.add_variable(format!("t[{k},{m}]"));
        }
    }
    let t = |k: usize, m: usize| n_weights + k * n_m + m;
    let extra = lp.add_variable(match target {
        Target::Distance(_) => "s",
        Target::MinG => "G",
    });

    for j in 0..n_weights {
        lp.add_inequality(LinearForm::var(j));
    }
    for k in 0..n_k {
        for m in 0..n_m {
            for x in 0..n_x {
                lp.add_inequality(LinearForm::from_terms(0.0, [(t(k, m), 1.0), (w(k, m, x), -q[x])]));
            }
        }
    }
    if opts.marginal {
        for k in 0..n_k {
            for x in 1..n_x {
                let terms = (0..n_m).flat_map(|m| [(w(k, m, x), 1.0), (w(k, m, 0), -1.0)]);
                lp.add_equality(LinearForm::from_terms(0.0, terms));
            }
        }
    }
    // with equal marginals one normalization row suffices
    let normalized = if opts.marginal { 1 } else { n_x };
    for x in 0..normalized {
        lp.add_equality(LinearForm::from_terms(-1.0, (0..n_k).flat_map(|k| (0..n_m).map(move |m| (w(k, m, x), 1.0)))));
    }
    let mut sums = vec![Vec::new(); s.behavior_len()];
    for k in 0..n_k {
        let mut digits = k;
        for slot in 0..slots {
            let b = digits % s.n_b;
            digits /= s.n_b;
            let (y, m) = (slot / n_m, slot % n_m);
            for x in 0..n_x {
                sums[s.index(b, x, y)].push((w(k, m, x), 1.0));
            }
        }
    }
    let behavior_rows = behavior_rows(&mut lp, p, sums, target, extra);
    let sl = budget_slack(target, extra);
    let guess = match target {
        Target::Distance(g) => LinearForm::constant(*g),
        Target::MinG => LinearForm::var(extra),
    };
    let total_t = LinearForm::from_terms(0.0, (0..n_k * n_m).map(|i| (n_weights + i, 1.0)));
    lp.add_inequality(guess.plus(&sl).minus(&total_t));
    if let Target::Distance(_) = target {
        lp.add_inequality(LinearForm::var(extra));
    }
    lp.objective = LinearForm::var(extra);
    Ok(Program { lp, behavior_rows, n_weights })
}

fn deterministic_program(p: &Behavior, strategies: &[CPlusVertex], target: &Target) -> Program {
    let s = p.scenario();
    let mut lp = ConicProblem::new(Sense::Minimize);
    for k in 0..strategies.len() {
        lp.add_variable(format!("l[{k}]"));
    }
    let extra = lp.add_variable(match target {
        Target::Distance(_) => "s",
        Target::MinG => "G",
    });
    for k in 0..strategies.len() {
        lp.add_inequality(LinearForm::var(k));
    }
    lp.add_equality(LinearForm::from_terms(-1.0, (0..strategies.len()).map(|k| (k, 1.0))));
    let mut sums = vec![Vec::new(); s.behavior_len()];
    for (k, v) in strategies.iter().enumerate() {
        for (i, val) in v.behavior.as_slice().iter().enumerate() {
            if !val.is_zero() {
                sums[i].push((k, crate::rational::to_f64(val)));
            }
        }
    }
    let behavior_rows = behavior_rows(&mut lp, p, sums, target, extra);
    let sl = budget_slack(target, extra);
    let guess = match target {
        Target::Distance(g) => LinearForm::constant(*g),
        Target::MinG => LinearForm::var(extra),
    };
    let spent = LinearForm::from_terms(0.0, strategies.iter().enumerate().map(|(k, v)| (k, crate::rational::to_f64(&v.g))));
    lp.add_inequality(guess.plus(&sl).minus(&spent));
    if let Target::Distance(_) = target {
        lp.add_inequality(LinearForm::var(extra));
    }
    lp.objective = LinearForm::var(extra);
    Program { lp, behavior_rows, n_weights: strategies.len() }
}

/// Deterministic strategies with canonical message labels, deduplicated.
pub fn deterministic_strategies(s: Scenario, prior: &Prior) -> Result<Vec<CPlusVertex>> {
    let mp = deterministic_mplus(prior, &DdOptions::default())?;
    Ok(cplus_vertices(&mp, s)?.vertices)
}

fn check_inputs(p: &Behavior, prior: &Prior) -> Result<()> {
    if prior.len() != p.scenario().n_x {
        return Err(Error::ShapeMismatch(format!("prior has {} entries, scenario {}", prior.len(), p.scenario())));
    }
    p.validate(1e-6)
}

fn program(p: &Behavior, prior: &Prior, variant: Variant, target: &Target, opts: &MembershipOptions) -> Result<(Program, bool, usize)> {
    let s = p.scenario();
    Ok(match variant {
        Variant::Stochastic => {
            let full = complete_alphabet(s.n_x);
            let n_m = opts.n_m.unwrap_or(full);
            if n_m == 0 {
                return Err(Error::OutOfRange("message alphabet must be nonempty".into()));
            }
            (stochastic_program(p, prior, n_m, target, opts)?, n_m < full, n_m)
        }
        Variant::Deterministic => (deterministic_program(p, &deterministic_strategies(s, prior)?, target), false, 0),
    })
}

fn run(lp: &ConicProblem, opts: &SolverOptions) -> Result<SolveResult> {
    let r = solve_lp(lp, opts)?;
    match r.status {
        Status::Optimal | Status::Inaccurate | Status::Infeasible => Ok(r),
        other => Err(Error::Solver(format!("membership program ended with status {other:?}"))),
    }
}

/// Decides whether `p` lies in the classical set at guessing probability `g`.
pub fn membership_lp(p: &Behavior, prior: &Prior, g: f64, variant: Variant, opts: &MembershipOptions) -> Result<Membership> {
    check_inputs(p, prior)?;
    let s = p.scenario();
    let q = prior.to_f64();
    let violations = check_polytope_g(p, prior, g, opts.tol)?;
    if let Some(worst) = violations.iter().min_by(|a, b| a.slack.total_cmp(&b.slack)) {
        let mut c = vec![0.0; s.behavior_len()];
        for (b, &x) in worst.assignment.iter().enumerate() {
            c[s.index(b, x, worst.y)] = q[x];
        }
        return Ok(Membership {
            feasible: false,
            distance: -worst.slack,
            weights: Vec::new(),
            certificate: Some(SeparatingInequality { c, bound: g, value: worst.lhs, origin: "polytope".into() }),
            reduced_alphabet: false,
        });
    }

    let target = Target::Distance(g);
    let (prog, reduced, n_m) = program(p, prior, variant, &target, opts)?;
    let r = run(&prog.lp, &opts.solver)?;
    if r.status == Status::Infeasible {
        return Err(Error::Solver("slack program reported infeasible".into()));
    }
    let distance = r.primal.max(0.0);
    if distance <= opts.tol {
        let weights = r.x[..prog.n_weights]
            .iter()
            .enumerate()
            .filter(|(_, v)| **v > 1e-9)
            .map(|(j, &value)| match variant {
                Variant::Stochastic => Weight { k: j / (n_m * s.n_x), m: (j / s.n_x) % n_m, x: j % s.n_x, value },
                Variant::Deterministic => Weight { k: j, m: 0, x: 0, value },
            })
            .collect();
        return Ok(Membership { feasible: true, distance, weights, certificate: None, reduced_alphabet: reduced });
    }

    // the multipliers of the +/- behavior rows give the normal; every other
    // row contributes its constant to the bound
    let y = &r.multipliers.ineq;
    let n = s.behavior_len();
    let rows = prog.behavior_rows.clone();
    let c: Vec<f64> = (0..n).map(|i| y[rows.start + i] - y[rows.start + n + i]).collect();
    let mut bound = 0.0;
    for (i, f) in prog.lp.inequalities.iter().enumerate() {
        if !rows.contains(&i) {
            bound += y[i] * f.constant;
        }
    }
    for (f, yv) in prog.lp.equalities.iter().zip(&r.multipliers.eq) {
        bound += yv * f.constant;
    }
    let value: f64 = c.iter().zip(p.as_slice()).map(|(a, b)| a * b).sum();
    Ok(Membership {
        feasible: false,
        distance,
        weights: Vec::new(),
        certificate: Some(SeparatingInequality { c, bound, value, origin: "lp".into() }),
        reduced_alphabet: reduced,
    })
}

/// Smallest `G` at which [`membership_lp`] accepts `p`.
pub fn min_g_lp(p: &Behavior, prior: &Prior, variant: Variant, opts: &MembershipOptions) -> Result<f64> {
    check_inputs(p, prior)?;
    let (prog, _, _) = program(p, prior, variant, &Target::MinG, opts)?;
    let r = run(&prog.lp, &opts.solver)?;
    if r.status == Status::Infeasible {
        return Err(Error::Infeasible("behavior is not classical for any guessing probability".into()));
    }
    log::debug!("minimum G: primal {} dual {} status {:?}", r.primal, r.dual, r.status);
    let g = r.primal;
    if g > 1.0 + 1e-6 {
        return Err(Error::Infeasible(format!("behavior needs G = {g} > 1")));
    }
    Ok(g)
}

/// Exact verdict against the generators of a lifted set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExactMembership {
    /// Convex weights on `CPlus::vertices`.
    Inside(Vec<Rational>),
    /// `row(p, G) >= 0` over reduced coordinates and `G` holds on the whole
    /// set and fails at the tested point.
    Outside(Row),
}

/// Exact membership of `(p, g)` in the convex hull of `cp` plus the ray in `G`.
pub fn membership_exact(p: &ExactBehavior, g: &Rational, cp: &CPlus) -> Result<ExactMembership> {
    if p.scenario() != cp.scenario {
        return Err(Error::ShapeMismatch("behavior and lifted set use different scenarios".into()));
    }
    let pts: Vec<Vec<Rational>> = cp.vertices.iter().map(CPlusVertex::point).collect();
    let nv = pts.len();
    let d = cp.scenario.reduced_len();
    let target = p.reduced();
    let mut eqs = Vec::new();
    eqs.push(ExactRow::new((0..=nv).map(|k| if k < nv { Rational::one() } else { Rational::zero() }).collect(), -Rational::one()));
    for i in 0..d {
        eqs.push(ExactRow::new(
            pts.iter().map(|v| v[i].clone()).chain(std::iter::once(Rational::zero())).collect(),
            -target[i].clone(),
        ));
    }
    eqs.push(ExactRow::new(pts.iter().map(|v| v[d].clone()).chain(std::iter::once(Rational::one())).collect(), -g.clone()));
    let mut lp = ExactLp::feasibility(nv + 1, eqs, Vec::new());
    lp.nonneg = vec![true; nv + 1];
    match lp.solve() {
        ExactOutcome::Optimal { x, .. } => Ok(ExactMembership::Inside(x[..nv].to_vec())),
        ExactOutcome::Infeasible { eq, .. } => {
            let mut a: Vec<Rational> = eq[1..=d].iter().map(|v| -v).collect();
            a.push(-eq[d + 1].clone());
            Ok(ExactMembership::Outside(Row::new(a, -eq[0].clone())))
        }
        ExactOutcome::Unbounded => Err(Error::Solver("feasibility program cannot be unbounded".into())),
    }
}

/// Exact maximum of a witness over the lifted set at fixed `G`.
pub fn max_witness_exact(w: &Witness, g: &Rational, cp: &CPlus) -> Result<Rational> {
    if w.scenario() != cp.scenario {
        return Err(Error::ShapeMismatch("witness and lifted set use different scenarios".into()));
    }
    let nv = cp.vertices.len();
    let objective: Vec<Rational> = cp.vertices.iter().map(|v| w.evaluate_exact(&v.behavior)).collect::<Result<_>>()?;
    let norm = ExactRow::new(vec![Rational::one(); nv], -Rational::one());
    let budget = ExactRow::new(cp.vertices.iter().map(|v| -v.g.clone()).collect(), g.clone());
    let lp = ExactLp {
        n: nv,
        sense: Sense::Maximize,
        objective,
        equalities: vec![norm],
        inequalities: vec![budget],
        nonneg: vec![true; nv],
    };
    match lp.solve() {
        ExactOutcome::Optimal { value, .. } => Ok(value),
        ExactOutcome::Infeasible { .. } => Err(Error::Infeasible(format!("no classical strategy reaches G = {g}"))),
        ExactOutcome::Unbounded => Err(Error::Solver("witness maximum cannot be unbounded".into())),
    }
}

/// Exact maximum of a witness over classical strategies sending one of `d`
/// messages, with shared randomness. Bob answers each message optimally, so
/// only the encodings are enumerated.
pub fn max_witness_dimension(w: &Witness, d: usize) -> Result<Rational> {
    let s = w.scenario();
    if d == 0 {
        return Err(Error::OutOfRange("message alphabet must be nonempty".into()));
    }
    if (d as f64).powi(s.n_x as i32) > 1e7 {
        return Err(Error::EnumerationCap(format!("{d}^{} encodings", s.n_x)));
    }
    let mut enc = vec![0usize; s.n_x];
    let mut best: Option<Rational> = None;
    loop {
        let mut total = Rational::zero();
        for y in 0..s.n_y {
            for m in 0..d {
                total += (0..s.n_b)
                    .map(|b| (0..s.n_x).filter(|&x| enc[x] == m).map(|x| w.coefficient(b, x, y).clone()).sum::<Rational>())
                    .max()
                    .unwrap_or_else(Rational::zero);
            }
        }
        if best.as_ref().is_none_or(|b| total > *b) {
            best = Some(total);
        }
        if !crate::model::next_assignment(&mut enc, d) {
            break;
        }
    }
    Ok(best.unwrap_or_else(Rational::zero))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Scenario;

    #[test]
    fn constant_behavior_is_feasible_at_q_max() {
        let s = Scenario::new(2, 1, 2).unwrap();
        let p = Behavior::from_fn(s, |b, _, _| [0.3, 0.7][b]);
        let prior = Prior::parse("3/5,2/5", 2).unwrap();
        for v in [Variant::Stochastic, Variant::Deterministic] {
            let m = membership_lp(&p, &prior, 0.6, v, &MembershipOptions::default()).unwrap();
            assert!(m.feasible, "{v:?}");
            let g = min_g_lp(&p, &prior, v, &MembershipOptions::default()).unwrap();
            assert!((g - 0.6).abs() < 1e-7, "{g}");
        }
    }

    #[test]
    fn perfect_anticorrelation_needs_full_guessing() {
        let s = Scenario::new(2, 1, 2).unwrap();
        let p = Behavior::from_correlators(s, &[1.0, -1.0]).unwrap();
        let prior = Prior::parse("0.6,0.4", 2).unwrap();
        let g = min_g_lp(&p, &prior, Variant::Stochastic, &MembershipOptions::default()).unwrap();
        assert!((g - 1.0).abs() < 1e-7);
        let m = membership_lp(&p, &prior, 0.9, Variant::Stochastic, &MembershipOptions::default()).unwrap();
        assert!(!m.feasible);
        let cert = m.certificate.unwrap();
        assert!(cert.violation() > 1e-6);
    }

    #[test]
    fn one_bit_of_communication() {
        assert_eq!(max_witness_dimension(&Witness::a322(), 2).unwrap(), crate::rational::int(3));
        assert_eq!(max_witness_dimension(&Witness::a322(), 3).unwrap(), crate::rational::int(5));
    }
}
