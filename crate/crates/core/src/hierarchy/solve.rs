use serde::{Deserialize, Serialize};

use super::problem::{build_moment_problem, HierarchyConfig, MomentProblem};
use super::word::{Mode, Sym, Word};
use crate::error::{Error, Result};
use crate::model::{Prior, Witness};
use crate::solver::{solve_sdp, SolverOptions, Status};

/// Reported bounds are floating-point solver optima, not rounded
/// certificates.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HierarchyResult {
    pub value: f64,
    pub dual: f64,
    pub status: Status,
    /// Only an optimal solve is treated as a bound.
    pub verified: bool,
    pub mode: Mode,
    pub level: usize,
    pub filter: String,
    pub solver_tolerance: f64,
    pub moment_size: usize,
    pub classes: usize,
    pub iterations: u32,
    pub solve_time: f64,
}

pub fn solve_upper_bound(mp: &MomentProblem, opts: &SolverOptions) -> Result<HierarchyResult> {
    let r = solve_sdp(&mp.to_conic(), opts)?;
    match r.status {
        Status::Infeasible => return Err(Error::Infeasible("the relaxation has no feasible point".into())),
        Status::Unbounded => return Err(Error::Solver("the relaxation is unbounded".into())),
        _ => {}
    }
    Ok(HierarchyResult {
        value: r.primal,
        dual: r.dual,
        status: r.status,
        verified: r.is_optimal(),
        mode: mp.mode,
        level: mp.level,
        filter: mp.filter_name.clone(),
        solver_tolerance: opts.tol_gap,
        moment_size: mp.moment_size(),
        classes: mp.classes.len(),
        iterations: r.iterations,
        solve_time: r.solve_time,
    })
}

/// Builds and solves in one step.
pub fn upper_bound(w: &Witness, prior: &Prior, g: f64, cfg: &HierarchyConfig) -> Result<HierarchyResult> {
    let mp = build_moment_problem(w, prior, g, cfg)?;
    solve_upper_bound(&mp, &cfg.solver)
}

/// Upper bound on the classical set: every operator commutes.
pub fn classical_bound(w: &Witness, prior: &Prior, g: f64, level: usize) -> Result<HierarchyResult> {
    upper_bound(w, prior, g, &HierarchyConfig::new(Mode::Commuting, level))
}

/// Witness pin for randomness bounds. The tolerance matches the four
/// decimals to which observed values are usually quoted.
pub const DEFAULT_PIN_TOL: f64 = 1e-4;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomnessResult {
    /// Upper bound on the largest outcome probability of the event.
    pub p_star: f64,
    /// `-log2 p_star`.
    pub h_min: f64,
    pub per_outcome: Vec<f64>,
    pub verified: bool,
}

/// Bounds `max_b p(b|x*, y*)` over the relaxation with the witness pinned
/// to `observed` (within `pin_tol`). `observed = None` drops the pin.
/// Outcomes are bounded in order and the scan stops once one reaches 1.
pub fn solve_randomness_bound(
    w: &Witness,
    observed: Option<f64>,
    prior: &Prior,
    g: f64,
    event: (usize, usize),
    cfg: &HierarchyConfig,
    pin_tol: f64,
) -> Result<RandomnessResult> {
    let s = w.scenario();
    let (xs, ys) = event;
    if xs >= s.n_x || ys >= s.n_y {
        return Err(Error::OutOfRange(format!("event ({}, {}) is outside scenario {s}", xs + 1, ys + 1)));
    }
    let mut mp = build_moment_problem(w, prior, g, cfg)?;
    if let Some(v) = observed {
        mp.pin = Some((mp.witness.clone(), v, pin_tol));
    }
    let mut per_outcome = Vec::with_capacity(s.n_b);
    let mut verified = true;
    for b in 0..s.n_b {
        mp.objective = mp.moment(&Word(vec![Sym::Rho(xs), Sym::M { y: ys, b }]))?;
        let r = solve_sdp(&mp.to_conic(), &cfg.solver)?;
        let unreachable = || {
            Error::Infeasible(format!("witness value {} is not reachable at G = {g}", observed.unwrap_or(f64::NAN)))
        };
        match r.status {
            Status::Infeasible => return Err(unreachable()),
            // an empty pinned set often stalls instead of producing a certificate
            Status::Failed if observed.is_some() => {
                let mut free = mp.clone();
                free.pin = None;
                free.objective = free.witness.clone();
                let top = solve_upper_bound(&free, &cfg.solver)?;
                if observed.unwrap() > top.value + pin_tol {
                    return Err(unreachable());
                }
                return Err(Error::Solver("randomness bound ended with status Failed".into()));
            }
            Status::Optimal => {}
            Status::Inaccurate => verified = false,
            st => return Err(Error::Solver(format!("randomness bound ended with status {st:?}"))),
        }
        per_outcome.push(r.primal.min(1.0));
        // nothing left to certify
        if r.primal >= 1.0 - 1e-9 {
            break;
        }
    }
    let p_star = per_outcome.iter().copied().fold(0.0, f64::max);
    Ok(RandomnessResult { p_star, h_min: (-p_star.log2()).max(0.0), per_outcome, verified })
}
