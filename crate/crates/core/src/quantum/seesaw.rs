use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::guessing::guessing_probability;
use super::herm::{hermitian_psd, CForm, HermVar};
use super::linalg::{eigenvalues, hermitize, normalize_povm, psd_part, random_povm, random_state};
use super::{born_behavior, CMatrix, Ensemble, MeasurementSet, C64};
use crate::error::{Error, Result};
use crate::model::{Prior, Witness};
use crate::solver::{solve_sdp, ConicProblem, LinearForm, Sense, SolverOptions};

/// Weight of the maximally mixed state in the initial states.
const INIT_NOISE: f64 = 0.1;
/// Attempts per restart when a round's solver fails.
const ATTEMPTS: u64 = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeesawConfig {
    pub dim: usize,
    pub restarts: usize,
    pub max_rounds: usize,
    pub convergence_tol: f64,
    pub seed: u64,
    #[serde(default)]
    pub solver: SolverOptions,
}

impl SeesawConfig {
    pub fn new(dim: usize) -> Self {
        Self { dim, restarts: 10, max_rounds: 200, convergence_tol: 1e-7, seed: 0, solver: SolverOptions::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 || self.restarts == 0 || self.max_rounds == 0 {
            return Err(Error::OutOfRange("dimension, restarts and rounds must be positive".into()));
        }
        if !(self.convergence_tol > 0.0) {
            return Err(Error::OutOfRange(format!("convergence tolerance {} must be positive", self.convergence_tol)));
        }
        Ok(())
    }
}

/// Best strategy over all restarts. `sigma` certifies the information
/// bound: `sigma >= q_x rho_x` for all `x` and `Tr sigma <= G`.
#[derive(Clone, Debug)]
pub struct SeesawResult {
    pub value: f64,
    pub ensemble: Ensemble,
    pub measurements: MeasurementSet,
    pub sigma: CMatrix,
    /// Witness value after initialization and after every accepted round.
    pub trace: Vec<f64>,
    pub restart: usize,
    pub converged: bool,
}

struct Strategy {
    states: Vec<CMatrix>,
    povms: Vec<Vec<CMatrix>>,
    sigma: CMatrix,
}

struct Job<'a> {
    w: &'a Witness,
    c: Vec<f64>,
    prior: &'a Prior,
    q: Vec<f64>,
    g: f64,
    cfg: &'a SeesawConfig,
}

impl Job<'_> {
    fn coef(&self, b: usize, x: usize, y: usize) -> f64 {
        self.c[self.w.scenario().index(b, x, y)]
    }

    fn value(&self, s: &Strategy) -> Result<(f64, Ensemble, MeasurementSet)> {
        let e = Ensemble::new(s.states.clone(), self.prior.clone())?;
        let m = MeasurementSet::new(s.povms.clone())?;
        let v = self.w.evaluate(&born_behavior(&e, &m)?)?;
        Ok((v, e, m))
    }

    /// Brings `(states, sigma)` inside the information bound: lifts `sigma`
    /// until it dominates every `q_x rho_x`, then mixes everything with the
    /// maximally mixed state if `Tr sigma` still exceeds `G`.
    fn repair_states(&self, states: Vec<CMatrix>, sigma: CMatrix) -> (Vec<CMatrix>, CMatrix) {
        let d = self.cfg.dim;
        let id = CMatrix::identity(d, d);
        let mut states: Vec<CMatrix> = states
            .iter()
            .map(|r| {
                let p = psd_part(r);
                let t = p.trace().re;
                if t > 1e-12 {
                    p / C64::new(t, 0.0)
                } else {
                    &id / C64::new(d as f64, 0.0)
                }
            })
            .collect();
        let mut sigma = hermitize(&sigma);
        let deficit = states
            .iter()
            .zip(&self.q)
            .map(|(r, &qx)| -eigenvalues(&(&sigma - r * C64::new(qx, 0.0)))[0])
            .fold(0.0f64, f64::max);
        sigma += &id * C64::new(deficit, 0.0);

        let qmax = self.q.iter().copied().fold(0.0, f64::max);
        let tr = sigma.trace().re;
        if tr > self.g {
            let t = ((tr - self.g) / (tr - qmax)).min(1.0);
            let mixed = &id / C64::new(d as f64, 0.0);
            for r in states.iter_mut() {
                *r = &*r * C64::new(1.0 - t, 0.0) + &mixed * C64::new(t, 0.0);
            }
            sigma = sigma * C64::new(1.0 - t, 0.0) + &mixed * C64::new(t * qmax, 0.0);
        }
        (states, sigma)
    }

    fn initial(&self, rng: &mut ChaCha8Rng) -> Result<Strategy> {
        let d = self.cfg.dim;
        let s = self.w.scenario();
        let mixed = CMatrix::identity(d, d) / C64::new(d as f64, 0.0);
        let states: Vec<CMatrix> = (0..s.n_x)
            .map(|_| random_state(rng, d) * C64::new(1.0 - INIT_NOISE, 0.0) + &mixed * C64::new(INIT_NOISE, 0.0))
            .collect();
        let guess = guessing_probability(&Ensemble::new(states.clone(), self.prior.clone())?)?;
        let (states, sigma) = self.repair_states(states, guess.sigma);
        let povms = (0..s.n_y).map(|_| random_povm(rng, d, s.n_b)).collect();
        Ok(Strategy { states, povms, sigma })
    }

    /// Optimal measurements for fixed states; all settings in one program.
    fn measurement_round(&self, states: &[CMatrix]) -> Result<Vec<Vec<CMatrix>>> {
        let d = self.cfg.dim;
        let s = self.w.scenario();
        let mut p = ConicProblem::new(Sense::Maximize);
        let mut objective = LinearForm::default();
        let mut vars = Vec::new();
        for y in 0..s.n_y {
            let mv: Vec<HermVar> = (0..s.n_b - 1).map(|b| HermVar::new(&mut p, &format!("M{b}|{y}"), d)).collect();
            // last element is the identity minus the others
            let last = |i: usize, j: usize| {
                let mut f = CForm::constant(C64::new(if i == j { 1.0 } else { 0.0 }, 0.0));
                for m in &mv {
                    f = f.minus(&m.entry(i, j));
                }
                f
            };
            let l = |b: usize| -> CMatrix { states.iter().enumerate().map(|(x, r)| r * C64::new(self.coef(b, x, y), 0.0)).sum() };
            let l_last = l(s.n_b - 1);
            for (b, m) in mv.iter().enumerate() {
                p.add_block(hermitian_psd(&format!("M{b}|{y}"), d, |i, j| m.entry(i, j)));
                objective = objective.plus(&m.inner(&(l(b) - &l_last)));
            }
            p.add_block(hermitian_psd(&format!("M{}|{y}", s.n_b - 1), d, last));
            objective = objective.plus(&LinearForm::constant(l_last.trace().re));
            vars.push(mv);
        }
        p.objective = objective;
        let r = solve_sdp(&p, &self.cfg.solver)?;
        if !r.has_value() {
            return Err(Error::Solver(format!("measurement round ended with status {:?}", r.status)));
        }
        let id = CMatrix::identity(d, d);
        Ok(vars
            .iter()
            .map(|mv| {
                let mut els: Vec<CMatrix> = mv.iter().map(|m| m.value(&r.x)).collect();
                let rest: CMatrix = els.iter().sum();
                els.push(&id - rest);
                normalize_povm(&els.iter().map(psd_part).collect::<Vec<_>>())
            })
            .collect())
    }

    /// Optimal states and `sigma` for fixed measurements.
    fn state_round(&self, povms: &[Vec<CMatrix>]) -> Result<(Vec<CMatrix>, CMatrix)> {
        let d = self.cfg.dim;
        let s = self.w.scenario();
        let mut p = ConicProblem::new(Sense::Maximize);
        let rho: Vec<HermVar> = (0..s.n_x).map(|x| HermVar::new(&mut p, &format!("rho{x}"), d)).collect();
        let sigma = HermVar::new(&mut p, "sigma", d);
        let mut objective = LinearForm::default();
        for (x, r) in rho.iter().enumerate() {
            let k: CMatrix = (0..s.n_y)
                .flat_map(|y| (0..s.n_b).map(move |b| (b, y)))
                .map(|(b, y)| &povms[y][b] * C64::new(self.coef(b, x, y), 0.0))
                .sum();
            objective = objective.plus(&r.inner(&k));
            p.add_equality(r.trace().minus(&LinearForm::constant(1.0)));
            p.add_block(hermitian_psd(&format!("rho{x}"), d, |i, j| r.entry(i, j)));
            let qx = self.q[x];
            p.add_block(hermitian_psd(&format!("sigma-q{x}rho{x}"), d, |i, j| {
                sigma.entry(i, j).minus(&r.entry(i, j).scaled(qx))
            }));
        }
        p.add_inequality(LinearForm::constant(self.g).minus(&sigma.trace()));
        p.objective = objective;
        let r = solve_sdp(&p, &self.cfg.solver)?;
        if !r.has_value() {
            return Err(Error::Solver(format!("state round ended with status {:?}", r.status)));
        }
        Ok((rho.iter().map(|v| v.value(&r.x)).collect(), sigma.value(&r.x)))
    }

    fn run(&self, seed: u64, restart: usize) -> Result<SeesawResult> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut cur = self.initial(&mut rng)?;
        let (mut value, _, _) = self.value(&cur)?;
        let mut trace = vec![value];
        let mut converged = false;
        for _ in 0..self.cfg.max_rounds {
            // states first: starting from the random measurements escapes
            // the lower-rank optima far more often
            let (states, sigma) = self.state_round(&cur.povms)?;
            let (states, sigma) = self.repair_states(states, sigma);
            let povms = self.measurement_round(&states)?;
            let next = Strategy { states, povms, sigma };
            let (v, _, _) = self.value(&next)?;
            // each half-step is optimal given the other, so a drop is round-off
            if v < value {
                converged = true;
                break;
            }
            let gain = v - value;
            cur = next;
            value = v;
            trace.push(v);
            if gain < self.cfg.convergence_tol {
                converged = true;
                break;
            }
        }
        let (value, ensemble, measurements) = self.value(&cur)?;
        Ok(SeesawResult { value, ensemble, measurements, sigma: cur.sigma, trace, restart, converged })
    }
}

/// Alternating optimization of the witness over `dim`-dimensional
/// strategies with guessing probability at most `g`. Every value reported
/// is attained by the returned strategy, so it lower-bounds the quantum set.
pub fn seesaw_optimize(w: &Witness, prior: &Prior, g: f64, cfg: &SeesawConfig) -> Result<SeesawResult> {
    cfg.validate()?;
    let s = w.scenario();
    if prior.len() != s.n_x {
        return Err(Error::ShapeMismatch(format!("prior has {} entries, scenario needs {}", prior.len(), s.n_x)));
    }
    let q = prior.to_f64();
    let qmax = q.iter().copied().fold(0.0, f64::max);
    if g < qmax - 1e-12 || g > 1.0 {
        return Err(Error::OutOfRange(format!("G = {g} is outside [{qmax}, 1]")));
    }
    let job = Job { w, c: w.coefficients_f64(), prior, q, g: g.max(qmax), cfg };
    let mut seeder = ChaCha8Rng::seed_from_u64(cfg.seed);
    let seeds: Vec<u64> = (0..cfg.restarts).map(|_| seeder.random()).collect();
    let results: Vec<Result<SeesawResult>> = seeds
        .par_iter()
        .enumerate()
        .map(|(i, &seed)| {
            let mut last = Err(Error::Solver("no attempt made".into()));
            for a in 0..ATTEMPTS {
                last = job.run(seed.wrapping_add(a), i);
                if last.is_ok() {
                    break;
                }
                log::warn!("see-saw restart {i} attempt {a} failed: {}", last.as_ref().err().unwrap());
            }
            last
        })
        .collect();
    let mut best: Option<SeesawResult> = None;
    let mut first_err = None;
    for r in results {
        match r {
            Ok(r) if best.as_ref().is_none_or(|b| r.value > b.value) => best = Some(r),
            Ok(_) => {}
            Err(e) => {
                first_err.get_or_insert(e);
            }
        }
    }
    best.ok_or_else(|| first_err.unwrap_or_else(|| Error::Solver("every see-saw restart failed".into())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn check_strategy(r: &SeesawResult, prior: &Prior, g: f64) {
        let q = prior.to_f64();
        for (rho, qx) in r.ensemble.states().iter().zip(q) {
            assert!(eigenvalues(&(&r.sigma - rho * C64::new(qx, 0.0)))[0] > -1e-7);
        }
        assert!(r.sigma.trace().re <= g + 1e-7);
        assert!(r.trace.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn qubit_a322_at_biased_prior() {
        let prior = Prior::new(vec![ratio(2, 5), ratio(2, 5), ratio(1, 5)]).unwrap();
        let cfg = SeesawConfig { restarts: 4, seed: 1, ..SeesawConfig::new(2) };
        let r = seesaw_optimize(&Witness::a322(), &prior, 0.8, &cfg).unwrap();
        check_strategy(&r, &prior, 0.8);
        assert!((r.value - (1.0 + 2.0 * 2f64.sqrt())).abs() < 1e-3, "{}", r.value);
    }

    #[test]
    fn bad_config_is_rejected() {
        let cfg = SeesawConfig { restarts: 0, ..SeesawConfig::new(2) };
        assert!(seesaw_optimize(&Witness::a322(), &Prior::uniform(3), 0.5, &cfg).is_err());
        assert!(seesaw_optimize(&Witness::a322(), &Prior::uniform(3), 0.2, &SeesawConfig::new(2)).is_err());
    }
}
