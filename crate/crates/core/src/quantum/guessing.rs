use super::herm::{embedded_dual, hermitian_psd, CForm, HermVar};
use super::linalg::{eigenvalues, hermitize, normalize_povm, psd_part};
use super::{trace_product, CMatrix, Ensemble, C64};
use crate::error::{Error, Result};
use crate::model::Prior;
use crate::solver::{solve_sdp, ConicProblem, Sense, SolverOptions};

/// Optimal guessing of `x` from the ensemble, bracketed from both sides.
#[derive(Clone, Debug)]
pub struct Guessing {
    /// `Tr sigma` for a repaired feasible `sigma`: an upper bound.
    pub value: f64,
    /// Success probability of `povm`: a lower bound.
    pub lower: f64,
    pub sigma: CMatrix,
    /// Extraction measurement, one element per input.
    pub povm: Vec<CMatrix>,
}

impl Guessing {
    pub fn gap(&self) -> f64 {
        self.value - self.lower
    }
}

/// Solves at tight tolerances, falling back to the defaults when the
/// interior-point method stalls there. Either way the result is a repaired
/// bracket, so only its width depends on the tolerances.
pub fn guessing_probability(e: &Ensemble) -> Result<Guessing> {
    let tight = SolverOptions { tol_gap: 1e-10, tol_feas: 1e-10, ..Default::default() };
    guessing_probability_with(e, &tight).or_else(|_| guessing_probability_with(e, &SolverOptions::default()))
}

/// `min Tr sigma` subject to `sigma >= q_x rho_x`. The multipliers of the
/// PSD constraints sum to the identity and form the optimal measurement.
pub fn guessing_probability_with(e: &Ensemble, opts: &SolverOptions) -> Result<Guessing> {
    let d = e.dim();
    let q = e.prior().to_f64();
    let mut p = ConicProblem::new(Sense::Minimize);
    let sigma = HermVar::new(&mut p, "sigma", d);
    p.objective = sigma.trace();
    for (x, rho) in e.states().iter().enumerate() {
        let shift = rho * C64::new(q[x], 0.0);
        p.add_block(hermitian_psd(&format!("sigma-q{x}rho{x}"), d, |i, j| {
            sigma.entry(i, j).minus(&CForm::constant(shift[(i, j)]))
        }));
    }
    let r = solve_sdp(&p, opts)?;
    if !r.has_value() {
        return Err(Error::Solver(format!("guessing SDP ended with status {:?}", r.status)));
    }

    let mut s = hermitize(&sigma.value(&r.x));
    let deficit = e
        .states()
        .iter()
        .zip(&q)
        .map(|(rho, &qx)| -eigenvalues(&(&s - rho * C64::new(qx, 0.0)))[0])
        .fold(0.0f64, f64::max);
    s += CMatrix::identity(d, d) * C64::new(deficit, 0.0);

    let raw: Vec<CMatrix> = r.multipliers.blocks.iter().map(|z| psd_part(&embedded_dual(z, d))).collect();
    let povm = normalize_povm(&raw);
    let lower = e.states().iter().zip(&q).zip(&povm).map(|((rho, &qx), m)| qx * trace_product(rho, m)).sum();
    Ok(Guessing { value: s.trace().re, lower, sigma: s, povm })
}

fn check_prob(v: f64, what: &str) -> Result<()> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::OutOfRange(format!("{what} = {v} is not in [0, 1]")));
    }
    Ok(())
}

fn check_pair(q1: f64, q2: f64) -> Result<()> {
    check_prob(q1, "q1")?;
    check_prob(q2, "q2")?;
    if (q1 + q2 - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidPrior(format!("q1 + q2 = {} must equal 1", q1 + q2)));
    }
    Ok(())
}

/// Guessing probability of two pure states with `|<psi1|psi2>|^2 = overlap`.
pub fn pure_pair_guessing(q1: f64, q2: f64, overlap: f64) -> Result<f64> {
    check_pair(q1, q2)?;
    check_prob(overlap, "overlap")?;
    Ok(0.5 + 0.5 * (1.0 - 4.0 * q1 * q2 * overlap).max(0.0).sqrt())
}

/// Smallest overlap compatible with guessing probability at most `g`.
pub fn pure_pair_min_overlap(q1: f64, q2: f64, g: f64) -> Result<f64> {
    check_pair(q1, q2)?;
    if g < q1.max(q2) - 1e-12 || g > 1.0 {
        return Err(Error::OutOfRange(format!("G = {g} is outside [max q, 1]")));
    }
    if q1 * q2 == 0.0 {
        return Ok(0.0);
    }
    Ok((g * (1.0 - g) / (q1 * q2)).min(1.0))
}

/// Bound on `c1 E1 - c2 E2` (with `c2 = 1 - c1`) over pure-state qubit
/// strategies in the (2,1,2) setting at guessing probability `g`.
pub fn pure_boundary_212(prior: &Prior, g: f64, c1: f64) -> Result<f64> {
    if prior.len() != 2 {
        return Err(Error::InvalidPrior(format!("expected two inputs, got {}", prior.len())));
    }
    let q = prior.to_f64();
    let (lo, hi) = (q[0].min(q[1]), q[0].max(q[1]));
    if c1 < lo - 1e-12 || c1 > hi + 1e-12 {
        return Err(Error::OutOfRange(format!("c1 = {c1} is outside [{lo}, {hi}]")));
    }
    if g < hi - 1e-12 || g > 1.0 {
        return Err(Error::OutOfRange(format!("G = {g} is outside [{hi}, 1]")));
    }
    let c2 = 1.0 - c1;
    Ok((1.0 - 4.0 * c1 * c2 * g * (1.0 - g) / (q[0] * q[1])).max(0.0).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::{ket, projector, qutrit_states};
    use crate::rational::ratio;

    #[test]
    fn qutrit_fixture_guesses_four_fifths() {
        let prior = Prior::new(vec![ratio(2, 5), ratio(2, 5), ratio(1, 5)]).unwrap();
        let g = guessing_probability(&Ensemble::new(qutrit_states(), prior).unwrap()).unwrap();
        assert!((g.value - 0.8).abs() < 1e-6, "{}", g.value);
        assert!(g.gap() < 1e-7 && g.gap() > -1e-9, "gap {}", g.gap());
    }

    #[test]
    fn identical_and_orthogonal_states() {
        let prior = Prior::new(vec![ratio(1, 3), ratio(1, 2), ratio(1, 6)]).unwrap();
        let rho = projector(&ket(&[0.6, 0.8]));
        let g = guessing_probability(&Ensemble::new(vec![rho.clone(), rho.clone(), rho], prior).unwrap()).unwrap();
        assert!((g.value - 0.5).abs() < 1e-8);
        let e = Ensemble::pure(&[ket(&[1.0, 0.0]), ket(&[0.0, 1.0])], Prior::uniform(2)).unwrap();
        assert!((guessing_probability(&e).unwrap().value - 1.0).abs() < 1e-8);
    }

    #[test]
    fn pure_pair_closed_form() {
        assert!((pure_pair_guessing(0.7, 0.3, 1.0).unwrap() - 0.7).abs() < 1e-12);
        assert_eq!(pure_pair_guessing(0.7, 0.3, 0.0).unwrap(), 1.0);
        let g = pure_pair_guessing(0.5, 0.5, 0.5).unwrap();
        assert!((g - (0.5 + 0.5 / 2f64.sqrt())).abs() < 1e-12);
        let o = pure_pair_min_overlap(0.5, 0.5, g).unwrap();
        assert!((o - 0.5).abs() < 1e-12);
        assert!(pure_pair_guessing(0.6, 0.6, 0.5).is_err());
        assert!(pure_pair_guessing(0.5, 0.5, 1.5).is_err());
    }

    #[test]
    fn boundary_212_special_cases() {
        let prior = Prior::new(vec![ratio(3, 5), ratio(2, 5)]).unwrap();
        assert!((pure_boundary_212(&prior, 0.75, 0.6).unwrap() - 0.5).abs() < 1e-12);
        assert!((pure_boundary_212(&prior, 1.0, 0.5).unwrap() - 1.0).abs() < 1e-12);
        assert!(pure_boundary_212(&Prior::uniform(2), 0.5, 0.5).unwrap().abs() < 1e-12);
        assert!(pure_boundary_212(&prior, 0.75, 0.7).is_err());
        assert!(pure_boundary_212(&prior, 0.5, 0.5).is_err());
    }
}
