use serde::{Deserialize, Serialize};

use super::problem::HierarchyConfig;
use super::solve::upper_bound;
use crate::error::{Error, Result};
use crate::model::{guess_to_info, Prior, Witness};
use crate::rational;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CertifyOptions {
    /// Search stops once the bracket on the minimal `G` is this narrow in bits.
    pub alpha_tol: f64,
    pub max_evaluations: usize,
    /// Also search for `observed + error`.
    pub with_upper: bool,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self { alpha_tol: 0.01, max_evaluations: 40, with_upper: false }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub g: f64,
    pub value: f64,
    pub verified: bool,
}

/// Bracket `(g_low, g_high]` on the least `G` whose relaxation bound reaches
/// a target. `alpha` is the information of `g_low`, which is certified.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoBracket {
    pub target: f64,
    pub alpha: f64,
    pub g_low: f64,
    pub g_high: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InfoCertificate {
    pub observed: f64,
    pub error: f64,
    pub central: InfoBracket,
    /// At `observed - error`.
    pub lower: InfoBracket,
    /// At `observed + error`; `None` when not requested or above the bound at `G = 1`.
    pub upper: Option<InfoBracket>,
    /// Every relaxation solved, sorted by `G`.
    pub evaluations: Vec<Evaluation>,
    pub verified: bool,
}

struct Curve<'a> {
    w: &'a Witness,
    prior: &'a Prior,
    cfg: &'a HierarchyConfig,
    evals: Vec<Evaluation>,
    budget: usize,
}

impl Curve<'_> {
    fn at(&mut self, g: f64) -> Result<f64> {
        if let Some(e) = self.evals.iter().find(|e| e.g == g) {
            return Ok(e.value);
        }
        if self.evals.len() >= self.budget {
            return Err(Error::Solver(format!("information search exceeded {} relaxations", self.budget)));
        }
        let r = upper_bound(self.w, self.prior, g, self.cfg)?;
        log::info!("certify: G = {g:.6} bound {:.6} ({:?})", r.value, r.status);
        let pos = self.evals.partition_point(|e| e.g < g);
        self.evals.insert(pos, Evaluation { g, value: r.value, verified: r.verified });
        Ok(r.value)
    }

    // tightest cached bracket; assumes the bound is nondecreasing in G
    fn bracket(&self, v: f64) -> (Evaluation, Evaluation) {
        let hi = *self.evals.iter().find(|e| e.value >= v).expect("bound at G = 1 reaches the target");
        let lo = *self.evals.iter().rev().find(|e| e.g < hi.g && e.value < v).expect("bound at q_max misses the target");
        (lo, hi)
    }

    fn search(&mut self, v: f64, qmax: f64, tol: f64) -> Result<Option<InfoBracket>> {
        if self.at(1.0)? < v {
            return Ok(None);
        }
        if self.at(qmax)? >= v {
            return Ok(Some(InfoBracket { target: v, alpha: 0.0, g_low: qmax, g_high: qmax }));
        }
        let mut last_side = 0i8;
        let mut repeats = 0;
        loop {
            let (lo, hi) = self.bracket(v);
            if hi.g.log2() - lo.g.log2() <= tol {
                let alpha = guess_to_info(lo.g, self.prior)?;
                return Ok(Some(InfoBracket { target: v, alpha, g_low: lo.g, g_high: hi.g }));
            }
            // linear interpolation, falling back to bisection when one side
            // keeps moving (the bound is concave-like and stalls regula falsi)
            let width = hi.g - lo.g;
            let g = if repeats >= 2 {
                repeats = 0;
                0.5 * (lo.g + hi.g)
            } else {
                let t = (v - lo.value) / (hi.value - lo.value);
                lo.g + t.clamp(0.05, 0.95) * width
            };
            let side = if self.at(g)? >= v { 1 } else { -1 };
            if side == last_side {
                repeats += 1;
            } else {
                repeats = 0;
            }
            last_side = side;
        }
    }
}

/// Least information (bits) needed to reach `observed` under the relaxation
/// in `cfg`, found by a bracketing search over `G`. The lower and upper
/// brackets propagate the experimental `error`.
pub fn certify_info(
    w: &Witness,
    prior: &Prior,
    observed: f64,
    error: f64,
    cfg: &HierarchyConfig,
    opts: &CertifyOptions,
) -> Result<InfoCertificate> {
    if !observed.is_finite() || !(error >= 0.0) || !error.is_finite() {
        return Err(Error::OutOfRange(format!("observed {observed} with error {error}")));
    }
    if !(opts.alpha_tol > 0.0) {
        return Err(Error::OutOfRange(format!("alpha tolerance {} must be positive", opts.alpha_tol)));
    }
    let qmax = rational::to_f64(&prior.max());
    let mut curve = Curve { w, prior, cfg, evals: Vec::new(), budget: opts.max_evaluations };
    let central = curve.search(observed, qmax, opts.alpha_tol)?.ok_or_else(|| {
        Error::Infeasible(format!("observed value {observed} exceeds the relaxation bound at G = 1"))
    })?;
    let lower = if error > 0.0 {
        curve.search(observed - error, qmax, opts.alpha_tol)?.expect("a lower target is reachable")
    } else {
        central
    };
    let upper = if opts.with_upper && error > 0.0 {
        curve.search(observed + error, qmax, opts.alpha_tol)?
    } else {
        None
    };
    let verified = curve.evals.iter().all(|e| e.verified);
    Ok(InfoCertificate { observed, error, central, lower, upper, evaluations: curve.evals, verified })
}
