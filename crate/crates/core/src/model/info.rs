//! Conversions between the guessing-probability bound `G` and the
//! min-entropy information measure `alpha = log2 G - log2 max_x q_x`.

use serde::{Deserialize, Serialize};

use super::Prior;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

const SLACK: f64 = 1e-12;

/// A guessing-probability bound together with its information content in
/// bits and the one-shot channel error `1 - G`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InfoBound {
    pub g: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

impl InfoBound {
    pub fn from_guess(g: f64, prior: &Prior) -> Result<Self> {
        let alpha = guess_to_info(g, prior)?;
        Ok(Self { g, alpha, epsilon: 1.0 - g })
    }

    pub fn from_info(alpha: f64, prior: &Prior) -> Result<Self> {
        let g = info_to_guess(alpha, prior)?;
        Ok(Self { g, alpha, epsilon: 1.0 - g })
    }
}

/// `G = max_x q_x * 2^alpha`; errors if that exceeds one.
pub fn info_to_guess(alpha: f64, prior: &Prior) -> Result<f64> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::OutOfRange(format!("information {alpha} must be a finite non-negative number")));
    }
    let g = rational::to_f64(&prior.max()) * alpha.exp2();
    if g > 1.0 + SLACK {
        return Err(Error::OutOfRange(format!(
            "{alpha} bits exceeds the maximum {} for this prior",
            -rational::to_f64(&prior.max()).log2()
        )));
    }
    Ok(g.min(1.0))
}

/// Exact version for a whole number of bits.
pub fn bits_to_guess_exact(bits: u32, prior: &Prior) -> Result<Rational> {
    let g = prior.max() * rational::int(1i64 << bits);
    if g > rational::int(1) {
        return Err(Error::OutOfRange(format!("{bits} bits exceeds the maximum for this prior")));
    }
    Ok(g)
}

/// `alpha = log2 G - log2 max_x q_x`, defined for `max_x q_x <= G <= 1`.
pub fn guess_to_info(g: f64, prior: &Prior) -> Result<f64> {
    let qmax = rational::to_f64(&prior.max());
    if !g.is_finite() || g < qmax - SLACK || g > 1.0 + SLACK {
        return Err(Error::OutOfRange(format!("guessing probability {g} outside [{qmax}, 1]")));
    }
    let g = g.clamp(qmax, 1.0);
    Ok((g.log2() - qmax.log2()).max(0.0))
}
