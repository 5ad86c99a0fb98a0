//! A pure qutrit strategy that beats every qubit strategy for the (3,2,2)
//! witness at the prior `(2/5, 2/5, 1/5)`.

use super::{ket, projector, CMatrix, MeasurementSet};

/// `(sqrt3, 1, 0)/2`, `(1, sqrt3, 0)/2` and `(0, 0, 1)`.
pub fn qutrit_states() -> Vec<CMatrix> {
    let r = 3f64.sqrt() / 2.0;
    [[r, 0.5, 0.0], [0.5, r, 0.0], [0.0, 0.0, 1.0]].iter().map(|k| projector(&ket(k))).collect()
}

/// Outcome 0 projects onto `|3>` (first setting) or `|2>` (second setting),
/// outcome 1 onto the orthogonal complement.
pub fn qutrit_measurements() -> MeasurementSet {
    MeasurementSet::binary_projective(&[vec![ket(&[0.0, 0.0, 1.0])], vec![ket(&[0.0, 1.0, 0.0])]], 3).unwrap()
}
