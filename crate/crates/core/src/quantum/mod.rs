//! Explicit finite-dimensional quantum strategies: ensembles of states,
//! measurements, the guessing-probability SDP and see-saw lower bounds.

mod fixtures;
mod guessing;
pub mod herm;
mod linalg;
mod seesaw;

use nalgebra::{Complex, DMatrix};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Behavior, Prior, Scenario};

pub use fixtures::{qutrit_measurements, qutrit_states};
pub use guessing::{
    guessing_probability, guessing_probability_with, pure_boundary_212, pure_pair_guessing,
    pure_pair_min_overlap, Guessing,
};
pub use linalg::{eigenvalues, hermitize, is_psd, ket, projector, random_povm, random_state};
pub use seesaw::{seesaw_optimize, SeesawConfig, SeesawResult};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;

/// Tolerance for Hermiticity, positivity and normalization checks.
pub const QUANTUM_TOL: f64 = 1e-10;

fn check_hermitian(m: &CMatrix, dim: usize, what: &str) -> Result<()> {
    if m.nrows() != dim || m.ncols() != dim {
        return Err(Error::ShapeMismatch(format!("{what} is {}x{}, expected {dim}x{dim}", m.nrows(), m.ncols())));
    }
    if (m - m.adjoint()).iter().any(|z| z.norm() > QUANTUM_TOL) {
        return Err(Error::InvalidQuantum(format!("{what} is not Hermitian")));
    }
    if !is_psd(m, QUANTUM_TOL) {
        return Err(Error::InvalidQuantum(format!("{what} is not positive semidefinite")));
    }
    Ok(())
}

/// States `rho_x` sent with probabilities `q_x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleRecord", into = "EnsembleRecord")]
pub struct Ensemble {
    dim: usize,
    states: Vec<CMatrix>,
    prior: Prior,
}

impl Ensemble {
    pub fn new(states: Vec<CMatrix>, prior: Prior) -> Result<Self> {
        if states.len() != prior.len() {
            return Err(Error::ShapeMismatch(format!("{} states for a prior of length {}", states.len(), prior.len())));
        }
        let dim = states.first().map_or(0, |s| s.nrows());
        if dim == 0 {
            return Err(Error::InvalidQuantum("empty ensemble".into()));
        }
        for (x, s) in states.iter().enumerate() {
            check_hermitian(s, dim, &format!("state {x}"))?;
            if (s.trace().re - 1.0).abs() > QUANTUM_TOL {
                return Err(Error::InvalidQuantum(format!("state {x} has trace {}", s.trace().re)));
            }
        }
        Ok(Self { dim, states, prior })
    }

    /// Ensemble of pure states given by (not necessarily normalized) kets.
    pub fn pure(kets: &[Vec<C64>], prior: Prior) -> Result<Self> {
        Self::new(kets.iter().map(|k| projector(k)).collect(), prior)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn states(&self) -> &[CMatrix] {
        &self.states
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// One POVM per measurement setting `y`, all with the same outcome count.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeasurementRecord", into = "MeasurementRecord")]
pub struct MeasurementSet {
    dim: usize,
    povms: Vec<Vec<CMatrix>>,
}

impl MeasurementSet {
    pub fn new(povms: Vec<Vec<CMatrix>>) -> Result<Self> {
        let dim = povms.first().and_then(|p| p.first()).map_or(0, |m| m.nrows());
        if dim == 0 {
            return Err(Error::InvalidQuantum("empty measurement set".into()));
        }
        let n_b = povms[0].len();
        let id = CMatrix::identity(dim, dim);
        for (y, povm) in povms.iter().enumerate() {
            if povm.len() != n_b {
                return Err(Error::ShapeMismatch(format!("setting {y} has {} outcomes, expected {n_b}", povm.len())));
            }
            for (b, m) in povm.iter().enumerate() {
                check_hermitian(m, dim, &format!("element {b} of setting {y}"))?;
            }
            let sum: CMatrix = povm.iter().sum();
            if (sum - &id).iter().any(|z| z.norm() > QUANTUM_TOL) {
                return Err(Error::InvalidQuantum(format!("setting {y} does not sum to the identity")));
            }
        }
        Ok(Self { dim, povms })
    }

    /// Two-outcome projective measurements: outcome 0 projects onto the span
    /// of the given kets, outcome 1 onto its complement.
    pub fn binary_projective(spans: &[Vec<Vec<C64>>], dim: usize) -> Result<Self> {
        let id = CMatrix::identity(dim, dim);
        let povms = spans
            .iter()
            .map(|kets| {
                let p: CMatrix = kets.iter().map(|k| projector(k)).sum();
                vec![p.clone(), id.clone() - p]
            })
            .collect();
        Self::new(povms)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_y(&self) -> usize {
        self.povms.len()
    }

    pub fn n_b(&self) -> usize {
        self.povms[0].len()
    }

    pub fn povms(&self) -> &[Vec<CMatrix>] {
        &self.povms
    }

    pub fn element(&self, b: usize, y: usize) -> &CMatrix {
        &self.povms[y][b]
    }
}

/// `Re Tr[a b]` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> f64 {
    let d = a.nrows();
    let mut s = 0.0;
    for i in 0..d {
        for j in 0..d {
            s += (a[(i, j)] * b[(j, i)]).re;
        }
    }
    s
}

/// `p(b|x,y) = Tr[rho_x M_{b|y}]`, with round-off negatives set to zero.
pub fn born_behavior(e: &Ensemble, m: &MeasurementSet) -> Result<Behavior> {
    if e.dim() != m.dim() {
        return Err(Error::ShapeMismatch(format!("states have dimension {}, measurements {}", e.dim(), m.dim())));
    }
    let s = Scenario::new(e.len(), m.n_y(), m.n_b())?;
    let p = Behavior::from_fn(s, |b, x, y| {
        let v = trace_product(&e.states[x], m.element(b, y));
        if v < 0.0 && v > -1e-9 {
            0.0
        } else {
            v
        }
    });
    p.validate(1e-8)?;
    Ok(p)
}

type MatrixRecord = Vec<Vec<[f64; 2]>>;

fn to_record(m: &CMatrix) -> MatrixRecord {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

fn from_record(r: &MatrixRecord) -> Result<CMatrix> {
    let n = r.len();
    if r.iter().any(|row| row.len() != n) {
        return Err(Error::ShapeMismatch("matrix rows have unequal lengths".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| C64::new(r[i][j][0], r[i][j][1])))
}

/// JSON layout: matrices as row lists of `[re, im]` pairs.
#[derive(Serialize, Deserialize)]
struct EnsembleRecord {
    prior: Prior,
    states: Vec<MatrixRecord>,
}

impl TryFrom<EnsembleRecord> for Ensemble {
    type Error = Error;
    fn try_from(r: EnsembleRecord) -> Result<Self> {
        let states = r.states.iter().map(from_record).collect::<Result<_>>()?;
        Ensemble::new(states, r.prior)
    }
}

impl From<Ensemble> for EnsembleRecord {
    fn from(e: Ensemble) -> Self {
        EnsembleRecord { prior: e.prior, states: e.states.iter().map(to_record).collect() }
    }
}

#[derive(Serialize, Deserialize)]
struct MeasurementRecord {
    povms: Vec<Vec<MatrixRecord>>,
}

impl TryFrom<MeasurementRecord> for MeasurementSet {
    type Error = Error;
    fn try_from(r: MeasurementRecord) -> Result<Self> {
        let povms = r
            .povms
            .iter()
            .map(|p| p.iter().map(from_record).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        MeasurementSet::new(povms)
    }
}

impl From<MeasurementSet> for MeasurementRecord {
    fn from(m: MeasurementSet) -> Self {
        MeasurementRecord { povms: m.povms.iter().map(|p| p.iter().map(to_record).collect()).collect() }
    }
}
