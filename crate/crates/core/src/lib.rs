//! Prepare-and-measure correlations under a bound `G` on the guessing
//! probability of Alice's input.
//!
//! The classical side is exact: the lifted polyhedra over `(p, G)` are built
//! in rational arithmetic and their facets enumerated by double description.
//! The quantum side is numerical: see-saw gives lower bounds and a tracial
//! moment hierarchy gives upper bounds, both through the conic solver adapter.

// links the system OpenBLAS used by the SDP backend
use openblas_src as _;

pub mod classical;
pub mod error;
pub mod geometry;
pub mod hierarchy;
pub mod model;
pub mod quantum;
pub mod rational;
pub mod solver;

pub use error::{Error, Result};

