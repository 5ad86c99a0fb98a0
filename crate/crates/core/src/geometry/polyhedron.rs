use num_traits::{Signed, Zero};

use super::{h_to_v, remove_redundant, v_to_h, DdOptions, LinearSystem, VRep};
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Both representations of one polyhedron.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RationalPolyhedron {
    pub h: LinearSystem,
    pub v: VRep,
}

impl RationalPolyhedron {
    /// The H-representation is made irredundant before conversion.
    pub fn from_h(h: &LinearSystem, opts: &DdOptions) -> Result<Self> {
        let h = remove_redundant(h);
        let v = h_to_v(&h, opts)?;
        Ok(Self { h, v })
    }

    pub fn from_v(labels: Vec<String>, v: VRep, opts: &DdOptions) -> Result<Self> {
        let h = v_to_h(labels, &v, opts)?;
        Ok(Self { h, v })
    }

    pub fn labels(&self) -> &[String] {
        &self.h.labels
    }

    pub fn dim(&self) -> usize {
        self.h.dim()
    }

    /// Every vertex satisfies every constraint; rays and lines have the
    /// right slope against every row.
    pub fn check_consistency(&self) -> Result<()> {
        for (k, x) in self.v.vertices.iter().enumerate() {
            if !self.h.contains(x) {
                return Err(Error::InvalidBehavior(format!("vertex {k} violates the H-representation")));
            }
        }
        let slope = |r: &[Rational], row: &super::Row| -> Rational { row.a.iter().zip(r).map(|(a, v)| a * v).sum() };
        for r in &self.v.rays {
            if self.h.inequalities.iter().any(|row| slope(r, row).is_negative())
                || self.h.equalities.iter().any(|row| !slope(r, row).is_zero())
            {
                return Err(Error::InvalidBehavior("ray leaves the polyhedron".into()));
            }
        }
        for l in &self.v.lines {
            if self.h.inequalities.iter().chain(&self.h.equalities).any(|row| !slope(l, row).is_zero()) {
                return Err(Error::InvalidBehavior("line leaves the polyhedron".into()));
            }
        }
        Ok(())
    }
}
