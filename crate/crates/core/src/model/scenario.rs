use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `(n_x, n_y, n_b)` prepare-and-measure setting: Alice's inputs, Bob's
/// inputs and Bob's outcomes. Indices are zero-based throughout the crate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Scenario {
    pub n_x: usize,
    pub n_y: usize,
    pub n_b: usize,
}

impl Scenario {
    pub fn new(n_x: usize, n_y: usize, n_b: usize) -> Result<Self> {
        if n_x == 0 || n_y == 0 || n_b == 0 {
            return Err(Error::InvalidScenario(format!(
                "all sizes must be positive, got ({n_x},{n_y},{n_b})"
            )));
        }
        Ok(Self { n_x, n_y, n_b })
    }

    /// Shipped names: `322`, `212`, `211`, `rac22` (the 4-input random access
    /// code setting), or an explicit `nx,ny,nb` triple.
    pub fn parse(s: &str) -> Result<Self> {
        match s.trim() {
            "322" => Self::new(3, 2, 2),
            "212" => Self::new(2, 1, 2),
            "211" => Self::new(2, 1, 1),
            "222" => Self::new(2, 2, 2),
            "rac22" | "rac" => Self::new(4, 2, 2),
            other => {
                let parts: Vec<_> = other.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(Error::InvalidScenario(format!("cannot parse scenario `{other}`")));
                }
                let p = |t: &str| {
                    t.parse::<usize>()
                        .map_err(|_| Error::InvalidScenario(format!("bad size `{t}` in `{other}`")))
                };
                Self::new(p(parts[0])?, p(parts[1])?, p(parts[2])?)
            }
        }
    }

    /// Number of entries of a behavior table `p(b|x,y)`.
    pub fn behavior_len(&self) -> usize {
        self.n_x * self.n_y * self.n_b
    }

    /// Flat position of `p(b|x,y)`; outcomes vary fastest, then `y`, then `x`.
    #[inline]
    pub fn index(&self, b: usize, x: usize, y: usize) -> usize {
        debug_assert!(b < self.n_b && x < self.n_x && y < self.n_y);
        (x * self.n_y + y) * self.n_b + b
    }

    /// Coordinates `p(b|x,y)` for `b < n_b - 1`, the affine chart used for
    /// polyhedral work (the last outcome is fixed by normalization).
    pub fn reduced_len(&self) -> usize {
        self.n_x * self.n_y * (self.n_b - 1)
    }

    #[inline]
    pub fn reduced_index(&self, b: usize, x: usize, y: usize) -> usize {
        debug_assert!(b + 1 < self.n_b);
        (x * self.n_y + y) * (self.n_b - 1) + b
    }

    pub fn has_correlators(&self) -> bool {
        self.n_b == 2
    }

    pub fn label(&self) -> String {
        format!("{},{},{}", self.n_x, self.n_y, self.n_b)
    }
}

impl std::fmt::Display for Scenario {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.n_x, self.n_y, self.n_b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_named_and_explicit() {
        assert_eq!(Scenario::parse("322").unwrap(), Scenario { n_x: 3, n_y: 2, n_b: 2 });
        assert_eq!(Scenario::parse("rac22").unwrap().n_x, 4);
        assert_eq!(Scenario::parse("2, 3, 4").unwrap(), Scenario { n_x: 2, n_y: 3, n_b: 4 });
        assert!(Scenario::parse("0,1,1").is_err());
        assert!(Scenario::parse("1,2").is_err());
    }

    #[test]
    fn indices_are_dense() {
        let s = Scenario::new(3, 2, 3).unwrap();
        let mut seen = vec![false; s.behavior_len()];
        for x in 0..3 {
            for y in 0..2 {
                for b in 0..3 {
                    seen[s.index(b, x, y)] = true;
                }
            }
        }
        assert!(seen.into_iter().all(|v| v));
    }
}
