use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Behavior, Scenario};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Linear functional `sum_{x,y,b} c_xyb p(b|x,y)` with exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    scenario: Scenario,
    c: Vec<Rational>,
    name: Option<String>,
}

/// Correlator form for binary outcomes: `offset + sum_xy e_xy E_xy`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorrelatorForm {
    pub offset: Rational,
    /// Indexed `x * n_y + y`.
    pub e: Vec<Rational>,
}

impl Witness {
    pub fn new(scenario: Scenario, c: Vec<Rational>) -> Result<Self> {
        if c.len() != scenario.behavior_len() {
            return Err(Error::ShapeMismatch(format!(
                "witness has {} coefficients, scenario {scenario} needs {}",
                c.len(),
                scenario.behavior_len()
            )));
        }
        Ok(Self { scenario, c, name: None })
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn zero(scenario: Scenario) -> Self {
        Self { scenario, c: vec![Rational::zero(); scenario.behavior_len()], name: Some("zero".into()) }
    }

    /// Builds `sum_xy e_xy E_xy` with `E_xy = p(1|x,y) - p(2|x,y)`.
    pub fn from_correlators(scenario: Scenario, e: &[Rational]) -> Result<Self> {
        if scenario.n_b != 2 {
            return Err(Error::ShapeMismatch("correlator witnesses need two outcomes".into()));
        }
        if e.len() != scenario.n_x * scenario.n_y {
            return Err(Error::ShapeMismatch(format!("expected {} correlator coefficients", scenario.n_x * scenario.n_y)));
        }
        let mut c = vec![Rational::zero(); scenario.behavior_len()];
        for x in 0..scenario.n_x {
            for y in 0..scenario.n_y {
                let v = &e[x * scenario.n_y + y];
                c[scenario.index(0, x, y)] = v.clone();
                c[scenario.index(1, x, y)] = -v.clone();
            }
        }
        Ok(Self { scenario, c, name: None })
    }

    /// `-E11 - E12 - E21 + E22 + E31` in the (3,2,2) scenario.
    pub fn a322() -> Self {
        let s = Scenario::new(3, 2, 2).unwrap();
        let e: Vec<Rational> = [-1, -1, -1, 1, 1, 0].iter().map(|&v| rational::int(v)).collect();
        Self::from_correlators(s, &e).unwrap().with_name("a322")
    }

    /// Random access code witness `(1/8) sum_{x,y} (-1)^{x_y} E_xy` where
    /// Alice's input `x` encodes two bits `(x_1, x_2)` as `x = 2 x_1 + x_2`
    /// (zero-based), and `(-1)^{x_y}` uses one-based bit labels: a bit value
    /// of 1 gives sign -1, a bit value of 2 gives +1.
    pub fn rac() -> Self {
        let s = Scenario::new(4, 2, 2).unwrap();
        let mut e = Vec::with_capacity(8);
        for x in 0..4 {
            let bits = [x / 2, x % 2];
            for bit in bits {
                e.push(if bit == 0 { rational::ratio(-1, 8) } else { rational::ratio(1, 8) });
            }
        }
        Self::from_correlators(s, &e).unwrap().with_name("rac")
    }

    /// Shipped witnesses by name: `a322`/`322`, `rac`/`rac22`.
    pub fn named(name: &str) -> Result<Self> {
        match name {
            "a322" | "322" => Ok(Self::a322()),
            "rac" | "rac22" => Ok(Self::rac()),
            other => Err(Error::Parse(format!("unknown witness `{other}`"))),
        }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn coefficient(&self, b: usize, x: usize, y: usize) -> &Rational {
        &self.c[self.scenario.index(b, x, y)]
    }

    pub fn coefficients(&self) -> &[Rational] {
        &self.c
    }

    pub fn coefficients_f64(&self) -> Vec<f64> {
        self.c.iter().map(rational::to_f64).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.c.iter().all(Zero::is_zero)
    }

    pub fn evaluate(&self, p: &Behavior<f64>) -> Result<f64> {
        self.check_shape(p.scenario())?;
        Ok(self.c.iter().zip(p.as_slice()).map(|(c, v)| rational::to_f64(c) * v).sum())
    }

    pub fn evaluate_exact(&self, p: &Behavior<Rational>) -> Result<Rational> {
        self.check_shape(p.scenario())?;
        Ok(self.c.iter().zip(p.as_slice()).map(|(c, v)| c * v).sum())
    }

    fn check_shape(&self, s: Scenario) -> Result<()> {
        if s != self.scenario {
            return Err(Error::ShapeMismatch(format!("witness is for {}, behavior for {s}", self.scenario)));
        }
        Ok(())
    }

    /// Correlator form; only defined for two outcomes.
    pub fn correlator_form(&self) -> Result<CorrelatorForm> {
        let s = self.scenario;
        if s.n_b != 2 {
            return Err(Error::ShapeMismatch("correlator form needs two outcomes".into()));
        }
        let half = rational::ratio(1, 2);
        let mut offset = Rational::zero();
        let mut e = Vec::with_capacity(s.n_x * s.n_y);
        for x in 0..s.n_x {
            for y in 0..s.n_y {
                let (c1, c2) = (self.coefficient(0, x, y), self.coefficient(1, x, y));
                offset += (c1 + c2) * &half;
                e.push((c1 - c2) * &half);
            }
        }
        Ok(CorrelatorForm { offset, e })
    }
}

impl CorrelatorForm {
    pub fn evaluate(&self, correlators: &[f64]) -> f64 {
        rational::to_f64(&self.offset)
            + self.e.iter().zip(correlators).map(|(c, v)| rational::to_f64(c) * v).sum::<f64>()
    }

    pub fn evaluate_exact(&self, correlators: &[Rational]) -> Rational {
        &self.offset + self.e.iter().zip(correlators).map(|(c, v)| c * v).sum::<Rational>()
    }
}

/// JSON record. Either `c` (nested `x`, `y`, `b`) or `correlators` (nested
/// `x`, `y`) must be given; entries are `"num/den"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub scenario: Scenario,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<Vec<Vec<Vec<String>>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correlators: Option<Vec<Vec<String>>>,
}

impl WitnessRecord {
    pub fn to_witness(&self) -> Result<Witness> {
        let s = self.scenario;
        let w = match (&self.c, &self.correlators) {
            (Some(c), None) => {
                let mut flat = vec![Rational::zero(); s.behavior_len()];
                if c.len() != s.n_x {
                    return Err(Error::ShapeMismatch("witness array".into()));
                }
                for (x, row) in c.iter().enumerate() {
                    if row.len() != s.n_y {
                        return Err(Error::ShapeMismatch("witness array".into()));
                    }
                    for (y, col) in row.iter().enumerate() {
                        if col.len() != s.n_b {
                            return Err(Error::ShapeMismatch("witness array".into()));
                        }
                        for (b, v) in col.iter().enumerate() {
                            flat[s.index(b, x, y)] = rational::parse(v)?;
                        }
                    }
                }
                Witness::new(s, flat)?
            }
            (None, Some(e)) => {
                if e.len() != s.n_x || e.iter().any(|r| r.len() != s.n_y) {
                    return Err(Error::ShapeMismatch("correlator array".into()));
                }
                let flat = e.iter().flatten().map(|v| rational::parse(v)).collect::<Result<Vec<_>>>()?;
                Witness::from_correlators(s, &flat)?
            }
            _ => return Err(Error::Parse("witness needs exactly one of `c` or `correlators`".into())),
        };
        Ok(match &self.name {
            Some(n) => w.with_name(n.clone()),
            None => w,
        })
    }

    pub fn from_witness(w: &Witness) -> Self {
        let s = w.scenario();
        let c = (0..s.n_x)
            .map(|x| (0..s.n_y).map(|y| (0..s.n_b).map(|b| rational::format(w.coefficient(b, x, y))).collect()).collect())
            .collect();
        Self { scenario: s, name: w.name().map(str::to_string), c: Some(c), correlators: None }
    }
}
