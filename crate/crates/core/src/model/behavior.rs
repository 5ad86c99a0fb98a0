use std::fmt::Write as _;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::Scenario;
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Default tolerance for positivity and normalization checks on float data.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Conditional table `p(b|x,y)`, stored flat with [`Scenario::index`].
#[derive(Clone, Debug, PartialEq)]
pub struct Behavior<T = f64> {
    scenario: Scenario,
    p: Vec<T>,
}

pub type ExactBehavior = Behavior<Rational>;

impl<T: Clone> Behavior<T> {
    pub fn from_vec(scenario: Scenario, p: Vec<T>) -> Result<Self> {
        if p.len() != scenario.behavior_len() {
            return Err(Error::ShapeMismatch(format!(
                "behavior has {} entries, scenario {scenario} needs {}",
                p.len(),
                scenario.behavior_len()
            )));
        }
        Ok(Self { scenario, p })
    }

    pub fn from_fn(scenario: Scenario, mut f: impl FnMut(usize, usize, usize) -> T) -> Self {
        let mut p = Vec::with_capacity(scenario.behavior_len());
        for x in 0..scenario.n_x {
            for y in 0..scenario.n_y {
                for b in 0..scenario.n_b {
                    p.push(f(b, x, y));
                }
            }
        }
        Self { scenario, p }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn get(&self, b: usize, x: usize, y: usize) -> &T {
        &self.p[self.scenario.index(b, x, y)]
    }

    pub fn as_slice(&self) -> &[T] {
        &self.p
    }
}

impl Behavior<f64> {
    /// Validated constructor: entries must be non-negative and normalized
    /// within `tol`.
    pub fn new(scenario: Scenario, p: Vec<f64>, tol: f64) -> Result<Self> {
        let b = Self::from_vec(scenario, p)?;
        b.validate(tol)?;
        Ok(b)
    }

    pub fn validate(&self, tol: f64) -> Result<()> {
        let s = self.scenario;
        for x in 0..s.n_x {
            for y in 0..s.n_y {
                let mut total = 0.0;
                for b in 0..s.n_b {
                    let v = *self.get(b, x, y);
                    if !v.is_finite() || v < -tol {
                        return Err(Error::InvalidBehavior(format!(
                            "p({}|{},{}) = {v} is negative",
                            b + 1,
                            x + 1,
                            y + 1
                        )));
                    }
                    total += v;
                }
                if (total - 1.0).abs() > tol {
                    return Err(Error::InvalidBehavior(format!(
                        "p(.|{},{}) sums to {total}",
                        x + 1,
                        y + 1
                    )));
                }
            }
        }
        Ok(())
    }

    /// Binary-outcome behavior from correlators `E_xy` (indexed `x*n_y + y`)
    /// through `p(1|x,y) = (1 + E_xy)/2`.
    pub fn from_correlators(scenario: Scenario, e: &[f64]) -> Result<Self> {
        if scenario.n_b != 2 {
            return Err(Error::ShapeMismatch("correlators need two outcomes".into()));
        }
        if e.len() != scenario.n_x * scenario.n_y {
            return Err(Error::ShapeMismatch(format!("expected {} correlators", scenario.n_x * scenario.n_y)));
        }
        Ok(Self::from_fn(scenario, |b, x, y| {
            let v = e[x * scenario.n_y + y];
            if b == 0 {
                (1.0 + v) / 2.0
            } else {
                (1.0 - v) / 2.0
            }
        }))
    }

    pub fn correlator(&self, x: usize, y: usize) -> f64 {
        self.get(0, x, y) - self.get(1, x, y)
    }

    pub fn correlators(&self) -> Vec<f64> {
        let s = self.scenario;
        (0..s.n_x).flat_map(|x| (0..s.n_y).map(move |y| (x, y))).map(|(x, y)| self.correlator(x, y)).collect()
    }

    /// `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, lambda: f64, other: &Self) -> Result<Self> {
        if self.scenario != other.scenario {
            return Err(Error::ShapeMismatch("mixing behaviors of different scenarios".into()));
        }
        let p = self.p.iter().zip(&other.p).map(|(a, b)| lambda * a + (1.0 - lambda) * b).collect();
        Ok(Self { scenario: self.scenario, p })
    }

    /// Uniformly random outcomes, independent of the inputs.
    pub fn uniform_noise(scenario: Scenario) -> Self {
        Self::from_fn(scenario, |_, _, _| 1.0 / scenario.n_b as f64)
    }

    /// Probabilities in the reduced chart (`b < n_b - 1`).
    pub fn reduced(&self) -> Vec<f64> {
        let s = self.scenario;
        let mut out = vec![0.0; s.reduced_len()];
        for x in 0..s.n_x {
            for y in 0..s.n_y {
                for b in 0..s.n_b - 1 {
                    out[s.reduced_index(b, x, y)] = *self.get(b, x, y);
                }
            }
        }
        out
    }

    pub fn to_csv(&self) -> String {
        let s = self.scenario;
        let mut out = String::from("b,x,y,p\n");
        for x in 0..s.n_x {
            for y in 0..s.n_y {
                for b in 0..s.n_b {
                    let _ = writeln!(out, "{},{},{},{}", b + 1, x + 1, y + 1, self.get(b, x, y));
                }
            }
        }
        out
    }
}

impl Behavior<Rational> {
    pub fn validate_exact(&self) -> Result<()> {
        let s = self.scenario;
        for x in 0..s.n_x {
            for y in 0..s.n_y {
                let mut total = Rational::zero();
                for b in 0..s.n_b {
                    let v = self.get(b, x, y);
                    if v.is_negative() {
                        return Err(Error::InvalidBehavior(format!("p({}|{},{}) is negative", b + 1, x + 1, y + 1)));
                    }
                    total += v;
                }
                if total != rational::int(1) {
                    return Err(Error::InvalidBehavior(format!("p(.|{},{}) does not sum to one", x + 1, y + 1)));
                }
            }
        }
        Ok(())
    }

    pub fn to_f64(&self) -> Behavior<f64> {
        Behavior { scenario: self.scenario, p: self.p.iter().map(rational::to_f64).collect() }
    }

    /// Exact counterpart of [`Behavior::from_correlators`].
    pub fn from_correlators_exact(scenario: Scenario, e: &[Rational]) -> Result<Self> {
        if scenario.n_b != 2 || e.len() != scenario.n_x * scenario.n_y {
            return Err(Error::ShapeMismatch("correlators need two outcomes and n_x*n_y entries".into()));
        }
        let half = rational::ratio(1, 2);
        Ok(Self::from_fn(scenario, |b, x, y| {
            let v = &e[x * scenario.n_y + y];
            if b == 0 {
                (rational::int(1) + v) * &half
            } else {
                (rational::int(1) - v) * &half
            }
        }))
    }

    pub fn reduced(&self) -> Vec<Rational> {
        let s = self.scenario;
        let mut out = vec![Rational::zero(); s.reduced_len()];
        for x in 0..s.n_x {
            for y in 0..s.n_y {
                for b in 0..s.n_b - 1 {
                    out[s.reduced_index(b, x, y)] = self.get(b, x, y).clone();
                }
            }
        }
        out
    }

    /// Rebuilds a full table from reduced coordinates.
    pub fn from_reduced(scenario: Scenario, reduced: &[Rational]) -> Result<Self> {
        if reduced.len() != scenario.reduced_len() {
            return Err(Error::ShapeMismatch("reduced coordinate length".into()));
        }
        Ok(Self::from_fn(scenario, |b, x, y| {
            if b + 1 < scenario.n_b {
                reduced[scenario.reduced_index(b, x, y)].clone()
            } else {
                let used: Rational = (0..scenario.n_b - 1).map(|bb| &reduced[scenario.reduced_index(bb, x, y)]).sum();
                rational::int(1) - used
            }
        }))
    }
}

/// JSON record: `{"scenario": {...}, "p": [[[p(1|1,1), p(2|1,1), ...], ...], ...]}`
/// with the nesting `x`, then `y`, then `b`. Entries may be numbers or
/// `"num/den"` strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BehaviorRecord {
    pub scenario: Scenario,
    pub p: Vec<Vec<Vec<Entry>>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Entry {
    Number(f64),
    Text(String),
}

impl Entry {
    fn exact(&self) -> Result<Rational> {
        match self {
            Entry::Text(s) => rational::parse(s),
            Entry::Number(v) => rational::parse(&format!("{v:e}")),
        }
    }

    fn float(&self) -> Result<f64> {
        match self {
            Entry::Number(v) => Ok(*v),
            Entry::Text(s) => Ok(rational::to_f64(&rational::parse(s)?)),
        }
    }

    fn is_text(&self) -> bool {
        matches!(self, Entry::Text(_))
    }
}

impl BehaviorRecord {
    fn flat(&self) -> Result<Vec<&Entry>> {
        let s = self.scenario;
        let shape_err = || Error::ShapeMismatch(format!("behavior array does not match scenario {s}"));
        if self.p.len() != s.n_x {
            return Err(shape_err());
        }
        let mut out = Vec::with_capacity(s.behavior_len());
        for row in &self.p {
            if row.len() != s.n_y {
                return Err(shape_err());
            }
            for col in row {
                if col.len() != s.n_b {
                    return Err(shape_err());
                }
                out.extend(col.iter());
            }
        }
        Ok(out)
    }

    /// Whether every entry was given as an exact fraction string.
    pub fn is_exact(&self) -> bool {
        self.p.iter().flatten().flatten().all(Entry::is_text)
    }

    pub fn to_behavior(&self) -> Result<Behavior<f64>> {
        let p = self.flat()?.into_iter().map(Entry::float).collect::<Result<Vec<_>>>()?;
        Behavior::from_vec(self.scenario, p)
    }

    pub fn to_exact(&self) -> Result<Behavior<Rational>> {
        let p = self.flat()?.into_iter().map(Entry::exact).collect::<Result<Vec<_>>>()?;
        Behavior::from_vec(self.scenario, p)
    }

    pub fn from_behavior(b: &Behavior<f64>) -> Self {
        let s = b.scenario();
        let p = (0..s.n_x)
            .map(|x| (0..s.n_y).map(|y| (0..s.n_b).map(|bb| Entry::Number(*b.get(bb, x, y))).collect()).collect())
            .collect();
        Self { scenario: s, p }
    }

    pub fn from_exact(b: &Behavior<Rational>) -> Self {
        let s = b.scenario();
        let p = (0..s.n_x)
            .map(|x| {
                (0..s.n_y)
                    .map(|y| (0..s.n_b).map(|bb| Entry::Text(rational::format(b.get(bb, x, y)))).collect())
                    .collect()
            })
            .collect();
        Self { scenario: s, p }
    }
}

/// Reads the `b,x,y,p` CSV layout (one-based indices).
pub fn behavior_from_csv(scenario: Scenario, text: &str) -> Result<Behavior<f64>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| Error::Parse("empty CSV".into()))?;
    let cols: Vec<_> = header.split(',').map(str::trim).collect();
    if cols != ["b", "x", "y", "p"] {
        return Err(Error::Parse(format!("expected header b,x,y,p, got `{header}`")));
    }
    let mut p = vec![f64::NAN; scenario.behavior_len()];
    for line in lines {
        let f: Vec<_> = line.split(',').map(str::trim).collect();
        if f.len() != 4 {
            return Err(Error::Parse(format!("bad CSV row `{line}`")));
        }
        let idx = |t: &str, n: usize| -> Result<usize> {
            let v: usize = t.parse().map_err(|_| Error::Parse(format!("bad index `{t}`")))?;
            if v == 0 || v > n {
                return Err(Error::Parse(format!("index {v} out of range 1..={n}")));
            }
            Ok(v - 1)
        };
        let (b, x, y) = (idx(f[0], scenario.n_b)?, idx(f[1], scenario.n_x)?, idx(f[2], scenario.n_y)?);
        let v = rational::to_f64(&rational::parse(f[3])?);
        p[scenario.index(b, x, y)] = v;
    }
    if p.iter().any(|v| v.is_nan()) {
        return Err(Error::Parse("CSV does not cover every (b,x,y)".into()));
    }
    Behavior::from_vec(scenario, p)
}
