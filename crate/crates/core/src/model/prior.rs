use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Prior `q_x` entering the guessing-probability bound. Exact rationals.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PriorRecord", into = "PriorRecord")]
pub struct Prior {
    q: Vec<Rational>,
}

#[derive(Serialize, Deserialize)]
struct PriorRecord {
    #[serde(with = "rational::serde_rational_vec")]
    q: Vec<Rational>,
}

impl TryFrom<PriorRecord> for Prior {
    type Error = Error;
    fn try_from(r: PriorRecord) -> Result<Self> {
        Prior::new(r.q)
    }
}

impl From<Prior> for PriorRecord {
    fn from(p: Prior) -> Self {
        PriorRecord { q: p.q }
    }
}

impl Prior {
    pub fn new(q: Vec<Rational>) -> Result<Self> {
        if q.is_empty() {
            return Err(Error::InvalidPrior("empty prior".into()));
        }
        if q.iter().any(|v| v.is_negative()) {
            return Err(Error::InvalidPrior("negative entry".into()));
        }
        let total: Rational = q.iter().sum();
        if total != rational::int(1) {
            return Err(Error::InvalidPrior(format!("entries sum to {}", rational::format(&total))));
        }
        Ok(Self { q })
    }

    pub fn uniform(n: usize) -> Self {
        Self { q: vec![rational::ratio(1, n as i64); n] }
    }

    /// `uniform` or a comma separated list of rationals/decimals.
    pub fn parse(s: &str, n_x: usize) -> Result<Self> {
        let s = s.trim();
        let prior = if s == "uniform" {
            Self::uniform(n_x)
        } else {
            let q = s.split(',').map(rational::parse).collect::<Result<Vec<_>>>()?;
            Self::new(q)?
        };
        if prior.len() != n_x {
            return Err(Error::InvalidPrior(format!(
                "prior has {} entries, scenario has {n_x} inputs",
                prior.len()
            )));
        }
        Ok(prior)
    }

    pub fn len(&self) -> usize {
        self.q.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q.is_empty()
    }

    pub fn get(&self, x: usize) -> &Rational {
        &self.q[x]
    }

    pub fn values(&self) -> &[Rational] {
        &self.q
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.q.iter().map(rational::to_f64).collect()
    }

    pub fn max(&self) -> Rational {
        self.q.iter().max().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn min(&self) -> Rational {
        self.q.iter().min().cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_uniform(&self) -> bool {
        self.q.iter().all(|v| *v == self.q[0])
    }

    pub fn label(&self) -> String {
        if self.is_uniform() {
            "uniform".to_string()
        } else {
            self.q.iter().map(rational::format).collect::<Vec<_>>().join(",")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    #[test]
    fn rejects_bad_priors() {
        assert!(Prior::new(vec![ratio(1, 2), ratio(1, 3)]).is_err());
        assert!(Prior::new(vec![ratio(3, 2), ratio(-1, 2)]).is_err());
        assert!(Prior::new(vec![]).is_err());
    }

    #[test]
    fn parses_decimal_lists() {
        let p = Prior::parse("0.6,0.4", 2).unwrap();
        assert_eq!(p.max(), ratio(3, 5));
        assert_eq!(p.min(), ratio(2, 5));
        assert!(Prior::parse("0.6,0.4", 3).is_err());
        assert!(Prior::parse("uniform", 3).unwrap().is_uniform());
    }

    #[test]
    fn json_uses_fraction_strings() {
        let p = Prior::parse("2/5,2/5,1/5", 3).unwrap();
        let js = serde_json::to_string(&p).unwrap();
        assert_eq!(js, r#"{"q":["2/5","2/5","1/5"]}"#);
        let back: Prior = serde_json::from_str(&js).unwrap();
        assert_eq!(back, p);
        assert!(serde_json::from_str::<Prior>(r#"{"q":["1/2","1/3"]}"#).is_err());
    }
}
