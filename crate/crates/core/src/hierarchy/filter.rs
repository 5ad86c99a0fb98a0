use std::fmt;

use serde::{Deserialize, Serialize};

use super::word::{reduce, Mode, Sym, Word};
use crate::error::{Error, Result};
use crate::model::Scenario;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum Kind {
    Rho,
    Sigma,
    M,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
enum Entry {
    /// Every word whose letters have these kinds, e.g. `rm` for all
    /// `rho_x M_{b|y}`. Expanded literally, without reduction.
    Pattern(Vec<Kind>),
    Word(String),
}

/// Explicit list of monomials spanning a moment or localizing matrix.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filter {
    pub name: String,
    entries: Vec<Entry>,
}

/// Moment-matrix monomials for the (3,2,2) scenario at level three.
const FIXED_322: &str = "1, s, r, m, rm, rr, mm, rs, ms, rrr, mms, rmm, rms, rmr";
/// Localizing-matrix monomials paired with [`FIXED_322`].
const FIXED_322_LOCALIZER: &str = "1, r, m, rr, mm, rm";

impl Filter {
    /// Comma-separated entries. An entry made only of the letters `r`, `s`,
    /// `m` is a pattern; anything else is a single word such as `r1 m1|2`.
    pub fn parse(name: &str, text: &str) -> Result<Self> {
        let mut entries = Vec::new();
        for e in text.split(',').map(str::trim).filter(|e| !e.is_empty()) {
            if e == "1" {
                entries.push(Entry::Pattern(Vec::new()));
            } else if e.chars().all(|c| matches!(c, 'r' | 's' | 'm')) {
                let kinds = e
                    .chars()
                    .map(|c| match c {
                        'r' => Kind::Rho,
                        's' => Kind::Sigma,
                        _ => Kind::M,
                    })
                    .collect();
                entries.push(Entry::Pattern(kinds));
            } else {
                Word::parse(e).map_err(|err| Error::InvalidFilter(format!("{e}: {err}")))?;
                entries.push(Entry::Word(e.to_string()));
            }
        }
        if entries.is_empty() {
            return Err(Error::InvalidFilter("empty filter".into()));
        }
        Ok(Self { name: name.to_string(), entries })
    }

    /// Shipped presets: `fixed-322` and `fixed-322-localizer`.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "fixed-322" => Self::parse(name, FIXED_322),
            "fixed-322-localizer" => Self::parse(name, FIXED_322_LOCALIZER),
            _ => Err(Error::InvalidFilter(format!("unknown preset `{name}`"))),
        }
    }

    /// A preset name, or an inline list.
    pub fn resolve(spec: &str) -> Result<Self> {
        Self::preset(spec).or_else(|_| Self::parse("custom", spec))
    }

    pub fn max_degree(&self) -> usize {
        self.entries
            .iter()
            .map(|e| match e {
                Entry::Pattern(k) => k.len(),
                Entry::Word(w) => Word::parse(w).map_or(0, |w| w.degree()),
            })
            .max()
            .unwrap_or(0)
    }

    /// The monomials in order. Explicit words must use only substituted
    /// symbols and be irreducible.
    pub fn expand(&self, s: Scenario, mode: Mode) -> Result<Vec<Word>> {
        let mut out = Vec::new();
        for e in &self.entries {
            match e {
                Entry::Pattern(kinds) => {
                    let mut words = vec![Vec::new()];
                    for k in kinds {
                        let choices = choices(*k, s);
                        words = words
                            .iter()
                            .flat_map(|w: &Vec<Sym>| {
                                choices.iter().map(move |&c| {
                                    let mut v = w.clone();
                                    v.push(c);
                                    v
                                })
                            })
                            .collect();
                    }
                    out.extend(words.into_iter().map(Word));
                }
                Entry::Word(text) => {
                    let w = Word::parse(text)?;
                    for sym in &w.0 {
                        sym.check(s).map_err(|err| Error::InvalidFilter(err.to_string()))?;
                        if matches!(sym, Sym::M { b, .. } if *b == s.n_b - 1) {
                            return Err(Error::InvalidFilter(format!(
                                "`{text}` uses a last-outcome operator, which is substituted away"
                            )));
                        }
                    }
                    if reduce(&w, mode).as_ref() != Some(&w) {
                        return Err(Error::InvalidFilter(format!("`{text}` is not in canonical form")));
                    }
                    out.push(w);
                }
            }
        }
        Ok(out)
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

fn choices(k: Kind, s: Scenario) -> Vec<Sym> {
    match k {
        Kind::Rho => (0..s.n_x).map(Sym::Rho).collect(),
        Kind::Sigma => vec![Sym::Sigma],
        Kind::M => (0..s.n_y).flat_map(|y| (0..s.n_b - 1).map(move |b| Sym::M { y, b })).collect(),
    }
}

/// The basic operators left after substituting the last outcome.
pub fn symbols(s: Scenario) -> Vec<Sym> {
    [Kind::Rho, Kind::Sigma, Kind::M].into_iter().flat_map(|k| choices(k, s)).collect()
}

/// All irreducible words of degree at most `k`, by degree then lexicographically.
pub fn level_basis(s: Scenario, k: usize, mode: Mode) -> Vec<Word> {
    let syms = symbols(s);
    let mut out = vec![Word::identity()];
    let mut frontier = vec![Word::identity()];
    for _ in 0..k {
        let mut next = Vec::new();
        for w in &frontier {
            for &c in &syms {
                let mut v = w.0.clone();
                v.push(c);
                let v = Word(v);
                if reduce(&v, mode).as_ref() == Some(&v) {
                    next.push(v);
                }
            }
        }
        if mode == Mode::Commuting {
            // sorted words only, each multiset once
            next.retain(|w| w.0.windows(2).all(|p| p[0] <= p[1]));
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_presets_have_the_stated_sizes() {
        let s = Scenario::new(3, 2, 2).unwrap();
        assert_eq!(Filter::preset("fixed-322").unwrap().expand(s, Mode::Pure).unwrap().len(), 98);
        assert_eq!(Filter::preset("fixed-322-localizer").unwrap().expand(s, Mode::Pure).unwrap().len(), 25);
        assert_eq!(Filter::preset("fixed-322").unwrap().max_degree(), 3);
    }

    #[test]
    fn level_one_symbol_count() {
        for (nx, ny, nb) in [(3, 2, 2), (2, 1, 2), (4, 2, 2), (3, 2, 3)] {
            let s = Scenario::new(nx, ny, nb).unwrap();
            assert_eq!(level_basis(s, 1, Mode::General).len(), 1 + nx + 1 + (nb - 1) * ny);
        }
    }

    #[test]
    fn explicit_words_are_checked() {
        let s = Scenario::new(3, 2, 2).unwrap();
        let f = Filter::parse("x", "1, r1 m1|2, s").unwrap();
        assert_eq!(f.expand(s, Mode::General).unwrap().len(), 3);
        assert!(Filter::parse("x", "m2|1").unwrap().expand(s, Mode::General).is_err());
        assert!(Filter::parse("x", "m1|1 m1|1").unwrap().expand(s, Mode::General).is_err());
        assert!(Filter::parse("x", "r1 r1").unwrap().expand(s, Mode::Pure).is_err());
        assert!(Filter::parse("x", "r1 r1").unwrap().expand(s, Mode::General).is_ok());
        assert!(Filter::parse("x", "r9").unwrap().expand(s, Mode::General).is_err());
        assert!(Filter::parse("x", "q").is_err());
    }

    #[test]
    fn commuting_level_two_counts_multisets() {
        let s = Scenario::new(2, 1, 2).unwrap();
        // symbols r1 r2 s m1|1: 4 singles, 10 multisets of two minus m m
        assert_eq!(level_basis(s, 2, Mode::Commuting).len(), 1 + 4 + 9);
    }
}
