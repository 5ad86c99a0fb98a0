use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Scenario;

/// Which algebra the operators satisfy.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Mixed states: `rho_x - rho_x^2 >= 0`.
    General,
    /// Pure states: `rho_x^2 = rho_x`.
    Pure,
    /// Everything commutes; bounds the classical set.
    Commuting,
}

impl std::str::FromStr for Mode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "general" | "q" | "mixed" => Ok(Self::General),
            "pure" | "q_pure" | "qpure" => Ok(Self::Pure),
            "commuting" | "classical" | "c" => Ok(Self::Commuting),
            _ => Err(Error::Parse(format!("unknown hierarchy mode `{s}`"))),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::General => "general",
            Self::Pure => "pure",
            Self::Commuting => "commuting",
        })
    }
}

/// A basic operator. All are self-adjoint. Measurement operators are
/// ordered by setting first so that commuting words group them.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Sym {
    Rho(usize),
    Sigma,
    M { y: usize, b: usize },
}

impl fmt::Display for Sym {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Rho(x) => write!(f, "r{}", x + 1),
            Self::Sigma => write!(f, "s"),
            Self::M { y, b } => write!(f, "m{}|{}", b + 1, y + 1),
        }
    }
}

impl Sym {
    pub fn check(&self, s: Scenario) -> Result<()> {
        let ok = match *self {
            Self::Rho(x) => x < s.n_x,
            Self::Sigma => true,
            Self::M { y, b } => y < s.n_y && b < s.n_b,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::OutOfRange(format!("operator {self} is outside scenario {s}")))
        }
    }
}

/// Product of basic operators; the empty word is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Sym>);

impl Word {
    pub fn identity() -> Self {
        Self(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.iter().rev().copied().collect())
    }

    pub fn concat(parts: &[&Word]) -> Self {
        Self(parts.iter().flat_map(|w| w.0.iter().copied()).collect())
    }

    /// Parses `1` or space/`*`-separated symbols such as `r1 m1|2 s`.
    pub fn parse(text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "1" || t.is_empty() {
            return Ok(Self::identity());
        }
        t.split(|c: char| c == '*' || c.is_whitespace()).filter(|p| !p.is_empty()).map(parse_sym).collect::<Result<_>>().map(Self)
    }
}

fn parse_index(s: &str, what: &str) -> Result<usize> {
    match s.parse::<usize>() {
        Ok(v) if v >= 1 => Ok(v - 1),
        _ => Err(Error::Parse(format!("bad {what} index `{s}`"))),
    }
}

fn parse_sym(t: &str) -> Result<Sym> {
    if t == "s" {
        return Ok(Sym::Sigma);
    }
    if let Some(rest) = t.strip_prefix('r') {
        return Ok(Sym::Rho(parse_index(rest, "state")?));
    }
    if let Some(rest) = t.strip_prefix('m') {
        let (b, y) = rest.split_once('|').ok_or_else(|| Error::Parse(format!("expected m<b>|<y>, got `{t}`")))?;
        return Ok(Sym::M { y: parse_index(y, "setting")?, b: parse_index(b, "outcome")? });
    }
    Err(Error::Parse(format!("unknown operator `{t}`")))
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

/// Real combination of words.
pub type Poly = BTreeMap<Word, f64>;

pub(crate) fn add_term(p: &mut Poly, w: Word, c: f64) {
    let e = p.entry(w.clone()).or_insert(0.0);
    *e += c;
    if *e == 0.0 {
        p.remove(&w);
    }
}

/// Rewrites a word with the algebra of `mode`, outcome `n_b - 1` of every
/// setting already substituted away. `None` means the word vanishes.
pub(crate) fn reduce(w: &Word, mode: Mode) -> Option<Word> {
    let mut syms = w.0.clone();
    if mode == Mode::Commuting {
        syms.sort();
    }
    let mut out: Vec<Sym> = Vec::with_capacity(syms.len());
    for s in syms {
        match (out.last(), s) {
            (Some(&Sym::M { y: y0, b: b0 }), Sym::M { y, b }) if y0 == y => {
                if b0 != b {
                    return None;
                }
            }
            (Some(&Sym::Rho(x0)), Sym::Rho(x)) if x0 == x && mode == Mode::Pure => {}
            _ => out.push(s),
        }
    }
    Some(Word(out))
}

/// Canonical combination equal to `w`: every last-outcome operator is
/// replaced by the identity minus the other outcomes, then each term is
/// reduced to a fixpoint of the rewrite rules.
pub fn canonicalize(w: &Word, s: Scenario, mode: Mode) -> Poly {
    let last = s.n_b - 1;
    let mut terms: Vec<(Vec<Sym>, f64)> = vec![(Vec::new(), 1.0)];
    for &sym in &w.0 {
        match sym {
            Sym::M { y, b } if b == last => {
                let mut next = Vec::with_capacity(terms.len() * s.n_b);
                for (t, c) in &terms {
                    next.push((t.clone(), *c));
                    for b2 in 0..last {
                        let mut u = t.clone();
                        u.push(Sym::M { y, b: b2 });
                        next.push((u, -c));
                    }
                }
                terms = next;
            }
            _ => terms.iter_mut().for_each(|(t, _)| t.push(sym)),
        }
    }
    let mut p = Poly::new();
    for (t, c) in terms {
        if let Some(r) = reduce(&Word(t), mode) {
            add_term(&mut p, r, c);
        }
    }
    p
}

/// Representative of the trace class of a reduced word: the word is first
/// reduced cyclically (first and last letters are adjacent under the
/// trace), then the least rotation of it or of its reversal is taken.
/// Commuting words are already sorted and are their own class.
pub fn trace_class(w: &Word, mode: Mode) -> Option<Word> {
    let mut v = reduce(w, mode)?.0;
    if mode == Mode::Commuting {
        return Some(Word(v));
    }
    while v.len() > 1 {
        let (a, z) = (v[0], v[v.len() - 1]);
        match (a, z) {
            (Sym::M { y: y0, b: b0 }, Sym::M { y, b }) if y0 == y => {
                if b0 != b {
                    return None;
                }
                v.pop();
            }
            (Sym::Rho(x0), Sym::Rho(x)) if x0 == x && mode == Mode::Pure => {
                v.pop();
            }
            _ => break,
        }
    }
    let n = v.len();
    let rev: Vec<Sym> = v.iter().rev().copied().collect();
    let mut best = v.clone();
    for base in [&v, &rev] {
        for k in 0..n {
            let cand: Vec<Sym> = base[k..].iter().chain(&base[..k]).copied().collect();
            if cand < best {
                best = cand;
            }
        }
    }
    Some(Word(best))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn s322() -> Scenario {
        Scenario::new(3, 2, 2).unwrap()
    }

    fn w(t: &str) -> Word {
        Word::parse(t).unwrap()
    }

    #[test]
    fn parse_and_display() {
        assert_eq!(w("r1 m1|2 s").to_string(), "r1 m1|2 s");
        assert_eq!(w("r2*s").0, vec![Sym::Rho(1), Sym::Sigma]);
        assert_eq!(w("1"), Word::identity());
        assert!(Word::parse("q1").is_err());
        assert!(Word::parse("m0|1").is_err());
    }

    #[test]
    fn projector_rules() {
        let s = Scenario::new(3, 2, 3).unwrap();
        let one = |t: &str| Poly::from([(w(t), 1.0)]);
        assert_eq!(canonicalize(&w("m1|1 m1|1"), s, Mode::General), one("m1|1"));
        assert!(canonicalize(&w("m1|1 m2|1"), s, Mode::General).is_empty());
        assert_eq!(canonicalize(&w("m1|1 m1|2"), s, Mode::General), one("m1|1 m1|2"));
    }

    #[test]
    fn last_outcome_is_substituted() {
        // M_{2|1} = 1 - M_{1|1}, and M_{1|1} M_{2|1} = M_{1|1} - M_{1|1} = 0
        let p = canonicalize(&w("r1 m2|1"), s322(), Mode::General);
        assert_eq!(p, Poly::from([(w("r1"), 1.0), (w("r1 m1|1"), -1.0)]));
        assert!(canonicalize(&w("m1|1 m2|1"), s322(), Mode::General).is_empty());
        let sq = canonicalize(&w("m2|1 m2|1"), s322(), Mode::General);
        assert_eq!(sq, Poly::from([(w("1"), 1.0), (w("m1|1"), -1.0)]));
    }

    #[test]
    fn state_squares_by_mode() {
        let s = s322();
        assert_eq!(canonicalize(&w("r1 r1"), s, Mode::Pure), Poly::from([(w("r1"), 1.0)]));
        assert_eq!(canonicalize(&w("r1 r1"), s, Mode::General), Poly::from([(w("r1 r1"), 1.0)]));
    }

    #[test]
    fn commuting_words_are_sorted() {
        let p = canonicalize(&w("m1|1 s r2 m1|1 r1"), s322(), Mode::Commuting);
        assert_eq!(p, Poly::from([(w("r1 r2 s m1|1"), 1.0)]));
    }

    #[test]
    fn trace_classes() {
        let g = Mode::General;
        assert_eq!(trace_class(&w("r1 s"), g), trace_class(&w("s r1"), g));
        assert_eq!(trace_class(&w("r1 m1|1 r2"), g), trace_class(&w("r2 r1 m1|1"), g));
        assert_eq!(trace_class(&w("r1 m1|1 m1|2"), g), trace_class(&w("r1 m1|2 m1|1"), g));
        assert_ne!(trace_class(&w("r1 r2 r3"), g), trace_class(&w("r1 r3 r2 r1"), g));
        // cyclic reduction across the ends
        assert_eq!(trace_class(&w("m1|1 r1 m1|1"), g), Some(w("r1 m1|1")));
        assert_eq!(trace_class(&w("r1 s r1"), Mode::Pure), Some(w("r1 s")));
        assert_eq!(trace_class(&w("r1 s r1"), g), Some(w("r1 r1 s")));
    }

    #[test]
    fn modes_parse() {
        assert_eq!("pure".parse::<Mode>().unwrap(), Mode::Pure);
        assert_eq!("classical".parse::<Mode>().unwrap(), Mode::Commuting);
        assert!("other".parse::<Mode>().is_err());
    }
}
