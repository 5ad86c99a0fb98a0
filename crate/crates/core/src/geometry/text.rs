//! Line-oriented text format:
//!
//! ```text
//! LABELS x0 x1 G
//! H-REP
//! = c a1 a2 a3
//! >= c a1 a2 a3
//! V-REP
//! v1 v2 v3
//! RAYS
//! r1 r2 r3
//! ```
//!
//! Entries are integers or `num/den`. A `LINES` section may follow `RAYS`.

use std::fmt::Write as _;

use super::{LinearSystem, RationalPolyhedron, Row, VRep};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};

fn join(v: &[Rational]) -> String {
    v.iter().map(rational::format).collect::<Vec<_>>().join(" ")
}

pub fn write_polyhedron(h: &LinearSystem, v: Option<&VRep>) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "LABELS {}", h.labels.join(" "));
    let _ = writeln!(s, "H-REP");
    for r in &h.equalities {
        let _ = writeln!(s, "= {} {}", rational::format(&r.c), join(&r.a));
    }
    for r in &h.inequalities {
        let _ = writeln!(s, ">= {} {}", rational::format(&r.c), join(&r.a));
    }
    if let Some(v) = v {
        let _ = writeln!(s, "V-REP");
        for x in &v.vertices {
            let _ = writeln!(s, "{}", join(x));
        }
        let _ = writeln!(s, "RAYS");
        for x in &v.rays {
            let _ = writeln!(s, "{}", join(x));
        }
        if !v.lines.is_empty() {
            let _ = writeln!(s, "LINES");
            for x in &v.lines {
                let _ = writeln!(s, "{}", join(x));
            }
        }
    }
    s.lines().map(str::trim_end).collect::<Vec<_>>().join("\n") + "\n"
}

pub fn parse_polyhedron(text: &str) -> Result<(LinearSystem, Option<VRep>)> {
    let mut labels: Option<Vec<String>> = None;
    let mut section = "";
    let mut h: Option<LinearSystem> = None;
    let mut v: Option<VRep> = None;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |m: &str| Error::Parse(format!("line {}: {m}", n + 1));
        if let Some(rest) = line.strip_prefix("LABELS") {
            let l: Vec<String> = rest.split_whitespace().map(str::to_string).collect();
            h = Some(LinearSystem::new(l.clone()));
            labels = Some(l);
            continue;
        }
        if matches!(line, "H-REP" | "V-REP" | "RAYS" | "LINES") {
            section = match line {
                "H-REP" => "h",
                "V-REP" => "v",
                "RAYS" => "r",
                _ => "l",
            };
            if section != "h" && v.is_none() {
                v = Some(VRep::default());
            }
            continue;
        }
        let d = labels.as_ref().ok_or_else(|| err("missing LABELS header"))?.len();
        let mut toks = line.split_whitespace();
        let read_vec = |toks: &mut std::str::SplitWhitespace, want: usize| -> Result<Vec<Rational>> {
            let vals = toks.map(rational::parse).collect::<Result<Vec<_>>>()?;
            if vals.len() != want {
                return Err(err(&format!("expected {want} entries, found {}", vals.len())));
            }
            Ok(vals)
        };
        match section {
            "h" => {
                let kind = toks.next().unwrap_or_default();
                let vals = read_vec(&mut toks, d + 1)?;
                let row = Row::new(vals[1..].to_vec(), vals[0].clone());
                let sys = h.as_mut().unwrap();
                match kind {
                    "=" => sys.equalities.push(row),
                    ">=" => sys.inequalities.push(row),
                    other => return Err(err(&format!("unknown relation `{other}`"))),
                }
            }
            "v" | "r" | "l" => {
                let vals = read_vec(&mut toks, d)?;
                let vr = v.as_mut().unwrap();
                match section {
                    "v" => vr.vertices.push(vals),
                    "r" => vr.rays.push(vals),
                    _ => vr.lines.push(vals),
                }
            }
            _ => return Err(err("data before any section header")),
        }
    }
    let h = h.ok_or_else(|| Error::Parse("missing LABELS header".into()))?;
    Ok((h, v))
}

impl RationalPolyhedron {
    pub fn to_text(&self) -> String {
        write_polyhedron(&self.h, Some(&self.v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    #[test]
    fn round_trip() {
        let mut h = LinearSystem::new(vec!["a".into(), "G".into()]);
        h.add_eq(vec![int(1), int(0)], ratio(-1, 3));
        h.add_ge(vec![int(0), int(1)], ratio(-1, 2));
        let v = VRep { vertices: vec![vec![ratio(1, 3), ratio(1, 2)]], rays: vec![vec![int(0), int(1)]], lines: vec![] };
        let text = write_polyhedron(&h, Some(&v));
        assert_eq!(text, "LABELS a G\nH-REP\n= -1/3 1 0\n>= -1/2 0 1\nV-REP\n1/3 1/2\nRAYS\n0 1\n");
        let (h2, v2) = parse_polyhedron(&text).unwrap();
        assert_eq!(h2, h);
        assert_eq!(v2.unwrap(), v);
    }

    #[test]
    fn rejects_bad_width() {
        assert!(parse_polyhedron("LABELS a\nH-REP\n>= 1 2 3\n").is_err());
        assert!(parse_polyhedron("H-REP\n>= 1 2\n").is_err());
    }
}
