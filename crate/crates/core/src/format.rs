//! Text format for skew products.
//!
//! ```text
//! # comment
//! p 2 1 0
//! q 1 3 1 0
//! q 5 0 1 0
//! ```
//!
//! A map can instead come from a single header line:
//! `builtin monomial <δ> <γ> <d>` or
//! `builtin semiconjugate <degenerate|nondegenerate> <α> <δ> ; h: <k> <re> <im> ...`.

use std::collections::BTreeMap;
use std::fmt::Write;

use num_complex::Complex64;

use crate::algebra::{BiPoly, SkewProduct, UniPoly};
use crate::error::{Error, Result};
use crate::oracles::{build_semiconjugate, OneDimPoly, SemiconjugateKind, SemiconjugateSpec};

#[derive(Debug, Clone, PartialEq)]
pub struct ParsedMap {
    pub map: SkewProduct,
    /// Present when the map came from a semiconjugate header.
    pub semiconjugate: Option<SemiconjugateSpec>,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn int<T: std::str::FromStr>(line: usize, s: &str) -> Result<T> {
    s.parse().map_err(|_| err(line, format!("expected an integer, got {s:?}")))
}

fn float(line: usize, s: &str) -> Result<f64> {
    let x: f64 = s.parse().map_err(|_| err(line, format!("expected a number, got {s:?}")))?;
    if !x.is_finite() {
        return Err(err(line, format!("coefficient {s:?} is not finite")));
    }
    Ok(x)
}

fn parse_builtin(line: usize, rest: &str) -> Result<ParsedMap> {
    let (head, tail) = match rest.split_once(';') {
        Some((h, t)) => (h, Some(t)),
        None => (rest, None),
    };
    let words: Vec<&str> = head.split_whitespace().collect();
    match words.as_slice() {
        ["monomial", delta, gamma, d] => {
            if tail.is_some() {
                return Err(err(line, "monomial header takes no ';' section"));
            }
            let map = SkewProduct::monomial(int(line, delta)?, int(line, gamma)?, int(line, d)?).map_err(|e| err(line, e.to_string()))?;
            Ok(ParsedMap { map, semiconjugate: None })
        }
        ["semiconjugate", kind, alpha, delta] => {
            let kind = match *kind {
                "degenerate" => SemiconjugateKind::Degenerate,
                "nondegenerate" => SemiconjugateKind::Nondegenerate,
                k => return Err(err(line, format!("unknown semiconjugate kind {k:?}"))),
            };
            let tail = tail.ok_or_else(|| err(line, "missing '; h: ...' section"))?;
            let coeffs = tail.trim().strip_prefix("h:").ok_or_else(|| err(line, "expected 'h:' after ';'"))?;
            let nums: Vec<&str> = coeffs.split_whitespace().collect();
            if nums.is_empty() || !nums.len().is_multiple_of(3) {
                return Err(err(line, "h: expects triples <k> <re> <im>"));
            }
            let mut terms = BTreeMap::new();
            for t in nums.chunks(3) {
                let k: u32 = int(line, t[0])?;
                let c = Complex64::new(float(line, t[1])?, float(line, t[2])?);
                if terms.insert(k, c).is_some() {
                    return Err(err(line, format!("duplicate h exponent {k}")));
                }
            }
            let h = OneDimPoly::new(UniPoly::new(terms)).map_err(|e| err(line, e.to_string()))?;
            let spec = SemiconjugateSpec { h, alpha: int(line, alpha)?, delta: int(line, delta)?, kind };
            let map = build_semiconjugate(&spec).map_err(|e| err(line, e.to_string()))?;
            Ok(ParsedMap { map, semiconjugate: Some(spec) })
        }
        _ => Err(err(line, format!("unrecognized builtin {:?}", head.trim()))),
    }
}

pub fn parse_map(text: &str) -> Result<ParsedMap> {
    let mut p = BTreeMap::new();
    let mut q = BTreeMap::new();
    let mut builtin: Option<ParsedMap> = None;
    let mut last = 0;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        last = line;
        let body = raw.split('#').next().unwrap().trim();
        if body.is_empty() {
            continue;
        }
        if let Some(rest) = body.strip_prefix("builtin") {
            if builtin.is_some() || !p.is_empty() || !q.is_empty() {
                return Err(err(line, "a builtin header must be the only record"));
            }
            builtin = Some(parse_builtin(line, rest)?);
            continue;
        }
        if builtin.is_some() {
            return Err(err(line, "a builtin header must be the only record"));
        }
        let f: Vec<&str> = body.split_whitespace().collect();
        match f.as_slice() {
            ["p", i, re, im] => {
                let i: u32 = int(line, i)?;
                if p.insert(i, Complex64::new(float(line, re)?, float(line, im)?)).is_some() {
                    return Err(err(line, format!("duplicate p exponent {i}")));
                }
            }
            ["q", i, j, re, im] => {
                let key: (u32, u32) = (int(line, i)?, int(line, j)?);
                if q.insert(key, Complex64::new(float(line, re)?, float(line, im)?)).is_some() {
                    return Err(err(line, format!("duplicate q exponent {key:?}")));
                }
            }
            [tag, ..] if *tag == "p" || *tag == "q" => {
                return Err(err(line, format!("wrong number of fields for a {tag} record")))
            }
            [tag, ..] => return Err(err(line, format!("unknown record {tag:?}"))),
            [] => unreachable!(),
        }
    }
    if let Some(b) = builtin {
        return Ok(b);
    }
    let map = SkewProduct::new(UniPoly::new(p), BiPoly::new(q)).map_err(|e| err(last, e.to_string()))?;
    Ok(ParsedMap { map, semiconjugate: None })
}

/// Canonical text: `p` records by exponent, then `q` records by `(i, j)`, with
/// shortest round-trip floats. Parsing it back yields the same map.
pub fn canonical_text(f: &SkewProduct) -> String {
    let mut out = String::new();
    for (i, c) in f.p().terms() {
        writeln!(out, "p {i} {:?} {:?}", c.re, c.im).unwrap();
    }
    for ((i, j), c) in f.q().terms() {
        writeln!(out, "q {i} {j} {:?} {:?}", c.re, c.im).unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_roundtrip() {
        let text = "# example\np 2 1 0\nq 1 3 1.0 0\n\nq 5 0 1 0  # tail\n";
        let m = parse_map(text).unwrap();
        assert!(m.semiconjugate.is_none());
        assert_eq!(m.map.q().support().collect::<Vec<_>>(), vec![(1, 3), (5, 0)]);
        let canon = canonical_text(&m.map);
        assert_eq!(canon, "p 2 1.0 0.0\nq 1 3 1.0 0.0\nq 5 0 1.0 0.0\n");
        assert_eq!(parse_map(&canon).unwrap().map, m.map);
    }

    #[test]
    fn rejects_bad_input() {
        let e = parse_map("p 2 1 0\nq 1 3 1 0\nq 1 3 2 0\n").unwrap_err();
        assert_eq!(e, Error::Parse { line: 3, msg: "duplicate q exponent (1, 3)".into() });
        assert!(matches!(parse_map("p 2 1 0\np 2 1 0\nq 0 2 1 0"), Err(Error::Parse { line: 2, .. })));
        assert!(matches!(parse_map("p 2 1\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_map("r 2 1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_map("p -2 1 0\n"), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(parse_map("p 2 nan 0\n"), Err(Error::Parse { line: 1, .. })));
        // invalid map: q has a w term
        assert!(matches!(parse_map("p 2 1 0\nq 0 1 1 0\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn builtins() {
        let m = parse_map("builtin semiconjugate degenerate 1 4 ; h: 3 1 0 2 1 0\n").unwrap();
        assert_eq!(m.map.q().support().collect::<Vec<_>>(), vec![(1, 3), (2, 2)]);
        assert_eq!(m.map.delta(), 4);
        assert_eq!(m.semiconjugate.unwrap().alpha, 1);
        let m = parse_map("# header\nbuiltin monomial 2 1 3\n").unwrap();
        assert_eq!(m.map, SkewProduct::monomial(2, 1, 3).unwrap());
        assert!(parse_map("builtin monomial 2 1 3\np 2 1 0\n").is_err());
        assert!(parse_map("builtin semiconjugate degenerate 1 3 ; h: 3 1 0 2 1 0").is_err());
        assert!(parse_map("builtin semiconjugate odd 1 4 ; h: 3 1 0").is_err());
    }
}
