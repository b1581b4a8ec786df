//! Line-oriented presentation text format.
//!
//! ```text
//! # Heisenberg group
//! p 5
//! n 3
//! names x y z
//! comm 2 1 : g3^1
//! ```
//!
//! Generators are 1-based. A word is `1` or increasing factors `g<k>^<e>`
//! (`g<k>` alone means exponent 1) with `0 < e < p`. Omitted relations are trivial.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::pc::{PcBuilder, PcPresentation};

/// Canonical text: header, then nontrivial powers, then nontrivial commutators.
pub fn emit_presentation(pres: &PcPresentation) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p {}", pres.p());
    let _ = writeln!(out, "n {}", pres.n());
    if let Some(names) = pres.names() {
        let _ = writeln!(out, "names {}", names.join(" "));
    }
    for i in 0..pres.n() {
        let w = pres.power_relation(i);
        if !w.is_identity() {
            let _ = writeln!(out, "pow {} : {}", i + 1, w);
        }
    }
    for j in 0..pres.n() {
        for i in 0..j {
            let w = pres.comm_relation(j, i);
            if !w.is_identity() {
                let _ = writeln!(out, "comm {} {} : {}", j + 1, i + 1, w);
            }
        }
    }
    out
}

/// Hex SHA-256 of the canonical text.
pub fn presentation_digest(pres: &PcPresentation) -> String {
    hex::encode(Sha256::digest(emit_presentation(pres).as_bytes()))
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokens(line: &str) -> Vec<Token<'_>> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push(Token {
                    text: &line[s..i],
                    column: s + 1,
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push(Token {
            text: &line[s..],
            column: s + 1,
        });
    }
    out
}

pub fn parse_presentation(text: &str) -> Result<PcPresentation> {
    let mut p: Option<u32> = None;
    let mut builder: Option<PcBuilder> = None;
    let mut seen = std::collections::HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(head) = toks.first() else { continue };
        let err = |column: usize, message: String| Error::Parse {
            line: line_no,
            column,
            message,
        };
        let number = |t: &Token| -> Result<u64> {
            t.text
                .parse::<u64>()
                .map_err(|_| err(t.column, format!("expected a number, found `{}`", t.text)))
        };
        let end_column = line.trim_end().len() + 1;
        match head.text {
            "p" => {
                if p.is_some() {
                    return Err(err(head.column, "duplicate `p` line".into()));
                }
                let t = toks
                    .get(1)
                    .ok_or_else(|| err(end_column, "missing prime".into()))?;
                p = Some(number(t)? as u32);
            }
            "n" => {
                let pv = p.ok_or_else(|| err(head.column, "`n` must follow `p`".into()))?;
                if builder.is_some() {
                    return Err(err(head.column, "duplicate `n` line".into()));
                }
                let t = toks
                    .get(1)
                    .ok_or_else(|| err(end_column, "missing generator count".into()))?;
                builder = Some(PcBuilder::new(pv, number(t)? as usize));
            }
            "names" => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| err(head.column, "`names` must follow `n`".into()))?;
                let list: Vec<String> = toks[1..].iter().map(|t| t.text.to_string()).collect();
                if list.len() != b.n() {
                    return Err(err(
                        head.column,
                        format!("{} names for {} generators", list.len(), b.n()),
                    ));
                }
                b.names(list);
            }
            "pow" | "comm" => {
                let b = builder
                    .as_mut()
                    .ok_or_else(|| err(head.column, "relations must follow `n`".into()))?;
                let arity = if head.text == "pow" { 1 } else { 2 };
                let mut idx_vals = Vec::new();
                for k in 0..arity {
                    let t = toks
                        .get(1 + k)
                        .ok_or_else(|| err(end_column, "missing generator index".into()))?;
                    let v = number(t)? as usize;
                    if v == 0 || v > b.n() {
                        return Err(err(
                            t.column,
                            format!("generator index {v} out of range 1..{}", b.n()),
                        ));
                    }
                    idx_vals.push((v - 1, t.column));
                }
                let colon = toks
                    .get(1 + arity)
                    .ok_or_else(|| err(end_column, "expected `:`".into()))?;
                if colon.text != ":" {
                    return Err(err(
                        colon.column,
                        format!("expected `:`, found `{}`", colon.text),
                    ));
                }
                let word = parse_word(&toks[2 + arity..], b.p(), b.n(), end_column)
                    .map_err(|(column, message)| err(column, message))?;
                if arity == 1 {
                    let i = idx_vals[0].0;
                    if !seen.insert((i, usize::MAX)) {
                        return Err(err(
                            head.column,
                            format!("duplicate power relation for g{}", i + 1),
                        ));
                    }
                    b.power(i, &word);
                } else {
                    let ((j, _), (i, ic)) = (idx_vals[0], idx_vals[1]);
                    if j <= i {
                        return Err(err(
                            ic,
                            "commutator relations are written `comm j i` with j > i".into(),
                        ));
                    }
                    if !seen.insert((j, i)) {
                        return Err(err(
                            head.column,
                            format!("duplicate relation for [g{}, g{}]", j + 1, i + 1),
                        ));
                    }
                    b.comm(j, i, &word);
                }
            }
            other => return Err(err(head.column, format!("unknown directive `{other}`"))),
        }
    }
    let b = builder.ok_or_else(|| Error::Parse {
        line: text.lines().count().max(1),
        column: 1,
        message: "missing `p` or `n` header".into(),
    })?;
    b.build()
}

fn parse_word(
    toks: &[Token],
    p: u32,
    n: usize,
    end_column: usize,
) -> std::result::Result<Vec<(usize, u32)>, (usize, String)> {
    if toks.is_empty() {
        return Err((end_column, "missing word".into()));
    }
    if toks.len() == 1 && toks[0].text == "1" {
        return Ok(Vec::new());
    }
    let mut out = Vec::new();
    for t in toks {
        let body = t.text.strip_prefix('g').ok_or_else(|| {
            (
                t.column,
                format!("expected a factor `g<k>^<e>`, found `{}`", t.text),
            )
        })?;
        let (gen, exp) = match body.split_once('^') {
            Some((g, e)) => (g, e),
            None => (body, "1"),
        };
        let k: usize = gen
            .parse()
            .map_err(|_| (t.column, format!("bad generator in `{}`", t.text)))?;
        let e: u32 = exp
            .parse()
            .map_err(|_| (t.column, format!("bad exponent in `{}`", t.text)))?;
        if k == 0 || k > n {
            return Err((t.column, format!("generator g{k} out of range")));
        }
        if e == 0 || e >= p {
            return Err((t.column, format!("exponent {e} must lie in 1..{}", p - 1)));
        }
        out.push((k - 1, e));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn heisenberg_file() {
        let text = "# test\np 5\nn 3\ncomm 2 1 : g3\n";
        let h = parse_presentation(text).unwrap();
        assert_eq!(h.order(), Some(125));
        assert_eq!(parse_presentation(&emit_presentation(&h)).unwrap(), h);
    }

    #[test]
    fn syntax_errors_carry_position() {
        match parse_presentation("p 5\nn 3\ncomm 2 1 : h3\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (3, 12)),
            other => panic!("{other:?}"),
        }
        assert!(matches!(
            parse_presentation("p 5\nn 2\npow 1 : g2^7\n"),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_presentation("n 2\n"),
            Err(Error::Parse { .. })
        ));
    }

    #[test]
    fn left_supported_rejected() {
        let text = "p 5\nn 2\npow 1 : g2\npow 2 : g1\n";
        assert!(matches!(
            parse_presentation(text),
            Err(Error::Malformed { .. })
        ));
    }

    #[test]
    fn inconsistent_rejected() {
        let text = "p 5\nn 3\npow 1 : g2\ncomm 2 1 : g3\n";
        assert!(matches!(
            parse_presentation(text),
            Err(Error::Inconsistent { .. })
        ));
    }
}
