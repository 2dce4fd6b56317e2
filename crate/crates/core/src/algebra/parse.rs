//! Text grammar for polynomials in scenario files.
//!
//! Integer/rational coefficients, `^` for powers, `*` optional (adjacency
//! multiplies), variables are identifiers, parentheses allowed. The printer
//! in `poly.rs` emits a subset of this grammar, so print-then-parse is the
//! identity on canonical forms.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::poly::{MultiPoly, VarTable};
use super::scalar::FieldSpec;

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Int(i64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
}

fn lex(s: &str) -> Result<Vec<(usize, Tok)>, String> {
    let mut toks = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                toks.push((i, Tok::Plus));
                i += 1;
            }
            '-' => {
                toks.push((i, Tok::Minus));
                i += 1;
            }
            '*' => {
                toks.push((i, Tok::Star));
                i += 1;
            }
            '/' => {
                toks.push((i, Tok::Slash));
                i += 1;
            }
            '^' => {
                toks.push((i, Tok::Caret));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '0'..='9' => {
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                let n: i64 = s[start..i]
                    .parse()
                    .map_err(|_| format!("integer too large at byte {start}"))?;
                toks.push((start, Tok::Int(n)));
            }
            _ if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((start, Tok::Ident(String::from(&s[start..i]))));
            }
            _ => return Err(format!("unexpected character `{c}` at byte {i}")),
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    toks: &'a [(usize, Tok)],
    pos: usize,
    vars: &'a VarTable,
    spec: FieldSpec,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(_, t)| t)
    }

    fn bump(&mut self) -> Option<&Tok> {
        let t = self.toks.get(self.pos).map(|(_, t)| t);
        self.pos += 1;
        t
    }

    fn err(&self, msg: &str) -> String {
        match self.toks.get(self.pos) {
            Some((at, _)) => format!("{msg} at byte {at}"),
            None => format!("{msg} at end of input"),
        }
    }

    fn expr(&mut self) -> Result<MultiPoly, String> {
        let mut neg = false;
        loop {
            match self.peek() {
                Some(Tok::Minus) => {
                    neg = !neg;
                    self.pos += 1;
                }
                Some(Tok::Plus) => {
                    self.pos += 1;
                }
                _ => break,
            }
        }
        let mut acc = self.term()?;
        if neg {
            acc = acc.neg();
        }
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.add(&t);
                }
                Some(Tok::Minus) => {
                    self.pos += 1;
                    let t = self.term()?;
                    acc = acc.sub(&t);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MultiPoly, String> {
        let mut acc = self.factor()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.pos += 1;
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                // adjacency: `2x`, `x y`, `3(x+1)`
                Some(Tok::Ident(_)) | Some(Tok::Int(_)) | Some(Tok::LParen) => {
                    let f = self.factor()?;
                    acc = acc.mul(&f);
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn factor(&mut self) -> Result<MultiPoly, String> {
        let n = self.vars.len();
        let base = match self.bump().cloned() {
            Some(Tok::Int(k)) => {
                // rational coefficient k/d
                if let Some(Tok::Slash) = self.peek() {
                    self.pos += 1;
                    match self.bump().cloned() {
                        Some(Tok::Int(d)) if d != 0 => {
                            MultiPoly::constant(n, self.spec.ratio(k, d))
                        }
                        _ => return Err(self.err("expected nonzero integer denominator")),
                    }
                } else {
                    MultiPoly::constant(n, self.spec.int(k))
                }
            }
            Some(Tok::Ident(name)) => {
                let v = self
                    .vars
                    .index_of(&name)
                    .ok_or_else(|| self.err(&format!("unknown variable `{name}`")))?;
                MultiPoly::var(n, v, self.spec)
            }
            Some(Tok::LParen) => {
                let e = self.expr()?;
                match self.bump() {
                    Some(Tok::RParen) => e,
                    _ => return Err(self.err("expected `)`")),
                }
            }
            Some(Tok::Minus) => {
                let f = self.factor()?;
                f.neg()
            }
            _ => return Err(self.err("expected a factor")),
        };
        if let Some(Tok::Caret) = self.peek() {
            self.pos += 1;
            match self.bump().cloned() {
                Some(Tok::Int(e)) if e >= 0 => {
                    let mut acc = MultiPoly::one(n, self.spec);
                    for _ in 0..e {
                        acc = acc.mul(&base);
                    }
                    Ok(acc)
                }
                _ => Err(self.err("expected nonnegative integer exponent")),
            }
        } else {
            Ok(base)
        }
    }
}

pub fn parse_poly(s: &str, vars: &VarTable, spec: FieldSpec) -> Result<MultiPoly, String> {
    let toks = lex(s)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        vars,
        spec,
    };
    let e = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar_basics() {
        let vars = VarTable::new(&["x", "y", "z"]);
        let q = FieldSpec::Q;
        let p = parse_poly("2x^2 y - 1/2 * z + (x - y)(x + y)", &vars, q).unwrap();
        let expected = parse_poly("2*x^2*y - 1/2*z + x^2 - y^2", &vars, q).unwrap();
        assert_eq!(p, expected);
        assert!(parse_poly("w + 1", &vars, q).is_err());
        assert!(parse_poly("x +", &vars, q).is_err());
        assert!(parse_poly("x ^ -2", &vars, q).is_err());
    }

    #[test]
    fn fp_coefficients_reduce() {
        let vars = VarTable::new(&["x"]);
        let f = FieldSpec::Fp(7);
        let p = parse_poly("10*x - 3", &vars, f).unwrap();
        let q = parse_poly("3*x + 4", &vars, f).unwrap();
        assert_eq!(p, q);
    }
}
