//! Polynomial literals: JSON `[[exponent, coefficient], ...]` pairs and a small
//! infix syntax such as `x^3 - x + [0,1]*x^2 + beta^5`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::PolyMap;
use crate::error::{Error, Result};
use crate::ff::{FFElement, FieldCtx};

/// Exponent-coefficient pairs; coefficients are element coefficient arrays.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyLiteral(pub Vec<(u64, Vec<u64>)>);

#[derive(Deserialize)]
#[serde(untagged)]
enum CoeffIn {
    Int(i64),
    Arr(Vec<u64>),
}

impl PolyLiteral {
    pub fn to_poly(&self, ctx: &Arc<FieldCtx>) -> Result<PolyMap> {
        let mut terms = Vec::with_capacity(self.0.len());
        for (e, c) in &self.0 {
            terms.push((*e, ctx.from_coeffs(c)?));
        }
        PolyMap::new(ctx, terms)
    }
}

/// Parses either literal form.
pub fn parse_poly(ctx: &Arc<FieldCtx>, text: &str) -> Result<PolyMap> {
    let t = text.trim();
    if t.starts_with('[') {
        if let Ok(pairs) = serde_json::from_str::<Vec<(u64, CoeffIn)>>(t) {
            let mut terms = Vec::with_capacity(pairs.len());
            for (e, c) in pairs {
                let c = match c {
                    CoeffIn::Int(v) => ctx.scalar(v),
                    CoeffIn::Arr(v) => ctx.from_coeffs(&v)?,
                };
                terms.push((e, c));
            }
            return PolyMap::new(ctx, terms);
        }
    }
    parse_expr(ctx, t)
}

struct Lexer<'a> {
    s: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn number(&mut self) -> Result<u64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .expect("ascii digits")
            .parse()
            .map_err(|_| Error::Parse(format!("expected a number at offset {start}")))
    }

    fn word(&mut self) -> &'a str {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_alphabetic() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.s[start..self.pos]).expect("ascii letters")
    }
}

fn parse_expr(ctx: &Arc<FieldCtx>, text: &str) -> Result<PolyMap> {
    if text.is_empty() {
        return Err(Error::Parse("empty polynomial".into()));
    }
    let mut lx = Lexer { s: text.as_bytes(), pos: 0 };
    let mut terms: Vec<(u64, FFElement)> = Vec::new();
    let mut first = true;
    loop {
        let negative = if lx.eat(b'-') {
            true
        } else {
            if !lx.eat(b'+') && !first {
                return Err(Error::Parse(format!("expected '+' or '-' at offset {}", lx.pos)));
            }
            false
        };
        first = false;
        let (e, c) = parse_term(ctx, &mut lx)?;
        terms.push((e, if negative { ctx.neg(&c) } else { c }));
        if lx.peek().is_none() {
            break;
        }
    }
    PolyMap::new(ctx, terms)
}

fn parse_term(ctx: &Arc<FieldCtx>, lx: &mut Lexer<'_>) -> Result<(u64, FFElement)> {
    let mut coeff = ctx.one();
    let mut exp = 0u64;
    let mut seen_x = false;
    loop {
        match lx.peek() {
            Some(b'0'..=b'9') => {
                let v = lx.number()?;
                coeff = ctx.mul(&coeff, &ctx.scalar((v % ctx.p()) as i64));
            }
            Some(b'[') => {
                lx.pos += 1;
                let mut v = Vec::new();
                if !lx.eat(b']') {
                    loop {
                        v.push(lx.number()?);
                        if lx.eat(b']') {
                            break;
                        }
                        if !lx.eat(b',') {
                            return Err(Error::Parse(format!("expected ',' at offset {}", lx.pos)));
                        }
                    }
                }
                coeff = ctx.mul(&coeff, &ctx.from_coeffs(&v).map_err(|e| Error::Parse(e.to_string()))?);
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let w = lx.word();
                let power = if lx.eat(b'^') { lx.number()? } else { 1 };
                match w {
                    "x" => {
                        if seen_x {
                            return Err(Error::Parse("x appears twice in one term".into()));
                        }
                        seen_x = true;
                        exp = power;
                    }
                    "b" | "beta" => coeff = ctx.mul(&coeff, &ctx.beta_pow(power)),
                    _ => return Err(Error::Parse(format!("unknown symbol '{w}'"))),
                }
            }
            _ => return Err(Error::Parse(format!("unexpected input at offset {}", lx.pos))),
        }
        if !lx.eat(b'*') {
            match lx.peek() {
                None | Some(b'+') | Some(b'-') => break,
                _ => continue,
            }
        }
    }
    Ok((exp, coeff))
}

fn format_coeff(c: &FFElement) -> String {
    let v = c.coeffs();
    if v[1..].iter().all(|&x| x == 0) {
        v[0].to_string()
    } else {
        c.to_string()
    }
}

pub(super) fn format_expr(f: &PolyMap) -> String {
    if f.is_zero() {
        return "0".into();
    }
    let one = f.ctx().one();
    let parts: Vec<String> = f
        .terms()
        .iter()
        .rev()
        .map(|(e, c)| match (*e, c == &one) {
            (0, _) => format_coeff(c),
            (1, true) => "x".into(),
            (1, false) => format!("{}*x", format_coeff(c)),
            (e, true) => format!("x^{e}"),
            (e, false) => format!("{}*x^{e}", format_coeff(c)),
        })
        .collect();
    parts.join(" + ")
}
