//! Laurent literals, grammar version 1.
//!
//! ```text
//! elem  := ['-'] term (('+' | '-') term)*
//! term  := 'O(' mono ')' | coef ['*'] mono | coef | mono
//! coef  := int | zmono | '(' ['-'] zmono (('+' | '-') zmono)* ')'
//! zmono := [int ['*']] 'z' ['^' int] | int
//! mono  := 't' ['^' exp]
//! exp   := ['-'] int | '(' ['-'] int ['/' int] ')'
//! ```
//!
//! `z` is the class of the variable in the residue field `F_p[z]/(m)`;
//! integers reduce mod `p`. This is the format `LaurentElem` displays in, so
//! printed values parse back. `O(t^k)` sets the absolute precision.
//!
//! JSON accepts such a string, a plain integer, or an array
//! `[num, den, c₀, c₁, …]`: the coefficient `c_k` sits at exponent
//! `num/den + k/e`, and each `c_k` is a residue-field code (`Σ digit·p^i`)
//! or a negative integer.

use std::collections::BTreeMap;

use serde_json::Value;

use crate::valfield::{FieldParams, LaurentElem, Rational};

pub const GRAMMAR_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("bad literal {input:?} at byte {pos}: {msg}")]
pub struct LiteralError {
    pub input: String,
    pub pos: usize,
    pub msg: String,
}

struct Parser<'a> {
    src: &'a str,
    s: &'a [u8],
    pos: usize,
    params: &'a FieldParams,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, LiteralError> {
        Err(LiteralError { input: self.src.to_string(), pos: self.pos, msg: msg.into() })
    }

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

    fn expect(&mut self, c: u8) -> Result<(), LiteralError> {
        if self.eat(c) {
            Ok(())
        } else {
            self.err(format!("expected '{}'", c as char))
        }
    }

    fn int(&mut self) -> Result<i64, LiteralError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected an integer");
        }
        match self.src[start..self.pos].parse() {
            Ok(n) => Ok(n),
            Err(_) => self.err("integer out of range"),
        }
    }

    fn signed_int(&mut self) -> Result<i64, LiteralError> {
        let neg = self.eat(b'-');
        let n = self.int()?;
        Ok(if neg { -n } else { n })
    }

    /// Exponent of `t`, in `π`-units.
    fn exponent(&mut self) -> Result<i64, LiteralError> {
        let r = if self.eat(b'(') {
            let num = self.signed_int()?;
            let den = if self.eat(b'/') { self.int()? } else { 1 };
            self.expect(b')')?;
            if den == 0 {
                return self.err("zero denominator");
            }
            Rational::new(num, den)
        } else {
            Rational::from_integer(self.signed_int()?)
        };
        let e = self.params.e() as i64;
        let scaled = r * e;
        if !scaled.is_integer() {
            return self.err(format!("exponent {} is not in (1/{})Z", r, e));
        }
        Ok(scaled.to_integer())
    }

    fn mono(&mut self) -> Result<i64, LiteralError> {
        self.expect(b't')?;
        if self.eat(b'^') {
            self.exponent()
        } else {
            Ok(self.params.e() as i64)
        }
    }

    /// `[int ['*']] 'z' ['^' int] | int`
    fn zmono(&mut self) -> Result<u32, LiteralError> {
        let gf = self.params.residue_field();
        let c = if matches!(self.peek(), Some(b'0'..=b'9')) { Some(self.int()?) } else { None };
        let save = self.pos;
        let had_star = self.eat(b'*');
        if self.peek() == Some(b'z') {
            self.pos += 1;
            let k = if self.eat(b'^') { self.int()? } else { 1 };
            if gf.degree() == 1 {
                return self.err("'z' needs a residue field of degree > 1");
            }
            let z = gf.from_digits(&[0, 1]);
            let zk = gf.pow(z, k as u64);
            return Ok(gf.mul(gf.from_int(c.unwrap_or(1)), zk));
        }
        if had_star {
            self.pos = save;
        }
        match c {
            Some(c) => Ok(gf.from_int(c)),
            None => self.err("expected a coefficient"),
        }
    }

    fn coef(&mut self) -> Result<u32, LiteralError> {
        let gf = self.params.residue_field();
        if self.eat(b'(') {
            let mut acc = if self.eat(b'-') { gf.neg(self.zmono()?) } else { self.zmono()? };
            loop {
                if self.eat(b'+') {
                    acc = gf.add(acc, self.zmono()?);
                } else if self.eat(b'-') {
                    acc = gf.sub(acc, self.zmono()?);
                } else {
                    break;
                }
            }
            self.expect(b')')?;
            Ok(acc)
        } else {
            self.zmono()
        }
    }

    /// One summand: `Ok(None)` for a precision marker.
    fn term(&mut self) -> Result<Term, LiteralError> {
        if self.peek() == Some(b'O') {
            self.pos += 1;
            self.expect(b'(')?;
            let k = self.mono()?;
            self.expect(b')')?;
            return Ok(Term::Prec(k));
        }
        if self.peek() == Some(b't') {
            return Ok(Term::Mono(1, self.mono()?));
        }
        let c = self.coef()?;
        self.eat(b'*');
        if self.peek() == Some(b't') {
            Ok(Term::Mono(c, self.mono()?))
        } else {
            Ok(Term::Mono(c, 0))
        }
    }
}

enum Term {
    Mono(u32, i64),
    Prec(i64),
}

pub fn parse_literal(params: &FieldParams, src: &str) -> Result<LaurentElem, LiteralError> {
    let gf = params.residue_field();
    let mut p = Parser { src, s: src.as_bytes(), pos: 0, params };
    let mut terms: BTreeMap<i64, u32> = BTreeMap::new();
    let mut prec: Option<i64> = None;
    let mut negate = p.eat(b'-');
    loop {
        match p.term()? {
            Term::Prec(k) => {
                if prec.is_some() {
                    return p.err("two precision markers");
                }
                prec = Some(k);
            }
            Term::Mono(c, k) => {
                let c = if negate { gf.neg(c) } else { c };
                let slot = terms.entry(k).or_insert(0);
                *slot = gf.add(*slot, c);
            }
        }
        if p.eat(b'+') {
            negate = false;
        } else if p.eat(b'-') {
            negate = true;
        } else {
            break;
        }
    }
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    let terms: Vec<(i64, u32)> = terms.into_iter().filter(|&(k, c)| c != 0 && prec.is_none_or(|q| k < q)).collect();
    LaurentElem::from_terms(params, terms, prec).map_err(|e| LiteralError { input: src.to_string(), pos: 0, msg: e.to_string() })
}

pub fn literal_from_json(params: &FieldParams, v: &Value) -> Result<LaurentElem, LiteralError> {
    let bad = |msg: &str| LiteralError { input: v.to_string(), pos: 0, msg: msg.to_string() };
    match v {
        Value::String(s) => parse_literal(params, s),
        Value::Number(n) => n.as_i64().map(|n| LaurentElem::from_int(params, n)).ok_or_else(|| bad("not an integer")),
        Value::Array(items) => {
            let ints: Option<Vec<i64>> = items.iter().map(|x| x.as_i64()).collect();
            let ints = ints.ok_or_else(|| bad("array entries must be integers"))?;
            if ints.len() < 2 || ints[1] <= 0 {
                return Err(bad("expected [num, den, coeffs...] with den > 0"));
            }
            let start = Rational::new(ints[0], ints[1]) * params.e() as i64;
            if !start.is_integer() {
                return Err(bad("start exponent not in the value group"));
            }
            let gf = params.residue_field();
            let mut terms = Vec::new();
            for (k, &c) in ints[2..].iter().enumerate() {
                let code = if c < 0 {
                    gf.from_int(c)
                } else if (c as u64) < gf.order() as u64 {
                    c as u32
                } else {
                    return Err(bad("coefficient code out of range"));
                };
                if code != 0 {
                    terms.push((start.to_integer() + k as i64, code));
                }
            }
            LaurentElem::from_terms(params, terms, None).map_err(|e| bad(&e.to_string()))
        }
        _ => Err(bad("expected a string, integer or array")),
    }
}
