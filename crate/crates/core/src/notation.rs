//! Bracket notation for Tate complexes, e.g. `[𝟙̇ ⊕ 𝟙{7} → 𝟙]` or `𝟙{4}[-1]`.
//!
//! The dotted term of a bracket sits in degree 0 and terms to its left have
//! higher degree. Twist expressions may use a variable `n`, as in `𝟙{2^{n+1}−1}`.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::homotopy::TateComplex;
use crate::tatecat::TateObject;

const UNIT: char = '𝟙';
const DOT: char = '\u{307}';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot parse {input:?} at offset {offset}: {reason}")]
pub struct NotationError {
    pub input: String,
    pub offset: usize,
    pub reason: String,
}

/// degree → twist → rank.
pub type Shape = BTreeMap<i64, BTreeMap<i64, usize>>;

fn superscript(k: usize) -> String {
    const SUP: [char; 10] = ['⁰', '¹', '²', '³', '⁴', '⁵', '⁶', '⁷', '⁸', '⁹'];
    k.to_string()
        .chars()
        .map(|c| SUP[c.to_digit(10).unwrap() as usize])
        .collect()
}

fn minus(k: i64) -> String {
    if k < 0 {
        format!("−{}", -k)
    } else {
        k.to_string()
    }
}

/// `𝟙 ⊕ 𝟙{3}²`; with `dotted`, the first summand carries the degree-0 dot.
pub fn object_string(x: &TateObject, dotted: bool) -> String {
    if x.is_zero() {
        return if dotted { format!("0{DOT}") } else { "0".into() };
    }
    let mut parts = vec![];
    for (i, (t, r)) in x.ranks().iter().enumerate() {
        let mut s = String::from(UNIT);
        if dotted && i == 0 {
            s.push(DOT);
        }
        if *t != 0 {
            s.push_str(&format!("{{{}}}", minus(*t)));
        }
        if *r > 1 {
            s.push_str(&superscript(*r));
        }
        parts.push(s);
    }
    parts.join(" ⊕ ")
}

/// Single-degree complexes print as `X[m]`, longer ones as a bracket.
pub fn complex_string(c: &TateComplex) -> String {
    let terms = c.terms();
    let (Some(lo), Some(hi)) = (terms.keys().next().copied(), terms.keys().last().copied()) else {
        return "0".into();
    };
    if lo == hi {
        let x = &terms[&lo];
        let body = object_string(x, false);
        if lo == 0 {
            return body;
        }
        let body = if x.total_rank() > 1 || x.ranks().len() > 1 {
            format!("({body})")
        } else {
            body
        };
        return format!("{body}[{}]", minus(lo));
    }
    // keep degree 0 inside the bracket when it is within reach, otherwise shift
    let suffix = if hi < 0 {
        hi
    } else if lo > 0 {
        lo
    } else {
        0
    };
    let mut parts = vec![];
    let mut n = hi;
    while n >= lo {
        parts.push(object_string(&c.term(n), n == suffix));
        n -= 1;
    }
    let body = format!("[{}]", parts.join(" → "));
    if suffix == 0 {
        body
    } else {
        format!("{body}[{}]", minus(suffix))
    }
}

struct Parser<'a> {
    input: &'a str,
    chars: Vec<char>,
    pos: usize,
    n: Option<i64>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, reason: impl Into<String>) -> Result<T, NotationError> {
        Err(NotationError {
            input: self.input.to_string(),
            offset: self.pos,
            reason: reason.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() && self.chars[self.pos].is_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn peek_raw(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_arrow(&mut self) -> bool {
        match self.peek() {
            Some('→') => {
                self.pos += 1;
                true
            }
            Some('-') if self.chars.get(self.pos + 1) == Some(&'>') => {
                self.pos += 2;
                true
            }
            _ => false,
        }
    }

    fn eat_dot(&mut self) -> bool {
        if self.peek_raw() == Some(DOT) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // expr := (bracket | sum) suffix*
    fn complex(&mut self) -> Result<Shape, NotationError> {
        let mut shape = if self.peek() == Some('[') {
            self.bracket()?
        } else {
            let (x, _) = self.sum()?;
            x
        };
        loop {
            match self.peek() {
                Some('[') => {
                    self.pos += 1;
                    let m = self.int_expr()?;
                    if !self.eat(']') {
                        return self.err("expected ']'");
                    }
                    shape = shape.into_iter().map(|(d, r)| (d + m, r)).collect();
                }
                Some('{') => {
                    let t = self.braced()?;
                    shape = shape
                        .into_iter()
                        .map(|(d, r)| (d, r.into_iter().map(|(k, v)| (k + t, v)).collect()))
                        .collect();
                }
                _ => break,
            }
        }
        Ok(shape)
    }

    fn bracket(&mut self) -> Result<Shape, NotationError> {
        self.eat('[');
        let mut items = vec![self.sum()?];
        while self.eat_arrow() {
            items.push(self.sum()?);
        }
        if !self.eat(']') {
            return self.err("expected ']' or '→'");
        }
        let dots: Vec<usize> = (0..items.len()).filter(|&i| items[i].1).collect();
        let zero_at = match dots.as_slice() {
            [] => items.len() - 1,
            [i] => *i,
            _ => return self.err("more than one dotted term"),
        };
        let mut out = Shape::new();
        for (i, (shape, _)) in items.into_iter().enumerate() {
            let deg = zero_at as i64 - i as i64;
            for (d, ranks) in shape {
                let slot = out.entry(d + deg).or_default();
                for (t, r) in ranks {
                    *slot.entry(t).or_insert(0) += r;
                }
            }
        }
        out.retain(|_, r| !r.is_empty());
        Ok(out)
    }

    // sum := "0" | term (⊕ term)*; returns the shape and whether a dot was seen
    fn sum(&mut self) -> Result<(Shape, bool), NotationError> {
        if self.peek() == Some('0') {
            self.pos += 1;
            let dotted = self.eat_dot();
            return Ok((Shape::new(), dotted));
        }
        let mut out = Shape::new();
        let mut dotted = false;
        loop {
            let (deg, twist, rank, dot) = self.term()?;
            dotted |= dot;
            *out.entry(deg).or_default().entry(twist).or_insert(0) += rank;
            if !(self.eat('⊕') || self.eat('+')) {
                break;
            }
        }
        Ok((out, dotted))
    }

    // term := 𝟙 dot? {twist}? rank? [shift]?
    fn term(&mut self) -> Result<(i64, i64, usize, bool), NotationError> {
        match self.peek() {
            Some(UNIT) | Some('1') => self.pos += 1,
            _ => return self.err("expected 𝟙"),
        }
        let dot = self.eat_dot();
        let mut twist = 0;
        let mut rank = 1;
        let mut deg = 0;
        if self.peek_raw() == Some('{') {
            twist = self.braced()?;
        }
        if self.peek_raw() == Some('^') {
            self.pos += 1;
            rank = self.natural()? as usize;
        } else {
            let mut digits = String::new();
            while let Some(d) = self.peek_raw().and_then(|c| "⁰¹²³⁴⁵⁶⁷⁸⁹".chars().position(|s| s == c)) {
                digits.push(char::from_digit(d as u32, 10).unwrap());
                self.pos += 1;
            }
            if !digits.is_empty() {
                rank = digits.parse().unwrap();
            }
        }
        // a shift glued to a summand inside a sum, e.g. 𝟙 ⊕ 𝟙{1}[2]
        if self.peek_raw() == Some('[') && self.lookahead_shift() {
            self.pos += 1;
            deg = self.int_expr()?;
            self.eat(']');
        }
        Ok((deg, twist, rank, dot))
    }

    fn lookahead_shift(&self) -> bool {
        // only consume "[…]" here when more summands follow it
        let mut i = self.pos + 1;
        while i < self.chars.len() && self.chars[i] != ']' {
            i += 1;
        }
        let rest: String = self.chars[(i + 1).min(self.chars.len())..].iter().collect();
        let rest = rest.trim_start();
        rest.starts_with('⊕') || rest.starts_with('+')
    }

    fn braced(&mut self) -> Result<i64, NotationError> {
        if !self.eat('{') {
            return self.err("expected '{'");
        }
        let v = self.int_expr()?;
        if !self.eat('}') {
            return self.err("expected '}'");
        }
        Ok(v)
    }

    fn natural(&mut self) -> Result<i64, NotationError> {
        self.skip_ws();
        let start = self.pos;
        while self.peek_raw().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return self.err("expected a number");
        }
        let s: String = self.chars[start..self.pos].iter().collect();
        s.parse().or_else(|_| self.err("number too large"))
    }

    fn eat_minus(&mut self) -> bool {
        self.eat('−') || self.eat('-')
    }

    // int_expr := signed (("+"|"−") signed)*
    fn int_expr(&mut self) -> Result<i64, NotationError> {
        let mut v = self.signed()?;
        loop {
            if self.eat('+') {
                v += self.signed()?;
            } else if self.peek() != Some('-') || self.chars.get(self.pos + 1) != Some(&'>') {
                if self.eat_minus() {
                    v -= self.signed()?;
                } else {
                    break;
                }
            } else {
                break;
            }
        }
        Ok(v)
    }

    fn signed(&mut self) -> Result<i64, NotationError> {
        if self.eat_minus() {
            return Ok(-self.signed()?);
        }
        self.power()
    }

    fn power(&mut self) -> Result<i64, NotationError> {
        let base = self.atom()?;
        if self.eat('^') {
            let exp = self.signed_power_exponent()?;
            if exp < 0 {
                return self.err("negative exponent");
            }
            return base
                .checked_pow(exp as u32)
                .map_or_else(|| self.err("overflow"), Ok);
        }
        Ok(base)
    }

    fn signed_power_exponent(&mut self) -> Result<i64, NotationError> {
        if self.eat_minus() {
            return Ok(-self.power()?);
        }
        self.power()
    }

    fn atom(&mut self) -> Result<i64, NotationError> {
        match self.peek() {
            Some('n') => {
                self.pos += 1;
                match self.n {
                    Some(v) => Ok(v),
                    None => self.err("expression uses n but no value was given"),
                }
            }
            Some('(') | Some('{') => {
                let close = if self.peek() == Some('(') { ')' } else { '}' };
                self.pos += 1;
                let v = self.int_expr()?;
                if !self.eat(close) {
                    return self.err(format!("expected '{close}'"));
                }
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => self.natural(),
            _ => self.err("expected an integer expression"),
        }
    }
}

/// Parses bracket notation into degree → twist → rank, with `n` bound to the
/// given value in twist expressions.
pub fn parse_shape(input: &str, n: Option<i64>) -> Result<Shape, NotationError> {
    let mut p = Parser {
        input,
        chars: input.chars().collect(),
        pos: 0,
        n,
    };
    let shape = p.complex()?;
    if p.peek().is_some() {
        return p.err("trailing input");
    }
    Ok(shape
        .into_iter()
        .map(|(d, r)| (d, r.into_iter().filter(|(_, v)| *v > 0).collect::<BTreeMap<_, _>>()))
        .filter(|(_, r)| !r.is_empty())
        .collect())
}

/// Rank table of a complex in the same layout as [`parse_shape`].
pub fn shape_of(c: &TateComplex) -> Shape {
    c.terms()
        .iter()
        .map(|(n, x)| (*n, x.ranks().clone()))
        .collect()
}
