//! Text grammar for sets, maps and custom metric rules.
//!
//! ```text
//! set     := part ( ("U" | "∪") part )*
//! part    := ("[" | "(") num "," (num | "inf") ("]" | ")")  |  "{" num ("," num)* "}"
//! sets    := set ( ";" set )*
//! map     := ( set ":" expr ";" )* [ expr ]          expr affine in x
//! metric  := ( set ":" expr ";" )* expr              expr in x, y, |x-y|, max(x,y)
//! expr    := term ( ("+" | "-") term )*
//! term    := factor ( ("*" | "/") factor )*
//! factor  := number | "x" | "y" | "|x-y|" | "max(x,y)" | "(" expr ")" | "-" factor
//! ```
//!
//! Products are only allowed when one side is constant, so every parsed
//! expression stays a linear combination of its atoms. Numbers are
//! converted digit by digit, which keeps decimals exact for rational
//! scalars.

use crate::error::{Error, Result};
use crate::metric::{MetricRule, PairExpr, PairPiece};
use crate::scalar::Scalar;
use crate::spaces::{Interval, MapRule, PiecewiseMap, SetDescriptor};

struct Parser<'a> {
    src: &'a str,
    chars: Vec<char>,
    pos: usize,
    allow_y: bool,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str, allow_y: bool) -> Self {
        Self {
            src,
            chars: src.chars().collect(),
            pos: 0,
            allow_y,
        }
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            input: self.src.to_string(),
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
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

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => self.err(format!("expected `{c}`, found `{found}`")),
                None => self.err(format!("expected `{c}`, found end of input")),
            }
        }
    }

    fn eat_word(&mut self, word: &str) -> bool {
        self.skip_ws();
        let w: Vec<char> = word.chars().collect();
        if self.chars[self.pos..].starts_with(&w) {
            self.pos += w.len();
            true
        } else {
            false
        }
    }

    fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    fn number<S: Scalar>(&mut self) -> Result<S> {
        self.skip_ws();
        let start = self.pos;
        let digit_run = |p: &mut Self| {
            let from = p.pos;
            while p.chars.get(p.pos).is_some_and(|c| c.is_ascii_digit()) {
                p.pos += 1;
            }
            p.pos - from
        };
        let mut digits = digit_run(self);
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            digits += digit_run(self);
        }
        if digits == 0 {
            self.pos = start;
            return self.err("expected a number");
        }
        // optional exponent, e.g. 1e-9
        if matches!(self.chars.get(self.pos), Some('e') | Some('E')) {
            self.pos += 1;
            if matches!(self.chars.get(self.pos), Some('-') | Some('+')) {
                self.pos += 1;
            }
            if digit_run(self) == 0 {
                return self.err("malformed exponent");
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match S::decimal(&text) {
            Some(v) => Ok(v),
            None => {
                self.pos = start;
                self.err("numeric literal out of range")
            }
        }
    }

    /// `num` or `num / num`, optionally negated.
    fn bound<S: Scalar>(&mut self) -> Result<S> {
        let neg = self.eat('-');
        let mut v: S = self.number()?;
        if self.eat('/') {
            let d: S = self.number()?;
            if d.is_zero() {
                return self.err("division by zero");
            }
            v = v / d;
        }
        Ok(if neg { -v } else { v })
    }

    fn set_part<S: Scalar>(&mut self, out: SetDescriptor<S>) -> Result<SetDescriptor<S>> {
        match self.peek() {
            Some('{') => {
                self.pos += 1;
                let mut out = out;
                loop {
                    out = out.with_point(self.bound()?);
                    if self.eat('}') {
                        return Ok(out);
                    }
                    self.expect(',')?;
                }
            }
            Some(open @ ('[' | '(')) => {
                self.pos += 1;
                let lo = self.bound()?;
                self.expect(',')?;
                let hi = if self.eat_word("inf") {
                    None
                } else {
                    Some(self.bound()?)
                };
                let hi_closed = match self.peek() {
                    Some(']') => true,
                    Some(')') => false,
                    _ => return self.err("expected `]` or `)`"),
                };
                self.pos += 1;
                match Interval::new(lo, hi, open == '[', hi_closed) {
                    Ok(i) => Ok(out.with_interval(i)),
                    Err(Error::Argument(m)) => self.err(m),
                    Err(e) => Err(e),
                }
            }
            _ => self.err("expected `[`, `(` or `{`"),
        }
    }

    fn set<S: Scalar>(&mut self) -> Result<SetDescriptor<S>> {
        let mut out = self.set_part(SetDescriptor::empty())?;
        while self.eat('U') || self.eat('∪') {
            out = self.set_part(out)?;
        }
        out.flags.closed = out
            .intervals
            .iter()
            .all(|i| i.lo_closed && (i.hi.is_none() || i.hi_closed));
        Ok(out)
    }

    fn expr<S: Scalar>(&mut self) -> Result<PairExpr<S>> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.plus(self.term()?);
            } else if self.eat('-') {
                acc = acc.plus(self.term()?.scale(-S::one()));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term<S: Scalar>(&mut self) -> Result<PairExpr<S>> {
        let mut acc = self.factor()?;
        loop {
            if self.eat('*') {
                let rhs = self.factor()?;
                acc = match (constant_of(&acc), constant_of(&rhs)) {
                    (Some(c), _) => rhs.scale(c),
                    (_, Some(c)) => acc.scale(c),
                    _ => return self.err("product of two non-constant terms"),
                };
            } else if self.eat('/') {
                let rhs: PairExpr<S> = self.factor()?;
                match constant_of(&rhs) {
                    Some(c) if c.is_zero() => return self.err("division by zero"),
                    Some(c) => acc = acc.scale(S::one() / c),
                    None => return self.err("division by a non-constant term"),
                }
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor<S: Scalar>(&mut self) -> Result<PairExpr<S>> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(self.factor()?.scale(-S::one()))
            }
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some('|') => {
                self.pos += 1;
                if !self.allow_y {
                    return self.err("`|x-y|` is only allowed in metric rules");
                }
                let at = self.pos;
                if !(self.eat_word("x") && self.eat('-') && self.eat_word("y")) {
                    self.pos = at;
                    if !(self.eat_word("y") && self.eat('-') && self.eat_word("x")) {
                        return self.err("expected `|x-y|`");
                    }
                }
                self.expect('|')?;
                Ok(PairExpr::abs_diff())
            }
            Some('m') => {
                if !self.eat_word("max") {
                    return self.err("unknown identifier");
                }
                if !self.allow_y {
                    return self.err("`max(x,y)` is only allowed in metric rules");
                }
                self.expect('(')?;
                let at = self.pos;
                let mut ok = self.eat_word("x") && self.eat(',') && self.eat_word("y");
                if !ok {
                    self.pos = at;
                    ok = self.eat_word("y") && self.eat(',') && self.eat_word("x");
                }
                if !ok {
                    return self.err("expected `max(x,y)`");
                }
                self.expect(')')?;
                Ok(PairExpr::max())
            }
            Some('x') => {
                self.pos += 1;
                Ok(PairExpr {
                    x: S::one(),
                    ..PairExpr::zero()
                })
            }
            Some('y') => {
                if !self.allow_y {
                    return self.err("`y` is only allowed in metric rules");
                }
                self.pos += 1;
                Ok(PairExpr {
                    y: S::one(),
                    ..PairExpr::zero()
                })
            }
            Some(c) if c.is_ascii_digit() || c == '.' => Ok(PairExpr {
                constant: self.number()?,
                ..PairExpr::zero()
            }),
            Some(c) => self.err(format!("unexpected `{c}`")),
            None => self.err("unexpected end of input"),
        }
    }

    /// True if the next `;`-separated segment has a `set :` prefix.
    fn at_guard(&mut self) -> bool {
        matches!(self.peek(), Some('[') | Some('{'))
            || (self.peek() == Some('(') && self.segment_has_colon())
    }

    fn segment_has_colon(&self) -> bool {
        self.chars[self.pos..]
            .iter()
            .take_while(|&&c| c != ';')
            .any(|&c| c == ':')
    }
}

fn constant_of<S: Scalar>(e: &PairExpr<S>) -> Option<S> {
    (e.x.is_zero() && e.y.is_zero() && e.abs_diff.is_zero() && e.max.is_zero())
        .then_some(e.constant)
}

fn finish<T>(p: &mut Parser<'_>, v: T) -> Result<T> {
    if p.at_end() {
        Ok(v)
    } else {
        let c = p.peek().unwrap();
        p.err(format!("unexpected trailing `{c}`"))
    }
}

pub fn parse_set<S: Scalar>(src: &str) -> Result<SetDescriptor<S>> {
    let mut p = Parser::new(src, false);
    let s = p.set()?;
    finish(&mut p, s)
}

/// `;`-separated list of sets.
pub fn parse_sets<S: Scalar>(src: &str) -> Result<Vec<SetDescriptor<S>>> {
    let mut p = Parser::new(src, false);
    let mut out = vec![p.set()?];
    while p.eat(';') {
        out.push(p.set()?);
    }
    finish(&mut p, out)
}

fn affine<S: Scalar>(p: &Parser<'_>, e: PairExpr<S>) -> Result<MapRule<S>> {
    if !e.y.is_zero() || !e.abs_diff.is_zero() || !e.max.is_zero() {
        return p.err("map rules must be affine in x");
    }
    Ok(if e.x.is_zero() {
        MapRule::constant(e.constant)
    } else {
        MapRule::affine(e.x, e.constant)
    })
}

pub fn parse_map<S: Scalar>(src: &str) -> Result<PiecewiseMap<S>> {
    let mut p = Parser::new(src, false);
    let mut map = PiecewiseMap::new();
    loop {
        if p.at_guard() {
            let guard = p.set()?;
            p.expect(':')?;
            let e = p.expr()?;
            map = map.piece(guard, affine(&p, e)?);
        } else {
            let e = p.expr()?;
            map.fallback = Some(affine(&p, e)?);
            return finish(&mut p, map);
        }
        if !p.eat(';') || p.at_end() {
            return finish(&mut p, map);
        }
    }
}

/// A custom rule: guarded pieces (both points in the guard) and a final
/// catch-all expression.
pub fn parse_metric<S: Scalar>(src: &str) -> Result<MetricRule<S>> {
    let mut p = Parser::new(src, true);
    let mut pieces = Vec::new();
    loop {
        if p.at_guard() {
            let guard = p.set()?;
            p.expect(':')?;
            pieces.push(PairPiece {
                guard,
                expr: p.expr()?,
            });
            if !p.eat(';') {
                return p.err("a custom metric must end with a catch-all expression");
            }
        } else {
            let otherwise = p.expr()?;
            return finish(&mut p, MetricRule::CustomPiecewise { pieces, otherwise });
        }
    }
}
