//! Text format for product measures.
//!
//! ```text
//! # one factor per block
//! factor { base = 10^10000; digits = 1..10^8000; n = 1; }
//! factor { base = 3; digits = {0,2}; n = 1; }
//! ```
//!
//! A line of bare assignments (`base=3 digits={0,2} n=1`) is shorthand for a
//! single `factor { … }` block. Multi-dimensional digits are written as
//! tuples: `digits = {(0,0),(0,2),(2,0),(2,2)}`. `#` starts a comment.

use crate::base::{BasePower, SymInt};
use crate::digits::DigitSet;
use crate::error::{Error, Result};
use crate::measure::{MissingDigitsSpec, ProductMeasureSpec};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(u64),
    Caret,
    DotDot,
    LBrace,
    RBrace,
    LParen,
    RParen,
    Comma,
    Eq,
    Semi,
    Newline,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let src = raw.split('#').next().unwrap_or("");
        let chars: Vec<char> = src.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let tok = match c {
                ' ' | '\t' | '\r' => {
                    i += 1;
                    continue;
                }
                '^' => Tok::Caret,
                '{' => {
                    depth += 1;
                    Tok::LBrace
                }
                '}' => {
                    depth -= 1;
                    Tok::RBrace
                }
                '(' => {
                    depth += 1;
                    Tok::LParen
                }
                ')' => {
                    depth -= 1;
                    Tok::RParen
                }
                ',' => Tok::Comma,
                '=' => Tok::Eq,
                ';' => Tok::Semi,
                '.' if chars.get(i + 1) == Some(&'.') => {
                    i += 2;
                    out.push((Tok::DotDot, line));
                    continue;
                }
                d if d.is_ascii_digit() => {
                    let start = i;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                    let s: String = chars[start..i].iter().collect();
                    let v = s.parse::<u64>().map_err(|_| err(line, format!("integer {s} too large")))?;
                    out.push((Tok::Int(v), line));
                    continue;
                }
                a if a.is_ascii_alphabetic() || a == '_' => {
                    let start = i;
                    while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '-') {
                        i += 1;
                    }
                    out.push((Tok::Ident(chars[start..i].iter().collect()), line));
                    continue;
                }
                other => return Err(err(line, format!("unexpected character '{other}'"))),
            };
            out.push((tok, line));
            i += 1;
        }
        if depth == 0 {
            out.push((Tok::Newline, line));
        }
    }
    if depth != 0 {
        return Err(err(text.lines().count(), "unbalanced braces or parentheses"));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

#[derive(Default)]
struct FactorFields {
    base: Option<BasePower>,
    digits: Option<RawDigits>,
    n: Option<usize>,
    line: usize,
}

enum RawDigits {
    List(Vec<Vec<u64>>),
    Range(SymInt, SymInt),
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.0)
    }

    fn line(&self) -> usize {
        self.toks.get(self.pos).or(self.toks.last()).map_or(1, |t| t.1)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|t| t.0.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        let line = self.line();
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(err(line, format!("expected {want:?}, found {other:?}"))),
        }
    }

    fn skip_separators(&mut self) {
        while matches!(self.peek(), Some(Tok::Newline | Tok::Semi)) {
            self.pos += 1;
        }
    }

    fn int(&mut self) -> Result<u64> {
        let line = self.line();
        match self.next() {
            Some(Tok::Int(v)) => Ok(v),
            other => Err(err(line, format!("expected integer, found {other:?}"))),
        }
    }

    /// `<int>` or `<int>^<int>`.
    fn sym_int(&mut self) -> Result<SymInt> {
        let line = self.line();
        let b = self.int()?;
        if self.peek() == Some(&Tok::Caret) {
            self.pos += 1;
            let e = self.int()?;
            let e = u32::try_from(e).map_err(|_| err(line, "exponent too large"))?;
            if e == 0 {
                return Ok(SymInt::Exact(1));
            }
            if b < 2 {
                return Ok(SymInt::Exact(b));
            }
            return SymInt::pow(b, e).map_err(|e| err(line, e.to_string()));
        }
        Ok(SymInt::Exact(b))
    }

    fn digits(&mut self) -> Result<RawDigits> {
        let line = self.line();
        if self.peek() == Some(&Tok::LBrace) {
            self.pos += 1;
            let mut list = Vec::new();
            loop {
                match self.peek() {
                    Some(Tok::RBrace) => {
                        self.pos += 1;
                        break;
                    }
                    Some(Tok::LParen) => {
                        self.pos += 1;
                        let mut v = vec![self.int()?];
                        while self.peek() == Some(&Tok::Comma) {
                            self.pos += 1;
                            v.push(self.int()?);
                        }
                        self.expect(Tok::RParen)?;
                        list.push(v);
                    }
                    Some(Tok::Int(_)) => list.push(vec![self.int()?]),
                    other => return Err(err(line, format!("bad digit list element {other:?}"))),
                }
                match self.peek() {
                    Some(Tok::Comma) => self.pos += 1,
                    Some(Tok::RBrace) => {}
                    other => return Err(err(line, format!("expected ',' or '}}' in digit list, found {other:?}"))),
                }
            }
            if list.is_empty() {
                return Err(Error::EmptyDigitSet);
            }
            return Ok(RawDigits::List(list));
        }
        let lo = self.sym_int()?;
        self.expect(Tok::DotDot)?;
        let hi = self.sym_int()?;
        Ok(RawDigits::Range(lo, hi))
    }

    fn assignment(&mut self, fields: &mut FactorFields) -> Result<()> {
        let line = self.line();
        let key = match self.next() {
            Some(Tok::Ident(k)) => k,
            other => return Err(err(line, format!("expected a key, found {other:?}"))),
        };
        self.expect(Tok::Eq)?;
        match key.as_str() {
            "base" => {
                let b = self.int()?;
                let e = if self.peek() == Some(&Tok::Caret) {
                    self.pos += 1;
                    u32::try_from(self.int()?).map_err(|_| err(line, "exponent too large"))?
                } else {
                    1
                };
                fields.base = Some(BasePower::new(b, e).map_err(|e| err(line, e.to_string()))?);
            }
            "digits" => fields.digits = Some(self.digits()?),
            "n" => fields.n = Some(self.int()? as usize),
            "weights" | "probabilities" => {
                return Err(err(line, "only uniform digit weights are supported"));
            }
            other => return Err(err(line, format!("unknown key '{other}'"))),
        }
        if self.peek() == Some(&Tok::Semi) {
            self.pos += 1;
        }
        Ok(())
    }

    fn finish(fields: FactorFields) -> Result<MissingDigitsSpec> {
        let line = fields.line;
        let base = fields.base.ok_or_else(|| err(line, "factor is missing 'base'"))?;
        let digits = fields.digits.ok_or_else(|| err(line, "factor is missing 'digits'"))?;
        let digits = match digits {
            RawDigits::List(list) => {
                let dim = list[0].len();
                DigitSet::vectors(dim, list)?
            }
            RawDigits::Range(lo, hi) => DigitSet::interval(lo, hi)?,
        };
        let n = fields.n.unwrap_or(digits.dim());
        MissingDigitsSpec::new(base, digits, n)
    }

    fn parse(&mut self) -> Result<ProductMeasureSpec> {
        let mut factors = Vec::new();
        loop {
            self.skip_separators();
            let Some(tok) = self.peek().cloned() else { break };
            let line = self.line();
            let mut fields = FactorFields { line, ..Default::default() };
            if tok == Tok::Ident("factor".into()) {
                self.pos += 1;
                self.expect(Tok::LBrace)?;
                loop {
                    self.skip_separators();
                    if self.peek() == Some(&Tok::RBrace) {
                        self.pos += 1;
                        break;
                    }
                    if self.peek().is_none() {
                        return Err(err(line, "unterminated factor block"));
                    }
                    self.assignment(&mut fields)?;
                }
            } else {
                while !matches!(self.peek(), None | Some(Tok::Newline)) {
                    self.assignment(&mut fields)?;
                }
            }
            factors.push(Self::finish(fields)?);
        }
        ProductMeasureSpec::new(factors)
    }
}

/// Parses the config grammar into a validated [`ProductMeasureSpec`].
pub fn parse_spec(text: &str) -> Result<ProductMeasureSpec> {
    Parser { toks: lex(text)?, pos: 0 }.parse()
}

/// Renders a spec back into the config grammar.
pub fn render_spec(spec: &ProductMeasureSpec) -> String {
    let mut out = String::new();
    for f in &spec.factors {
        let digits = match &f.digits {
            DigitSet::Interval { lo, hi } => format!("{lo}..{hi}"),
            DigitSet::Explicit { dim, digits } => {
                let items: Vec<String> = digits
                    .iter()
                    .map(|d| {
                        if *dim == 1 {
                            d[0].to_string()
                        } else {
                            let parts: Vec<String> = d.iter().map(u64::to_string).collect();
                            format!("({})", parts.join(","))
                        }
                    })
                    .collect();
                format!("{{{}}}", items.join(","))
            }
        };
        out.push_str(&format!("factor {{ base = {}; digits = {}; n = {}; }}\n", f.base, digits, f.ambient_dim));
    }
    out
}
