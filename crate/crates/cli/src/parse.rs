//! Recursive descent parser for point-function expressions.
//!
//! Grammar, whitespace allowed around every token:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := atom ('^' int)?
//! atom   := rational | rational 'i' | 'z[' i ',' j ']' | 'zb[' i ',' j ']' | '(' expr ')'
//! ```
//!
//! There is no unary minus; '-' is binary subtraction, except that the
//! exponent int may carry a sign. A rational literal written as `3/4`
//! (no spaces) is a single atom, so `3/4^2` is `(3/4)^2`. Coordinate
//! indices are 1-based row, column on the 2x2 chart.

use exact_scalars::{rat_parse, GaussianRational, Rational};
use geometry::Expr;
use indices::CapIndex;
use num_traits::Zero;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for ParseError {}

pub fn parse_expr(src: &str) -> Result<Expr, ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
    };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.err_here("unexpected trailing input"));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err_at(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        let upto = pos.min(self.src.len());
        let prefix = &self.src[..upto];
        let line = 1 + prefix.iter().filter(|&&b| b == b'\n').count();
        let line_start = prefix
            .iter()
            .rposition(|&b| b == b'\n')
            .map_or(0, |i| i + 1);
        ParseError {
            line,
            col: upto - line_start + 1,
            msg: msg.into(),
        }
    }

    fn err_here(&self, msg: impl Into<String>) -> ParseError {
        self.err_at(self.pos, msg)
    }

    fn skip_ws(&mut self) {
        while self
            .src
            .get(self.pos)
            .map_or(false, |b| b.is_ascii_whitespace())
        {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, b: u8, what: &str) -> Result<(), ParseError> {
        if self.eat(b) {
            Ok(())
        } else {
            Err(self.err_here(format!("expected {what}")))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            self.skip_ws();
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = acc.mul(&self.factor()?);
                }
                Some(b'/') => {
                    let at = self.pos;
                    self.pos += 1;
                    let den = self.factor()?;
                    if den.is_syntactic_zero() {
                        return Err(self.err_at(at, "division by zero"));
                    }
                    acc = Expr::quot(acc, den);
                }
                _ => return Ok(acc),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if !self.eat(b'^') {
            return Ok(base);
        }
        self.skip_ws();
        let at = self.pos;
        let neg = self.eat(b'-');
        let digits = self.digits("exponent")?;
        let n: i64 = digits
            .parse()
            .map_err(|_| self.err_at(at, "exponent out of range"))?;
        let n = if neg { -n } else { n };
        if n < 0 && base.is_syntactic_zero() {
            return Err(self.err_at(at, "negative power of zero"));
        }
        Ok(base.pow(n))
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.skip_ws();
                self.expect(b')', "')'")?;
                Ok(e)
            }
            Some(b'z') => self.coordinate(),
            Some(b) if b.is_ascii_digit() => self.rational(),
            Some(b) => Err(self.err_here(format!("unexpected '{}'", b as char))),
            None => Err(self.err_here("unexpected end of input")),
        }
    }

    fn coordinate(&mut self) -> Result<Expr, ParseError> {
        self.pos += 1;
        let barred = self.eat(b'b');
        self.skip_ws();
        self.expect(b'[', "'['")?;
        self.skip_ws();
        let i = self.index("row")?;
        self.skip_ws();
        self.expect(b',', "','")?;
        self.skip_ws();
        let j = self.index("column")?;
        self.skip_ws();
        self.expect(b']', "']'")?;
        let idx = CapIndex::new(i, j);
        Ok(if barred { Expr::zbar(idx) } else { Expr::z(idx) })
    }

    fn index(&mut self, what: &str) -> Result<u8, ParseError> {
        let at = self.pos;
        let digits = self.digits(&format!("{what} index"))?;
        let v: u8 = digits
            .parse()
            .map_err(|_| self.err_at(at, format!("{what} index out of range 1..=2")))?;
        if !(1..=2).contains(&v) {
            return Err(self.err_at(at, format!("{what} index out of range 1..=2")));
        }
        Ok(v)
    }

    fn rational(&mut self) -> Result<Expr, ParseError> {
        let at = self.pos;
        let mut text = self.digits("number")?.to_owned();
        // `3/4` with no spaces is one literal; `3 / 4` is a division
        if self.peek() == Some(b'/')
            && self
                .src
                .get(self.pos + 1)
                .map_or(false, |b| b.is_ascii_digit())
        {
            self.pos += 1;
            text.push('/');
            text.push_str(self.digits("denominator")?);
        }
        let r: Rational = rat_parse(&text).map_err(|e| self.err_at(at, e))?;
        if self.eat(b'i') {
            return Ok(Expr::constant(GaussianRational::new(Rational::zero(), r)));
        }
        Ok(Expr::constant(GaussianRational::from_rational(r)))
    }

    fn digits(&mut self, what: &str) -> Result<&'a str, ParseError> {
        let start = self.pos;
        while self.peek().map_or(false, |b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err_here(format!("expected {what}")));
        }
        Ok(std::str::from_utf8(&self.src[start..self.pos]).unwrap())
    }
}
