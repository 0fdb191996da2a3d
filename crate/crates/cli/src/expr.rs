//! Arithmetic expressions for weight functions.
//!
//! Grammar:
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | primary
//! primary := number | "x" index | "(" expr ")"
//!          | "norm" "(" "x" ")" | "dot" "(" "x" "," "x" ")"
//!          | "sqrt" "(" expr ")" | "abs" "(" expr ")"
//! number  := digits ["." digits] [("e" | "E") ["+" | "-"] digits]
//! ```
//!
//! `x1 .. xn` are the coordinates of the point, `norm(x)` its Euclidean norm
//! and `dot(x,x)` its squared norm. Whitespace is ignored.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Coord(usize),
    Norm,
    Dot,
    Neg(Box<Expr>),
    Sqrt(Box<Expr>),
    Abs(Box<Expr>),
    Bin(Op, Box<Expr>, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParseError {
    /// Byte offset into the source.
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at column {}: {}", self.pos + 1, self.msg)
    }
}

impl std::error::Error for ParseError {}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Coord(i) => x[*i],
            Expr::Norm => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            Expr::Dot => x.iter().map(|v| v * v).sum(),
            Expr::Neg(e) => -e.eval(x),
            Expr::Sqrt(e) => e.eval(x).sqrt(),
            Expr::Abs(e) => e.eval(x).abs(),
            Expr::Bin(op, a, b) => {
                let (a, b) = (a.eval(x), b.eval(x));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                }
            }
        }
    }
}

/// Parses `src` as a function on R^n.
pub fn parse(src: &str, n: usize) -> Result<Expr, ParseError> {
    let mut p = Parser { src: src.as_bytes(), pos: 0, n };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(e)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    n: usize,
}

impl Parser<'_> {
    fn error(&self, msg: impl Into<String>) -> ParseError {
        ParseError {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat(b'+') {
                Op::Add
            } else if self.eat(b'-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat(b'*') {
                Op::Mul
            } else if self.eat(b'/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let digits = |p: &mut Self| {
            let s = p.pos;
            while p.pos < p.src.len() && p.src[p.pos].is_ascii_digit() {
                p.pos += 1;
            }
            p.pos - s
        };
        let mut count = digits(self);
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            count += digits(self);
        }
        if count == 0 {
            self.pos = start;
            return Err(self.error("malformed number"));
        }
        if matches!(self.src.get(self.pos), Some(b'e' | b'E')) {
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+' | b'-')) {
                self.pos += 1;
            }
            if digits(self) == 0 {
                return Err(self.error("malformed exponent"));
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        text.parse()
            .map(Expr::Num)
            .map_err(|_| ParseError {
                pos: start,
                msg: format!("malformed number '{text}'"),
            })
    }

    fn ident(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
        match name {
            "norm" => {
                self.expect(b'(')?;
                self.bare_x()?;
                self.expect(b')')?;
                Ok(Expr::Norm)
            }
            "dot" => {
                self.expect(b'(')?;
                self.bare_x()?;
                self.expect(b',')?;
                self.bare_x()?;
                self.expect(b')')?;
                Ok(Expr::Dot)
            }
            "sqrt" | "abs" => {
                self.expect(b'(')?;
                let e = Box::new(self.expr()?);
                self.expect(b')')?;
                Ok(if name == "sqrt" { Expr::Sqrt(e) } else { Expr::Abs(e) })
            }
            _ => {
                let index = name
                    .strip_prefix('x')
                    .filter(|d| !d.is_empty() && d.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|d| d.parse::<usize>().ok());
                match index {
                    Some(i) if (1..=self.n).contains(&i) => Ok(Expr::Coord(i - 1)),
                    Some(i) => Err(ParseError {
                        pos: start,
                        msg: format!("coordinate x{i} out of range 1..={}", self.n),
                    }),
                    None => Err(ParseError {
                        pos: start,
                        msg: format!("unknown identifier '{name}'"),
                    }),
                }
            }
        }
    }

    fn bare_x(&mut self) -> Result<(), ParseError> {
        self.skip_ws();
        let rest = &self.src[self.pos..];
        let is_x = rest.first() == Some(&b'x') && !rest.get(1).is_some_and(|c| c.is_ascii_alphanumeric());
        if !is_x {
            return Err(self.error("expected 'x'"));
        }
        self.pos += 1;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, x: &[f64]) -> f64 {
        parse(src, x.len()).unwrap().eval(x)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", &[0.0]), 7.0);
        assert_eq!(ev("(1 + 2) * 3", &[0.0]), 9.0);
        assert_eq!(ev("8 / 4 / 2", &[0.0]), 1.0);
        assert_eq!(ev("5 - 3 - 1", &[0.0]), 1.0);
        assert_eq!(ev("-2 * -3", &[0.0]), 6.0);
        assert_eq!(ev("--1", &[0.0]), 1.0);
    }

    #[test]
    fn coordinates_and_functions() {
        let x = [3.0, -4.0];
        assert_eq!(ev("x1", &x), 3.0);
        assert_eq!(ev("x2 * x2", &x), 16.0);
        assert_eq!(ev("norm(x)", &x), 5.0);
        assert_eq!(ev("dot( x , x )", &x), 25.0);
        assert_eq!(ev("sqrt(dot(x,x))", &x), 5.0);
        assert_eq!(ev("abs(x2)", &x), 4.0);
        assert_eq!(ev("1.5e1 + .5 + 2.", &x), 17.5);
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("x3", 2).unwrap_err().pos, 0);
        assert_eq!(parse("1 +", 2).unwrap_err().msg, "unexpected end of input");
        assert_eq!(parse("1 ) 2", 2).unwrap_err().pos, 2);
        assert!(parse("norm(y)", 2).is_err());
        assert!(parse("dot(x)", 2).is_err());
        assert!(parse("x0", 2).is_err());
        assert!(parse("foo(1)", 2).is_err());
        assert!(parse("1e", 2).is_err());
        assert!(parse(".", 2).is_err());
        assert!(parse("2 $ 3", 2).is_err());
        assert!(parse("", 2).is_err());
    }
}
