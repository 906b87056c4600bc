//! Recursive-descent parser for rational expressions in `z`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := base ('^' uint)?
//! base   := 'z' | 'i' | uint | '(' expr ')' | '-' factor
//! ```
//!
//! Whitespace is ignored between tokens. Implicit multiplication is rejected.

use num_bigint::BigUint;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use super::{GRatFunc, Poly, RatFunc};
use crate::error::{Error, Result};
use crate::scalar::GaussianRational;

pub fn parse_expression(text: &str) -> Result<GRatFunc> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
    };
    let r = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error(format!("unexpected '{}'", p.src[p.pos] as char)));
    }
    Ok(r)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            pos: self.pos,
            message: message.into(),
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

    fn expr(&mut self) -> Result<GRatFunc> {
        let mut acc = self.term()?;
        loop {
            if self.eat(b'+') {
                acc = &acc + &self.term()?;
            } else if self.eat(b'-') {
                acc = &acc - &self.term()?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<GRatFunc> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(b'*') {
                acc = &acc * &self.factor()?;
            } else if self.peek() == Some(b'/') {
                let at = self.pos;
                self.pos += 1;
                let rhs = self.factor()?;
                acc = acc.checked_div(&rhs).map_err(|e| match e {
                    Error::DivisionByZero => Error::DivisionByZero,
                    _ => Error::Parse {
                        pos: at,
                        message: e.to_string(),
                    },
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<GRatFunc> {
        let base = self.base()?;
        if self.eat(b'^') {
            self.skip_ws();
            let at = self.pos;
            let n = self
                .uint()?
                .to_u32()
                .ok_or_else(|| Error::Parse {
                    pos: at,
                    message: "exponent too large".into(),
                })?;
            Ok(base.pow(n))
        } else {
            Ok(base)
        }
    }

    fn base(&mut self) -> Result<GRatFunc> {
        match self.peek() {
            Some(b'z') => {
                self.pos += 1;
                Ok(RatFunc::from_poly(Poly::z()))
            }
            Some(b'i') => {
                self.pos += 1;
                Ok(RatFunc::constant(GaussianRational::i()))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return Err(self.error("expected ')'"));
                }
                Ok(inner)
            }
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.factor()?)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.uint()?;
                let re = BigRational::from_integer(n.into());
                Ok(RatFunc::constant(GaussianRational::new(re, BigRational::zero())))
            }
            Some(c) => Err(self.error(format!("unexpected '{}'", c as char))),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn uint(&mut self) -> Result<BigUint> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected unsigned integer"));
        }
        let digits = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(digits.parse().expect("digit run parses"))
    }
}
