//! Polynomial expression parser.
//!
//! Grammar (whitespace ignored):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary ('*' unary)*
//! unary  := ('-' | '+') unary | power
//! power  := atom ('^' uint)*
//! atom   := uint | ident | '(' expr ')'
//! ```
//!
//! Multiplication must be written with `*`. Unary minus binds looser than `^`,
//! so `-x^2` is `-(x^2)`.

use num_bigint::BigInt;

use super::multi::MPoly;
use crate::error::{Error, Result};

/// Largest total degree the parser will build.
pub const MAX_DEGREE: u32 = 4096;

/// Parses `text` as a polynomial in `vars`.
pub fn parse_poly(text: &str, vars: &[&str]) -> Result<MPoly> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax(if is_ident_start(p.src[p.pos]) || p.src[p.pos].is_ascii_digit() || p.src[p.pos] == b'(' {
            "implicit multiplication is not allowed; use `*`"
        } else {
            "unexpected character"
        }));
    }
    Ok(out)
}

fn is_ident_start(b: u8) -> bool {
    b.is_ascii_alphabetic() || b == b'_'
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> Error {
        Error::Syntax {
            offset: self.pos,
            msg: msg.to_string(),
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

    fn expr(&mut self) -> Result<MPoly> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let t = self.term()?;
            acc = if c == b'+' { &acc + &t } else { &acc - &t };
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<MPoly> {
        let mut acc = self.unary()?;
        while let Some(b'*') = self.peek() {
            self.pos += 1;
            let t = self.unary()?;
            acc = &acc * &t;
            self.check_degree(&acc)?;
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<MPoly> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<MPoly> {
        let mut base = self.atom()?;
        while let Some(b'^') = self.peek() {
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            if !self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                return Err(self.syntax("expected a nonnegative integer exponent"));
            }
            while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                self.pos += 1;
            }
            let digits = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: u32 = match digits.parse::<u32>() {
                Ok(e) if e <= MAX_DEGREE => e,
                _ => return Err(Error::ExponentOverflow { offset: start }),
            };
            let deg = base.total_degree().unwrap_or(0) as u64;
            if deg * e as u64 > MAX_DEGREE as u64 {
                return Err(Error::ExponentOverflow { offset: start });
            }
            base = base.pow(e);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<MPoly> {
        let zero = MPoly::zero(self.vars);
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(b) if b.is_ascii_digit() => {
                let start = self.pos;
                while self.src.get(self.pos).is_some_and(|b| b.is_ascii_digit()) {
                    self.pos += 1;
                }
                let n: BigInt = std::str::from_utf8(&self.src[start..self.pos])
                    .unwrap()
                    .parse()
                    .expect("digits");
                Ok(zero.constant_like(n))
            }
            Some(b) if is_ident_start(b) => {
                let start = self.pos;
                while self
                    .src
                    .get(self.pos)
                    .is_some_and(|b| b.is_ascii_alphanumeric() || *b == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(zero.var_like(i)),
                    None => Err(Error::UnknownVariable {
                        offset: start,
                        name: name.to_string(),
                    }),
                }
            }
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }

    fn check_degree(&self, p: &MPoly) -> Result<()> {
        if p.total_degree().unwrap_or(0) > MAX_DEGREE {
            return Err(Error::ExponentOverflow { offset: self.pos });
        }
        Ok(())
    }
}
