//! Polynomial expression parser.
//!
//! Grammar (whitespace is ignored between tokens):
//!
//! ```text
//! expr   := term (("+" | "-") term)*
//! term   := unary (("*" | "/") unary)*
//! unary  := ("+" | "-") unary | power
//! power  := atom ("^" integer)?
//! atom   := number | identifier | "(" expr ")"
//! number := digits ("." digits)?
//! ```
//!
//! Identifiers are either one of the two system variables or a parameter
//! bound in the supplied map. Division is only allowed by nonzero constants.

use std::collections::HashMap;

use num_traits::Zero;
use thiserror::Error;

use crate::poly::{RationalPoly, Vars};
use crate::rational::{self, Rational};

const MAX_EXPONENT: u32 = 64;
const MAX_DEGREE: u32 = 64;
const MAX_DEPTH: usize = 128;
const MAX_LITERAL_DIGITS: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unbound parameter `{name}` at byte {pos}")]
    UnboundParameter { name: String, pos: usize },
    #[error("non-rational literal `{text}` at byte {pos}")]
    NonRationalLiteral { text: String, pos: usize },
    #[error("division by a non-constant or zero expression at byte {pos}")]
    BadDivision { pos: usize },
    #[error("polynomial degree exceeds {MAX_DEGREE} at byte {pos}")]
    DegreeTooLarge { pos: usize },
}

/// Parses `text` into an exact polynomial in `vars`, substituting parameters.
pub fn parse_poly(
    text: &str,
    vars: Vars,
    params: &HashMap<String, Rational>,
) -> Result<RationalPoly, ParseError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        vars,
        params,
        depth: 0,
    };
    let out = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.syntax("unexpected trailing input"));
    }
    Ok(out)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    vars: Vars,
    params: &'a HashMap<String, Rational>,
    depth: usize,
}

impl Parser<'_> {
    fn syntax(&self, msg: &str) -> ParseError {
        ParseError::Syntax {
            pos: self.pos,
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

    fn check_degree(&self, p: &RationalPoly, pos: usize) -> Result<(), ParseError> {
        if p.total_degree().unwrap_or(0) > MAX_DEGREE {
            Err(ParseError::DegreeTooLarge { pos })
        } else {
            Ok(())
        }
    }

    fn expr(&mut self) -> Result<RationalPoly, ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            return Err(self.syntax("expression nested too deeply"));
        }
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = if c == b'+' { &acc + &rhs } else { &acc - &rhs };
        }
        self.depth -= 1;
        Ok(acc)
    }

    fn term(&mut self) -> Result<RationalPoly, ParseError> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            let at = self.pos;
            self.pos += 1;
            let rhs = self.unary()?;
            if c == b'*' {
                if acc.total_degree().unwrap_or(0) + rhs.total_degree().unwrap_or(0) > MAX_DEGREE {
                    return Err(ParseError::DegreeTooLarge { pos: at });
                }
                acc = &acc * &rhs;
            } else {
                if !rhs.is_constant() || rhs.is_zero() {
                    return Err(ParseError::BadDivision { pos: at });
                }
                let k = rhs.coeff(0, 0);
                acc = acc.scale(&(Rational::from_integer(1.into()) / k));
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RationalPoly, ParseError> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                self.enter()?;
                let v = self.unary()?;
                self.depth -= 1;
                Ok(-&v)
            }
            Some(b'+') => {
                self.pos += 1;
                self.enter()?;
                let v = self.unary();
                self.depth -= 1;
                v
            }
            _ => self.power(),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > MAX_DEPTH {
            Err(self.syntax("expression nested too deeply"))
        } else {
            Ok(())
        }
    }

    fn power(&mut self) -> Result<RationalPoly, ParseError> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            let at = self.pos;
            self.pos += 1;
            self.skip_ws();
            let start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.syntax("expected a nonnegative integer exponent"));
            }
            let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
            let e: u32 = match text.parse() {
                Ok(e) if e <= MAX_EXPONENT => e,
                _ => return Err(ParseError::DegreeTooLarge { pos: at }),
            };
            if base.total_degree().unwrap_or(0).saturating_mul(e) > MAX_DEGREE {
                return Err(ParseError::DegreeTooLarge { pos: at });
            }
            let out = base.pow(e);
            self.check_degree(&out, at)?;
            return Ok(out);
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RationalPoly, ParseError> {
        let vars = self.vars;
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.syntax("expected `)`"));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'.')
                {
                    self.pos += 1;
                }
                let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                let well_formed = text.len() <= MAX_LITERAL_DIGITS
                    && text.bytes().all(|b| b.is_ascii_digit() || b == b'.')
                    && text.bytes().filter(|&b| b == b'.').count() <= 1;
                match rational::parse_rational(text) {
                    Some(v) if well_formed => Ok(RationalPoly::constant(v, vars)),
                    _ => Err(ParseError::NonRationalLiteral {
                        text: text.to_string(),
                        pos: start,
                    }),
                }
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
                if name == vars.0 {
                    Ok(RationalPoly::x(vars))
                } else if name == vars.1 {
                    Ok(RationalPoly::y(vars))
                } else if let Some(v) = self.params.get(name) {
                    Ok(RationalPoly::constant(v.clone(), vars))
                } else if matches!(name, "pi" | "inf" | "nan" | "sqrt" | "exp" | "e") {
                    Err(ParseError::NonRationalLiteral {
                        text: name.to_string(),
                        pos: start,
                    })
                } else {
                    Err(ParseError::UnboundParameter {
                        name: name.to_string(),
                        pos: start,
                    })
                }
            }
            Some(_) => Err(self.syntax("unexpected character")),
            None => Err(self.syntax("unexpected end of input")),
        }
    }
}

/// Parses a parameter value given on the command line or in JSON.
pub fn parse_param(text: &str) -> Result<Rational, ParseError> {
    let params = HashMap::new();
    let p = parse_poly(text, Vars::XY, &params)?;
    if !p.is_constant() {
        return Err(ParseError::NonRationalLiteral {
            text: text.to_string(),
            pos: 0,
        });
    }
    Ok(if p.is_zero() { Rational::zero() } else { p.coeff(0, 0) })
}
