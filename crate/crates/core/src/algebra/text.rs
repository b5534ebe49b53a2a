//! Text form of polynomials: terms in descending graded-lex order, explicit
//! `*`, `^` for powers, rationals as `p/q`.
//!
//! The parser accepts that grammar plus parentheses, unary minus and division
//! by nonzero constants, which keeps hand-written fixtures readable.

use alloc::string::{String, ToString};
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::{Monomial, RatFunc, Rational, SparsePoly, VarNames};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("polynomial syntax error at byte {pos}: {reason}")]
pub struct ParsePolyError {
    pub pos: usize,
    pub reason: String,
}

fn render_rational(c: &Rational, out: &mut String) {
    out.push_str(&c.numer().to_string());
    if !c.denom().is_one() {
        out.push('/');
        out.push_str(&c.denom().to_string());
    }
}

fn render_monomial(m: &Monomial, names: &VarNames, out: &mut String) {
    for (i, &(v, e)) in m.factors().iter().enumerate() {
        if i > 0 {
            out.push('*');
        }
        out.push_str(&names.name(v));
        if e > 1 {
            out.push('^');
            out.push_str(&e.to_string());
        }
    }
}

impl SparsePoly {
    pub fn render(&self, names: &VarNames) -> String {
        let mut out = String::new();
        if self.is_zero() {
            out.push('0');
            return out;
        }
        for (i, (m, c)) in self.terms().rev().enumerate() {
            let neg = c.is_negative();
            match (i, neg) {
                (0, true) => out.push('-'),
                (0, false) => {}
                (_, true) => out.push_str(" - "),
                (_, false) => out.push_str(" + "),
            }
            let abs = c.abs();
            if m.is_one() {
                render_rational(&abs, &mut out);
            } else {
                if !abs.is_one() {
                    render_rational(&abs, &mut out);
                    out.push('*');
                }
                render_monomial(m, names, &mut out);
            }
        }
        out
    }

    pub fn parse(text: &str, names: &VarNames) -> Result<SparsePoly, ParsePolyError> {
        let mut p = Parser { src: text.as_bytes(), pos: 0, names };
        let v = p.expr()?;
        p.skip_ws();
        if p.pos != p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(v)
    }
}

impl fmt::Display for SparsePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&VarNames::default()))
    }
}

impl RatFunc {
    pub fn render(&self, names: &VarNames) -> String {
        if self.is_polynomial() {
            return self.num().render(names);
        }
        let mut s = String::from("(");
        s.push_str(&self.num().render(names));
        s.push_str(")/(");
        s.push_str(&self.den().render(names));
        s.push(')');
        s
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&VarNames::default()))
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    names: &'a VarNames,
}

impl Parser<'_> {
    fn err(&self, reason: &str) -> ParsePolyError {
        ParsePolyError { pos: self.pos, reason: reason.to_string() }
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

    fn expr(&mut self) -> Result<SparsePoly, ParsePolyError> {
        let mut acc = self.term()?;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn term(&mut self) -> Result<SparsePoly, ParsePolyError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                Some(b'/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    match d.as_constant() {
                        Some(c) if !c.is_zero() => acc = acc.scale(&c.recip()),
                        _ => return Err(self.err("division only by nonzero constants")),
                    }
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<SparsePoly, ParsePolyError> {
        if self.peek() == Some(b'-') {
            self.pos += 1;
            return Ok(-&self.unary()?);
        }
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e = e.to_u32().ok_or_else(|| self.err("exponent out of range"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt, ParsePolyError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        let s = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
        s.parse::<BigInt>().map_err(|_| self.err("bad integer"))
    }

    fn atom(&mut self) -> Result<SparsePoly, ParsePolyError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(SparsePoly::constant(Rational::from_integer(n)))
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = core::str::from_utf8(&self.src[start..self.pos]).unwrap();
                match self.names.resolve(name) {
                    Some(v) => Ok(SparsePoly::var(v)),
                    None => {
                        self.pos = start;
                        Err(self.err("unknown variable"))
                    }
                }
            }
            _ => Err(self.err("expected number, variable or '('")),
        }
    }
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{ratio, Var};

    #[test]
    fn render_grammar() {
        let names = VarNames::new().with(Var::Param(1), "T");
        let p = SparsePoly::parse("Y^2 - (1 + T + T*U2)*Y + T + T^2*U2", &names).unwrap();
        assert_eq!(p.render(&names), "T^2*U2 - T*U2*Y - T*Y + Y^2 + T - Y");
        let q = SparsePoly::parse("3/4*X1 - 2", &VarNames::new()).unwrap();
        assert_eq!(q, &SparsePoly::var(Var::Input(1)).scale(&ratio(3, 4)) - &SparsePoly::int(2));
        assert_eq!(q.to_string(), "3/4*X1 - 2");
        assert_eq!(SparsePoly::zero().to_string(), "0");
    }

    #[test]
    fn parse_errors() {
        assert!(SparsePoly::parse("X1 +", &VarNames::new()).is_err());
        assert!(SparsePoly::parse("Q7", &VarNames::new()).is_err());
        assert!(SparsePoly::parse("X1/X1", &VarNames::new()).is_err());
        // Reassigned default names are no longer available.
        let names = VarNames::new().with(Var::Param(1), "T");
        assert!(SparsePoly::parse("U1", &names).is_err());
    }
}
