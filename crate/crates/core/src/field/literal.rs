//! Text form of Levi-Civita elements.
//!
//! ```text
//! element  := term (("+" | "-") term)*
//! term     := rational | rational "*" eps | eps
//! eps      := "e" "^" "(" rational ")"
//! rational := ["-"] digits ["/" digits]
//! ```
//!
//! Whitespace is allowed between tokens.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{format_rational, FieldError, LcElement, Rational};

struct Cursor<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.src.get(self.pos).copied()
    }

    fn error(&self, msg: impl Into<String>) -> FieldError {
        FieldError::Syntax { pos: self.pos, msg: msg.into() }
    }

    fn expect(&mut self, byte: u8) -> Result<(), FieldError> {
        self.skip_ws();
        if self.peek() == Some(byte) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.error(format!("expected '{}'", byte as char)))
        }
    }

    fn digits(&mut self) -> Result<BigInt, FieldError> {
        let start = self.pos;
        while self.peek().is_some_and(|b| b.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected digits"));
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(text.parse().expect("validated digits"))
    }

    fn rational(&mut self) -> Result<Rational, FieldError> {
        self.skip_ws();
        let negative = self.peek() == Some(b'-');
        if negative {
            self.pos += 1;
        }
        let numer = self.digits()?;
        let denom = if self.peek() == Some(b'/') {
            self.pos += 1;
            let at = self.pos;
            let d = self.digits()?;
            if d.is_zero() {
                return Err(FieldError::Syntax { pos: at, msg: "zero denominator".into() });
            }
            d
        } else {
            BigInt::one()
        };
        let q = Rational::new(numer, denom);
        Ok(if negative { -q } else { q })
    }

    fn eps(&mut self) -> Result<Rational, FieldError> {
        self.expect(b'e')?;
        self.expect(b'^')?;
        self.expect(b'(')?;
        let exponent = self.rational()?;
        self.expect(b')')?;
        Ok(exponent)
    }

    fn term(&mut self) -> Result<(Rational, Rational), FieldError> {
        self.skip_ws();
        if self.peek() == Some(b'e') {
            return Ok((self.eps()?, Rational::one()));
        }
        let coefficient = self.rational()?;
        self.skip_ws();
        if self.peek() == Some(b'*') {
            self.pos += 1;
            Ok((self.eps()?, coefficient))
        } else {
            Ok((Rational::zero(), coefficient))
        }
    }
}

pub fn parse_lc(text: &str) -> Result<LcElement, FieldError> {
    let mut cur = Cursor { src: text.as_bytes(), pos: 0 };
    let mut terms = vec![cur.term()?];
    loop {
        cur.skip_ws();
        let negate = match cur.peek() {
            None => break,
            Some(b'+') => false,
            Some(b'-') => true,
            Some(_) => return Err(cur.error("expected '+' or '-'")),
        };
        cur.pos += 1;
        let (e, c) = cur.term()?;
        terms.push((e, if negate { -c } else { c }));
    }
    LcElement::from_terms(terms)
}

pub fn format_lc(x: &LcElement) -> String {
    if x.terms().is_empty() {
        return "0".into();
    }
    let mut out = String::new();
    for (i, (e, c)) in x.terms().iter().enumerate() {
        let shown = if i == 0 {
            c.clone()
        } else {
            out.push_str(if c.is_negative() { " - " } else { " + " });
            c.abs()
        };
        out.push_str(&format_rational(&shown));
        if !e.is_zero() {
            out.push_str(&format!("*e^({})", format_rational(e)));
        }
    }
    out
}
