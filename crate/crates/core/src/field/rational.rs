use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::{FieldError, LcElement, OrderedField};

/// Arbitrary-precision rational; always stored reduced with a positive
/// denominator.
pub type Rational = num_rational::BigRational;

pub fn format_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// serde `serialize_with` adapter printing the canonical text form.
pub fn serialize_rational<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format_rational(q))
}

/// Parses `["-"] digits ["/" digits]`, surrounding whitespace allowed.
pub fn parse_rational(text: &str) -> Result<Rational, FieldError> {
    let t = text.trim();
    let (neg, body) = match t.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, t),
    };
    let (num, den) = match body.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (body, None),
    };
    let digits = |s: &str, offset: usize| -> Result<BigInt, FieldError> {
        if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) {
            return Err(FieldError::Syntax { pos: offset, msg: format!("expected digits, found {s:?}") });
        }
        Ok(s.parse::<BigInt>().expect("validated digits"))
    };
    let n = digits(num, usize::from(neg))?;
    let d = match den {
        Some(d) => digits(d, usize::from(neg) + num.len() + 1)?,
        None => BigInt::one(),
    };
    if d.is_zero() {
        return Err(FieldError::DivisionByZero);
    }
    let q = Rational::new(n, d);
    Ok(if neg { -q } else { q })
}

impl OrderedField for Rational {
    fn from_rational(q: &Rational) -> Self {
        q.clone()
    }

    fn to_lc(&self) -> Result<LcElement, FieldError> {
        Ok(LcElement::from_rational(self))
    }

    fn eps_pow(q: &Rational) -> Option<Self> {
        q.is_zero().then(One::one)
    }

    fn try_inv(&self) -> Result<Self, FieldError> {
        if self.is_zero() {
            Err(FieldError::DivisionByZero)
        } else {
            Ok(self.recip())
        }
    }

    fn sign(&self) -> Result<Ordering, FieldError> {
        Ok(self.cmp(&Zero::zero()))
    }

    fn try_cmp(&self, other: &Self) -> Result<Ordering, FieldError> {
        Ok(self.cmp(other))
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn valuation(&self) -> Option<Rational> {
        (!self.is_zero()).then(Zero::zero)
    }

    fn parse_literal(text: &str) -> Result<Self, FieldError> {
        parse_rational(text)
    }

    fn to_literal(&self) -> String {
        format_rational(self)
    }

    fn abs(&self) -> Result<Self, FieldError> {
        Ok(Signed::abs(self))
    }
}
