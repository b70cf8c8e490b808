use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Serialize, Serializer};

use super::literal::{format_lc, parse_lc};
use super::poly::Poly;
use super::{format_rational, FieldError, LcElement, OrderedField, Rational};

/// Element of ℚ(r), ordered so that r is a positive infinitesimal.
///
/// Stored as a reduced fraction whose denominator has lowest-order
/// coefficient 1. The sign of the element is then the sign of the
/// numerator's lowest-order coefficient.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RfElement {
    num: Poly,
    den: Poly,
}

impl RfElement {
    fn normalized(num: Poly, den: Poly) -> Result<Self, FieldError> {
        if den.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        if num.is_zero() {
            return Ok(Self { num, den: Poly::constant(Rational::one()) });
        }
        let (num, den) = if den.degree() == Some(0) {
            (num, den)
        } else {
            let g = num.gcd(&den);
            if g.is_one() {
                (num, den)
            } else {
                (num.div_rem(&g).0, den.div_rem(&g).0)
            }
        };
        let k = den.lowest().expect("nonzero denominator").recip();
        Ok(Self { num: num.scale(&k), den: den.scale(&k) })
    }

    /// `num(r)/den(r)` from coefficient lists in ascending degree.
    pub fn from_coeffs(num: Vec<Rational>, den: Vec<Rational>) -> Result<Self, FieldError> {
        Self::normalized(Poly::new(num), Poly::new(den))
    }

    pub fn constant(c: Rational) -> Self {
        Self { num: Poly::constant(c), den: Poly::constant(Rational::one()) }
    }

    /// c·r^k for any integer k.
    pub fn monomial(c: Rational, k: i64) -> Self {
        let one = Rational::one();
        let d = k.unsigned_abs() as usize;
        if k >= 0 {
            Self { num: Poly::monomial(c, d), den: Poly::constant(one) }
        } else if c.is_zero() {
            Self::constant(c)
        } else {
            Self { num: Poly::constant(c), den: Poly::monomial(one, d) }
        }
    }

    pub fn numerator(&self) -> &[Rational] {
        self.num.coeffs()
    }

    pub fn denominator(&self) -> &[Rational] {
        self.den.coeffs()
    }

    /// Exact value at r = r0.
    pub fn eval_real(&self, r0: &Rational) -> Result<Rational, FieldError> {
        let d = self.den.eval(r0);
        if d.is_zero() {
            return Err(FieldError::Pole { at: format_rational(r0) });
        }
        Ok(self.num.eval(r0) / d)
    }

    /// Power-series expansion at r = 0 with ε standing for r, truncated by the
    /// current precision window.
    pub fn embed(&self) -> Result<LcElement, FieldError> {
        let num = poly_to_lc(&self.num);
        if self.den.is_one() {
            return Ok(num);
        }
        Ok(num * poly_to_lc(&self.den).try_inv()?)
    }

    fn from_lc(x: &LcElement) -> Result<Self, FieldError> {
        let mut shift: i64 = 0;
        let mut ints = Vec::with_capacity(x.terms().len());
        for (e, c) in x.terms() {
            let k = (e.is_integer())
                .then(|| e.to_integer().to_i64())
                .flatten()
                .ok_or_else(|| FieldError::Unrepresentable(format!("r^({})", format_rational(e))))?;
            shift = shift.min(k);
            ints.push((k, c.clone()));
        }
        let mut num = Poly::zero();
        for (k, c) in ints {
            num = &num + &Poly::monomial(c, (k - shift) as usize);
        }
        Self::normalized(num, Poly::monomial(Rational::one(), shift.unsigned_abs() as usize))
    }
}

fn poly_to_lc(p: &Poly) -> LcElement {
    LcElement::from_terms(p.coeffs().iter().enumerate().map(|(i, c)| (Rational::from_integer(i.into()), c.clone())))
        .expect("distinct degrees")
}

fn poly_literal(p: &Poly) -> String {
    format_lc(&poly_to_lc(p))
}

/// Splits "(A)" at its matching close paren; returns (A, rest).
fn parenthesized(text: &str, offset: usize) -> Result<(&str, &str), FieldError> {
    let mut depth = 0usize;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => {
                depth -= 1;
                if depth == 0 {
                    return Ok((&text[1..i], &text[i + 1..]));
                }
            }
            _ => {}
        }
    }
    Err(FieldError::Syntax { pos: offset + text.len(), msg: "unbalanced '('".into() })
}

fn shift_syntax(e: FieldError, by: usize) -> FieldError {
    match e {
        FieldError::Syntax { pos, msg } => FieldError::Syntax { pos: pos + by, msg },
        other => other,
    }
}

impl fmt::Display for RfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl fmt::Debug for RfElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

impl Serialize for RfElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_literal())
    }
}

impl Add<&RfElement> for RfElement {
    type Output = RfElement;
    fn add(self, rhs: &RfElement) -> RfElement {
        if self.den == rhs.den {
            return Self::normalized(&self.num + &rhs.num, self.den).expect("nonzero denominator");
        }
        Self::normalized(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
            .expect("nonzero denominator")
    }
}

impl Sub<&RfElement> for RfElement {
    type Output = RfElement;
    fn sub(self, rhs: &RfElement) -> RfElement {
        self + &(-rhs.clone())
    }
}

impl Mul<&RfElement> for RfElement {
    type Output = RfElement;
    fn mul(self, rhs: &RfElement) -> RfElement {
        Self::normalized(&self.num * &rhs.num, &self.den * &rhs.den).expect("nonzero denominator")
    }
}

impl Add for RfElement {
    type Output = RfElement;
    fn add(self, rhs: RfElement) -> RfElement {
        self + &rhs
    }
}

impl Sub for RfElement {
    type Output = RfElement;
    fn sub(self, rhs: RfElement) -> RfElement {
        self - &rhs
    }
}

impl Mul for RfElement {
    type Output = RfElement;
    fn mul(self, rhs: RfElement) -> RfElement {
        self * &rhs
    }
}

impl Neg for RfElement {
    type Output = RfElement;
    fn neg(self) -> RfElement {
        Self { num: -&self.num, den: self.den }
    }
}

impl Zero for RfElement {
    fn zero() -> Self {
        Self::constant(Rational::zero())
    }

    fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}

impl One for RfElement {
    fn one() -> Self {
        Self::constant(Rational::one())
    }
}

impl OrderedField for RfElement {
    fn from_rational(q: &Rational) -> Self {
        Self::constant(q.clone())
    }

    fn to_lc(&self) -> Result<LcElement, FieldError> {
        self.embed()
    }

    fn eps_pow(q: &Rational) -> Option<Self> {
        let k = q.is_integer().then(|| q.to_integer().to_i64()).flatten()?;
        Some(Self::monomial(Rational::one(), k))
    }

    fn try_inv(&self) -> Result<Self, FieldError> {
        Self::normalized(self.den.clone(), self.num.clone())
    }

    fn sign(&self) -> Result<Ordering, FieldError> {
        // Denominator's lowest coefficient is 1 in normal form.
        Ok(match self.num.lowest() {
            None => Ordering::Equal,
            Some(c) if c.is_positive() => Ordering::Greater,
            Some(_) => Ordering::Less,
        })
    }

    fn approx_eq(&self, other: &Self) -> bool {
        self == other
    }

    fn valuation(&self) -> Option<Rational> {
        let n = self.num.order()? as i64;
        let d = self.den.order().expect("nonzero denominator") as i64;
        Some(Rational::from_integer((n - d).into()))
    }

    /// Either an element literal with integer exponents (e standing for r) or
    /// `(A)/(B)` with A, B such literals.
    fn parse_literal(text: &str) -> Result<Self, FieldError> {
        let lead = text.len() - text.trim_start().len();
        let t = text.trim();
        if !t.starts_with('(') {
            return Self::from_lc(&parse_lc(text)?);
        }
        let (a, rest) = parenthesized(t, lead)?;
        let num = Self::from_lc(&parse_lc(a).map_err(|e| shift_syntax(e, lead + 1))?)?;
        let rest_trim = rest.trim_start();
        if rest_trim.is_empty() {
            return Ok(num);
        }
        let at = lead + t.len() - rest_trim.len();
        let Some(after) = rest_trim.strip_prefix('/') else {
            return Err(FieldError::Syntax { pos: at, msg: "expected '/'".into() });
        };
        let b_text = after.trim_start();
        let b_at = at + 1 + after.len() - b_text.len();
        if !b_text.starts_with('(') {
            return Err(FieldError::Syntax { pos: b_at, msg: "expected '('".into() });
        }
        let (b, tail) = parenthesized(b_text, b_at)?;
        if !tail.trim().is_empty() {
            let pos = b_at + b_text.len() - tail.len();
            return Err(FieldError::Syntax { pos, msg: "trailing input".into() });
        }
        let den = Self::from_lc(&parse_lc(b).map_err(|e| shift_syntax(e, b_at + 1))?)?;
        num.try_div(&den)
    }

    fn to_literal(&self) -> String {
        if self.den.is_one() {
            poly_literal(&self.num)
        } else {
            format!("({})/({})", poly_literal(&self.num), poly_literal(&self.den))
        }
    }
}
