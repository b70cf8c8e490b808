use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::literal::{format_lc, parse_lc};
use super::{format_rational, FieldError, OrderedField, PrecisionConfig, Rational};

type Term = (Rational, Rational);

/// A truncated Levi-Civita series Σ aᵢ ε^{qᵢ}.
///
/// `terms` holds `(exponent, coefficient)` pairs with strictly increasing
/// exponents and nonzero coefficients. `guarantee` bounds the truncation: the
/// element agrees with the true value at every exponent strictly below it.
/// `None` means the element is exact.
///
/// An element with no terms and a finite guarantee is "zero-like": it is zero
/// as far as anyone can tell, and its sign is indeterminate.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LcElement {
    terms: Vec<Term>,
    guarantee: Option<Rational>,
}

/// Order-of-magnitude class of a nonzero element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Magnitude {
    Zero,
    Infinitesimal,
    /// Nonzero standard part.
    Finite,
    InfinitelyLarge,
}

fn min_bound(a: &Option<Rational>, b: &Option<Rational>) -> Option<Rational> {
    match (a, b) {
        (None, None) => None,
        (Some(x), None) | (None, Some(x)) => Some(x.clone()),
        (Some(x), Some(y)) => Some(x.min(y).clone()),
    }
}

fn shift_bound(a: &Option<Rational>, by: &Rational) -> Option<Rational> {
    a.as_ref().map(|g| g + by)
}

/// Product of two sorted term lists, keeping exponents below `cutoff`.
/// Returns the product and whether anything was cut.
fn mul_terms(a: &[Term], b: &[Term], cutoff: Option<&Rational>) -> (Vec<Term>, bool) {
    let mut acc: BTreeMap<Rational, Rational> = BTreeMap::new();
    let mut cut = false;
    for (ea, ca) in a {
        for (eb, cb) in b {
            let e = ea + eb;
            if cutoff.is_some_and(|c| &e >= c) {
                cut = true;
                break;
            }
            let slot = acc.entry(e).or_insert_with(Rational::zero);
            *slot += ca * cb;
        }
    }
    let terms = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    (terms, cut)
}

/// Terms below `cutoff` of Σ_k g^k, via s_e = Σ_j g_j·s_{e−d_j}. Every
/// exponent of g must be positive.
fn geometric_inverse(g: &[Term], cutoff: &Rational) -> Vec<Term> {
    let mut known: BTreeMap<Rational, Rational> = BTreeMap::new();
    let mut pending: BTreeSet<Rational> = BTreeSet::from([Rational::zero()]);
    while let Some(e) = pending.pop_first() {
        let c = if e.is_zero() {
            Rational::one()
        } else {
            g.iter().filter_map(|(d, gd)| known.get(&(&e - d)).map(|s| s * gd)).fold(Rational::zero(), |acc, t| acc + t)
        };
        if c.is_zero() {
            continue;
        }
        for (d, _) in g {
            let next = &e + d;
            if &next < cutoff {
                pending.insert(next);
            }
        }
        known.insert(e, c);
    }
    known.into_iter().collect()
}

fn merge_terms(a: &[Term], b: &[Term], negate_b: bool) -> Vec<Term> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    let flip = |c: &Rational| if negate_b { -c } else { c.clone() };
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            Ordering::Less => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Greater => {
                out.push((b[j].0.clone(), flip(&b[j].1)));
                j += 1;
            }
            Ordering::Equal => {
                let c = &a[i].1 + flip(&b[j].1);
                if !c.is_zero() {
                    out.push((a[i].0.clone(), c));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend(a[i..].iter().cloned());
    out.extend(b[j..].iter().map(|(e, c)| (e.clone(), flip(c))));
    out
}

impl LcElement {
    pub fn from_rational(q: &Rational) -> Self {
        Self::monomial(q.clone(), Rational::zero())
    }

    /// `coefficient · ε^exponent`, exact.
    pub fn monomial(coefficient: Rational, exponent: Rational) -> Self {
        if coefficient.is_zero() {
            return Self::zero();
        }
        Self { terms: vec![(exponent, coefficient)], guarantee: None }
    }

    /// ε^q.
    pub fn eps(exponent: Rational) -> Self {
        Self::monomial(Rational::one(), exponent)
    }

    /// ε^k for an integer k.
    pub fn eps_int(k: i64) -> Self {
        Self::eps(Rational::from_integer(k.into()))
    }

    /// Exact element from `(exponent, coefficient)` pairs in any order.
    /// Repeated exponents are an error; zero coefficients are dropped.
    pub fn from_terms(pairs: impl IntoIterator<Item = Term>) -> Result<Self, FieldError> {
        let mut map = BTreeMap::new();
        for (e, c) in pairs {
            if map.contains_key(&e) {
                return Err(FieldError::DuplicateExponent { exponent: format_rational(&e) });
            }
            map.insert(e, c);
        }
        Ok(Self { terms: map.into_iter().filter(|(_, c)| !c.is_zero()).collect(), guarantee: None })
    }

    /// Σ_{k=0}^{count-1} ratio^k · first, computed termwise and exact.
    pub fn geometric_sum(first: &Self, ratio: &Self, count: usize) -> Self {
        let mut total = Self::zero();
        let mut power = first.clone();
        for _ in 0..count {
            total = total + &power;
            power = power * ratio;
        }
        total
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn guarantee(&self) -> Option<&Rational> {
        self.guarantee.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.guarantee.is_none()
    }

    /// No known nonzero terms (exact zero or zero within precision).
    pub fn is_zero_like(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn valuation(&self) -> Option<&Rational> {
        self.terms.first().map(|(e, _)| e)
    }

    pub fn leading(&self) -> Option<&Term> {
        self.terms.first()
    }

    pub fn coefficient(&self, exponent: &Rational) -> Rational {
        self.terms.iter().find(|(e, _)| e == exponent).map(|(_, c)| c.clone()).unwrap_or_else(Rational::zero)
    }

    /// Number of exponent units between the valuation and the guarantee;
    /// `None` when exact. Zero-like elements report 0.
    pub fn relative_precision(&self) -> Option<Rational> {
        let g = self.guarantee.as_ref()?;
        Some(match self.valuation() {
            Some(v) => g - v,
            None => Rational::zero(),
        })
    }

    /// Lowers the guarantee to `bound` (never raises it).
    pub fn with_guarantee_at_most(self, bound: &Rational) -> Self {
        let g = min_bound(&self.guarantee, &Some(bound.clone()));
        let mut terms = self.terms;
        if let Some(g) = &g {
            terms.retain(|(e, _)| e < g);
        }
        Self { terms, guarantee: g }
    }

    /// Valuation if nonzero, else the guarantee (`None` for exact zero).
    fn effective_valuation(&self) -> Option<Rational> {
        self.valuation().cloned().or_else(|| self.guarantee.clone())
    }

    fn finish(mut terms: Vec<Term>, mut guarantee: Option<Rational>, cfg: &PrecisionConfig) -> Self {
        if let Some(g) = &guarantee {
            let keep = terms.partition_point(|(e, _)| e < g);
            terms.truncate(keep);
        }
        terms.retain(|(_, c)| !c.is_zero());
        if let Some((lead, _)) = terms.first() {
            let cutoff = lead + &cfg.window;
            let keep = terms.partition_point(|(e, _)| e < &cutoff);
            if keep < terms.len() {
                terms.truncate(keep);
                guarantee = min_bound(&guarantee, &Some(cutoff));
            }
        }
        if terms.len() > cfg.max_terms {
            let g = terms[cfg.max_terms].0.clone();
            terms.truncate(cfg.max_terms);
            guarantee = min_bound(&guarantee, &Some(g));
        }
        Self { terms, guarantee }
    }

    pub fn add_with(&self, rhs: &Self, cfg: &PrecisionConfig) -> Self {
        let terms = merge_terms(&self.terms, &rhs.terms, false);
        Self::finish(terms, min_bound(&self.guarantee, &rhs.guarantee), cfg)
    }

    pub fn sub_with(&self, rhs: &Self, cfg: &PrecisionConfig) -> Self {
        let terms = merge_terms(&self.terms, &rhs.terms, true);
        Self::finish(terms, min_bound(&self.guarantee, &rhs.guarantee), cfg)
    }

    pub fn mul_with(&self, rhs: &Self, cfg: &PrecisionConfig) -> Self {
        let (Some(lx), Some(ly)) = (self.effective_valuation(), rhs.effective_valuation()) else {
            return Self::zero();
        };
        let guarantee = min_bound(&shift_bound(&self.guarantee, &ly), &shift_bound(&rhs.guarantee, &lx));
        if self.terms.is_empty() || rhs.terms.is_empty() {
            return Self { terms: Vec::new(), guarantee };
        }
        let cutoff = min_bound(&guarantee, &Some(&lx + &ly + &cfg.window));
        let (terms, cut) = mul_terms(&self.terms, &rhs.terms, cutoff.as_ref());
        let guarantee = if cut { min_bound(&guarantee, &cutoff) } else { guarantee };
        Self::finish(terms, guarantee, cfg)
    }

    pub fn scale(&self, q: &Rational) -> Self {
        if q.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, c)| (e.clone(), c * q)).collect(), guarantee: self.guarantee.clone() }
    }

    /// Multiplies by ε^q (shifts every exponent).
    pub fn shift(&self, q: &Rational) -> Self {
        Self {
            terms: self.terms.iter().map(|(e, c)| (e + q, c.clone())).collect(),
            guarantee: shift_bound(&self.guarantee, q),
        }
    }

    /// Inverse via x = a₀ε^{q₀}(1 + h) and the truncated series Σ(−h)^k.
    pub fn inv_with(&self, cfg: &PrecisionConfig) -> Result<Self, FieldError> {
        let Some((q0, c0)) = self.terms.first() else {
            return Err(match &self.guarantee {
                None => FieldError::DivisionByZero,
                Some(g) => FieldError::Indeterminate { guarantee: format_rational(g) },
            });
        };
        let h_guarantee = self.guarantee.as_ref().map(|g| g - q0);
        let neg_h: Vec<Term> = self.terms[1..].iter().map(|(e, c)| (e - q0, -(c / c0))).collect();

        let series_guarantee = if neg_h.is_empty() {
            h_guarantee
        } else {
            let mut cutoff = match &h_guarantee {
                Some(g) => g.min(&cfg.window).clone(),
                None => cfg.window.clone(),
            };
            let neg_h: Vec<Term> = neg_h.into_iter().take_while(|(e, _)| e < &cutoff).collect();
            if let Some((lh, _)) = neg_h.first() {
                let depth_bound = lh * Rational::from_integer((cfg.geometric_series_depth + 1).into());
                if depth_bound < cutoff {
                    cutoff = depth_bound;
                }
            }
            let sum = geometric_inverse(&neg_h, &cutoff);
            return Ok(Self::finish(sum.into_iter().map(|(e, c)| (e - q0, c / c0)).collect(), Some(cutoff - q0), cfg));
        };
        Ok(Self::finish(vec![(-q0.clone(), c0.recip())], series_guarantee.map(|g| g - q0), cfg))
    }

    pub fn pow(&self, n: u32) -> Self {
        let cfg = PrecisionConfig::current();
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul_with(self, &cfg);
        }
        out
    }

    pub fn sign(&self) -> Result<Ordering, FieldError> {
        match (self.terms.first(), &self.guarantee) {
            (Some((_, c)), _) => Ok(c.cmp(&Rational::zero())),
            (None, None) => Ok(Ordering::Equal),
            (None, Some(g)) => Err(FieldError::Indeterminate { guarantee: format_rational(g) }),
        }
    }

    pub fn magnitude(&self) -> Result<Magnitude, FieldError> {
        match self.terms.first() {
            None => self.sign().map(|_| Magnitude::Zero),
            Some((e, _)) if e.is_positive() => Ok(Magnitude::Infinitesimal),
            Some((e, _)) if e.is_negative() => Ok(Magnitude::InfinitelyLarge),
            Some(_) => Ok(Magnitude::Finite),
        }
    }
}

impl Default for LcElement {
    fn default() -> Self {
        Self::zero()
    }
}

impl fmt::Display for LcElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_lc(self))
    }
}

impl fmt::Debug for LcElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.guarantee {
            None => write!(f, "{}", format_lc(self)),
            Some(g) => write!(f, "{} + O(e^({}))", format_lc(self), format_rational(g)),
        }
    }
}

impl Serialize for LcElement {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&format_lc(self))
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident, $with:ident) => {
        impl $tr for LcElement {
            type Output = LcElement;
            fn $method(self, rhs: LcElement) -> LcElement {
                self.$with(&rhs, &PrecisionConfig::current())
            }
        }
        impl<'a> $tr<&'a LcElement> for LcElement {
            type Output = LcElement;
            fn $method(self, rhs: &'a LcElement) -> LcElement {
                self.$with(rhs, &PrecisionConfig::current())
            }
        }
        impl<'a, 'b> $tr<&'b LcElement> for &'a LcElement {
            type Output = LcElement;
            fn $method(self, rhs: &'b LcElement) -> LcElement {
                self.$with(rhs, &PrecisionConfig::current())
            }
        }
    };
}

forward_binop!(Add, add, add_with);
forward_binop!(Sub, sub, sub_with);
forward_binop!(Mul, mul, mul_with);

impl Neg for LcElement {
    type Output = LcElement;
    fn neg(self) -> LcElement {
        Self { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect(), guarantee: self.guarantee }
    }
}

impl Neg for &LcElement {
    type Output = LcElement;
    fn neg(self) -> LcElement {
        -self.clone()
    }
}

impl Zero for LcElement {
    fn zero() -> Self {
        Self { terms: Vec::new(), guarantee: None }
    }

    /// Exact zero only; a zero-like element with a finite guarantee is not.
    fn is_zero(&self) -> bool {
        self.terms.is_empty() && self.guarantee.is_none()
    }
}

impl One for LcElement {
    fn one() -> Self {
        Self::monomial(Rational::one(), Rational::zero())
    }
}

impl OrderedField for LcElement {
    fn from_rational(q: &Rational) -> Self {
        LcElement::from_rational(q)
    }

    fn from_lc(x: &LcElement) -> Result<Self, FieldError> {
        Ok(x.clone())
    }

    fn to_lc(&self) -> Result<LcElement, FieldError> {
        Ok(self.clone())
    }

    fn eps_pow(q: &Rational) -> Option<Self> {
        Some(LcElement::eps(q.clone()))
    }

    fn try_inv(&self) -> Result<Self, FieldError> {
        self.inv_with(&PrecisionConfig::current())
    }

    fn sign(&self) -> Result<Ordering, FieldError> {
        LcElement::sign(self)
    }

    fn approx_eq(&self, other: &Self) -> bool {
        (self - other).is_zero_like()
    }

    fn valuation(&self) -> Option<Rational> {
        LcElement::valuation(self).cloned()
    }

    fn guarantee(&self) -> Option<Rational> {
        self.guarantee.clone()
    }

    fn parse_literal(text: &str) -> Result<Self, FieldError> {
        parse_lc(text)
    }

    fn to_literal(&self) -> String {
        format_lc(self)
    }

    fn weaken_to(self, other: &Self) -> Self {
        match &other.guarantee {
            Some(g) => self.with_guarantee_at_most(g),
            None => self,
        }
    }
}
