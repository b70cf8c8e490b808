//! Ordered-field scalars.
//!
//! Three concrete fields implement [`OrderedField`]:
//!
//! - [`Rational`] (arbitrary-precision rationals, an Archimedean field used for
//!   real-parameter sweeps),
//! - [`LcElement`], truncated Levi-Civita series with a certified precision bound,
//! - [`RfElement`], the rational-function field ℚ(r) ordered at r → 0⁺.
//!
//! Every sign decision goes through [`OrderedField::sign`], which refuses to
//! guess: a Levi-Civita element whose known terms all cancelled reports
//! [`FieldError::Indeterminate`] instead of claiming zero.

mod convergence;
mod levi_civita;
mod literal;
mod poly;
mod precision;
mod rational;
mod rational_function;

use std::cmp::Ordering;
use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

pub use num_traits::{One, Zero};
use thiserror::Error;

pub use convergence::{ConvergenceTrend, DifferenceTrend};
pub use levi_civita::{LcElement, Magnitude};
pub use literal::{format_lc, parse_lc};
pub use precision::PrecisionConfig;
pub use rational::{format_rational, parse_rational, serialize_rational, Rational};
pub use rational_function::RfElement;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("sign is not decidable: all known terms cancel below exponent {guarantee}")]
    Indeterminate { guarantee: String },
    #[error("division by zero")]
    DivisionByZero,
    #[error("pole at r = {at}")]
    Pole { at: String },
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("duplicate exponent {exponent} in literal")]
    DuplicateExponent { exponent: String },
    #[error("{0} is not representable in this field")]
    Unrepresentable(String),
}

impl FieldError {
    /// True when the failure means "rerun with more precision".
    pub fn is_precision_exhausted(&self) -> bool {
        matches!(self, FieldError::Indeterminate { .. })
    }
}

/// An ordered field with decidable-or-refused comparisons.
///
/// Arithmetic is total (truncating where the representation requires it);
/// inversion and sign queries are fallible.
pub trait OrderedField:
    Zero
    + One
    + Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
    + for<'a> Add<&'a Self, Output = Self>
    + for<'a> Sub<&'a Self, Output = Self>
    + for<'a> Mul<&'a Self, Output = Self>
{
    fn from_rational(q: &Rational) -> Self;

    fn from_int(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    /// The element ε^q (r^q for rational functions). `None` when the field has
    /// no such element.
    fn eps_pow(q: &Rational) -> Option<Self>;

    /// Image in the Levi-Civita field (ε ↦ ε, r ↦ ε).
    fn to_lc(&self) -> Result<LcElement, FieldError>;

    /// Preimage of an exact Levi-Civita element, when there is one.
    fn from_lc(x: &LcElement) -> Result<Self, FieldError> {
        let unrepresentable = || FieldError::Unrepresentable(format!("{x:?}"));
        if !x.is_exact() {
            return Err(unrepresentable());
        }
        Self::parse_literal(&x.to_literal()).map_err(|_| unrepresentable())
    }

    fn try_inv(&self) -> Result<Self, FieldError>;

    fn try_div(&self, rhs: &Self) -> Result<Self, FieldError> {
        Ok(self.clone() * &rhs.try_inv()?)
    }

    /// Sign relative to zero.
    fn sign(&self) -> Result<Ordering, FieldError>;

    fn try_cmp(&self, other: &Self) -> Result<Ordering, FieldError> {
        (self.clone() - other).sign()
    }

    /// Exactly zero (not merely zero within a precision bound).
    fn is_exact_zero(&self) -> bool {
        self.is_zero()
    }

    /// Equal up to the certified precision of both operands.
    fn approx_eq(&self, other: &Self) -> bool;

    /// Least exponent with nonzero coefficient; `None` for zero or for an
    /// element whose known terms all cancelled.
    fn valuation(&self) -> Option<Rational>;

    /// Exponent below which the element is exact; `None` means exact.
    fn guarantee(&self) -> Option<Rational> {
        None
    }

    fn parse_literal(text: &str) -> Result<Self, FieldError>;
    fn to_literal(&self) -> String;

    fn abs(&self) -> Result<Self, FieldError> {
        Ok(match self.sign()? {
            Ordering::Less => -self.clone(),
            _ => self.clone(),
        })
    }

    fn square(&self) -> Self {
        self.clone() * self
    }

    /// Larger of two elements. Candidates that agree within precision count as
    /// a tie; the first one is kept and the weaker guarantee is inherited.
    fn certified_max(a: &Self, b: &Self) -> Result<Self, FieldError> {
        match a.try_cmp(b) {
            Ok(Ordering::Less) => Ok(b.clone()),
            Ok(_) => Ok(a.clone()),
            Err(_) if a.approx_eq(b) => Ok(a.clone().weaken_to(b)),
            Err(e) => Err(e),
        }
    }

    /// Same value with its guarantee lowered to at most the other's.
    fn weaken_to(self, _other: &Self) -> Self {
        self
    }

    /// Strictly positive, certified.
    fn certified_positive(&self) -> Result<bool, FieldError> {
        Ok(self.sign()? == Ordering::Greater)
    }
}

/// Errors that may signal exhausted precision.
pub trait PrecisionFailure {
    fn precision_exhausted(&self) -> bool;
}

impl PrecisionFailure for FieldError {
    fn precision_exhausted(&self) -> bool {
        self.is_precision_exhausted()
    }
}

/// Runs `f` and, while it fails with an indeterminate comparison, reruns it
/// under a doubled window, up to `max_doublings` times.
pub fn with_precision_retry<T, E, F>(max_doublings: u32, mut f: F) -> Result<T, E>
where
    F: FnMut() -> Result<T, E>,
    E: PrecisionFailure,
{
    let mut cfg = PrecisionConfig::current();
    let mut attempt = 0;
    loop {
        match cfg.scope(&mut f) {
            Err(e) if e.precision_exhausted() && attempt < max_doublings => {
                attempt += 1;
                cfg = cfg.doubled();
            }
            other => return other,
        }
    }
}
