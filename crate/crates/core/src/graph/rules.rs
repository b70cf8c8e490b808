use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{CoreError, Result};
use crate::field::{serialize_rational, FieldError, OrderedField, Rational};

/// Closed-form rule k ↦ weight of the k-th edge layer (for paths, b(k, k+1)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WeightRule {
    /// c·ε^{slope·k + offset}
    EpsPowK { coefficient: Rational, slope: Rational, offset: Rational },
    /// A fixed literal.
    Const(String),
    /// (k!)^{±1}·ε^{slope·k}
    FactorialEps { slope: Rational, reciprocal: bool },
    /// ε^{1/2^k}
    EpsPowHalfPowK,
    /// Explicit literals for the first layers, then `tail` (evaluated at the
    /// absolute index k). Without a tail the graph is finite.
    List { values: Vec<String>, tail: Option<Box<WeightRule>> },
    /// values[k mod len]
    Periodic(Vec<String>),
}

/// Behaviour of k ↦ λ(b₊(k)) for large k.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Trend {
    /// λ = slope·k + intercept.
    Linear {
        #[serde(serialize_with = "serialize_rational")]
        slope: Rational,
        #[serde(serialize_with = "serialize_rational")]
        intercept: Rational,
    },
    /// lo ≤ λ ≤ hi.
    Bounded {
        #[serde(serialize_with = "serialize_rational")]
        lo: Rational,
        #[serde(serialize_with = "serialize_rational")]
        hi: Rational,
    },
    /// λ ≤ bound for every edge weight; weights are bounded below by a
    /// positive element but nothing else is known.
    ValuationAtMost {
        #[serde(serialize_with = "serialize_rational")]
        bound: Rational,
    },
    /// Only finitely many edge layers.
    Finite {
        layers: usize,
    },
    Unknown,
}

fn int(k: usize) -> Rational {
    Rational::from_integer(k.into())
}

fn factorial(k: usize) -> Rational {
    Rational::from_integer((1..=k).fold(BigInt::one(), |acc, i| acc * BigInt::from(i)))
}

fn eps_pow<F: OrderedField>(q: &Rational) -> Result<F> {
    F::eps_pow(q).ok_or_else(|| FieldError::Unrepresentable(format!("e^({q})")).into())
}

fn literal_valuation<F: OrderedField>(text: &str) -> Result<Rational> {
    F::parse_literal(text)?.valuation().ok_or_else(|| CoreError::Spec(format!("weight literal {text:?} is zero")))
}

impl WeightRule {
    pub fn eps_pow_k() -> Self {
        Self::EpsPowK { coefficient: Rational::one(), slope: Rational::one(), offset: Rational::zero() }
    }

    pub fn eps_pow_neg_k() -> Self {
        Self::EpsPowK { coefficient: Rational::one(), slope: -Rational::one(), offset: Rational::zero() }
    }

    pub fn constant(literal: impl Into<String>) -> Self {
        Self::Const(literal.into())
    }

    /// Number of edge layers when finite.
    pub fn layers(&self) -> Option<usize> {
        match self {
            Self::List { values, tail: None } => Some(values.len()),
            _ => None,
        }
    }

    pub fn value<F: OrderedField>(&self, k: usize) -> Result<F> {
        match self {
            Self::EpsPowK { coefficient, slope, offset } => {
                Ok(F::from_rational(coefficient) * eps_pow::<F>(&(slope * int(k) + offset))?)
            }
            Self::Const(text) => Ok(F::parse_literal(text)?),
            Self::FactorialEps { slope, reciprocal } => {
                let f = factorial(k);
                let f = if *reciprocal { f.recip() } else { f };
                Ok(F::from_rational(&f) * eps_pow::<F>(&(slope * int(k)))?)
            }
            Self::EpsPowHalfPowK => {
                let q = Rational::new(BigInt::one(), BigInt::one() << k);
                eps_pow(&q)
            }
            Self::List { values, tail } => match (values.get(k), tail) {
                (Some(text), _) => Ok(F::parse_literal(text)?),
                (None, Some(rule)) => rule.value(k),
                (None, None) => Err(CoreError::precondition(format!(
                    "edge layer {k} requested from a finite list of {}",
                    values.len()
                ))),
            },
            Self::Periodic(values) => Ok(F::parse_literal(&values[k % values.len()])?),
        }
    }

    pub fn trend<F: OrderedField>(&self) -> Result<Trend> {
        Ok(match self {
            Self::EpsPowK { slope, offset, .. } => Trend::Linear { slope: slope.clone(), intercept: offset.clone() },
            Self::Const(text) => {
                let v = literal_valuation::<F>(text)?;
                Trend::Bounded { lo: v.clone(), hi: v }
            }
            Self::FactorialEps { slope, .. } => Trend::Linear { slope: slope.clone(), intercept: Rational::zero() },
            Self::EpsPowHalfPowK => Trend::Bounded { lo: Rational::zero(), hi: Rational::one() },
            Self::List { values, tail: None } => Trend::Finite { layers: values.len() },
            Self::List { tail: Some(rule), .. } => rule.trend::<F>()?,
            Self::Periodic(values) => {
                let vals = values.iter().map(|t| literal_valuation::<F>(t)).collect::<Result<Vec<_>>>()?;
                let lo = vals.iter().min().expect("nonempty").clone();
                let hi = vals.iter().max().expect("nonempty").clone();
                Trend::Bounded { lo, hi }
            }
        })
    }

    /// Structural checks, and every listed literal must parse in `F`.
    pub fn validate<F: OrderedField>(&self) -> Result<()> {
        let literals: &[String] = match self {
            Self::Const(t) => std::slice::from_ref(t),
            Self::List { values, .. } | Self::Periodic(values) => values,
            _ => &[],
        };
        for t in literals {
            F::parse_literal(t)?;
        }
        match self {
            Self::Periodic(v) if v.is_empty() => Err(CoreError::Spec("periodic rule needs at least one value".into())),
            Self::List { values, tail: None } if values.is_empty() => {
                Err(CoreError::Spec("custom_list without tail needs at least one value".into()))
            }
            Self::List { tail: Some(t), .. } => t.validate::<F>(),
            Self::EpsPowK { coefficient, .. } if !coefficient.is_positive() => {
                Err(CoreError::Spec("eps_pow_k coefficient must be positive".into()))
            }
            _ => Ok(()),
        }
    }
}

/// Sphere sizes #S_k; #S_0 is always 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SizeRule {
    /// #S_k = 1 (path graphs).
    Path,
    /// #S_k = base^k.
    Power(u64),
    /// Listed sizes; the last one repeats.
    List(Vec<u64>),
}

impl SizeRule {
    pub fn size(&self, k: usize) -> u64 {
        match self {
            Self::Path => 1,
            Self::Power(b) => b.pow(k as u32),
            Self::List(v) => *v.get(k).or(v.last()).unwrap_or(&1),
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Power(0) => Err(CoreError::Spec("sphere size base must be positive".into())),
            Self::List(v) if v.first() != Some(&1) => {
                Err(CoreError::Spec("sphere sizes must start with #S_0 = 1".into()))
            }
            Self::List(v) if v.contains(&0) => Err(CoreError::Spec("sphere sizes must be positive".into())),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_lc, LcElement, RfElement};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn closed_forms() {
        let r = WeightRule::eps_pow_k();
        assert_eq!(r.value::<LcElement>(3).unwrap(), LcElement::eps_int(3));
        assert_eq!(WeightRule::eps_pow_neg_k().value::<LcElement>(2).unwrap(), LcElement::eps_int(-2));
        let f = WeightRule::FactorialEps { slope: q(1, 1), reciprocal: false };
        assert_eq!(f.value::<LcElement>(4).unwrap(), parse_lc("24*e^(4)").unwrap());
        let g = WeightRule::FactorialEps { slope: q(-1, 1), reciprocal: true };
        assert_eq!(g.value::<RfElement>(3).unwrap(), RfElement::parse_literal("1/6*e^(-3)").unwrap());
        assert_eq!(WeightRule::EpsPowHalfPowK.value::<LcElement>(3).unwrap(), LcElement::eps(q(1, 8)));
        assert!(WeightRule::EpsPowHalfPowK.value::<RfElement>(1).is_err());
        assert_eq!(WeightRule::EpsPowHalfPowK.value::<RfElement>(0).unwrap(), RfElement::eps_pow(&q(1, 1)).unwrap());
    }

    #[test]
    fn list_with_tail_uses_absolute_index() {
        let tail = WeightRule::EpsPowK { coefficient: q(1, 1), slope: q(-1, 1), offset: q(1, 1) };
        let r = WeightRule::List { values: vec!["1".into(), "1".into()], tail: Some(Box::new(tail)) };
        assert_eq!(r.value::<LcElement>(1).unwrap(), LcElement::from_rational(&q(1, 1)));
        assert_eq!(r.value::<LcElement>(2).unwrap(), LcElement::eps_int(-1));
        assert_eq!(r.value::<LcElement>(5).unwrap(), LcElement::eps_int(-4));
        assert_eq!(r.trend::<LcElement>().unwrap(), Trend::Linear { slope: q(-1, 1), intercept: q(1, 1) });
    }

    #[test]
    fn trends() {
        let p = WeightRule::Periodic(vec!["1".into(), "1*e^(1)".into()]);
        assert_eq!(p.trend::<LcElement>().unwrap(), Trend::Bounded { lo: q(0, 1), hi: q(1, 1) });
        assert_eq!(p.value::<LcElement>(3).unwrap(), LcElement::eps_int(1));
        let fin = WeightRule::List { values: vec!["2".into()], tail: None };
        assert_eq!(fin.trend::<LcElement>().unwrap(), Trend::Finite { layers: 1 });
        assert!(fin.value::<LcElement>(1).is_err());
    }

    #[test]
    fn sphere_sizes() {
        assert_eq!(SizeRule::Power(2).size(3), 8);
        assert_eq!(SizeRule::Power(2).size(0), 1);
        assert_eq!(SizeRule::List(vec![1, 3, 6]).size(9), 6);
        assert!(SizeRule::List(vec![2]).validate().is_err());
    }
}
