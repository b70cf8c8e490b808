use crate::error::{CoreError, Result};
use crate::field::{OrderedField, Rational};

use super::rules::{SizeRule, Trend, WeightRule};

/// Weakly spherically symmetric data about a root o: the outward weight
/// b₊(k) of each vertex on the sphere S_k and the sphere sizes #S_k.
///
/// b₋ is determined by #S_k·b₊(k) = #S_{k+1}·b₋(k+1); an explicitly supplied
/// `b_minus` rule is checked against that identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphericalProfile {
    pub b_plus: WeightRule,
    pub sphere_sizes: SizeRule,
    pub b_minus: Option<WeightRule>,
    /// User-supplied valuation trend of b₊, overriding the rule's own.
    pub trend: Option<Trend>,
}

fn count<F: OrderedField>(n: u64) -> F {
    F::from_rational(&Rational::from_integer(n.into()))
}

impl SphericalProfile {
    pub fn path(b_plus: WeightRule) -> Self {
        Self { b_plus, sphere_sizes: SizeRule::Path, b_minus: None, trend: None }
    }

    pub fn is_path(&self) -> bool {
        self.sphere_sizes == SizeRule::Path
    }

    pub fn size(&self, k: usize) -> u64 {
        self.sphere_sizes.size(k)
    }

    /// Number of edge layers, when finite.
    pub fn layers(&self) -> Option<usize> {
        self.b_plus.layers()
    }

    pub fn b_plus<F: OrderedField>(&self, k: usize) -> Result<F> {
        let b = self.b_plus.value::<F>(k)?;
        if !b.certified_positive()? {
            return Err(CoreError::precondition(format!("b+({k}) = {} is not positive", b.to_literal())));
        }
        Ok(b)
    }

    /// b₋(k) for k ≥ 1, derived from the compatibility identity.
    pub fn b_minus<F: OrderedField>(&self, k: usize) -> Result<F> {
        assert!(k >= 1, "b- is defined from the first sphere on");
        let total = count::<F>(self.size(k - 1)) * self.b_plus::<F>(k - 1)?;
        Ok(total.try_div(&count::<F>(self.size(k)))?)
    }

    /// b(∂B_{k+1}(o)) = #S_k·b₊(k).
    pub fn boundary<F: OrderedField>(&self, k: usize) -> Result<F> {
        Ok(count::<F>(self.size(k)) * self.b_plus::<F>(k)?)
    }

    pub fn trend<F: OrderedField>(&self) -> Result<Trend> {
        match &self.trend {
            Some(t) => Ok(t.clone()),
            None => self.b_plus.trend::<F>(),
        }
    }

    /// Checks rule sanity and, for layers 1..=upto, the compatibility
    /// identity against an explicit b₋ rule.
    pub fn validate<F: OrderedField>(&self, upto: usize) -> Result<()> {
        self.b_plus.validate::<F>()?;
        self.sphere_sizes.validate()?;
        let Some(rule) = &self.b_minus else {
            return Ok(());
        };
        let last = self.layers().map_or(upto, |l| l.min(upto));
        for k in 1..=last {
            let lhs = count::<F>(self.size(k - 1)) * self.b_plus::<F>(k - 1)?;
            let rhs = count::<F>(self.size(k)) * rule.value::<F>(k)?;
            if !lhs.approx_eq(&rhs) {
                return Err(CoreError::precondition(format!(
                    "incompatible profile at k = {k}: #S_{}·b+({}) = {} but #S_{k}·b-({k}) = {}",
                    k - 1,
                    k - 1,
                    lhs.to_literal(),
                    rhs.to_literal()
                )));
            }
        }
        Ok(())
    }
}
