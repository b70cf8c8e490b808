use serde::Serialize;

use super::{format_rational, OrderedField, Rational};

/// Valuations λ(a_{n+1} − a_n) of a stored sequence.
///
/// `None` means the difference vanished (exactly, or within precision). In a
/// Cauchy-complete non-Archimedean field a sequence converges exactly when
/// these valuations grow without bound, so a finite prefix of them is the
/// evidence we can offer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DifferenceTrend {
    pub valuations: Vec<Option<Rational>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConvergenceTrend {
    /// The tail of the valuations is strictly increasing and has passed the
    /// threshold.
    Converging,
    /// Over the second half of the data the valuations did not increase.
    Stalled,
    Inconclusive,
}

fn gt(a: &Option<Rational>, b: &Option<Rational>) -> bool {
    match (a, b) {
        (None, None) | (None, Some(_)) => true,
        (Some(_), None) => false,
        (Some(x), Some(y)) => x > y,
    }
}

impl DifferenceTrend {
    pub fn of<F: OrderedField>(seq: &[F]) -> Self {
        let valuations = seq.windows(2).map(|w| (w[1].clone() - &w[0]).valuation()).collect();
        Self { valuations }
    }

    /// Length of the longest strictly increasing suffix.
    pub fn increasing_tail(&self) -> usize {
        let v = &self.valuations;
        if v.is_empty() {
            return 0;
        }
        let mut len = 1;
        for i in (1..v.len()).rev() {
            if gt(&v[i], &v[i - 1]) {
                len += 1;
            } else {
                break;
            }
        }
        len
    }

    pub fn verdict(&self, threshold: &Rational) -> ConvergenceTrend {
        let Some(last) = self.valuations.last() else {
            return ConvergenceTrend::Inconclusive;
        };
        let passed = last.as_ref().is_none_or(|v| v >= threshold);
        if passed && self.increasing_tail() >= 2.min(self.valuations.len()) {
            return ConvergenceTrend::Converging;
        }
        let mid = &self.valuations[self.valuations.len() / 2];
        if self.valuations.len() >= 4 && !gt(last, mid) {
            return ConvergenceTrend::Stalled;
        }
        ConvergenceTrend::Inconclusive
    }

    /// `(index, valuation literal)` pairs; `"inf"` marks a vanished difference.
    pub fn table(&self) -> Vec<(usize, String)> {
        self.valuations
            .iter()
            .enumerate()
            .map(|(i, v)| (i, v.as_ref().map_or_else(|| "inf".to_string(), format_rational)))
            .collect()
    }
}
