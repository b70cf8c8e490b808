use std::cell::RefCell;

use num_traits::Signed;

use super::{FieldError, Rational};

/// Truncation policy for Levi-Civita arithmetic.
///
/// Every result keeps only the exponents in `[λ, λ + window)` where λ is its
/// valuation, and at most `max_terms` terms. Inversion expands a geometric
/// series to at most `geometric_series_depth` terms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrecisionConfig {
    pub window: Rational,
    pub max_terms: usize,
    pub geometric_series_depth: usize,
}

thread_local! {
    static CURRENT: RefCell<PrecisionConfig> = RefCell::new(PrecisionConfig::default());
}

impl Default for PrecisionConfig {
    fn default() -> Self {
        Self { window: Rational::from_integer(32.into()), max_terms: 256, geometric_series_depth: 64 }
    }
}

impl PrecisionConfig {
    pub fn new(window: Rational, max_terms: usize, geometric_series_depth: usize) -> Result<Self, FieldError> {
        if !window.is_positive() || max_terms == 0 || geometric_series_depth == 0 {
            return Err(FieldError::Unrepresentable(format!(
                "precision (window {window}, max_terms {max_terms}, depth {geometric_series_depth})"
            )));
        }
        Ok(Self { window, max_terms, geometric_series_depth })
    }

    pub fn with_window(mut self, window: i64) -> Self {
        assert!(window > 0, "window must be positive");
        self.window = Rational::from_integer(window.into());
        self
    }

    /// Twice the window, twice the term budget and depth.
    pub fn doubled(&self) -> Self {
        Self {
            window: &self.window * Rational::from_integer(2.into()),
            max_terms: self.max_terms * 2,
            geometric_series_depth: self.geometric_series_depth * 2,
        }
    }

    /// Configuration in effect on this thread.
    pub fn current() -> Self {
        CURRENT.with(|c| c.borrow().clone())
    }

    /// Runs `f` with `self` installed as the thread's configuration.
    pub fn scope<T>(&self, f: impl FnOnce() -> T) -> T {
        struct Restore(Option<PrecisionConfig>);
        impl Drop for Restore {
            fn drop(&mut self) {
                if let Some(prev) = self.0.take() {
                    CURRENT.with(|c| *c.borrow_mut() = prev);
                }
            }
        }
        let prev = CURRENT.with(|c| std::mem::replace(&mut *c.borrow_mut(), self.clone()));
        let _restore = Restore(Some(prev));
        f()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scope_restores_previous() {
        let before = PrecisionConfig::current();
        let wide = before.doubled();
        let inside = wide.scope(PrecisionConfig::current);
        assert_eq!(inside, wide);
        assert_eq!(PrecisionConfig::current(), before);
    }

    #[test]
    fn rejects_degenerate() {
        assert!(PrecisionConfig::new(Rational::from_integer(0.into()), 4, 4).is_err());
        assert!(PrecisionConfig::new(Rational::from_integer(4.into()), 0, 4).is_err());
    }
}
