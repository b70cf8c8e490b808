//! JSON graph specifications.
//!
//! ```json
//! {
//!   "name": "ex1",
//!   "field": "levi-civita",
//!   "precision": { "window": 32, "max_terms": 256 },
//!   "kind": "path",
//!   "weights": { "rule": "eps_pow_k" }
//! }
//! ```
//!
//! `weights` is either a list of literals or a rule object. Spherical specs
//! add `sphere_sizes` (`{"power": b}` or a list) and optionally `b_minus`;
//! explicit specs give `vertices` and `edges` as `[x, y, literal]` triples.

use std::path::Path;

use serde::Deserialize;

use crate::error::{CoreError, Result};
use crate::field::{parse_rational, OrderedField, PrecisionConfig, Rational};

use super::{Measure, SizeRule, SphericalProfile, Trend, Vertex, WeightRule, WeightedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FieldKind {
    LeviCivita,
    RationalFunction,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphKind {
    Path,
    Spherical,
    Explicit,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionSpec {
    pub window: Option<u32>,
    pub max_terms: Option<usize>,
    pub depth: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum RuleSpec {
    EpsPowK {
        coefficient: Option<String>,
        slope: Option<String>,
        offset: Option<String>,
    },
    EpsPowNegK,
    Const {
        value: Option<String>,
    },
    FactorialEps {
        slope: Option<String>,
        #[serde(default)]
        reciprocal: bool,
    },
    EpsPowHalfPowK,
    CustomList {
        values: Vec<String>,
        tail: Option<Box<RuleSpec>>,
    },
    Periodic {
        values: Vec<String>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum WeightsSpec {
    List(Vec<String>),
    Rule(RuleSpec),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum SizesSpec {
    Power { power: u64 },
    List(Vec<u64>),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum MeasureSpec {
    Named(String),
    Values(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrendSpec {
    Linear { slope: String, intercept: Option<String> },
    Bounded { lo: String, hi: String },
    ValuationAtMost { bound: String },
}

/// A function on vertices, given per vertex or per sphere.
#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(untagged)]
pub enum TestFunction {
    /// u(i) for i = 0, 1, … (sphere index on generated graphs, vertex id on
    /// explicit ones).
    Values(Vec<String>),
    /// u(0) = start, u(i+1) = u(i) + steps[i mod len].
    Increments { start: String, steps: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphSpec {
    #[serde(default)]
    pub name: String,
    pub field: FieldKind,
    pub precision: Option<PrecisionSpec>,
    pub kind: GraphKind,
    pub weights: Option<WeightsSpec>,
    pub sphere_sizes: Option<SizesSpec>,
    pub b_minus: Option<WeightsSpec>,
    pub vertices: Option<usize>,
    pub edges: Option<Vec<(Vertex, Vertex, String)>>,
    pub measure: Option<MeasureSpec>,
    pub trend: Option<TrendSpec>,
    pub test_function: Option<TestFunction>,
}

fn rational_or(text: &Option<String>, default: i64) -> Result<Rational> {
    match text {
        Some(t) => Ok(parse_rational(t)?),
        None => Ok(Rational::from_integer(default.into())),
    }
}

impl RuleSpec {
    pub fn to_rule(&self) -> Result<WeightRule> {
        Ok(match self {
            Self::EpsPowK { coefficient, slope, offset } => WeightRule::EpsPowK {
                coefficient: rational_or(coefficient, 1)?,
                slope: rational_or(slope, 1)?,
                offset: rational_or(offset, 0)?,
            },
            Self::EpsPowNegK => WeightRule::eps_pow_neg_k(),
            Self::Const { value } => WeightRule::Const(value.clone().unwrap_or_else(|| "1".into())),
            Self::FactorialEps { slope, reciprocal } => {
                WeightRule::FactorialEps { slope: rational_or(slope, 1)?, reciprocal: *reciprocal }
            }
            Self::EpsPowHalfPowK => WeightRule::EpsPowHalfPowK,
            Self::CustomList { values, tail } => WeightRule::List {
                values: values.clone(),
                tail: tail.as_ref().map(|t| t.to_rule().map(Box::new)).transpose()?,
            },
            Self::Periodic { values } => WeightRule::Periodic(values.clone()),
        })
    }
}

impl WeightsSpec {
    pub fn to_rule(&self) -> Result<WeightRule> {
        match self {
            Self::List(values) => Ok(WeightRule::List { values: values.clone(), tail: None }),
            Self::Rule(r) => r.to_rule(),
        }
    }
}

impl TrendSpec {
    pub fn to_trend(&self) -> Result<Trend> {
        Ok(match self {
            Self::Linear { slope, intercept } => {
                Trend::Linear { slope: parse_rational(slope)?, intercept: rational_or(intercept, 0)? }
            }
            Self::Bounded { lo, hi } => Trend::Bounded { lo: parse_rational(lo)?, hi: parse_rational(hi)? },
            Self::ValuationAtMost { bound } => Trend::ValuationAtMost { bound: parse_rational(bound)? },
        })
    }
}

impl TestFunction {
    pub fn value<F: OrderedField>(&self, i: usize) -> Result<F> {
        match self {
            Self::Values(v) => {
                let text = v
                    .get(i)
                    .ok_or_else(|| CoreError::precondition(format!("test function has no value at index {i}")))?;
                Ok(F::parse_literal(text)?)
            }
            Self::Increments { start, steps } => {
                if steps.is_empty() {
                    return Err(CoreError::Spec("test function needs at least one step".into()));
                }
                let steps = steps.iter().map(|s| F::parse_literal(s)).collect::<Result<Vec<F>, _>>()?;
                let mut u = F::parse_literal(start)?;
                for j in 0..i {
                    u = u + &steps[j % steps.len()];
                }
                Ok(u)
            }
        }
    }

    /// Values on every listed vertex, indexing by sphere when the graph is
    /// generated.
    pub fn on_vertices<F: OrderedField>(&self, g: &WeightedGraph<F>, vertices: &[Vertex]) -> Result<Vec<F>> {
        vertices.iter().map(|&x| self.value(g.layer_of(x).unwrap_or(x))).collect()
    }
}

impl GraphSpec {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| CoreError::Spec(e.to_string()))
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CoreError::Spec(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn precision(&self) -> Result<PrecisionConfig> {
        let mut cfg = PrecisionConfig::default();
        if let Some(p) = &self.precision {
            if let Some(w) = p.window {
                cfg.window = Rational::from_integer(w.into());
            }
            if let Some(m) = p.max_terms {
                cfg.max_terms = m;
            }
            if let Some(d) = p.depth {
                cfg.geometric_series_depth = d;
            }
        }
        PrecisionConfig::new(cfg.window, cfg.max_terms, cfg.geometric_series_depth)
            .map_err(|e| CoreError::Spec(e.to_string()))
    }

    fn weights(&self) -> Result<WeightRule> {
        self.weights.as_ref().ok_or_else(|| CoreError::Spec("missing \"weights\"".into()))?.to_rule()
    }

    fn profile(&self) -> Result<SphericalProfile> {
        let sphere_sizes = match (&self.kind, &self.sphere_sizes) {
            (GraphKind::Path, None) => SizeRule::Path,
            (GraphKind::Path, Some(_)) => return Err(CoreError::Spec("path specs take no \"sphere_sizes\"".into())),
            (_, Some(SizesSpec::Power { power })) => SizeRule::Power(*power),
            (_, Some(SizesSpec::List(v))) => SizeRule::List(v.clone()),
            (_, None) => SizeRule::Path,
        };
        Ok(SphericalProfile {
            b_plus: self.weights()?,
            sphere_sizes,
            b_minus: self.b_minus.as_ref().map(WeightsSpec::to_rule).transpose()?,
            trend: self.trend.as_ref().map(TrendSpec::to_trend).transpose()?,
        })
    }

    fn measure<F: OrderedField>(&self) -> Result<Measure<F>> {
        match &self.measure {
            None => Ok(Measure::Unit),
            Some(MeasureSpec::Named(n)) if n == "unit" => Ok(Measure::Unit),
            Some(MeasureSpec::Named(n)) if n == "degree" => Ok(Measure::Degree),
            Some(MeasureSpec::Named(n)) => Err(CoreError::Spec(format!("unknown measure {n:?}"))),
            Some(MeasureSpec::Values(v)) => {
                let values = v.iter().map(|t| F::parse_literal(t)).collect::<Result<Vec<F>, _>>()?;
                for (x, m) in values.iter().enumerate() {
                    if !m.certified_positive()? {
                        return Err(CoreError::Spec(format!("measure at vertex {x} is not positive")));
                    }
                }
                Ok(Measure::Values(values))
            }
        }
    }

    pub fn build<F: OrderedField>(&self) -> Result<WeightedGraph<F>> {
        let g = match self.kind {
            GraphKind::Path | GraphKind::Spherical => {
                if self.edges.is_some() || self.vertices.is_some() {
                    return Err(CoreError::Spec("\"edges\"/\"vertices\" are for explicit graphs".into()));
                }
                WeightedGraph::spherical(self.profile()?)?
            }
            GraphKind::Explicit => {
                let n = self.vertices.ok_or_else(|| CoreError::Spec("missing \"vertices\"".into()))?;
                let edges = self
                    .edges
                    .as_ref()
                    .ok_or_else(|| CoreError::Spec("missing \"edges\"".into()))?
                    .iter()
                    .map(|(x, y, w)| Ok((*x, *y, F::parse_literal(w)?)))
                    .collect::<Result<Vec<_>>>()?;
                WeightedGraph::explicit(n, &edges)?
            }
        };
        Ok(g.with_measure(self.measure()?))
    }
}

/// Loads a rational-number list such as "1/2,1/4".
pub fn parse_rational_list(text: &str) -> Result<Vec<Rational>> {
    text.split(',').map(|t| parse_rational(t.trim()).map_err(CoreError::from)).collect()
}
