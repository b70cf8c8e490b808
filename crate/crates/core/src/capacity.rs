//! Capacity along ball exhaustions and capacity-type verdicts.
//!
//! A verdict on an infinite graph is only ever issued with a certificate that
//! can be checked again; without one the answer is `Inconclusive` together
//! with the finite evidence that was computed.

use std::cmp::Ordering;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dirichlet::{solve_dp, DirichletSolution};
use crate::error::{CoreError, Result};
use crate::field::{
    serialize_rational, ConvergenceTrend, DifferenceTrend, LcElement, OrderedField, PrecisionConfig, Rational,
    RfElement,
};
use crate::graph::{SphericalProfile, Trend, Vertex, WeightedGraph};

/// Valuation the last Nash-Williams record must reach when no threshold is
/// given.
pub const DEFAULT_VALUATION_THRESHOLD: i64 = 4;

/// Cap on the number of series terms summed for a positive limit.
const MAX_SERIES_TERMS: usize = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct CapacitySequence<F> {
    pub root: Vertex,
    pub horizon: usize,
    /// cap_n(a) for n = 1..=horizon.
    pub values: Vec<F>,
    /// λ(cap_n − cap_{n+1}); `None` when the difference vanished.
    pub valuations: Vec<Option<Rational>>,
}

impl<F: OrderedField> CapacitySequence<F> {
    pub fn trend(&self) -> DifferenceTrend {
        DifferenceTrend { valuations: self.valuations.clone() }
    }

    /// cap_n(a), 1-based.
    pub fn cap(&self, n: usize) -> &F {
        &self.values[n - 1]
    }
}

/// cap_n(a) = cap_{B_n(a)}(a) for n = 1..=horizon, growing the graph as
/// needed. Fails if a step violates cap_{n+1} ⪯ cap_n decidably.
pub fn capacity_sequence<F: OrderedField>(
    g: &WeightedGraph<F>,
    a: Vertex,
    horizon: usize,
) -> Result<CapacitySequence<F>> {
    Ok(dirichlet_sequence(g, a, horizon)?.0)
}

/// Like [`capacity_sequence`], also returning every solution v_n.
pub fn dirichlet_sequence<F: OrderedField>(
    g: &WeightedGraph<F>,
    a: Vertex,
    horizon: usize,
) -> Result<(CapacitySequence<F>, Vec<DirichletSolution<F>>)> {
    let g = g.covering(a, horizon.saturating_sub(1))?;
    let mut solutions = Vec::with_capacity(horizon);
    for n in 1..=horizon {
        let ball = g.ball(a, n)?;
        solutions.push(solve_dp(&g, &ball, a)?);
    }
    let values: Vec<F> = solutions.iter().map(|s| s.capacity.clone()).collect();
    let mut valuations = Vec::with_capacity(values.len().saturating_sub(1));
    for (n, w) in values.windows(2).enumerate() {
        let diff = w[0].clone() - &w[1];
        if let Ok(Ordering::Less) = diff.sign() {
            return Err(CoreError::precondition(format!(
                "capacity increased from n = {} to n = {}: {} then {}",
                n + 1,
                n + 2,
                w[0].to_literal(),
                w[1].to_literal()
            )));
        }
        valuations.push(diff.valuation());
    }
    Ok((CapacitySequence { root: a, horizon, values, valuations }, solutions))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VerdictKind {
    Null,
    Positive { limit: LcElement },
    Divergent,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NashWilliamsCondition {
    /// λ(b(∂B_{n_k}(a))) strictly increasing.
    BoundaryWeight,
    /// λ(max boundary edge of B_{n_k}(a)) strictly increasing.
    MaxBoundaryEdge,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NashWilliamsCertificate {
    pub root: Vertex,
    pub condition: NashWilliamsCondition,
    /// Radii n_k.
    pub radii: Vec<usize>,
    pub weights: Vec<LcElement>,
    #[serde(serialize_with = "serialize_rationals")]
    pub valuations: Vec<Rational>,
    #[serde(serialize_with = "serialize_rational")]
    pub threshold: Rational,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::field::format_rational))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SphericalFormula {
    /// b₊(k) → 0: λ(b₊(k)) grows linearly.
    OutwardWeightToZero,
    /// b₊(k) → ∞, limit (Σ_k 1/b(∂B_{k+1}(o)))^{−1}.
    InverseBoundarySeries,
    /// c ⪯ b₊(k) ⪯ C for all k.
    TwoSidedBounds,
    /// Finitely many spheres; cap_n = 0 once the ball is the whole graph.
    FiniteGraph,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Certificate {
    ExactSphericalFormula {
        formula: SphericalFormula,
        trend: Trend,
        /// Bound literals for `TwoSidedBounds`: (c, C).
        #[serde(skip_serializing_if = "Option::is_none")]
        bounds: Option<(LcElement, LcElement)>,
        /// Levels checked against the trend.
        checked_levels: usize,
    },
    NashWilliams(NashWilliamsCertificate),
    /// Every edge weight is ⪰ `bound`; null capacity is impossible.
    BoundedBelow {
        bound: LcElement,
        source: Trend,
    },
    HorizonEvidence {
        values: Vec<LcElement>,
        difference_valuations: Vec<(usize, String)>,
        trend: ConvergenceTrend,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityVerdict {
    #[serde(flatten)]
    pub kind: VerdictKind,
    pub certificate: Certificate,
}

impl CapacityVerdict {
    pub fn is_null(&self) -> bool {
        self.kind == VerdictKind::Null
    }

    /// Whether the verdict rules out null capacity.
    pub fn excludes_null(&self) -> bool {
        matches!(self.kind, VerdictKind::Positive { .. } | VerdictKind::Divergent)
            || matches!(self.certificate, Certificate::BoundedBelow { .. })
    }

    pub fn limit(&self) -> Option<&LcElement> {
        match &self.kind {
            VerdictKind::Positive { limit } => Some(limit),
            _ => None,
        }
    }

    /// Re-checks the certificate on `g` (rooted at `a`) without trusting any
    /// stored value. Horizon evidence always re-checks as true.
    pub fn recheck<F: OrderedField>(&self, g: &WeightedGraph<F>, a: Vertex) -> Result<bool> {
        match &self.certificate {
            Certificate::NashWilliams(c) => {
                let again = boundary_records(g, c.root, *c.radii.last().unwrap_or(&1), c.condition)?;
                let recorded: Vec<_> = again.iter().filter(|r| c.radii.contains(&r.0)).collect();
                Ok(recorded.len() == c.radii.len()
                    && recorded.iter().zip(&c.valuations).all(|(r, v)| &r.2 == v)
                    && c.valuations.windows(2).all(|w| w[0] < w[1])
                    && c.valuations.last().is_some_and(|v| v >= &c.threshold))
            }
            Certificate::BoundedBelow { bound, .. } => {
                let horizon = g.covering(a, 8)?;
                for (_, _, w) in horizon.edges() {
                    if w.to_lc()?.try_cmp(bound)? == Ordering::Less {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
            Certificate::ExactSphericalFormula { trend, checked_levels, bounds, .. } => {
                let Some(p) = g.profile() else {
                    return Ok(false);
                };
                check_trend::<F>(p, trend, *checked_levels)?;
                if let Some((lo, hi)) = bounds {
                    for k in 0..level_count(p, *checked_levels) {
                        let b = p.b_plus::<F>(k)?.to_lc()?;
                        if b.try_cmp(lo)? == Ordering::Less || b.try_cmp(hi)? == Ordering::Greater {
                            return Ok(false);
                        }
                    }
                }
                Ok(true)
            }
            Certificate::HorizonEvidence { .. } => Ok(true),
        }
    }
}

fn level_count(p: &SphericalProfile, horizon: usize) -> usize {
    p.layers().map_or(horizon, |l| l.min(horizon))
}

/// Checks that λ(b₊(k)) agrees with the trend for k below `horizon`.
fn check_trend<F: OrderedField>(p: &SphericalProfile, trend: &Trend, horizon: usize) -> Result<()> {
    for k in 0..level_count(p, horizon) {
        let b = p.b_plus::<F>(k)?;
        let v = b.valuation().ok_or_else(|| CoreError::precondition(format!("b+({k}) vanishes")))?;
        let kq = Rational::from_integer(k.into());
        let ok = match trend {
            Trend::Linear { slope, intercept } => v == slope * kq + intercept,
            Trend::Bounded { lo, hi } => &v >= lo && &v <= hi,
            Trend::ValuationAtMost { bound } => &v <= bound,
            Trend::Finite { .. } | Trend::Unknown => true,
        };
        if !ok {
            return Err(CoreError::precondition(format!(
                "b+({k}) = {} does not follow the declared trend {trend:?}",
                b.to_literal()
            )));
        }
    }
    Ok(())
}

fn eps_floor_pow(q: &Rational) -> LcElement {
    LcElement::eps(Rational::from_integer(q.floor().to_integer()))
}

/// A positive element below every weight whose valuation is at most `hi`.
fn lower_bound_for(hi: &Rational) -> LcElement {
    eps_floor_pow(&(hi + Rational::from_integer(1.into())))
}

/// (Σ_{k≥0} 1/b(∂B_{k+1}(o)))^{−1}, summed while the terms are inside the
/// precision window. The omitted tail is positive with the valuation of its
/// first term, which becomes the guarantee of the sum.
fn inverse_boundary_series<F: OrderedField>(p: &SphericalProfile) -> Result<LcElement> {
    let window = PrecisionConfig::current().window;
    let mut sum = LcElement::zero();
    let mut stop: Option<Rational> = None;
    for k in 0..MAX_SERIES_TERMS {
        let term = p.boundary::<F>(k)?.to_lc()?.try_inv()?;
        let v =
            term.valuation().cloned().ok_or_else(|| CoreError::precondition(format!("1/b(∂B_{}) vanishes", k + 1)))?;
        let stop = stop.get_or_insert_with(|| &v + &window);
        if &v >= stop {
            return Ok(sum.with_guarantee_at_most(&v).try_inv()?);
        }
        sum = sum + term;
    }
    let tail = p.boundary::<F>(MAX_SERIES_TERMS)?.to_lc()?.try_inv()?;
    let g = tail.valuation().cloned().unwrap_or_else(Rational::zero);
    Ok(sum.with_guarantee_at_most(&g).try_inv()?)
}

/// Exact verdict for a weakly spherically symmetric profile whose trend is
/// known; the trend is checked on the first `horizon` levels. Other profiles
/// get horizon evidence from the realized graph.
pub fn classify_spherical<F: OrderedField>(p: &SphericalProfile, horizon: usize) -> Result<CapacityVerdict> {
    p.validate::<F>(horizon)?;
    let trend = p.trend::<F>()?;
    check_trend::<F>(p, &trend, horizon)?;
    let exact = |kind, formula, bounds| CapacityVerdict {
        kind,
        certificate: Certificate::ExactSphericalFormula {
            formula,
            trend: trend.clone(),
            bounds,
            checked_levels: level_count(p, horizon),
        },
    };
    Ok(match &trend {
        Trend::Finite { .. } => exact(VerdictKind::Null, SphericalFormula::FiniteGraph, None),
        Trend::Linear { slope, .. } if slope.is_positive() => {
            exact(VerdictKind::Null, SphericalFormula::OutwardWeightToZero, None)
        }
        Trend::Linear { slope, .. } if slope.is_negative() => {
            let limit = inverse_boundary_series::<F>(p)?;
            exact(VerdictKind::Positive { limit }, SphericalFormula::InverseBoundarySeries, None)
        }
        Trend::Linear { intercept, .. } => {
            let bounds = (lower_bound_for(intercept), eps_floor_pow(&(intercept - Rational::from_integer(1.into()))));
            exact(VerdictKind::Divergent, SphericalFormula::TwoSidedBounds, Some(bounds))
        }
        Trend::Bounded { lo, hi } => {
            let upper = LcElement::eps(Rational::from_integer(lo.ceil().to_integer() - 1));
            exact(VerdictKind::Divergent, SphericalFormula::TwoSidedBounds, Some((lower_bound_for(hi), upper)))
        }
        Trend::ValuationAtMost { .. } | Trend::Unknown => {
            let g = WeightedGraph::<F>::spherical(p.clone())?;
            horizon_evidence(&capacity_sequence(&g, 0, horizon)?, &Rational::from_integer(horizon.into()))?
        }
    })
}

fn horizon_evidence<F: OrderedField>(seq: &CapacitySequence<F>, threshold: &Rational) -> Result<CapacityVerdict> {
    let trend = seq.trend();
    Ok(CapacityVerdict {
        kind: VerdictKind::Inconclusive,
        certificate: Certificate::HorizonEvidence {
            values: seq.values.iter().map(|v| v.to_lc()).collect::<std::result::Result<_, _>>()?,
            difference_valuations: trend.table(),
            trend: trend.verdict(threshold),
        },
    })
}

/// (radius, weight, valuation) of every record in the chosen boundary
/// quantity for n = 1..=horizon: each record strictly exceeds all earlier
/// valuations.
fn boundary_records<F: OrderedField>(
    g: &WeightedGraph<F>,
    a: Vertex,
    horizon: usize,
    condition: NashWilliamsCondition,
) -> Result<Vec<(usize, LcElement, Rational)>> {
    let g = g.covering(a, horizon.saturating_sub(1))?;
    let mut records: Vec<(usize, LcElement, Rational)> = Vec::new();
    for n in 1..=horizon {
        let ball = g.ball(a, n)?;
        let quantity = match condition {
            NashWilliamsCondition::BoundaryWeight => g.boundary_weight(&ball)?,
            NashWilliamsCondition::MaxBoundaryEdge => {
                let edges = g.boundary_edges(&ball)?;
                let mut best = F::zero();
                for (_, _, w) in &edges {
                    best = F::certified_max(&best, w)?;
                }
                best
            }
        };
        // A finite graph exhausted by the ball has no boundary left.
        let Some(v) = quantity.valuation() else {
            break;
        };
        if records.last().is_none_or(|r| r.2 < v) {
            records.push((n, quantity.to_lc()?, v));
        }
    }
    Ok(records)
}

/// Searches radii n ≤ horizon for a subsequence along which the boundary
/// weight (or the largest boundary edge) has strictly increasing valuation.
/// A certificate needs at least three records, the last at or above
/// `threshold`.
pub fn nash_williams<F: OrderedField>(
    g: &WeightedGraph<F>,
    a: Vertex,
    horizon: usize,
    threshold: &Rational,
) -> Result<Option<NashWilliamsCertificate>> {
    for condition in [NashWilliamsCondition::BoundaryWeight, NashWilliamsCondition::MaxBoundaryEdge] {
        let records = boundary_records(g, a, horizon, condition)?;
        if records.len() >= 3 && records.last().is_some_and(|r| &r.2 >= threshold) {
            let (radii, rest): (Vec<_>, Vec<_>) = records.into_iter().map(|(n, w, v)| (n, (w, v))).unzip();
            let (weights, valuations) = rest.into_iter().unzip();
            return Ok(Some(NashWilliamsCertificate {
                root: a,
                condition,
                radii,
                weights,
                valuations,
                threshold: threshold.clone(),
            }));
        }
    }
    Ok(None)
}

/// A positive lower bound on all edge weights, when the generator's trend
/// guarantees one.
fn weight_lower_bound(trend: &Trend) -> Option<LcElement> {
    match trend {
        Trend::Linear { slope, intercept } if !slope.is_positive() => Some(lower_bound_for(intercept)),
        Trend::Bounded { hi, .. } => Some(lower_bound_for(hi)),
        Trend::ValuationAtMost { bound } => Some(lower_bound_for(bound)),
        _ => None,
    }
}

/// Verdict from whatever sound certificate applies, tried in order:
/// Nash-Williams, spherical recognition, bounded-below weights. Otherwise
/// `Inconclusive` with the capacity sequence's difference valuations.
pub fn classify_generic<F: OrderedField>(
    g: &WeightedGraph<F>,
    a: Vertex,
    horizon: usize,
    threshold: &Rational,
) -> Result<CapacityVerdict> {
    if let Some(cert) = nash_williams(g, a, horizon, threshold)? {
        return Ok(CapacityVerdict { kind: VerdictKind::Null, certificate: Certificate::NashWilliams(cert) });
    }
    let trend = match g.profile() {
        Some(p) => Some(p.trend::<F>()?),
        None => None,
    };
    if let (Some(p), Some(t)) = (g.profile(), &trend) {
        if !matches!(t, Trend::ValuationAtMost { .. } | Trend::Unknown) {
            return classify_spherical::<F>(p, horizon);
        }
    }
    if let Some(t) = &trend {
        if let Some(bound) = weight_lower_bound(t) {
            return Ok(CapacityVerdict {
                kind: VerdictKind::Inconclusive,
                certificate: Certificate::BoundedBelow { bound, source: t.clone() },
            });
        }
    }
    horizon_evidence(&capacity_sequence(g, a, horizon)?, threshold)
}

/// Checks b ⪯ b′ edgewise on the balls up to `horizon`, then returns the
/// ordering of cap_n(a) against cap′_n(a) for n = 1..=horizon.
pub fn monotone_compare<F: OrderedField>(
    g: &WeightedGraph<F>,
    h: &WeightedGraph<F>,
    a: Vertex,
    horizon: usize,
) -> Result<Vec<Ordering>> {
    let gc = g.covering(a, horizon)?;
    let hc = h.covering(a, horizon)?;
    for x in gc.ball(a, horizon)? {
        let (ours, theirs) = (gc.neighbors(x)?, hc.neighbors(x)?);
        if ours.len() != theirs.len() || ours.iter().zip(theirs).any(|(p, q)| p.0 != q.0) {
            return Err(CoreError::precondition(format!("graphs differ in structure at vertex {x}")));
        }
        for ((y, w), (_, w2)) in ours.iter().zip(theirs) {
            if w.try_cmp(w2)? == Ordering::Greater {
                return Err(CoreError::precondition(format!(
                    "b({x},{y}) = {} exceeds b'({x},{y}) = {}",
                    w.to_literal(),
                    w2.to_literal()
                )));
            }
        }
    }
    let lhs = capacity_sequence(&gc, a, horizon)?;
    let rhs = capacity_sequence(&hc, a, horizon)?;
    lhs.values.iter().zip(&rhs.values).map(|(x, y)| compare_within_precision(x, y)).collect()
}

/// Certified ordering, or `Equal` when the two agree to within their
/// guarantees and nothing finer can be decided.
pub fn compare_within_precision<F: OrderedField>(x: &F, y: &F) -> Result<Ordering> {
    match x.try_cmp(y) {
        Ok(o) => Ok(o),
        Err(_) if x.approx_eq(y) => Ok(Ordering::Equal),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(serialize_with = "serialize_rational")]
    pub r: Rational,
    /// cap^ℝ_{B_N, r}(a), exact.
    #[serde(serialize_with = "serialize_rational")]
    pub capacity: Rational,
    /// r^{−n}·cap.
    #[serde(serialize_with = "serialize_rational")]
    pub scaled: Rational,
    pub capacity_f64: f64,
    pub scaled_f64: f64,
}

/// The real graph b_r obtained by evaluating every weight at r, on the ball
/// of radius `horizon` around `a`.
pub fn evaluate_at(
    g: &WeightedGraph<RfElement>,
    a: Vertex,
    horizon: usize,
    r: &Rational,
) -> Result<WeightedGraph<Rational>> {
    let g = g.covering(a, horizon.saturating_sub(1))?;
    for (x, y, w) in g.edges() {
        let v = w.eval_real(r)?;
        if !v.is_positive() {
            return Err(CoreError::precondition(format!(
                "b({x},{y}) = {w} evaluates to {} at r = {r}",
                crate::field::format_rational(&v)
            )));
        }
    }
    g.map_field(|w| Ok(w.eval_real(r)?))
}

/// Classical capacities cap^ℝ_{B_n, r}(a) for n = 1..=horizon.
pub fn real_capacities(g: &WeightedGraph<RfElement>, a: Vertex, r: &Rational, horizon: usize) -> Result<Vec<Rational>> {
    let real = evaluate_at(g, a, horizon, r)?;
    Ok(capacity_sequence(&real, a, horizon)?.values)
}

fn to_f64(q: &Rational) -> f64 {
    num_traits::ToPrimitive::to_f64(q).unwrap_or(f64::NAN)
}

/// For each r: the finite-horizon real capacity on B_N(a) and r^{−n}·cap.
pub fn real_sweep(
    g: &WeightedGraph<RfElement>,
    a: Vertex,
    power: i32,
    r_values: &[Rational],
    horizon: usize,
) -> Result<Vec<SweepRow>> {
    r_values
        .iter()
        .map(|r| {
            if !r.is_positive() {
                return Err(CoreError::precondition(format!("r = {r} is not positive")));
            }
            let real = evaluate_at(g, a, horizon, r)?;
            let ball = real.ball(a, horizon)?;
            let capacity = solve_dp(&real, &ball, a)?.capacity;
            let scaled = &capacity * num_traits::pow::Pow::pow(r.recip(), power);
            Ok(SweepRow {
                r: r.clone(),
                capacity_f64: to_f64(&capacity),
                scaled_f64: to_f64(&scaled),
                capacity,
                scaled,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_lc, One};
    use crate::graph::{SizeRule, WeightRule};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn lc_path(rule: WeightRule) -> WeightedGraph<LcElement> {
        WeightedGraph::path(rule).unwrap()
    }

    fn geometric(count: usize) -> LcElement {
        LcElement::geometric_sum(&LcElement::one(), &LcElement::eps_int(1), count)
    }

    #[test]
    fn sequences_match_closed_forms() {
        let unit = capacity_sequence(&lc_path(WeightRule::constant("1")), 0, 12).unwrap();
        for n in 1..=12 {
            assert_eq!(*unit.cap(n), LcElement::from_rational(&q(1, n as i64)));
        }
        let null = capacity_sequence(&lc_path(WeightRule::eps_pow_k()), 0, 10).unwrap();
        for n in 1..=10 {
            let expected = LcElement::eps_int(n as i64 - 1) * geometric(n).try_inv().unwrap();
            assert!(null.cap(n).approx_eq(&expected), "n = {n}");
        }
        let pos = capacity_sequence(&lc_path(WeightRule::eps_pow_neg_k()), 0, 10).unwrap();
        for n in 1..=10 {
            assert!((pos.cap(n).clone() * geometric(n)).approx_eq(&LcElement::one()));
        }
        assert_eq!(pos.valuations[0], Some(q(1, 1)));
    }

    #[test]
    fn spherical_verdicts() {
        let null = classify_spherical::<LcElement>(&SphericalProfile::path(WeightRule::eps_pow_k()), 10).unwrap();
        assert!(null.is_null());
        let pos = classify_spherical::<LcElement>(&SphericalProfile::path(WeightRule::eps_pow_neg_k()), 10).unwrap();
        assert!(pos.limit().unwrap().approx_eq(&parse_lc("1 - 1*e^(1)").unwrap()));
        let div = classify_spherical::<LcElement>(&SphericalProfile::path(WeightRule::constant("1")), 10).unwrap();
        assert_eq!(div.kind, VerdictKind::Divergent);
        let half = classify_spherical::<LcElement>(&SphericalProfile::path(WeightRule::EpsPowHalfPowK), 10).unwrap();
        assert_eq!(half.kind, VerdictKind::Divergent);
        let g = lc_path(WeightRule::EpsPowHalfPowK);
        assert!(half.recheck(&g, 0).unwrap());
    }

    #[test]
    fn positive_limit_on_a_tree() {
        // #S_k = 2^k, b₊(k) = ε^{−k}: b(∂B_{k+1}) = 2^k ε^{−k}.
        let p = SphericalProfile {
            b_plus: WeightRule::eps_pow_neg_k(),
            sphere_sizes: SizeRule::Power(2),
            b_minus: None,
            trend: None,
        };
        let v = classify_spherical::<LcElement>(&p, 6).unwrap();
        let expected = parse_lc("1 - 1/2*e^(1)").unwrap();
        assert!(v.limit().unwrap().approx_eq(&expected));
        let seq = capacity_sequence(&WeightedGraph::<LcElement>::spherical(p).unwrap(), 0, 5).unwrap();
        let series = LcElement::geometric_sum(&LcElement::one(), &parse_lc("1/2*e^(1)").unwrap(), 5);
        assert!((seq.cap(5).clone() * series).approx_eq(&LcElement::one()));
    }

    #[test]
    fn nash_williams_hits_and_misses() {
        let t = q(DEFAULT_VALUATION_THRESHOLD, 1);
        let c = nash_williams(&lc_path(WeightRule::eps_pow_k()), 0, 10, &t).unwrap().unwrap();
        assert_eq!(c.radii, (1..=10).collect::<Vec<_>>());
        assert_eq!(c.valuations[3], q(3, 1));
        for root in [1, 3] {
            assert!(nash_williams(&lc_path(WeightRule::eps_pow_k()), root, 10, &t).unwrap().is_some());
        }
        assert!(nash_williams(&lc_path(WeightRule::constant("1")), 0, 10, &t).unwrap().is_none());
        let v = classify_generic(&lc_path(WeightRule::eps_pow_k()), 0, 10, &t).unwrap();
        assert!(matches!(v.certificate, Certificate::NashWilliams(_)));
        assert!(v.recheck(&lc_path(WeightRule::eps_pow_k()), 0).unwrap());
    }

    #[test]
    fn bounded_below_is_never_null() {
        let p = SphericalProfile {
            trend: Some(Trend::ValuationAtMost { bound: q(0, 1) }),
            ..SphericalProfile::path(WeightRule::Periodic(vec!["1/2".into(), "3".into(), "1/5".into()]))
        };
        let g = WeightedGraph::<LcElement>::spherical(p).unwrap();
        let v = classify_generic(&g, 0, 8, &q(4, 1)).unwrap();
        assert!(matches!(v.certificate, Certificate::BoundedBelow { .. }));
        assert!(v.excludes_null());
        assert!(v.recheck(&g, 0).unwrap());
    }

    #[test]
    fn monotonicity_law() {
        let g = lc_path(WeightRule::eps_pow_k());
        let doubled = g.grown_to(8).unwrap().reweighted(|_, _, w| w.scale(&q(2, 1)));
        assert!(monotone_compare(&g, &doubled, 0, 6).unwrap().iter().all(|o| *o == Ordering::Less));
        assert!(monotone_compare(&g, &g, 0, 6).unwrap().iter().all(|o| *o == Ordering::Equal));
        assert!(monotone_compare(&doubled, &g, 0, 6).is_err());
        let unit = lc_path(WeightRule::constant("1")).grown_to(8).unwrap();
        let small = unit.reweighted(|_, _, _| LcElement::eps_int(1));
        let a = capacity_sequence(&small, 0, 6).unwrap();
        let b = capacity_sequence(&unit, 0, 6).unwrap();
        for n in 1..=6 {
            assert_eq!(*a.cap(n), b.cap(n).clone() * LcElement::eps_int(1));
        }
    }

    #[test]
    fn finite_graphs_are_null() {
        let g = lc_path(WeightRule::List { values: vec!["1".into(), "2".into()], tail: None });
        let v = classify_generic(&g, 0, 6, &q(4, 1)).unwrap();
        assert!(v.is_null());
        let seq = capacity_sequence(&g, 0, 4).unwrap();
        assert_eq!(*seq.cap(4), LcElement::zero());
    }

    #[test]
    fn real_sweep_partial_sums() {
        let g =
            WeightedGraph::<RfElement>::path(WeightRule::FactorialEps { slope: q(1, 1), reciprocal: false }).unwrap();
        let rows = real_sweep(&g, 0, 0, &[q(1, 2)], 6).unwrap();
        // (Σ_{k<6} 2^k/k!)^{-1}
        let sum: Rational = (0..6i64).map(|k| Rational::new((1i64 << k).into(), (1..=k).product::<i64>().into())).sum();
        assert_eq!(rows[0].capacity, sum.recip());
        assert!(real_sweep(&g, 0, 0, &[q(-1, 2)], 6).is_err());
    }
}
