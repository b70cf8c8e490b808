//! The transition operator P = I − Δ under the normalization m = b:
//! p(x, y) = b(x, y)/b(x).
//!
//! Matrix elements of Pⁿ are sums over paths of length n and are computed by
//! pushing a distribution forward one step at a time, never by matrix powers.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap, HashSet};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dirichlet::{inverse_laplacian_apply, VertexFn};
use crate::error::{CoreError, Result};
use crate::field::{format_rational, ConvergenceTrend, DifferenceTrend, LcElement, OrderedField, Rational};
use crate::graph::{Measure, Trend, Vertex, WeightedGraph};

/// A graph with m forced to b, plus a cache of 1/b(x).
#[derive(Debug)]
pub struct TransitionContext<F> {
    graph: RefCell<WeightedGraph<F>>,
    inverse_degree: RefCell<HashMap<Vertex, F>>,
}

impl<F: OrderedField> TransitionContext<F> {
    pub fn new(g: &WeightedGraph<F>) -> Self {
        Self {
            graph: RefCell::new(g.clone().with_measure(Measure::Degree)),
            inverse_degree: RefCell::new(HashMap::new()),
        }
    }

    /// Snapshot of the underlying graph (with m = b).
    pub fn graph(&self) -> WeightedGraph<F> {
        self.graph.borrow().clone()
    }

    /// Makes every vertex within `radius` of `x` complete.
    fn ensure(&self, x: Vertex, radius: usize) -> Result<()> {
        let grown = match self.graph.borrow().covering(x, radius)? {
            std::borrow::Cow::Borrowed(_) => None,
            std::borrow::Cow::Owned(g) => Some(g),
        };
        if let Some(g) = grown {
            *self.graph.borrow_mut() = g;
        }
        Ok(())
    }

    fn inv_degree(&self, x: Vertex) -> Result<F> {
        if let Some(v) = self.inverse_degree.borrow().get(&x) {
            return Ok(v.clone());
        }
        let v = self.graph.borrow().degree(x)?.try_inv()?;
        self.inverse_degree.borrow_mut().insert(x, v.clone());
        Ok(v)
    }

    /// p(x, y) = b(x, y)/b(x).
    pub fn p(&self, x: Vertex, y: Vertex) -> Result<F> {
        self.ensure(x, 0)?;
        Ok(self.graph.borrow().weight(x, y) * &self.inv_degree(x)?)
    }

    /// (p(x, y))_y over the neighbours of x.
    pub fn row(&self, x: Vertex) -> Result<Vec<(Vertex, F)>> {
        self.ensure(x, 0)?;
        let inv = self.inv_degree(x)?;
        let g = self.graph.borrow();
        Ok(g.neighbors(x)?.iter().map(|(y, w)| (*y, w.clone() * &inv)).collect())
    }

    /// Σ_y p(x, y).
    pub fn row_sum(&self, x: Vertex) -> Result<F> {
        Ok(self.row(x)?.into_iter().fold(F::zero(), |acc, (_, p)| acc + p))
    }

    /// One forward step μ ↦ μP, keeping only targets in `keep` if given.
    fn push(&self, mu: &BTreeMap<Vertex, F>, keep: Option<&HashSet<Vertex>>) -> Result<BTreeMap<Vertex, F>> {
        let mut next: BTreeMap<Vertex, F> = BTreeMap::new();
        for (&w, mass) in mu {
            for (z, p) in self.row(w)? {
                if keep.is_some_and(|k| !k.contains(&z)) {
                    continue;
                }
                let add = mass.clone() * &p;
                let entry = next.entry(z).or_insert_with(F::zero);
                *entry = entry.clone() + add;
            }
        }
        Ok(next)
    }

    /// One max-product step: π'(z) = max_w π(w)·p(w, z).
    fn push_max(&self, pi: &BTreeMap<Vertex, F>, keep: Option<&HashSet<Vertex>>) -> Result<BTreeMap<Vertex, F>> {
        let mut next: BTreeMap<Vertex, F> = BTreeMap::new();
        for (&w, value) in pi {
            for (z, p) in self.row(w)? {
                if keep.is_some_and(|k| !k.contains(&z)) {
                    continue;
                }
                let cand = value.clone() * &p;
                let best = match next.get(&z) {
                    Some(cur) => F::certified_max(cur, &cand)?,
                    None => cand,
                };
                next.insert(z, best);
            }
        }
        Ok(next)
    }

    /// (P_K f)(x) = Σ_{y ∈ K} p(x, y) f(y) for x ∈ K (all x with neighbours
    /// in supp f when K is `None`).
    fn apply(&self, f: &VertexFn<F>, set: &[Vertex]) -> Result<VertexFn<F>> {
        let mut out = VertexFn::new();
        for &x in set {
            let mut acc = F::zero();
            for (y, p) in self.row(x)? {
                if let Some(fy) = f.get(&y) {
                    acc = acc + p * fy;
                }
            }
            out.insert(x, acc);
        }
        Ok(out)
    }
}

fn restriction(set: Option<&[Vertex]>) -> Option<HashSet<Vertex>> {
    set.map(|k| k.iter().copied().collect())
}

fn check_member(set: Option<&HashSet<Vertex>>, x: Vertex) -> Result<()> {
    match set {
        Some(k) if !k.contains(&x) => Err(CoreError::NotInDomain { vertex: x }),
        _ => Ok(()),
    }
}

/// Pⁿ(x, y) (or P_Kⁿ(x, y)) for n = 0..=horizon.
pub fn pn_series<F: OrderedField>(
    ctx: &TransitionContext<F>,
    set: Option<&[Vertex]>,
    x: Vertex,
    y: Vertex,
    horizon: usize,
) -> Result<Vec<F>> {
    let keep = restriction(set);
    check_member(keep.as_ref(), x)?;
    check_member(keep.as_ref(), y)?;
    if keep.is_none() {
        ctx.ensure(x, horizon)?;
    }
    let mut mu = BTreeMap::from([(x, F::one())]);
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(mu.get(&y).cloned().unwrap_or_else(F::zero));
    for _ in 0..horizon {
        mu = ctx.push(&mu, keep.as_ref())?;
        out.push(mu.get(&y).cloned().unwrap_or_else(F::zero));
    }
    Ok(out)
}

/// Pⁿ(x, y): the sum over paths of length n of the products of p.
pub fn pn_element<F: OrderedField>(ctx: &TransitionContext<F>, x: Vertex, y: Vertex, n: usize) -> Result<F> {
    Ok(pn_series(ctx, None, x, y, n)?.pop().expect("n + 1 entries"))
}

/// P_Kⁿ(x, y): paths confined to K.
pub fn pn_restricted<F: OrderedField>(
    ctx: &TransitionContext<F>,
    set: &[Vertex],
    x: Vertex,
    y: Vertex,
    n: usize,
) -> Result<F> {
    Ok(pn_series(ctx, Some(set), x, y, n)?.pop().expect("n + 1 entries"))
}

/// Πⁿ(x, y) (or Π_Kⁿ) for n = 0..=horizon: the largest single-path product.
pub fn pi_series<F: OrderedField>(
    ctx: &TransitionContext<F>,
    set: Option<&[Vertex]>,
    x: Vertex,
    y: Vertex,
    horizon: usize,
) -> Result<Vec<F>> {
    let keep = restriction(set);
    check_member(keep.as_ref(), x)?;
    check_member(keep.as_ref(), y)?;
    if keep.is_none() {
        ctx.ensure(x, horizon)?;
    }
    let mut pi = BTreeMap::from([(x, F::one())]);
    let mut out = Vec::with_capacity(horizon + 1);
    out.push(pi.get(&y).cloned().unwrap_or_else(F::zero));
    for _ in 0..horizon {
        pi = ctx.push_max(&pi, keep.as_ref())?;
        out.push(pi.get(&y).cloned().unwrap_or_else(F::zero));
    }
    Ok(out)
}

pub fn pi_element<F: OrderedField>(ctx: &TransitionContext<F>, x: Vertex, y: Vertex, n: usize) -> Result<F> {
    Ok(pi_series(ctx, None, x, y, n)?.pop().expect("n + 1 entries"))
}

/// Evidence that Pⁿ(x, y) → 0.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum DecayCertificate {
    /// Every row sum of P_K^power is infinitesimal, so ‖P_K^{j·power}‖ has
    /// valuation at least j·min_valuation.
    SubstochasticContraction {
        power: usize,
        #[serde(serialize_with = "crate::field::serialize_rational")]
        min_valuation: Rational,
        row_valuations: Vec<(Vertex, String)>,
    },
    /// The profile has b₊ → ∞ and the valuations of the nonzero terms
    /// increase strictly over the computed range.
    RecognizedProfile { trend: Trend, valuations: Vec<(usize, String)> },
}

/// Evidence that Pⁿ(x₀, x₀) does not tend to 0: P^power(x₀, x₀) ⪰ bound for a
/// positive rational bound, hence P^{j·power}(x₀, x₀) ⪰ bound^j.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoDecayCertificate {
    pub vertex: Vertex,
    pub power: usize,
    #[serde(serialize_with = "crate::field::serialize_rational")]
    pub bound: Rational,
    pub value: LcElement,
}

fn valuation_literal(v: &Option<Rational>) -> String {
    v.as_ref().map_or_else(|| "inf".to_string(), format_rational)
}

/// Searches k ≤ max_power for a power of P_K whose row sums are all
/// infinitesimal.
pub fn contraction_certificate<F: OrderedField>(
    ctx: &TransitionContext<F>,
    set: &[Vertex],
    max_power: usize,
) -> Result<Option<DecayCertificate>> {
    if set.is_empty() {
        return Ok(None);
    }
    let mut sums: VertexFn<F> = set.iter().map(|&x| (x, F::one())).collect();
    for k in 1..=max_power {
        sums = ctx.apply(&sums, set)?;
        let vals: Vec<(Vertex, Option<Rational>)> = sums.iter().map(|(x, s)| (*x, s.valuation())).collect();
        let min = vals.iter().map(|(_, v)| v.clone()).min_by(|a, b| match (a, b) {
            (None, None) => Ordering::Equal,
            (None, Some(_)) => Ordering::Greater,
            (Some(_), None) => Ordering::Less,
            (Some(a), Some(b)) => a.cmp(b),
        });
        let Some(min) = min else { continue };
        let positive = min.as_ref().is_none_or(|v| v.is_positive());
        if positive {
            return Ok(Some(DecayCertificate::SubstochasticContraction {
                power: k,
                min_valuation: min.unwrap_or_else(|| Rational::from_integer(max_power.into())),
                row_valuations: vals.iter().map(|(x, v)| (*x, valuation_literal(v))).collect(),
            }));
        }
    }
    Ok(None)
}

/// Looks for k ≤ max_power with P^k(x₀, x₀) ⪰ c for a rational c > 0.
pub fn no_decay_certificate<F: OrderedField>(
    ctx: &TransitionContext<F>,
    x0: Vertex,
    max_power: usize,
) -> Result<Option<NoDecayCertificate>> {
    let series = pn_series(ctx, None, x0, x0, max_power)?;
    for (k, value) in series.iter().enumerate().skip(1) {
        let lc = value.to_lc()?;
        if lc.valuation().is_none_or(|v| !v.is_zero()) {
            continue;
        }
        let standard = lc.coefficient(&Rational::zero());
        for bound in [standard.clone(), standard / Rational::from_integer(2.into())] {
            if value.try_cmp(&F::from_rational(&bound)).is_ok_and(|o| o != Ordering::Less) {
                return Ok(Some(NoDecayCertificate { vertex: x0, power: k, bound, value: lc }));
            }
        }
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeumannPartial<F> {
    /// Σ_{n=0}^{N} Pⁿ(x, y).
    pub sum: F,
    pub terms: Vec<F>,
    /// (n, λ(Pⁿ(x, y))); "inf" marks a zero term.
    pub valuations: Vec<(usize, String)>,
    pub trend: ConvergenceTrend,
    pub decay: Option<DecayCertificate>,
}

/// Partial Neumann sum with the valuation trend of its terms and, when one
/// applies, a certificate that the terms tend to 0.
pub fn neumann_partial<F: OrderedField>(
    ctx: &TransitionContext<F>,
    set: Option<&[Vertex]>,
    x: Vertex,
    y: Vertex,
    horizon: usize,
) -> Result<NeumannPartial<F>> {
    let terms = pn_series(ctx, set, x, y, horizon)?;
    let sum = terms.iter().fold(F::zero(), |acc, t| acc + t);
    let vals: Vec<Option<Rational>> = terms.iter().map(|t| t.valuation()).collect();
    let valuations = vals.iter().enumerate().map(|(n, v)| (n, valuation_literal(v))).collect();
    let nonzero: Vec<Rational> = vals.iter().flatten().cloned().collect();
    let increasing = nonzero.len() >= 3 && nonzero[nonzero.len() / 2..].windows(2).all(|w| w[0] < w[1]);
    let trend = if increasing {
        ConvergenceTrend::Converging
    } else {
        DifferenceTrend { valuations: vals.clone() }.verdict(&Rational::from_integer(horizon.into()))
    };
    let decay = match set {
        Some(k) => contraction_certificate(ctx, k, horizon.max(1))?,
        None => {
            let trend_of_profile = ctx.graph.borrow().profile().map(|p| p.trend::<F>()).transpose()?;
            match trend_of_profile {
                Some(t @ Trend::Linear { .. })
                    if increasing && matches!(&t, Trend::Linear { slope, .. } if slope.is_negative()) =>
                {
                    Some(DecayCertificate::RecognizedProfile { trend: t, valuations: nonzero_table(&vals) })
                }
                _ => None,
            }
        }
    };
    Ok(NeumannPartial { sum, terms, valuations, trend, decay })
}

fn nonzero_table(vals: &[Option<Rational>]) -> Vec<(usize, String)> {
    vals.iter().enumerate().filter_map(|(n, v)| v.as_ref().map(|v| (n, format_rational(v)))).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct NeumannCheck<F> {
    /// Σ_{n≤N} P_Kⁿ φ
    pub series: VertexFn<F>,
    /// Δ_K^{−1} φ from the Dirichlet solver.
    pub direct: VertexFn<F>,
    /// λ(direct − series) per vertex; "inf" when they agree within precision.
    pub gap_valuations: Vec<(Vertex, String)>,
    /// direct − series = P_K^{N+1}·direct holds within precision everywhere.
    pub agree: bool,
    pub certificate: DecayCertificate,
}

/// Compares Σ_{n≤N} P_Kⁿ φ with Δ_K^{−1} φ. Refuses unless a contraction
/// certificate exists for P_K.
pub fn neumann_inverse_check<F: OrderedField>(
    ctx: &TransitionContext<F>,
    set: &[Vertex],
    phi: &VertexFn<F>,
    horizon: usize,
) -> Result<NeumannCheck<F>> {
    let Some(certificate) = contraction_certificate(ctx, set, horizon.max(set.len() + 1))? else {
        return Err(CoreError::precondition("no convergence certificate for the restricted Neumann series"));
    };
    if let Some(x) = phi.keys().find(|x| !set.contains(x)) {
        return Err(CoreError::NotInDomain { vertex: *x });
    }
    let g = ctx.graph();
    let direct = inverse_laplacian_apply(&g, set, phi)?;
    let mut term: VertexFn<F> = set.iter().map(|&x| (x, phi.get(&x).cloned().unwrap_or_else(F::zero))).collect();
    let mut series = term.clone();
    for _ in 0..horizon {
        term = ctx.apply(&term, set)?;
        for (x, v) in &term {
            let e = series.entry(*x).or_insert_with(F::zero);
            *e = e.clone() + v;
        }
    }
    let mut tail = direct.clone();
    for _ in 0..=horizon {
        tail = ctx.apply(&tail, set)?;
    }
    let mut agree = true;
    let mut gap_valuations = Vec::with_capacity(set.len());
    for &x in set {
        let gap = direct[&x].clone() - &series[&x];
        agree &= gap.approx_eq(&tail[&x]);
        gap_valuations.push((x, valuation_literal(&gap.valuation())));
    }
    Ok(NeumannCheck { series, direct, gap_valuations, agree, certificate })
}

/// ((I − P)·Σ_{n≤N} Pⁿ 1_y)(x), which equals 1_{x=y} − P^{N+1}(x, y).
pub fn resolvent_identity<F: OrderedField>(
    ctx: &TransitionContext<F>,
    x: Vertex,
    y: Vertex,
    horizon: usize,
) -> Result<(F, F)> {
    ctx.ensure(x, horizon + 2)?;
    let columns: Vec<Vec<F>> = std::iter::once(x)
        .chain(ctx.row(x)?.into_iter().map(|(z, _)| z))
        .map(|z| pn_series(ctx, None, z, y, horizon + 1))
        .collect::<Result<_>>()?;
    let partial = |col: &Vec<F>| col[..=horizon].iter().fold(F::zero(), |acc, t| acc + t);
    let mut lhs = partial(&columns[0]);
    for ((_, p), col) in ctx.row(x)?.into_iter().zip(&columns[1..]) {
        lhs = lhs - p * &partial(col);
    }
    let delta = if x == y { F::one() } else { F::zero() };
    let rhs = delta - &columns[0][horizon + 1];
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::capacity::compare_within_precision;
    use crate::field::{parse_lc, One};
    use crate::graph::WeightRule;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ctx(rule: WeightRule) -> TransitionContext<LcElement> {
        TransitionContext::new(&WeightedGraph::path(rule).unwrap())
    }

    fn example4() -> WeightRule {
        WeightRule::List {
            values: vec!["1".into(), "1".into()],
            tail: Some(Box::new(WeightRule::EpsPowK { coefficient: q(1, 1), slope: q(-1, 1), offset: q(1, 1) })),
        }
    }

    #[test]
    fn small_powers() {
        let c = ctx(WeightRule::constant("1"));
        assert_eq!(pn_element(&c, 3, 3, 0).unwrap(), LcElement::one());
        assert_eq!(pn_element(&c, 3, 4, 0).unwrap(), LcElement::zero());
        assert_eq!(pn_element(&c, 0, 0, 2).unwrap(), LcElement::from_rational(&q(1, 2)));
        assert_eq!(pi_element(&c, 2, 2, 0).unwrap(), LcElement::one());
        let e4 = ctx(example4());
        assert_eq!(pn_element(&e4, 0, 0, 2).unwrap(), LcElement::from_rational(&q(1, 2)));
        for x in 0..5 {
            assert!(e4.row_sum(x).unwrap().approx_eq(&LcElement::one()));
        }
        let cert = no_decay_certificate(&e4, 0, 4).unwrap().unwrap();
        assert_eq!((cert.power, cert.bound), (2, q(1, 2)));
    }

    #[test]
    fn restriction() {
        let c = ctx(WeightRule::EpsPowHalfPowK);
        let l = [0, 1];
        let two = pn_restricted(&c, &l, 0, 0, 2).unwrap();
        assert_eq!(two, c.p(0, 1).unwrap() * c.p(1, 0).unwrap());
        assert_eq!(pn_restricted(&c, &[3], 3, 3, 1).unwrap(), LcElement::zero());
        let k: Vec<_> = (0..8).collect();
        assert_eq!(pn_restricted(&c, &k, 0, 0, 4).unwrap(), pn_element(&c, 0, 0, 4).unwrap());
        let small = pn_restricted(&c, &[0, 1, 2], 0, 0, 4).unwrap();
        assert_ne!(compare_within_precision(&small, &pn_element(&c, 0, 0, 4).unwrap()).unwrap(), Ordering::Greater);
    }

    #[test]
    fn restricted_decay_and_unrestricted_floor() {
        let c = ctx(WeightRule::EpsPowHalfPowK);
        let l: Vec<_> = (0..=4).collect();
        let series = pn_series(&c, Some(&l), 0, 0, 20).unwrap();
        let evens: Vec<Rational> = series.iter().step_by(2).skip(1).map(|t| t.valuation().unwrap().clone()).collect();
        assert!(evens.windows(2).all(|w| w[0] < w[1]), "{evens:?}");
        assert!(contraction_certificate(&c, &l, 20).unwrap().is_some());
        let pis = pi_series(&c, None, 0, 0, 20).unwrap();
        let floor = LcElement::eps_int(2);
        for t in pis.iter().step_by(2) {
            assert_eq!(t.try_cmp(&floor).unwrap(), Ordering::Greater);
        }
        let ps = pn_series(&c, None, 0, 0, 8).unwrap();
        for (p, pi) in ps.iter().zip(&pis) {
            assert_ne!(compare_within_precision(pi, p).unwrap(), Ordering::Greater);
        }
    }

    #[test]
    fn neumann_on_positive_example() {
        let c = ctx(WeightRule::eps_pow_neg_k());
        let partial = neumann_partial(&c, None, 0, 0, 24).unwrap();
        let green = parse_lc("1 - 1*e^(1)").unwrap().try_inv().unwrap();
        let gap = (partial.sum.clone() - green).valuation().unwrap().clone();
        assert!(gap >= q(8, 1), "{gap}");
        assert!(matches!(partial.decay, Some(DecayCertificate::RecognizedProfile { .. })));
        let unit = neumann_partial(&ctx(WeightRule::constant("1")), None, 0, 0, 10).unwrap();
        assert!(unit.decay.is_none());
    }

    #[test]
    fn resolvent() {
        let c = ctx(WeightRule::eps_pow_k());
        for (x, y) in [(0, 0), (1, 0), (2, 3)] {
            let (lhs, rhs) = resolvent_identity(&c, x, y, 6).unwrap();
            assert!(lhs.approx_eq(&rhs), "{x} {y}: {lhs:?} vs {rhs:?}");
        }
    }

    #[test]
    fn neumann_inverse() {
        let c = ctx(WeightRule::EpsPowHalfPowK);
        let l: Vec<_> = (0..=3).collect();
        let phi = VertexFn::from([(0, LcElement::one())]);
        let check = neumann_inverse_check(&c, &l, &phi, 40).unwrap();
        assert!(check.agree, "{:?}", check.gap_valuations);
        let single = neumann_inverse_check(&c, &[0], &phi, 5).unwrap();
        assert_eq!(single.direct[&0], LcElement::one());
        assert_eq!(single.series[&0], LcElement::one());
        let unit = ctx(WeightRule::constant("1"));
        assert!(neumann_inverse_check(&unit, &[0, 1, 2], &phi, 10).is_err());
    }
}
