//! Generators and property bodies shared by the property suites and the
//! acceptance target.

#![allow(dead_code)]

use std::cmp::Ordering;
use std::collections::BTreeMap;

use nacap_core::capacity::{capacity_sequence, compare_within_precision};
use nacap_core::dirichlet::{energy, laplacian_sum, solve_dp, solve_renormalized, VertexFn};
use nacap_core::field::{
    with_precision_retry, LcElement, One, OrderedField, PrecisionConfig, Rational, RfElement, Zero,
};
use nacap_core::graph::{Measure, Vertex, WeightedGraph};
use nacap_core::potential::{
    energy_distance_constant, ground_state_transform_check, ground_state_weight, hardy_verify, harnack_constant,
};
use nacap_core::transition::{pi_series, pn_series, TransitionContext};
use nacap_core::{CoreError, Result};
use proptest::prelude::*;
use proptest::test_runner::TestCaseError;

pub const CASES: u32 = 256;
/// Starting window; indeterminate cases rerun at 16, 32 and 64.
const WINDOW: i64 = 8;
const RETRIES: u32 = 3;

pub fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Nonzero Levi-Civita elements with at most four terms, exponents in
/// ½ℤ ∩ [−3, 3].
pub fn lc_nonzero() -> impl Strategy<Value = LcElement> {
    let coeff = (prop_oneof![-5i64..=-1, 1i64..=5], 1i64..=4).prop_map(|(n, d)| q(n, d));
    proptest::collection::btree_map(-6i64..=6, coeff, 1..=4).prop_map(|terms| {
        LcElement::from_terms(terms.into_iter().map(|(e, c)| (q(e, 2), c))).expect("distinct exponents")
    })
}

pub fn lc_any() -> impl Strategy<Value = LcElement> {
    prop_oneof![1 => Just(LcElement::zero()), 9 => lc_nonzero()]
}

pub fn lc_positive() -> impl Strategy<Value = LcElement> {
    lc_nonzero().prop_map(|x| if x.sign().expect("exact") == Ordering::Less { -x } else { x })
}

/// A connected finite graph whose last vertex is the exterior of the domain
/// K = {0, …, n−2}; K itself is connected.
#[derive(Debug, Clone)]
pub struct GraphCase {
    pub n: usize,
    pub edges: Vec<(Vertex, Vertex, LcElement)>,
    pub measure: Vec<LcElement>,
}

impl GraphCase {
    pub fn graph(&self) -> WeightedGraph<LcElement> {
        WeightedGraph::explicit(self.n, &self.edges)
            .expect("generated graph is valid")
            .with_measure(Measure::Values(self.measure.clone()))
    }

    pub fn domain(&self) -> Vec<Vertex> {
        (0..self.n - 1).collect()
    }
}

pub fn graph_case() -> impl Strategy<Value = GraphCase> {
    (3usize..=6).prop_flat_map(|n| {
        let parents: Vec<_> = (1..n).map(|i| 0..i).collect();
        let tree_weights = proptest::collection::vec(lc_positive(), n - 1);
        let extra = proptest::collection::vec((0..n, 0..n, lc_positive()), 0..=3);
        let measure = proptest::collection::vec(lc_positive(), n);
        (Just(n), parents, tree_weights, extra, measure).prop_map(|(n, parents, tree_weights, extra, measure)| {
            let mut edges: BTreeMap<(Vertex, Vertex), LcElement> = BTreeMap::new();
            for (i, (p, w)) in parents.into_iter().zip(tree_weights).enumerate() {
                edges.insert((p, i + 1), w);
            }
            for (x, y, w) in extra {
                if x != y {
                    edges.entry((x.min(y), x.max(y))).or_insert(w);
                }
            }
            GraphCase { n, edges: edges.into_iter().map(|((x, y), w)| (x, y, w)).collect(), measure }
        })
    })
}

/// A graph, a vertex pair inside K and a function supported in K.
pub fn graph_with_data() -> impl Strategy<Value = (GraphCase, Vertex, Vertex, Vec<LcElement>)> {
    graph_case().prop_flat_map(|g| {
        let k = g.n - 1;
        (Just(g), 0..k, 0..k, proptest::collection::vec(lc_any(), k))
    })
}

fn fail(msg: String) -> TestCaseError {
    TestCaseError::fail(msg)
}

fn retry<T>(f: impl FnMut() -> Result<T>) -> std::result::Result<T, TestCaseError> {
    PrecisionConfig::default()
        .with_window(WINDOW)
        .scope(|| with_precision_retry(RETRIES, f))
        .map_err(|e: CoreError| fail(e.to_string()))
}

fn not_greater(x: &LcElement, y: &LcElement) -> Result<bool> {
    Ok(compare_within_precision(x, y)? != Ordering::Greater)
}

pub fn field_laws(x: &LcElement, y: &LcElement, z: &LcElement) -> std::result::Result<(), TestCaseError> {
    prop_assert_eq!(x.clone() + y, y.clone() + x);
    prop_assert_eq!(x.clone() * y, y.clone() * x);
    prop_assert_eq!((x.clone() + y) + z, x.clone() + (y.clone() + z));
    prop_assert_eq!((x.clone() * y) * z, x.clone() * (y.clone() * z));
    prop_assert_eq!(x.clone() * (y.clone() + z), x.clone() * y + x.clone() * z);
    prop_assert_eq!(x.clone() + LcElement::zero(), x.clone());
    prop_assert_eq!(x.clone() * LcElement::one(), x.clone());
    prop_assert!((x.clone() - x).is_exact_zero());
    if !x.is_zero() {
        let inv = retry(|| Ok(x.try_inv()?))?;
        prop_assert!((inv * x).approx_eq(&LcElement::one()));
        prop_assert_eq!(
            (x.clone() * y).valuation().cloned(),
            y.valuation().map(|v| v + x.valuation().expect("nonzero"))
        );
    } else {
        prop_assert!(x.try_inv().is_err());
    }
    if let (Some(vx), Some(vy), Some(vs)) = (x.valuation(), y.valuation(), (x.clone() + y).valuation()) {
        prop_assert!(vs >= vx.min(vy));
    }
    Ok(())
}

pub fn order_laws(x: &LcElement, y: &LcElement, z: &LcElement) -> std::result::Result<(), TestCaseError> {
    let xy = x.try_cmp(y).map_err(|e| fail(e.to_string()))?;
    prop_assert_eq!(y.try_cmp(x).map_err(|e| fail(e.to_string()))?, xy.reverse());
    prop_assert_eq!(xy == Ordering::Equal, x == y);
    prop_assert_eq!((x.clone() + z).try_cmp(&(y.clone() + z)).map_err(|e| fail(e.to_string()))?, xy);
    let zero = LcElement::zero();
    if x.try_cmp(&zero).unwrap() == Ordering::Greater && y.try_cmp(&zero).unwrap() == Ordering::Greater {
        prop_assert_eq!((x.clone() + y).sign().unwrap(), Ordering::Greater);
        prop_assert_eq!((x.clone() * y).sign().unwrap(), Ordering::Greater);
    }
    if xy == Ordering::Less && z.sign().unwrap() == Ordering::Greater {
        prop_assert_eq!((x.clone() * z).try_cmp(&(y.clone() * z)).unwrap(), Ordering::Less);
    }
    prop_assert_eq!(x.square().sign().unwrap() != Ordering::Less, true);
    Ok(())
}

pub fn reciprocity(case: &GraphCase, x: Vertex, y: Vertex) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let k = case.domain();
    let (lhs, rhs) = retry(|| {
        let vx = solve_renormalized(&g, &k, x)?;
        let vy = solve_renormalized(&g, &k, y)?;
        Ok((vx.value(y) * g.measure(y)?, vy.value(x) * g.measure(x)?))
    })?;
    prop_assert!(lhs.approx_eq(&rhs), "{} vs {}", lhs.to_literal(), rhs.to_literal());
    prop_assert!(lhs.certified_positive().unwrap_or(false));
    Ok(())
}

pub fn capacity_monotone(case: &GraphCase) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let violations = retry(|| {
        let seq = capacity_sequence(&g, 0, case.n)?;
        let mut bad = Vec::new();
        for n in 1..case.n {
            if !not_greater(seq.cap(n + 1), seq.cap(n))? {
                bad.push(n);
            }
        }
        Ok(bad)
    })?;
    prop_assert!(violations.is_empty(), "cap increased after n in {:?}", violations);
    Ok(())
}

pub fn potential_bounds(case: &GraphCase, a: Vertex) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let k = case.domain();
    let offender = retry(|| solve_dp(&g, &k, a)?.check_bounds())?;
    prop_assert_eq!(offender, None);
    Ok(())
}

pub fn energy_minimality(case: &GraphCase, a: Vertex, delta: &[LcElement]) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let k = case.domain();
    let delta: VertexFn<LcElement> =
        k.iter().zip(delta).filter(|(x, d)| **x != a && !d.is_zero()).map(|(x, d)| (*x, d.clone())).collect();
    prop_assume!(!delta.is_empty());
    let ord = retry(|| {
        let v = solve_dp(&g, &k, a)?;
        let mut perturbed = v.as_function();
        for (x, d) in &delta {
            let current = perturbed.get(x).cloned().unwrap_or_else(LcElement::zero);
            perturbed.insert(*x, current + d);
        }
        Ok(energy(&g, &perturbed)?.try_cmp(&energy(&g, &v.as_function())?)?)
    })?;
    prop_assert_eq!(ord, Ordering::Greater);
    Ok(())
}

pub fn ground_state_identity(
    case: &GraphCase,
    phi: &[LcElement],
    u: &[LcElement],
) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let phi: VertexFn<LcElement> = phi.iter().cloned().enumerate().collect();
    let check = retry(|| ground_state_transform_check(&g, |x| u[x].clone(), &phi))?;
    prop_assert!(check.equal, "{} vs {}", check.lhs.to_literal(), check.rhs.to_literal());
    Ok(())
}

pub fn energy_distance(
    case: &GraphCase,
    x: Vertex,
    y: Vertex,
    phi: &[LcElement],
) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let phi: VertexFn<LcElement> = phi.iter().cloned().enumerate().collect();
    let at = |v: Vertex| phi.get(&v).cloned().unwrap_or_else(LcElement::zero);
    let holds = retry(|| {
        let c = energy_distance_constant(&g, x, y)?;
        let lhs = (at(x) - at(y)).square();
        not_greater(&lhs, &(c * energy(&g, &phi)?))
    })?;
    prop_assert!(holds);
    Ok(())
}

pub fn max_product_below_sum(case: &GraphCase, x: Vertex, y: Vertex) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let bad = retry(|| {
        let ctx = TransitionContext::new(&g);
        let ps = pn_series(&ctx, None, x, y, 5)?;
        let pis = pi_series(&ctx, None, x, y, 5)?;
        let mut bad = Vec::new();
        for (n, (p, pi)) in ps.iter().zip(&pis).enumerate() {
            if !not_greater(pi, p)? {
                bad.push(n);
            }
        }
        Ok(bad)
    })?;
    prop_assert!(bad.is_empty(), "Π^n ≻ P^n at n in {:?}", bad);
    Ok(())
}

pub fn row_stochastic(case: &GraphCase) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let ctx = TransitionContext::new(&g);
    for x in 0..case.n {
        let sum = retry(|| ctx.row_sum(x))?;
        prop_assert!((sum.clone() - LcElement::one()).valuation().is_none(), "row {}: {}", x, sum.to_literal());
        prop_assert!(sum.approx_eq(&LcElement::one()));
    }
    Ok(())
}

pub fn rf_element() -> impl Strategy<Value = RfElement> {
    let coeff = (-4i64..=4, 1i64..=3).prop_map(|(n, d)| q(n, d));
    let poly = proptest::collection::vec(coeff, 1..=3);
    (poly.clone(), poly).prop_filter_map("zero denominator", |(num, den)| RfElement::from_coeffs(num, den).ok())
}

pub fn embedding_is_multiplicative(a: &RfElement, b: &RfElement) -> std::result::Result<(), TestCaseError> {
    let (prod, sum, ea, eb) =
        retry(|| Ok(((a.clone() * b).to_lc()?, (a.clone() + b).to_lc()?, a.to_lc()?, b.to_lc()?)))?;
    prop_assert!(prod.approx_eq(&(ea.clone() * &eb)), "{} vs {}", prod.to_literal(), (ea.clone() * &eb).to_literal());
    prop_assert!(sum.approx_eq(&(ea + &eb)));
    Ok(())
}

fn extend(v: &VertexFn<LcElement>) -> impl Fn(Vertex) -> LcElement + '_ {
    |x| v.get(&x).cloned().unwrap_or_else(LcElement::zero)
}

pub fn charge_balance(case: &GraphCase, a: Vertex) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let k = case.domain();
    let (at_root, outside, interior) = retry(|| {
        let v = solve_dp(&g, &k, a)?.as_function();
        let f = extend(&v);
        let at_root = laplacian_sum(&g, &f, a)?;
        let outside = laplacian_sum(&g, &f, case.n - 1)?;
        let interior: Vec<LcElement> =
            k.iter().filter(|&&x| x != a).map(|&x| laplacian_sum(&g, &f, x)).collect::<Result<_>>()?;
        Ok((at_root, outside, interior))
    })?;
    prop_assert!((at_root.clone() + &outside).approx_eq(&LcElement::zero()));
    prop_assert!(at_root.certified_positive().unwrap_or(false));
    for d in interior {
        prop_assert!(d.approx_eq(&LcElement::zero()), "{}", d.to_literal());
    }
    Ok(())
}

/// v_n ⪯ v_{n+1} and ṽ_n ⪯ ṽ_{n+1} along the balls B_n(0) ≠ V.
pub fn domain_monotone(case: &GraphCase) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let bad = retry(|| {
        let mut balls = Vec::new();
        for n in 1..case.n {
            let b = g.ball(0, n)?;
            if b.len() == case.n {
                break;
            }
            balls.push(b);
        }
        let mut bad = Vec::new();
        for (n, pair) in balls.windows(2).enumerate() {
            let (small, large) = (solve_dp(&g, &pair[0], 0)?, solve_dp(&g, &pair[1], 0)?);
            let (rs, rl) = (solve_renormalized(&g, &pair[0], 0)?, solve_renormalized(&g, &pair[1], 0)?);
            for &x in &pair[0] {
                if !not_greater(&small.value(x), &large.value(x))? || !not_greater(&rs.value(x), &rl.value(x))? {
                    bad.push((n + 1, x));
                }
            }
        }
        Ok(bad)
    })?;
    prop_assert!(bad.is_empty(), "{:?}", bad);
    Ok(())
}

pub fn capacity_below_test_energies(
    case: &GraphCase,
    a: Vertex,
    phi: &[LcElement],
) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let k = case.domain();
    let mut phi: VertexFn<LcElement> = k.iter().copied().zip(phi.iter().cloned()).collect();
    phi.insert(a, LcElement::one());
    let holds = retry(|| not_greater(&solve_dp(&g, &k, a)?.capacity, &energy(&g, &phi)?))?;
    prop_assert!(holds);
    Ok(())
}

/// u = v + c with v the equilibrium potential of K: superharmonic on K, so
/// ω = mΔu/u is a Hardy weight for functions supported in K, and the local
/// Harnack inequality holds on K.
pub fn ground_state_hardy_and_harnack(
    case: &GraphCase,
    a: Vertex,
    c: &LcElement,
    phi: &[LcElement],
) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    let k = case.domain();
    let phi: VertexFn<LcElement> = k.iter().copied().zip(phi.iter().cloned()).collect();
    let (hardy, harnack) = retry(|| {
        let v = solve_dp(&g, &k, a)?.as_function();
        let u = |x: Vertex| extend(&v)(x) + c;
        let omega = ground_state_weight(&g, u, &k)?;
        let hardy = hardy_verify(&g, &omega, std::slice::from_ref(&phi), false)?.holds;
        let values: Vec<LcElement> = k.iter().map(|&x| u(x)).collect();
        let mut max = values[0].clone();
        let mut min = values[0].clone();
        for x in &values[1..] {
            max = LcElement::certified_max(&max, x)?;
            if compare_within_precision(x, &min)? == Ordering::Less {
                min = x.clone();
            }
        }
        let harnack = not_greater(&max, &(harnack_constant(&g, &k)? * min))?;
        Ok((hardy, harnack))
    })?;
    prop_assert!(hardy);
    prop_assert!(harnack);
    Ok(())
}

pub fn graph_structure(case: &GraphCase) -> std::result::Result<(), TestCaseError> {
    let g = case.graph();
    prop_assert!(g.check_invariants().is_ok());
    for x in 0..case.n {
        prop_assert!(g.weight(x, x).is_zero());
        for y in 0..case.n {
            prop_assert_eq!(g.weight(x, y), g.weight(y, x));
        }
    }
    let balls: Vec<Vec<Vertex>> = (0..=case.n).map(|n| g.ball(0, n).unwrap()).collect();
    for pair in balls.windows(2) {
        prop_assert!(pair[0].iter().all(|x| pair[1].contains(x)));
    }
    prop_assert_eq!(balls[case.n].len(), case.n);
    Ok(())
}
