//! Superharmonic functions, local Harnack constants, the ground state
//! transform and Hardy weights.

use std::cmp::Ordering;
use std::collections::{HashMap, VecDeque};

use serde::Serialize;

use crate::capacity::{compare_within_precision, CapacityVerdict, Certificate, SphericalFormula, VerdictKind};
use crate::dirichlet::{energy, laplacian_apply, laplacian_sum, VertexFn};
use crate::error::{CoreError, Result};
use crate::field::{LcElement, OrderedField, Rational};
use crate::graph::{Vertex, WeightedGraph};

#[derive(Debug, Clone, PartialEq)]
pub struct SuperharmonicCheck<F> {
    pub holds: bool,
    /// First vertex with Δu(x) ≺ 0.
    pub witness: Option<Vertex>,
    /// Δu(x) for every checked x, in the order given.
    pub laplacians: Vec<(Vertex, F)>,
}

/// Checks Δu(x) ⪰ 0 for every x in `set`. Stops at the first failure.
pub fn is_superharmonic<F: OrderedField>(
    g: &WeightedGraph<F>,
    u: impl Fn(Vertex) -> F,
    set: &[Vertex],
) -> Result<SuperharmonicCheck<F>> {
    let mut laplacians = Vec::with_capacity(set.len());
    for &x in set {
        let d = laplacian_apply(g, &u, x)?;
        let negative = d.sign()? == Ordering::Less;
        laplacians.push((x, d));
        if negative {
            return Ok(SuperharmonicCheck { holds: false, witness: Some(x), laplacians });
        }
    }
    Ok(SuperharmonicCheck { holds: true, witness: None, laplacians })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SuperharmonicForm {
    /// u(x) = 1 − c^{|x|}·τ
    Exponential,
    /// v(x) = 1 − |x|·τ
    Linear,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstructedSuperharmonic<F> {
    pub form: SuperharmonicForm,
    pub root: Vertex,
    pub c: F,
    pub tau: F,
    /// (x, |x|, u(x)) on B_{horizon+1}(o).
    pub values: Vec<(Vertex, usize, F)>,
    /// Δu on B_horizon(o).
    pub check: SuperharmonicCheck<F>,
}

impl<F: OrderedField> ConstructedSuperharmonic<F> {
    pub fn at_distance(&self, k: usize) -> F {
        profile_value(self.form, &self.c, &self.tau, k)
    }

    pub fn as_function(&self) -> VertexFn<F> {
        self.values.iter().map(|(x, _, v)| (*x, v.clone())).collect()
    }
}

fn profile_value<F: OrderedField>(form: SuperharmonicForm, c: &F, tau: &F, k: usize) -> F {
    match form {
        SuperharmonicForm::Exponential => {
            let pow = (0..k).fold(F::one(), |acc, _| acc * c);
            F::one() - pow * tau
        }
        SuperharmonicForm::Linear => F::one() - F::from_int(k as i64) * tau,
    }
}

/// Builds u(x) = 1 − c^{|x|}τ when c ≻ 1, else v(x) = 1 − |x|τ, after checking
/// b₋(x)/b₊(x) ⪯ c on B_horizon(o) and c^{horizon}·τ ≺ 1. The result is
/// verified positive on B_{horizon+1}(o) and superharmonic on B_horizon(o).
pub fn construct_superharmonic<F: OrderedField>(
    g: &WeightedGraph<F>,
    o: Vertex,
    c: &F,
    tau: &F,
    horizon: usize,
) -> Result<ConstructedSuperharmonic<F>> {
    if !tau.certified_positive()? {
        return Err(CoreError::precondition(format!("tau = {} is not positive", tau.to_literal())));
    }
    let g = g.covering(o, horizon + 1)?;
    let dist: Vec<(Vertex, usize)> = g.bfs(o, horizon)?;
    let depth: HashMap<Vertex, usize> = dist.iter().copied().collect();
    for &(x, k) in &dist {
        if k == 0 || k >= horizon {
            continue;
        }
        let (mut inward, mut outward) = (F::zero(), F::zero());
        for (y, w) in g.neighbors(x)? {
            match depth.get(y).copied().unwrap_or(k + 1).cmp(&k) {
                Ordering::Less => inward = inward + w,
                Ordering::Greater => outward = outward + w,
                Ordering::Equal => {}
            }
        }
        let ratio = inward.try_div(&outward)?;
        if ratio.try_cmp(c)? == Ordering::Greater {
            return Err(CoreError::precondition(format!(
                "b-/b+ = {} exceeds c = {} at vertex {x}",
                ratio.to_literal(),
                c.to_literal()
            )));
        }
    }
    let form = if c.try_cmp(&F::one())? == Ordering::Greater {
        SuperharmonicForm::Exponential
    } else {
        SuperharmonicForm::Linear
    };
    let last = profile_value(form, c, tau, horizon + 1);
    if !last.certified_positive()? {
        return Err(CoreError::precondition(format!(
            "u is not positive at distance {}: c^n·tau is not below 1",
            horizon + 1
        )));
    }
    let ball = g.bfs(o, horizon + 1)?;
    let values: Vec<(Vertex, usize, F)> = ball.iter().map(|&(x, k)| (x, k, profile_value(form, c, tau, k))).collect();
    let lookup: HashMap<Vertex, usize> = ball.iter().copied().collect();
    let u = |x: Vertex| profile_value(form, c, tau, lookup[&x]);
    let inner: Vec<Vertex> = dist.iter().map(|(x, _)| *x).collect();
    let check = is_superharmonic(&g, u, &inner)?;
    if let Some(x) = check.witness {
        return Err(CoreError::precondition(format!("constructed function is not superharmonic at vertex {x}")));
    }
    Ok(ConstructedSuperharmonic { form, root: o, c: c.clone(), tau: tau.clone(), values, check })
}

/// Shortest path from x to y inside `set`, by breadth-first search in
/// neighbour order.
fn path_within<F: OrderedField>(g: &WeightedGraph<F>, set: &[Vertex], x: Vertex, y: Vertex) -> Result<Vec<Vertex>> {
    let inside: HashMap<Vertex, ()> = set.iter().map(|&v| (v, ())).collect();
    let mut parent: HashMap<Vertex, Vertex> = HashMap::from([(x, x)]);
    let mut queue = VecDeque::from([x]);
    while let Some(v) = queue.pop_front() {
        if v == y {
            break;
        }
        for (w, _) in g.neighbors(v)? {
            if inside.contains_key(w) && !parent.contains_key(w) {
                parent.insert(*w, v);
                queue.push_back(*w);
            }
        }
    }
    if !parent.contains_key(&y) {
        return Err(CoreError::Disconnected { vertex: y });
    }
    let mut path = vec![y];
    while *path.last().expect("nonempty") != x {
        path.push(parent[path.last().expect("nonempty")]);
    }
    path.reverse();
    Ok(path)
}

/// C_W = max over ordered pairs (x, y) of Π_i b(x_i)/b(x_{i−1}, x_i) along a
/// shortest path x = x_0 ∼ … ∼ x_n = y inside W.
pub fn harnack_constant<F: OrderedField>(g: &WeightedGraph<F>, set: &[Vertex]) -> Result<F> {
    let mut best = F::one();
    for &x in set {
        for &y in set {
            if x == y {
                continue;
            }
            let path = path_within(g, set, x, y)?;
            let mut product = F::one();
            for pair in path.windows(2) {
                product = product * &g.degree(pair[1])?.try_div(&g.weight(pair[0], pair[1]))?;
            }
            best = F::certified_max(&best, &product)?;
        }
    }
    Ok(best)
}

/// 2n / (smallest edge weight) along a shortest path of length n from x to
/// y, so that |φ(x) − φ(y)|² ⪯ C·Q(φ).
pub fn energy_distance_constant<F: OrderedField>(g: &WeightedGraph<F>, x: Vertex, y: Vertex) -> Result<F> {
    if x == y {
        return Ok(F::zero());
    }
    let reach: Vec<Vertex> = g.bfs(x, usize::MAX)?.into_iter().map(|(v, _)| v).collect();
    let path = path_within(g, &reach, x, y)?;
    let mut smallest: Option<F> = None;
    for pair in path.windows(2) {
        let w = g.weight(pair[0], pair[1]);
        smallest = Some(match smallest {
            None => w,
            Some(s) if w.try_cmp(&s)? == Ordering::Less => w,
            Some(s) => s,
        });
    }
    let n = F::from_int(2 * (path.len() as i64 - 1));
    Ok(n.try_div(&smallest.expect("path has an edge"))?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundStateCheck<F> {
    /// Q(φ) − ⟨(Δu/u)φ, φ⟩
    pub lhs: F,
    /// Q_u(φ/u) with b_u(x, y) = b(x, y)u(x)u(y)
    pub rhs: F,
    pub equal: bool,
}

/// Evaluates both sides of the ground state transform identity.
pub fn ground_state_transform_check<F: OrderedField>(
    g: &WeightedGraph<F>,
    u: impl Fn(Vertex) -> F,
    phi: &VertexFn<F>,
) -> Result<GroundStateCheck<F>> {
    let mut lhs = energy(g, phi)?;
    for (&x, fx) in phi {
        let ux = u(x);
        if !ux.certified_positive()? {
            return Err(CoreError::precondition(format!("u({x}) = {} is not positive", ux.to_literal())));
        }
        lhs = lhs - laplacian_sum(g, &u, x)?.try_div(&ux)? * &fx.square();
    }
    let ratio =
        |x: Vertex| -> Result<F> { Ok(phi.get(&x).map(|f| f.try_div(&u(x))).transpose()?.unwrap_or_else(F::zero)) };
    let mut rhs = F::zero();
    for &x in phi.keys() {
        for (y, w) in g.neighbors(x)? {
            if phi.contains_key(y) && *y < x {
                continue;
            }
            let uy = u(*y);
            if !uy.certified_positive()? {
                return Err(CoreError::precondition(format!("u({y}) = {} is not positive", uy.to_literal())));
            }
            let d = ratio(x)? - ratio(*y)?;
            rhs = rhs + d.square() * w * &u(x) * &uy;
        }
    }
    let equal = lhs.approx_eq(&rhs);
    Ok(GroundStateCheck { lhs, rhs, equal })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum HardyProvenance {
    PointMass { root: Vertex, capacity: LcElement },
    SphericalLowerBounds,
    UserSupplied,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyWeight<F> {
    pub weight: VertexFn<F>,
    pub provenance: HardyProvenance,
}

/// Lower bounds m_x ⪯ cap_n(x) for all n, from a verdict whose certificate
/// bounds every edge weight below by some c ≻ 0: then m_x = c·ε works for
/// every vertex, since cap_n(x) ⪰ c·cap′_n(x) with cap′ the capacity of the
/// unweighted graph, a positive rational.
pub fn certified_lower_bounds<F: OrderedField>(verdict: &CapacityVerdict, vertices: &[Vertex]) -> Result<VertexFn<F>> {
    let c = match &verdict.certificate {
        Certificate::BoundedBelow { bound, .. } => bound.clone(),
        Certificate::ExactSphericalFormula {
            formula: SphericalFormula::TwoSidedBounds, bounds: Some((lo, _)), ..
        } => lo.clone(),
        _ => return Err(CoreError::precondition("verdict does not bound the weights from below")),
    };
    let m = F::from_lc(&(c * LcElement::eps_int(1)))?;
    Ok(vertices.iter().map(|&x| (x, m.clone())).collect())
}

fn half_power<F: OrderedField>(i: usize) -> F {
    let denom = num_bigint::BigInt::from(1) << (i + 1);
    F::from_rational(&Rational::new(1.into(), denom))
}

/// A Hardy weight from a Positive verdict (ω = cap(a)·1_a) or from certified
/// lower bounds (ω(x) = m_x·2^{−(x+1)}, so that Σ 2^{−(x+1)} ⪯ 1).
pub fn hardy_construct<F: OrderedField>(
    verdict: &CapacityVerdict,
    root: Vertex,
    lower_bounds: Option<(&VertexFn<F>, HardyProvenance)>,
) -> Result<HardyWeight<F>> {
    if verdict.is_null() {
        return Err(CoreError::precondition("null capacity: no Hardy weight exists"));
    }
    if let VerdictKind::Positive { limit } = &verdict.kind {
        let cap = F::from_lc(limit).map_err(CoreError::from)?;
        return Ok(HardyWeight {
            weight: VertexFn::from([(root, cap)]),
            provenance: HardyProvenance::PointMass { root, capacity: limit.clone() },
        });
    }
    let Some((bounds, provenance)) = lower_bounds else {
        return Err(CoreError::precondition(
            "no Hardy weight certificate: neither a positive verdict nor lower bounds",
        ));
    };
    let mut weight = VertexFn::new();
    for (&x, m) in bounds {
        if !m.certified_positive()? {
            return Err(CoreError::precondition(format!("lower bound at vertex {x} is not positive")));
        }
        weight.insert(x, m.clone() * &half_power::<F>(x));
    }
    if weight.is_empty() {
        return Err(CoreError::precondition("empty lower bounds"));
    }
    Ok(HardyWeight { weight, provenance })
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardySample<F> {
    pub energy: F,
    /// Σ φ²ω, or (Σ φω)² for the squared variant.
    pub weighted: F,
    pub ordering: Ordering,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HardyCheck<F> {
    pub holds: bool,
    /// Indices of samples with Q(φ) ≺ the weighted sum.
    pub failures: Vec<usize>,
    pub samples: Vec<HardySample<F>>,
}

/// Checks Q(φ) ⪰ Σ φ(x)²ω(x) for each sample, or Q(φ) ⪰ (Σ φ(x)ω(x))² when
/// `squared` (which needs Σω ⪯ 1). Agreement within precision counts as ⪰.
pub fn hardy_verify<F: OrderedField>(
    g: &WeightedGraph<F>,
    omega: &VertexFn<F>,
    samples: &[VertexFn<F>],
    squared: bool,
) -> Result<HardyCheck<F>> {
    let mut total = F::zero();
    let mut nontrivial = false;
    let mut undecided = None;
    for (x, w) in omega {
        // A weight that is zero within precision (Δu = 0 off the support of
        // Δu, say) counts as zero.
        match w.sign() {
            Ok(Ordering::Less) => return Err(CoreError::precondition(format!("weight is negative at vertex {x}"))),
            Ok(Ordering::Greater) => nontrivial = true,
            Ok(Ordering::Equal) => {}
            Err(e) if w.approx_eq(&F::zero()) => undecided = Some(e),
            Err(e) => return Err(e.into()),
        }
        total = total + w;
    }
    if !nontrivial {
        return Err(match undecided {
            Some(e) => e.into(),
            None => CoreError::precondition("the zero weight is not a Hardy weight"),
        });
    }
    if squared && compare_within_precision(&total, &F::one())? == Ordering::Greater {
        return Err(CoreError::precondition(format!("squared variant needs Σω ⪯ 1, got {}", total.to_literal())));
    }
    let mut out = Vec::with_capacity(samples.len());
    let mut failures = Vec::new();
    for (i, phi) in samples.iter().enumerate() {
        let q = energy(g, phi)?;
        let weighted = if squared {
            omega
                .iter()
                .filter_map(|(x, w)| phi.get(x).map(|f| f.clone() * w))
                .fold(F::zero(), |acc, t| acc + t)
                .square()
        } else {
            omega.iter().filter_map(|(x, w)| phi.get(x).map(|f| f.square() * w)).fold(F::zero(), |acc, t| acc + t)
        };
        let ordering = compare_within_precision(&q, &weighted)?;
        if ordering == Ordering::Less {
            failures.push(i);
        }
        out.push(HardySample { energy: q, weighted, ordering });
    }
    Ok(HardyCheck { holds: failures.is_empty(), failures, samples: out })
}

/// ω = m·Δu/u for a strictly positive superharmonic u, on `set`.
pub fn ground_state_weight<F: OrderedField>(
    g: &WeightedGraph<F>,
    u: impl Fn(Vertex) -> F,
    set: &[Vertex],
) -> Result<VertexFn<F>> {
    set.iter().map(|&x| Ok((x, laplacian_sum(g, &u, x)?.try_div(&u(x))?))).collect()
}
