//! Dirichlet problems on finite vertex sets, energy, capacity and the finite
//! Green function.
//!
//! With L the unnormalized Laplacian, (Lf)(x) = Σ_y (f(x) − f(y))·b(x, y),
//! and Δ = L/m:
//!
//! - the potential form solves Δv = 0 on K∖{a}, v(a) = 1, v = 0 off K;
//! - the charge form solves Δṽ = 1_a on K, ṽ = 0 off K.
//!
//! Both are linear systems solved by exact Gaussian elimination. Unknowns are
//! numbered breadth-first from the root and eliminated from the outside in,
//! which on trees and paths is exactly series reduction and never subtracts
//! nearly equal quantities.

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};

use crate::error::{CoreError, Result};
use crate::field::{FieldError, OrderedField, Rational};
use crate::graph::{Vertex, WeightedGraph};

/// A finitely supported function; absent vertices are zero.
pub type VertexFn<F> = BTreeMap<Vertex, F>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// v(a) = 1
    Potential,
    /// Δṽ(a) = 1
    Charge,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirichletSolution<F> {
    /// K in breadth-first order from the root.
    pub domain: Vec<Vertex>,
    pub root: Vertex,
    /// Values on K, in the order of `domain`.
    pub values: Vec<F>,
    pub normalization: Normalization,
    /// Q(v) by Green's formula, ⟨Δv, v⟩. For the charge form this is Q(ṽ).
    pub energy: F,
    pub capacity: F,
}

impl<F: OrderedField> DirichletSolution<F> {
    pub fn value(&self, x: Vertex) -> F {
        self.domain.iter().position(|&y| y == x).map(|i| self.values[i].clone()).unwrap_or_else(F::zero)
    }

    pub fn as_function(&self) -> VertexFn<F> {
        self.domain.iter().copied().zip(self.values.iter().cloned()).collect()
    }

    /// Lowest guarantee exponent among values, energy and capacity.
    pub fn min_guarantee(&self) -> Option<Rational> {
        min_guarantee(self.values.iter().chain([&self.energy, &self.capacity]))
    }

    /// Checks 0 ≺ v ⪯ 1 on K (potential form) or ṽ ≻ 0 (charge form). Values
    /// equal to 1 within precision pass.
    /// Returns the first offending vertex.
    pub fn check_bounds(&self) -> Result<Option<Vertex>> {
        for (x, v) in self.domain.iter().zip(&self.values) {
            if !v.certified_positive()? {
                return Ok(Some(*x));
            }
            if self.normalization == Normalization::Potential {
                // v = 1 off the root is common; truncated values cannot
                // decide it, so agreement within precision counts as ⪯.
                match v.try_cmp(&F::one()) {
                    Ok(Ordering::Greater) => return Ok(Some(*x)),
                    Ok(_) => {}
                    Err(_) if v.approx_eq(&F::one()) => {}
                    Err(e) => return Err(e.into()),
                }
            }
        }
        Ok(None)
    }
}

pub fn min_guarantee<'a, F: OrderedField>(items: impl IntoIterator<Item = &'a F>) -> Option<Rational> {
    items.into_iter().filter_map(|x| x.guarantee()).min()
}

fn lookup<F: OrderedField>(f: &VertexFn<F>, x: Vertex) -> F {
    f.get(&x).cloned().unwrap_or_else(F::zero)
}

/// (Lf)(x) = Σ_y (f(x) − f(y))·b(x, y) = m(x)·Δf(x).
pub fn laplacian_sum<F: OrderedField>(g: &WeightedGraph<F>, f: impl Fn(Vertex) -> F, x: Vertex) -> Result<F> {
    let fx = f(x);
    Ok(g.neighbors(x)?.iter().fold(F::zero(), |acc, (y, w)| acc + (fx.clone() - f(*y)) * w))
}

/// Δf(x) = (1/m(x)) Σ_y (f(x) − f(y))·b(x, y).
pub fn laplacian_apply<F: OrderedField>(g: &WeightedGraph<F>, f: impl Fn(Vertex) -> F, x: Vertex) -> Result<F> {
    Ok(laplacian_sum(g, f, x)?.try_div(&g.measure(x)?)?)
}

/// Q(φ) = ½ Σ_{x,y} (φ(x) − φ(y))²·b(x, y) for finitely supported φ.
pub fn energy<F: OrderedField>(g: &WeightedGraph<F>, phi: &VertexFn<F>) -> Result<F> {
    let mut q = F::zero();
    for (&x, fx) in phi {
        for (y, w) in g.neighbors(x)? {
            if phi.contains_key(y) && *y < x {
                continue;
            }
            q = q + (fx.clone() - lookup(phi, *y)).square() * w;
        }
    }
    Ok(q)
}

/// ⟨f, h⟩ = Σ_x f(x)·h(x)·m(x).
pub fn inner<F: OrderedField>(g: &WeightedGraph<F>, f: &VertexFn<F>, h: &VertexFn<F>) -> Result<F> {
    let mut s = F::zero();
    for (x, fx) in f {
        if let Some(hx) = h.get(x) {
            s = s + fx.clone() * hx * &g.measure(*x)?;
        }
    }
    Ok(s)
}

/// ⟨Δf, f⟩ for finitely supported f, summed over supp f.
pub fn green_form<F: OrderedField>(g: &WeightedGraph<F>, f: &VertexFn<F>) -> Result<F> {
    let mut s = F::zero();
    for (&x, fx) in f {
        s = s + laplacian_sum(g, |y| lookup(f, y), x)? * fx;
    }
    Ok(s)
}

/// Orders `set` breadth-first from `a` inside the set, checking that every
/// vertex is complete and reachable.
fn order_domain<F: OrderedField>(g: &WeightedGraph<F>, set: &[Vertex], a: Vertex) -> Result<Vec<Vertex>> {
    let inside: HashMap<Vertex, ()> = set.iter().map(|&x| (x, ())).collect();
    if !inside.contains_key(&a) {
        return Err(CoreError::NotInDomain { vertex: a });
    }
    let mut seen: HashMap<Vertex, ()> = HashMap::from([(a, ())]);
    let mut order = vec![a];
    let mut i = 0;
    while i < order.len() {
        for (y, _) in g.neighbors(order[i])? {
            if inside.contains_key(y) && seen.insert(*y, ()).is_none() {
                order.push(*y);
            }
        }
        i += 1;
    }
    if let Some(&x) = set.iter().find(|x| !seen.contains_key(x)) {
        return Err(CoreError::Disconnected { vertex: x });
    }
    Ok(order)
}

/// Solves `matrix · x = rhs`, eliminating variables in the order given.
/// Pivots are entries whose sign is certified nonzero.
fn eliminate<F: OrderedField>(
    mut matrix: Vec<Vec<F>>,
    mut rhs: Vec<F>,
    order: impl Iterator<Item = usize>,
) -> Result<Vec<F>> {
    let n = rhs.len();
    let mut row_used = vec![false; n];
    let mut pivots: Vec<(usize, usize)> = Vec::with_capacity(n);
    for j in order {
        let mut pending: Option<FieldError> = None;
        let mut pick = None;
        let candidates = std::iter::once(j).chain((0..n).filter(|&r| r != j));
        for r in candidates {
            if row_used[r] || matrix[r][j].is_exact_zero() {
                continue;
            }
            match matrix[r][j].sign() {
                Ok(Ordering::Equal) => {}
                Ok(_) => {
                    pick = Some(r);
                    break;
                }
                Err(e) => pending = pending.or(Some(e)),
            }
        }
        let Some(r) = pick else {
            return Err(match pending {
                Some(e) => e.into(),
                None => CoreError::precondition("singular Dirichlet system"),
            });
        };
        row_used[r] = true;
        let inv = matrix[r][j].try_inv()?;
        let pivot_row = matrix[r].clone();
        for s in 0..n {
            if row_used[s] || matrix[s][j].is_exact_zero() {
                continue;
            }
            let factor = matrix[s][j].clone() * &inv;
            for (k, p) in pivot_row.iter().enumerate() {
                if k != j && !p.is_exact_zero() {
                    let update = factor.clone() * p;
                    matrix[s][k] = matrix[s][k].clone() - &update;
                }
            }
            matrix[s][j] = F::zero();
            let update = factor * &rhs[r];
            rhs[s] = rhs[s].clone() - &update;
        }
        pivots.push((j, r));
    }
    let mut x = vec![F::zero(); n];
    let mut solved = vec![false; n];
    for &(j, r) in pivots.iter().rev() {
        let mut acc = rhs[r].clone();
        for k in 0..n {
            if solved[k] && !matrix[r][k].is_exact_zero() {
                acc = acc - matrix[r][k].clone() * &x[k];
            }
        }
        x[j] = acc.try_div(&matrix[r][j])?;
        solved[j] = true;
    }
    Ok(x)
}

/// Matrix of L restricted to `domain` (rows and columns in domain order).
fn restricted_laplacian<F: OrderedField>(g: &WeightedGraph<F>, domain: &[Vertex]) -> Result<Vec<Vec<F>>> {
    let index: HashMap<Vertex, usize> = domain.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let n = domain.len();
    let mut m = vec![vec![F::zero(); n]; n];
    for (i, &x) in domain.iter().enumerate() {
        let mut deg = F::zero();
        for (y, w) in g.neighbors(x)? {
            deg = deg + w;
            if let Some(&j) = index.get(y) {
                m[i][j] = -w.clone();
            }
        }
        m[i][i] = deg;
    }
    Ok(m)
}

/// Fails on a decidable violation of 0 ≺ v ⪯ 1. Comparisons that cannot be
/// decided at the current precision are left to `check_bounds`.
fn refute_bounds<F: OrderedField>(domain: &[Vertex], values: &[F]) -> Result<()> {
    for (x, v) in domain.iter().zip(values) {
        let low = matches!(v.sign(), Ok(Ordering::Less | Ordering::Equal));
        let high = matches!(v.try_cmp(&F::one()), Ok(Ordering::Greater));
        if low || high {
            return Err(CoreError::precondition(format!(
                "maximum principle violated at vertex {x}: v = {}",
                v.to_literal()
            )));
        }
    }
    Ok(())
}

/// Potential form on K ∋ a.
pub fn solve_dp<F: OrderedField>(g: &WeightedGraph<F>, set: &[Vertex], a: Vertex) -> Result<DirichletSolution<F>> {
    let domain = order_domain(g, set, a)?;
    let interior = &domain[1..];
    let values = if interior.is_empty() {
        vec![F::one()]
    } else {
        let matrix = restricted_laplacian(g, interior)?;
        let rhs = interior.iter().map(|&x| g.weight(x, a)).collect::<Vec<_>>();
        let n = interior.len();
        let mut v = vec![F::one()];
        v.extend(eliminate(matrix, rhs, (0..n).rev())?);
        v
    };
    refute_bounds(&domain, &values)?;
    let f: VertexFn<F> = domain.iter().copied().zip(values.iter().cloned()).collect();
    let capacity = laplacian_sum(g, |y| lookup(&f, y), a)?;
    let energy = green_form(g, &f)?;
    Ok(DirichletSolution { domain, root: a, values, normalization: Normalization::Potential, energy, capacity })
}

/// Charge form: Δ_K ṽ = 1_a; capacity m(a)/ṽ(a).
pub fn solve_renormalized<F: OrderedField>(
    g: &WeightedGraph<F>,
    set: &[Vertex],
    a: Vertex,
) -> Result<DirichletSolution<F>> {
    let domain = order_domain(g, set, a)?;
    let matrix = restricted_laplacian(g, &domain)?;
    let mut rhs = vec![F::zero(); domain.len()];
    let ma = g.measure(a)?;
    rhs[0] = ma.clone();
    let values = eliminate(matrix, rhs, (0..domain.len()).rev())?;
    let capacity = ma.try_div(&values[0])?;
    let f: VertexFn<F> = domain.iter().copied().zip(values.iter().cloned()).collect();
    let energy = green_form(g, &f)?;
    Ok(DirichletSolution { domain, root: a, values, normalization: Normalization::Charge, energy, capacity })
}

/// cap_K(a).
pub fn effective_capacity<F: OrderedField>(g: &WeightedGraph<F>, set: &[Vertex], a: Vertex) -> Result<F> {
    Ok(solve_dp(g, set, a)?.capacity)
}

/// Column y of Δ_K^{-1}: G_K(·, y), zero off K.
pub fn green_matrix<F: OrderedField>(g: &WeightedGraph<F>, set: &[Vertex], y: Vertex) -> Result<VertexFn<F>> {
    Ok(solve_renormalized(g, set, y)?.as_function())
}

/// Δ_K^{-1} φ for φ supported in K.
pub fn inverse_laplacian_apply<F: OrderedField>(
    g: &WeightedGraph<F>,
    set: &[Vertex],
    phi: &VertexFn<F>,
) -> Result<VertexFn<F>> {
    let Some(&start) = set.first() else {
        return Ok(VertexFn::new());
    };
    let domain = order_domain(g, set, start)?;
    if let Some(x) = phi.keys().find(|x| !domain.contains(x)) {
        return Err(CoreError::NotInDomain { vertex: *x });
    }
    let matrix = restricted_laplacian(g, &domain)?;
    let rhs = domain.iter().map(|&x| Ok(lookup(phi, x) * &g.measure(x)?)).collect::<Result<Vec<_>>>()?;
    let values = eliminate(matrix, rhs, (0..domain.len()).rev())?;
    Ok(domain.into_iter().zip(values).collect())
}

/// Grows the graph as needed and solves on the ball B_n(a).
pub fn solve_dp_ball<F: OrderedField>(g: &WeightedGraph<F>, a: Vertex, n: usize) -> Result<DirichletSolution<F>> {
    let g = g.covering(a, n.saturating_sub(1))?;
    let ball = g.ball(a, n)?;
    solve_dp(&g, &ball, a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{parse_lc, LcElement, One, Zero};
    use crate::graph::{Measure, WeightRule};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn unit_path(n: usize) -> WeightedGraph<LcElement> {
        WeightedGraph::path(WeightRule::constant("1")).unwrap().grown_to(n).unwrap()
    }

    fn geometric(count: usize) -> LcElement {
        LcElement::geometric_sum(&LcElement::one(), &LcElement::eps_int(1), count)
    }

    #[test]
    fn singleton_domain() {
        let g = unit_path(4);
        let s = solve_dp(&g, &[2], 2).unwrap();
        assert_eq!(s.values, vec![LcElement::one()]);
        assert_eq!(s.capacity, LcElement::from_int(2));
        assert_eq!(s.energy, LcElement::from_int(2));
        let r = solve_renormalized(&g, &[2], 2).unwrap();
        assert_eq!(r.values[0], LcElement::from_rational(&q(1, 2)));
        assert_eq!(green_matrix(&g, &[2], 2).unwrap()[&2], LcElement::from_rational(&q(1, 2)));
    }

    #[test]
    fn unit_path_ball() {
        for n in 1..8usize {
            let s = solve_dp_ball(&unit_path(1), 0, n).unwrap();
            assert_eq!(s.capacity, LcElement::from_rational(&q(1, n as i64)));
            for (k, v) in s.values.iter().enumerate() {
                assert_eq!(*v, LcElement::from_rational(&q((n - k) as i64, n as i64)));
            }
            let r = solve_renormalized(&unit_path(n), &(0..n).collect::<Vec<_>>(), 0).unwrap();
            assert_eq!(r.values[0], LcElement::from_int(n as i64));
            assert_eq!(r.capacity, s.capacity);
        }
    }

    #[test]
    fn positive_example_capacity() {
        let g = WeightedGraph::<LcElement>::path(WeightRule::eps_pow_neg_k()).unwrap();
        for n in 1..10 {
            let s = solve_dp_ball(&g, 0, n).unwrap();
            // (Σ_{k<n} ε^k)^{-1}: multiply back.
            assert!((s.capacity.clone() * geometric(n)).approx_eq(&LcElement::one()));
            assert_eq!(s.check_bounds().unwrap(), None);
        }
    }

    #[test]
    fn series_law_on_second_ball() {
        let g = WeightedGraph::<LcElement>::path(WeightRule::eps_pow_k()).unwrap();
        let s = solve_dp_ball(&g, 0, 2).unwrap();
        let series = (LcElement::one() + LcElement::eps_int(-1)).try_inv().unwrap();
        assert!(s.capacity.approx_eq(&series));
        let alt = LcElement::eps_int(1) * (LcElement::one() + LcElement::eps_int(1)).try_inv().unwrap();
        assert!(s.capacity.approx_eq(&alt));
        let s3 = solve_dp_ball(&g, 0, 3).unwrap();
        assert_eq!(s3.capacity.try_cmp(&s.capacity).unwrap(), Ordering::Less);
    }

    #[test]
    fn capacity_ignores_measure() {
        let g = WeightedGraph::<LcElement>::path(WeightRule::eps_pow_k()).unwrap().grown_to(5).unwrap();
        let m = Measure::Values((0..6).map(|i| parse_lc(&format!("{}*e^(1)", i + 1)).unwrap()).collect());
        let gm = g.clone().with_measure(m);
        let k: Vec<_> = (0..4).collect();
        assert_eq!(effective_capacity(&g, &k, 0).unwrap(), effective_capacity(&gm, &k, 0).unwrap());
        let r = solve_renormalized(&gm, &k, 0).unwrap();
        assert!(r.capacity.approx_eq(&effective_capacity(&g, &k, 0).unwrap()));
    }

    #[test]
    fn energy_agrees_with_green_formula() {
        let g = unit_path(6);
        let phi: VertexFn<LcElement> =
            [(0, parse_lc("3").unwrap()), (1, parse_lc("1*e^(1)").unwrap()), (3, parse_lc("-2").unwrap())].into();
        assert_eq!(energy(&g, &phi).unwrap(), green_form(&g, &phi).unwrap());
        let ball: VertexFn<LcElement> = (0..3).map(|x| (x, LcElement::one())).collect();
        assert_eq!(energy(&g, &ball).unwrap(), g.boundary_weight(&[0, 1, 2]).unwrap());
    }

    #[test]
    fn laplacian_of_linear_test_function() {
        let g = unit_path(6).with_measure(Measure::Values(vec![LcElement::from_int(3)]));
        let u = |k: Vertex| LcElement::one() - LcElement::eps_int(1).scale(&q(k as i64, 1));
        assert_eq!(laplacian_apply(&g, u, 0).unwrap(), parse_lc("1/3*e^(1)").unwrap());
        for k in 1..5 {
            assert_eq!(laplacian_apply(&g, u, k).unwrap(), LcElement::zero());
        }
        assert_eq!(laplacian_apply(&g, |_| LcElement::one(), 2).unwrap(), LcElement::zero());
    }

    #[test]
    fn domain_errors() {
        let g = unit_path(6);
        assert!(matches!(solve_dp(&g, &[0, 2], 0), Err(CoreError::Disconnected { vertex: 2 })));
        assert!(matches!(solve_dp(&g, &[1, 2], 0), Err(CoreError::NotInDomain { vertex: 0 })));
        assert!(matches!(solve_dp(&g, &[5, 6], 5), Err(CoreError::HorizonExhausted { .. })));
    }

    #[test]
    fn whole_finite_graph() {
        let one = LcElement::one();
        let g = WeightedGraph::explicit(3, &[(0, 1, one.clone()), (1, 2, one.clone())]).unwrap();
        let s = solve_dp(&g, &[0, 1, 2], 0).unwrap();
        assert_eq!(s.capacity, LcElement::zero());
        assert!(s.values.iter().all(|v| *v == one));
        assert!(matches!(solve_renormalized(&g, &[0, 1, 2], 0), Err(CoreError::Precondition(_))));
    }

    #[test]
    fn reciprocity_small_tree() {
        let w = |s: &str| parse_lc(s).unwrap();
        let g = WeightedGraph::explicit(
            5,
            &[(0, 1, w("1*e^(1)")), (1, 2, w("2")), (1, 3, w("1*e^(-1)")), (3, 4, w("1 + 1*e^(1)"))],
        )
        .unwrap();
        let k = [0, 1, 2, 3];
        let g02 = green_matrix(&g, &k, 2).unwrap();
        let g20 = green_matrix(&g, &k, 0).unwrap();
        assert!(g02[&0].approx_eq(&g20[&2]));
        let phi: VertexFn<LcElement> = [(2, LcElement::one())].into();
        let u = inverse_laplacian_apply(&g, &k, &phi).unwrap();
        assert!(u[&0].approx_eq(&g02[&0]));
    }
}
