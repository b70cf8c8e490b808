//! Weighted graphs (V, b, m) over an ordered field.
//!
//! An infinite graph is a generator (a [`SphericalProfile`]) plus a
//! materialized horizon. Vertices on the outermost materialized sphere are
//! *incomplete*: their outward edges have not been built yet. Any query that
//! would need the neighbours of an incomplete vertex fails with
//! [`CoreError::HorizonExhausted`]; [`WeightedGraph::covering`] grows the
//! horizon first.

mod rules;
pub mod spec_file;
mod spherical;

use std::borrow::Cow;
use std::collections::VecDeque;
use std::sync::Arc;

use crate::error::{CoreError, Result};
use crate::field::{OrderedField, Rational};

pub use rules::{SizeRule, Trend, WeightRule};
pub use spherical::SphericalProfile;

pub type Vertex = usize;

/// How the vertex measure m is defined.
#[derive(Debug, Clone, PartialEq)]
pub enum Measure<F> {
    /// m ≡ 1.
    Unit,
    /// m(x) = b(x), the weighted degree.
    Degree,
    /// Listed values for the first vertices, 1 beyond the list.
    Values(Vec<F>),
}

#[derive(Debug, Clone)]
struct Generated {
    profile: Arc<SphericalProfile>,
    /// offsets[k] is the id of the first vertex on S_k.
    offsets: Vec<usize>,
    /// Edge layers built so far; spheres 0..layers are complete.
    layers: usize,
}

#[derive(Debug, Clone)]
pub struct WeightedGraph<F> {
    adj: Vec<Vec<(Vertex, F)>>,
    complete: Vec<bool>,
    measure: Measure<F>,
    generated: Option<Generated>,
}

fn insert_sorted<F>(list: &mut Vec<(Vertex, F)>, y: Vertex, w: F) {
    let pos = list.partition_point(|(z, _)| *z < y);
    list.insert(pos, (y, w));
}

impl<F: OrderedField> WeightedGraph<F> {
    /// Finite graph on vertices 0..n. Each undirected edge is listed once.
    pub fn explicit(n: usize, edges: &[(Vertex, Vertex, F)]) -> Result<Self> {
        let mut adj: Vec<Vec<(Vertex, F)>> = vec![Vec::new(); n];
        for (x, y, w) in edges {
            let (x, y) = (*x, *y);
            if x >= n || y >= n {
                return Err(CoreError::Spec(format!("edge ({x}, {y}) outside 0..{n}")));
            }
            if x == y {
                return Err(CoreError::Spec(format!("loop at vertex {x}")));
            }
            if adj[x].iter().any(|(z, _)| *z == y) {
                return Err(CoreError::Spec(format!("edge ({x}, {y}) listed twice")));
            }
            if !w.certified_positive()? {
                return Err(CoreError::Spec(format!("weight of edge ({x}, {y}) is not positive: {}", w.to_literal())));
            }
            insert_sorted(&mut adj[x], y, w.clone());
            insert_sorted(&mut adj[y], x, w.clone());
        }
        Ok(Self { complete: vec![true; n], adj, measure: Measure::Unit, generated: None })
    }

    /// Path graph on ℕ₀ with b(k, k+1) given by `rule`.
    pub fn path(rule: WeightRule) -> Result<Self> {
        Self::spherical(SphericalProfile::path(rule))
    }

    /// A layered realization of a weakly spherically symmetric profile rooted
    /// at vertex 0. When #S_k divides #S_{k+1} the layer is a forest of
    /// stars; otherwise it is complete bipartite with equal weights.
    pub fn spherical(profile: SphericalProfile) -> Result<Self> {
        profile.validate::<F>(8)?;
        let generated = Generated { profile: Arc::new(profile), offsets: vec![0, 1], layers: 0 };
        let mut g =
            Self { adj: vec![Vec::new()], complete: vec![false], measure: Measure::Unit, generated: Some(generated) };
        g.extend_layers(1)?;
        Ok(g)
    }

    pub fn with_measure(mut self, measure: Measure<F>) -> Self {
        self.measure = measure;
        self
    }

    pub fn measure_rule(&self) -> &Measure<F> {
        &self.measure
    }

    pub fn profile(&self) -> Option<&SphericalProfile> {
        self.generated.as_ref().map(|g| g.profile.as_ref())
    }

    pub fn num_vertices(&self) -> usize {
        self.adj.len()
    }

    pub fn is_complete(&self, x: Vertex) -> bool {
        self.complete.get(x).copied().unwrap_or(false)
    }

    /// Sphere index |x| for generated graphs.
    pub fn layer_of(&self, x: Vertex) -> Option<usize> {
        let g = self.generated.as_ref()?;
        (x < self.adj.len()).then(|| g.offsets.partition_point(|&o| o <= x) - 1)
    }

    fn check_vertex(&self, x: Vertex) -> Result<()> {
        if x < self.adj.len() {
            Ok(())
        } else {
            Err(CoreError::HorizonExhausted { vertex: x })
        }
    }

    /// Sorted neighbour list. Fails on incomplete vertices.
    pub fn neighbors(&self, x: Vertex) -> Result<&[(Vertex, F)]> {
        self.check_vertex(x)?;
        if !self.complete[x] {
            return Err(CoreError::HorizonExhausted { vertex: x });
        }
        Ok(&self.adj[x])
    }

    /// b(x, y), zero when there is no edge. Only materialized edges are seen.
    pub fn weight(&self, x: Vertex, y: Vertex) -> F {
        self.adj
            .get(x)
            .and_then(|l| l.binary_search_by_key(&y, |(z, _)| *z).ok().map(|i| l[i].1.clone()))
            .unwrap_or_else(F::zero)
    }

    /// b(x) = Σ_y b(x, y).
    pub fn degree(&self, x: Vertex) -> Result<F> {
        Ok(self.neighbors(x)?.iter().fold(F::zero(), |acc, (_, w)| acc + w))
    }

    pub fn measure(&self, x: Vertex) -> Result<F> {
        self.check_vertex(x)?;
        match &self.measure {
            Measure::Unit => Ok(F::one()),
            Measure::Degree => self.degree(x),
            Measure::Values(v) => Ok(v.get(x).cloned().unwrap_or_else(F::one)),
        }
    }

    /// Every materialized undirected edge once, as (x, y, b) with x < y.
    pub fn edges(&self) -> Vec<(Vertex, Vertex, F)> {
        let mut out = Vec::new();
        for (x, list) in self.adj.iter().enumerate() {
            for (y, w) in list {
                if x < *y {
                    out.push((x, *y, w.clone()));
                }
            }
        }
        out
    }

    fn extend_layers(&mut self, target: usize) -> Result<()> {
        let Some(gen) = self.generated.as_mut() else {
            return Ok(());
        };
        let profile = Arc::clone(&gen.profile);
        let target = profile.layers().map_or(target, |l| target.min(l));
        while gen.layers < target {
            let k = gen.layers;
            let b = profile.b_plus::<F>(k)?;
            let (s_k, s_next) = (profile.size(k), profile.size(k + 1));
            let (start, next_start) = (gen.offsets[k], gen.offsets[k + 1]);
            let next_end = next_start + s_next as usize;
            gen.offsets.push(next_end);
            self.adj.resize(next_end, Vec::new());
            self.complete.resize(next_end, false);
            let as_field = |n: u64| F::from_rational(&Rational::from_integer(n.into()));
            if s_next % s_k == 0 {
                let d = s_next / s_k;
                let w = b.try_div(&as_field(d))?;
                for i in 0..s_k as usize {
                    for j in 0..d as usize {
                        let child = next_start + i * d as usize + j;
                        self.adj[start + i].push((child, w.clone()));
                        self.adj[child].push((start + i, w.clone()));
                    }
                }
            } else {
                let w = b.try_div(&as_field(s_next))?;
                for i in start..next_start {
                    for child in next_start..next_end {
                        self.adj[i].push((child, w.clone()));
                        self.adj[child].push((i, w.clone()));
                    }
                }
            }
            for x in start..next_start {
                self.adj[x].sort_by_key(|(y, _)| *y);
                self.complete[x] = true;
            }
            gen.layers += 1;
        }
        if profile.layers() == Some(gen.layers) {
            let last = gen.offsets[gen.layers];
            for x in last..self.adj.len() {
                self.adj[x].sort_by_key(|(y, _)| *y);
                self.complete[x] = true;
            }
        }
        Ok(())
    }

    /// A snapshot in which every vertex within distance `radius` of `a` is
    /// complete. Borrows `self` when nothing needs to grow.
    pub fn covering(&self, a: Vertex, radius: usize) -> Result<Cow<'_, Self>> {
        let Some(gen) = &self.generated else {
            self.check_vertex(a)?;
            return Ok(Cow::Borrowed(self));
        };
        let exhausted = |g: &Generated| g.profile.layers().is_some_and(|l| g.layers >= l);
        let mut grown: Option<Self> = None;
        while a >= grown.as_ref().map_or(self.adj.len(), |g| g.adj.len()) {
            let g = grown.get_or_insert_with(|| self.clone());
            let gen = g.generated.as_ref().expect("generated");
            if exhausted(gen) {
                return Err(CoreError::HorizonExhausted { vertex: a });
            }
            let next = gen.layers + 1;
            g.extend_layers(next)?;
        }
        let current = grown.as_ref().unwrap_or(self);
        let gen_now = current.generated.as_ref().unwrap_or(gen);
        let needed = current.layer_of(a).ok_or(CoreError::HorizonExhausted { vertex: a })? + radius + 1;
        if gen_now.layers >= needed || exhausted(gen_now) {
            return Ok(grown.map_or(Cow::Borrowed(self), Cow::Owned));
        }
        let mut g = grown.unwrap_or_else(|| self.clone());
        g.extend_layers(needed)?;
        Ok(Cow::Owned(g))
    }

    /// Materializes the first `layers` spheres completely (generated graphs).
    pub fn grown_to(&self, layers: usize) -> Result<Self> {
        let mut g = self.clone();
        g.extend_layers(layers)?;
        Ok(g)
    }

    /// Breadth-first distances from `a`, up to `max_dist`, in visiting order.
    pub fn bfs(&self, a: Vertex, max_dist: usize) -> Result<Vec<(Vertex, usize)>> {
        self.check_vertex(a)?;
        let mut dist = vec![usize::MAX; self.adj.len()];
        let mut order = vec![(a, 0)];
        let mut queue = VecDeque::from([a]);
        dist[a] = 0;
        while let Some(x) = queue.pop_front() {
            if dist[x] == max_dist {
                continue;
            }
            for (y, _) in self.neighbors(x)? {
                if dist[*y] == usize::MAX {
                    dist[*y] = dist[x] + 1;
                    order.push((*y, dist[*y]));
                    queue.push_back(*y);
                }
            }
        }
        Ok(order)
    }

    /// B_n(a) = {x : d(a, x) < n}, in breadth-first order starting at a.
    pub fn ball(&self, a: Vertex, n: usize) -> Result<Vec<Vertex>> {
        if n == 0 {
            return Ok(Vec::new());
        }
        Ok(self.bfs(a, n - 1)?.into_iter().map(|(x, _)| x).collect())
    }

    fn membership(&self, set: &[Vertex]) -> Vec<bool> {
        let mut inside = vec![false; self.adj.len()];
        for &x in set {
            inside[x] = true;
        }
        inside
    }

    /// Edges (x, y, b) with x ∈ W and y ∉ W.
    pub fn boundary_edges(&self, set: &[Vertex]) -> Result<Vec<(Vertex, Vertex, F)>> {
        let inside = self.membership(set);
        let mut out = Vec::new();
        for &x in set {
            for (y, w) in self.neighbors(x)? {
                if !inside[*y] {
                    out.push((x, *y, w.clone()));
                }
            }
        }
        Ok(out)
    }

    /// b(∂W).
    pub fn boundary_weight(&self, set: &[Vertex]) -> Result<F> {
        Ok(self.boundary_edges(set)?.into_iter().fold(F::zero(), |acc, (_, _, w)| acc + &w))
    }

    /// Same vertex structure with every weight (and listed measure) mapped.
    /// The result is a finite snapshot: the generator is dropped, and
    /// incomplete vertices stay incomplete.
    pub fn map_field<G: OrderedField>(&self, f: impl Fn(&F) -> Result<G>) -> Result<WeightedGraph<G>> {
        let adj = self
            .adj
            .iter()
            .map(|l| l.iter().map(|(y, w)| Ok((*y, f(w)?))).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let measure = match &self.measure {
            Measure::Unit => Measure::Unit,
            Measure::Degree => Measure::Degree,
            Measure::Values(v) => Measure::Values(v.iter().map(&f).collect::<Result<_>>()?),
        };
        Ok(WeightedGraph { adj, complete: self.complete.clone(), measure, generated: None })
    }

    /// Same graph with each weight replaced by `f(x, y, b(x, y))`; keeps the
    /// horizon but drops the generator.
    pub fn reweighted(&self, f: impl Fn(Vertex, Vertex, &F) -> F) -> Self {
        let adj = self
            .adj
            .iter()
            .enumerate()
            .map(|(x, l)| {
                l.iter()
                    .map(|(y, w)| {
                        let (lo, hi) = if x < *y { (x, *y) } else { (*y, x) };
                        (*y, f(lo, hi, w))
                    })
                    .collect()
            })
            .collect();
        Self { adj, complete: self.complete.clone(), measure: self.measure.clone(), generated: None }
    }

    /// Checks symmetry, absence of loops and positivity of weights and measure.
    pub fn check_invariants(&self) -> Result<()> {
        for (x, list) in self.adj.iter().enumerate() {
            for (y, w) in list {
                if *y == x {
                    return Err(CoreError::precondition(format!("loop at {x}")));
                }
                if self.weight(*y, x) != *w {
                    return Err(CoreError::precondition(format!("b({x},{y}) != b({y},{x})")));
                }
                if !w.certified_positive()? {
                    return Err(CoreError::precondition(format!("b({x},{y}) is not positive")));
                }
            }
            if self.complete[x] && !self.measure(x)?.certified_positive()? {
                return Err(CoreError::precondition(format!("m({x}) is not positive")));
            }
        }
        Ok(())
    }
}
