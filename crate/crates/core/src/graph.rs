//! Locally finite weighted graphs, regions and combinatorial balls.
//!
//! A [`WeightedGraph`] is always finite. Infinite graphs are described by a
//! [`GraphSource`] and materialized on demand; vertices whose neighborhood was
//! cut by the materialization are marked as *frontier* vertices. A frontier
//! vertex is never interior to a region, so no equation is ever imposed at a
//! vertex whose true neighborhood is unknown.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use crate::error::{Error, Result};

/// Opaque vertex identifier. Path families use the integer index directly.
pub type VertexId = u64;

/// Callback description of a (possibly infinite) locally finite graph.
pub trait GraphSource {
    fn contains(&self, x: VertexId) -> bool;

    /// Neighbors in the host graph, ascending.
    fn neighbors_of(&self, x: VertexId) -> Vec<VertexId>;

    fn vertex_weight(&self, x: VertexId) -> f64;

    fn edge_conductance(&self, x: VertexId, y: VertexId) -> f64;

    /// The subgraph induced on `vertices`; vertices with a host neighbor
    /// outside the set become frontier vertices.
    fn materialize(&self, vertices: &BTreeSet<VertexId>) -> Result<WeightedGraph> {
        let mut b = GraphBuilder::new();
        for &x in vertices {
            if !self.contains(x) {
                return Err(Error::UnknownVertex(x));
            }
            b.add_vertex(x, self.vertex_weight(x));
        }
        for &x in vertices {
            let mut cut = false;
            for y in self.neighbors_of(x) {
                if !vertices.contains(&y) {
                    cut = true;
                } else if x < y {
                    b.add_edge(x, y, self.edge_conductance(x, y));
                }
            }
            if cut {
                b.mark_frontier(x);
            }
        }
        b.build()
    }

    /// Materializes the combinatorial ball of radius `radius` around `x0`.
    fn materialize_ball(&self, x0: VertexId, radius: usize) -> Result<WeightedGraph> {
        if !self.contains(x0) {
            return Err(Error::UnknownVertex(x0));
        }
        let mut seen = BTreeSet::from([x0]);
        let mut layer = vec![x0];
        for _ in 0..radius {
            let mut next = Vec::new();
            for x in layer {
                for y in self.neighbors_of(x) {
                    if seen.insert(y) {
                        next.push(y);
                    }
                }
            }
            layer = next;
        }
        self.materialize(&seen)
    }
}

/// Finite weighted graph with strictly positive vertex weights `ω` and
/// symmetric, strictly positive edge conductances `c`.
///
/// Immutable after construction.
#[derive(Clone, Debug)]
pub struct WeightedGraph {
    ids: Vec<VertexId>,
    index: HashMap<VertexId, usize>,
    adjacency: Vec<Vec<(usize, f64)>>,
    omega: Vec<f64>,
    frontier: Vec<bool>,
}

#[derive(Default, Debug, Clone)]
pub struct GraphBuilder {
    weights: BTreeMap<VertexId, f64>,
    edges: Vec<(VertexId, VertexId, f64)>,
    frontier: BTreeSet<VertexId>,
}

impl GraphBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, x: VertexId, omega: f64) -> &mut Self {
        self.weights.insert(x, omega);
        self
    }

    pub fn add_edge(&mut self, x: VertexId, y: VertexId, conductance: f64) -> &mut Self {
        self.edges.push((x, y, conductance));
        self
    }

    pub fn mark_frontier(&mut self, x: VertexId) -> &mut Self {
        self.frontier.insert(x);
        self
    }

    pub fn build(&self) -> Result<WeightedGraph> {
        let ids: Vec<VertexId> = self.weights.keys().copied().collect();
        let index: HashMap<VertexId, usize> = ids.iter().enumerate().map(|(i, &x)| (x, i)).collect();
        let mut omega = Vec::with_capacity(ids.len());
        for (&x, &w) in &self.weights {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::InvalidGraph(format!("vertex weight at {x} is {w}, must be finite and > 0")));
            }
            omega.push(w);
        }
        let mut adjacency = vec![Vec::new(); ids.len()];
        for &(x, y, c) in &self.edges {
            if x == y {
                return Err(Error::InvalidGraph(format!("self-loop at {x}")));
            }
            if !(c.is_finite() && c > 0.0) {
                return Err(Error::InvalidGraph(format!(
                    "conductance on {{{x},{y}}} is {c}, must be finite and > 0"
                )));
            }
            let i = *index.get(&x).ok_or(Error::UnknownVertex(x))?;
            let j = *index.get(&y).ok_or(Error::UnknownVertex(y))?;
            adjacency[i].push((j, c));
            adjacency[j].push((i, c));
        }
        for (i, row) in adjacency.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate edge {{{},{}}}",
                    ids[i], ids[w[0].0]
                )));
            }
        }
        let mut frontier = vec![false; ids.len()];
        for x in &self.frontier {
            frontier[*index.get(x).ok_or(Error::UnknownVertex(*x))?] = true;
        }
        Ok(WeightedGraph {
            ids,
            index,
            adjacency,
            omega,
            frontier,
        })
    }
}

impl WeightedGraph {
    /// Path graph on consecutive identifiers `first..=last` with weights and
    /// conductances from closures; `cond(n)` is the conductance of `{n, n+1}`.
    pub fn path(
        first: VertexId,
        last: VertexId,
        omega: impl Fn(VertexId) -> f64,
        cond: impl Fn(VertexId) -> f64,
    ) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for n in first..=last {
            b.add_vertex(n, omega(n));
        }
        for n in first..last {
            b.add_edge(n, n + 1, cond(n));
        }
        b.build()
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    /// Vertex identifiers, ascending.
    pub fn vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.ids.iter().copied()
    }

    pub fn contains_vertex(&self, x: VertexId) -> bool {
        self.index.contains_key(&x)
    }

    pub fn neighbors(&self, x: VertexId) -> Result<Vec<VertexId>> {
        let i = self.idx(x)?;
        Ok(self.adjacency[i].iter().map(|&(j, _)| self.ids[j]).collect())
    }

    /// `(neighbor, conductance)` pairs of `x`, ascending by neighbor.
    pub fn neighbor_entries(&self, x: VertexId) -> Result<impl Iterator<Item = (VertexId, f64)> + '_> {
        let i = self.idx(x)?;
        Ok(self.adjacency[i].iter().map(|&(j, c)| (self.ids[j], c)))
    }

    pub fn degree(&self, x: VertexId) -> Result<usize> {
        Ok(self.adjacency[self.idx(x)?].len())
    }

    pub fn omega(&self, x: VertexId) -> Result<f64> {
        Ok(self.omega[self.idx(x)?])
    }

    pub fn conductance(&self, x: VertexId, y: VertexId) -> Result<Option<f64>> {
        let i = self.idx(x)?;
        let j = self.idx(y)?;
        Ok(self.adjacency[i]
            .binary_search_by_key(&j, |&(k, _)| k)
            .ok()
            .map(|p| self.adjacency[i][p].1))
    }

    pub fn is_frontier(&self, x: VertexId) -> Result<bool> {
        Ok(self.frontier[self.idx(x)?])
    }

    pub fn frontier(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.ids
            .iter()
            .zip(&self.frontier)
            .filter(|(_, f)| **f)
            .map(|(x, _)| *x)
    }

    /// Undirected edges `(x, y, c)` with `x < y`, in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, f64)> + '_ {
        self.adjacency.iter().enumerate().flat_map(move |(i, row)| {
            row.iter()
                .filter(move |&&(j, _)| j > i)
                .map(move |&(j, c)| (self.ids[i], self.ids[j], c))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn max_degree(&self) -> Result<usize> {
        self.adjacency.iter().map(Vec::len).max().ok_or(Error::EmptyGraph)
    }

    pub fn is_connected(&self) -> bool {
        if self.is_empty() {
            return true;
        }
        let all: Vec<usize> = (0..self.len()).collect();
        self.connected_within(&all)
    }

    /// Same structure with vertex weights and conductances replaced.
    pub fn reweighted(
        &self,
        omega: impl Fn(VertexId) -> f64,
        cond: impl Fn(VertexId, VertexId, f64) -> f64,
    ) -> Result<Self> {
        let mut b = GraphBuilder::new();
        for x in self.vertices() {
            b.add_vertex(x, omega(x));
        }
        for (x, y, c) in self.edges() {
            b.add_edge(x, y, cond(x, y, c));
        }
        for x in self.frontier() {
            b.mark_frontier(x);
        }
        b.build()
    }

    pub fn induced_subgraph(&self, vertices: &BTreeSet<VertexId>) -> Result<Self> {
        let mut g = self.materialize(vertices)?;
        for (i, x) in g.ids.iter().enumerate() {
            if self.is_frontier(*x)? {
                g.frontier[i] = true;
            }
        }
        Ok(g)
    }

    pub fn combinatorial_ball(&self, x0: VertexId, radius: usize) -> Result<CombinatorialBall> {
        let start = self.idx(x0)?;
        let dist = self.bfs(start, Some(radius));
        let distances: BTreeMap<VertexId, usize> = dist
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|d| (self.ids[i], d)))
            .collect();
        Ok(CombinatorialBall {
            center: x0,
            radius,
            members: distances.keys().copied().collect(),
            distances,
        })
    }

    /// Edge-count distance from `x0` to the nearest frontier vertex.
    pub fn hops_to_frontier(&self, x0: VertexId) -> Result<Option<usize>> {
        let dist = self.bfs(self.idx(x0)?, None);
        Ok(dist
            .iter()
            .zip(&self.frontier)
            .filter(|(_, f)| **f)
            .filter_map(|(d, _)| *d)
            .min())
    }

    pub fn region(&self, vertices: impl IntoIterator<Item = VertexId>) -> Result<FiniteRegion> {
        region_from_vertexset(self, vertices)
    }

    pub(crate) fn idx(&self, x: VertexId) -> Result<usize> {
        self.index.get(&x).copied().ok_or(Error::UnknownVertex(x))
    }

    pub(crate) fn id(&self, i: usize) -> VertexId {
        self.ids[i]
    }

    pub(crate) fn adj(&self, i: usize) -> &[(usize, f64)] {
        &self.adjacency[i]
    }

    pub(crate) fn omega_at(&self, i: usize) -> f64 {
        self.omega[i]
    }

    pub(crate) fn frontier_at(&self, i: usize) -> bool {
        self.frontier[i]
    }

    fn bfs(&self, start: usize, limit: Option<usize>) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[start] = Some(0);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let d = dist[i].unwrap();
            if limit.is_some_and(|l| d >= l) {
                continue;
            }
            for &(j, _) in &self.adjacency[i] {
                if dist[j].is_none() {
                    dist[j] = Some(d + 1);
                    queue.push_back(j);
                }
            }
        }
        dist
    }

    /// Whether the vertex-index set induces a connected subgraph.
    pub(crate) fn connected_within(&self, set: &[usize]) -> bool {
        let Some(&start) = set.first() else {
            return false;
        };
        let member: std::collections::HashSet<usize> = set.iter().copied().collect();
        let mut seen = std::collections::HashSet::from([start]);
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for &(j, _) in &self.adjacency[i] {
                if member.contains(&j) && seen.insert(j) {
                    stack.push(j);
                }
            }
        }
        seen.len() == member.len()
    }
}

impl GraphSource for WeightedGraph {
    fn contains(&self, x: VertexId) -> bool {
        self.contains_vertex(x)
    }

    fn neighbors_of(&self, x: VertexId) -> Vec<VertexId> {
        self.neighbors(x).unwrap_or_default()
    }

    fn vertex_weight(&self, x: VertexId) -> f64 {
        self.omega(x).unwrap_or(f64::NAN)
    }

    fn edge_conductance(&self, x: VertexId, y: VertexId) -> f64 {
        self.conductance(x, y).ok().flatten().unwrap_or(f64::NAN)
    }
}

/// Edge-count ball `{x : d(x0, x) <= radius}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialBall {
    pub center: VertexId,
    pub radius: usize,
    pub members: BTreeSet<VertexId>,
    pub distances: BTreeMap<VertexId, usize>,
}

/// A finite vertex set `K` split into interior and boundary.
///
/// A vertex of `K` is interior when every neighbor lies in `K` (and it is not a
/// frontier vertex); the boundary is the rest of `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteRegion {
    pub members: BTreeSet<VertexId>,
    pub interior: BTreeSet<VertexId>,
    pub boundary: BTreeSet<VertexId>,
    /// False when the interior is empty or splits into several components.
    pub interior_connected: bool,
}

impl FiniteRegion {
    pub fn has_interior(&self) -> bool {
        !self.interior.is_empty()
    }
}

pub fn neighbors(g: &WeightedGraph, x: VertexId) -> Result<Vec<VertexId>> {
    g.neighbors(x)
}

pub fn max_degree(g: &WeightedGraph) -> Result<usize> {
    g.max_degree()
}

pub fn combinatorial_ball(g: &WeightedGraph, x0: VertexId, n: usize) -> Result<CombinatorialBall> {
    g.combinatorial_ball(x0, n)
}

pub fn region_from_vertexset(
    g: &WeightedGraph,
    vertices: impl IntoIterator<Item = VertexId>,
) -> Result<FiniteRegion> {
    let members: BTreeSet<VertexId> = vertices.into_iter().collect();
    let mut interior = BTreeSet::new();
    let mut boundary = BTreeSet::new();
    let mut interior_idx = Vec::new();
    for &x in &members {
        let i = g.idx(x)?;
        let inside = !g.frontier_at(i) && g.adj(i).iter().all(|&(j, _)| members.contains(&g.id(j)));
        if inside {
            interior.insert(x);
            interior_idx.push(i);
        } else {
            boundary.insert(x);
        }
    }
    Ok(FiniteRegion {
        interior_connected: g.connected_within(&interior_idx),
        members,
        interior,
        boundary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit_path(first: VertexId, last: VertexId) -> WeightedGraph {
        WeightedGraph::path(first, last, |_| 1.0, |_| 1.0).unwrap()
    }

    fn star(leaves: u64) -> WeightedGraph {
        let mut b = GraphBuilder::new();
        b.add_vertex(0, 1.0);
        for k in 1..=leaves {
            b.add_vertex(k, 1.0).add_edge(0, k, 1.0);
        }
        b.build().unwrap()
    }

    fn grid3() -> WeightedGraph {
        let mut b = GraphBuilder::new();
        for r in 0..3u64 {
            for c in 0..3u64 {
                b.add_vertex(3 * r + c, 1.0);
                if c < 2 {
                    b.add_edge(3 * r + c, 3 * r + c + 1, 1.0);
                }
                if r < 2 {
                    b.add_edge(3 * r + c, 3 * (r + 1) + c, 1.0);
                }
            }
        }
        b.build().unwrap()
    }

    #[test]
    fn path_neighbors() {
        let g = unit_path(1, 3);
        assert_eq!(g.neighbors(2).unwrap(), vec![1, 3]);
        assert_eq!(g.neighbors(1).unwrap(), vec![2]);
        assert!(matches!(g.neighbors(7), Err(Error::UnknownVertex(7))));
    }

    #[test]
    fn star_center_sees_all_leaves() {
        let g = star(4);
        assert_eq!(g.neighbors(0).unwrap(), vec![1, 2, 3, 4]);
        assert_eq!(g.max_degree().unwrap(), 4);
    }

    #[test]
    fn max_degree_cases() {
        assert_eq!(unit_path(0, 4).max_degree().unwrap(), 2);
        assert!(matches!(GraphBuilder::new().build().unwrap().max_degree(), Err(Error::EmptyGraph)));
    }

    #[test]
    fn construction_rejects_bad_weights() {
        let mut b = GraphBuilder::new();
        b.add_vertex(0, 1.0).add_vertex(1, 0.0).add_edge(0, 1, 1.0);
        assert!(matches!(b.build(), Err(Error::InvalidGraph(_))));

        let mut b = GraphBuilder::new();
        b.add_vertex(0, 1.0).add_vertex(1, 1.0).add_edge(0, 1, -2.0);
        assert!(matches!(b.build(), Err(Error::InvalidGraph(_))));

        let mut b = GraphBuilder::new();
        b.add_vertex(0, 1.0).add_edge(0, 0, 1.0);
        assert!(matches!(b.build(), Err(Error::InvalidGraph(_))));

        let mut b = GraphBuilder::new();
        b.add_vertex(0, 1.0).add_vertex(1, 1.0).add_edge(0, 1, 1.0).add_edge(1, 0, 2.0);
        assert!(matches!(b.build(), Err(Error::InvalidGraph(_))));

        let mut b = GraphBuilder::new();
        b.add_vertex(0, 1.0).add_edge(0, 9, 1.0);
        assert!(matches!(b.build(), Err(Error::UnknownVertex(9))));
    }

    #[test]
    fn balls_on_path_and_grid() {
        let g = unit_path(0, 10);
        let b2 = g.combinatorial_ball(0, 2).unwrap();
        assert_eq!(b2.members, BTreeSet::from([0, 1, 2]));
        assert_eq!(g.combinatorial_ball(5, 0).unwrap().members, BTreeSet::from([5]));

        let grid = grid3();
        let b1 = grid.combinatorial_ball(4, 1).unwrap();
        assert_eq!(b1.members, BTreeSet::from([1, 3, 4, 5, 7]));
        assert!(grid.combinatorial_ball(42, 1).is_err());
    }

    #[test]
    fn region_partition_uses_host_adjacency() {
        // vertex 1 is a true endpoint, vertex 10 is a truncation frontier
        let mut b = GraphBuilder::new();
        for n in 1..=10 {
            b.add_vertex(n, 1.0);
        }
        for n in 1..10 {
            b.add_edge(n, n + 1, 1.0);
        }
        b.mark_frontier(10);
        let g = b.build().unwrap();

        let r = g.region(1..=5).unwrap();
        assert_eq!(r.interior, BTreeSet::from([1, 2, 3, 4]));
        assert_eq!(r.boundary, BTreeSet::from([5]));
        assert!(r.interior_connected);

        let whole = g.region(1..=10).unwrap();
        assert_eq!(whole.boundary, BTreeSet::from([10]));

        let single = g.region([4]).unwrap();
        assert!(single.interior.is_empty());
        assert!(!single.interior_connected);
        assert_eq!(single.boundary, BTreeSet::from([4]));
    }

    #[test]
    fn whole_finite_graph_has_no_boundary() {
        let g = grid3();
        let r = g.region(g.vertices()).unwrap();
        assert!(r.boundary.is_empty());
        assert_eq!(r.interior.len(), 9);
    }

    #[test]
    fn disconnected_interior_is_flagged() {
        let g = unit_path(0, 8);
        // interiors {1} and {5} separated by boundary vertices
        let r = g.region([0, 1, 2, 4, 5, 6]).unwrap();
        assert_eq!(r.interior, BTreeSet::from([0, 1, 5]));
        assert!(!r.interior_connected);
    }

    #[test]
    fn materialize_marks_cut_vertices() {
        let g = unit_path(0, 20);
        let sub = g.materialize_ball(10, 3).unwrap();
        assert_eq!(sub.vertices().collect::<Vec<_>>(), (7..=13).collect::<Vec<_>>());
        assert_eq!(sub.frontier().collect::<Vec<_>>(), vec![7, 13]);
        assert_eq!(sub.hops_to_frontier(10).unwrap(), Some(3));
    }

    #[test]
    fn connectivity() {
        let mut b = GraphBuilder::new();
        b.add_vertex(0, 1.0).add_vertex(1, 1.0).add_vertex(2, 1.0).add_edge(0, 1, 1.0);
        assert!(!b.build().unwrap().is_connected());
        assert!(grid3().is_connected());
    }
}
