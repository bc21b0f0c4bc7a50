//! The weighted graph Laplacian `Δ_{ω,c}` and Schrödinger operators
//! `Δ_{1,a} + W`, with their quadratic forms and the vertex-weight gauge.
//!
//! ```text
//! (Δ_{ω,c} f)(x) = ω_x⁻² Σ_{y~x} c_{xy} (f(x) − f(y))
//! (P f)(x)       = Σ_{y~x} a_{xy} (f(x) − f(y)) + W(x) f(x)
//! ```
//!
//! Conjugating by `U_ω f = ω f` turns `Δ_{ω,c}` into a Schrödinger operator
//! with `a_{xy} = c_{xy} / (ω_x ω_y)` and `W = −ω⁻¹ Δ_{1,a} ω`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::graph::{VertexId, WeightedGraph};

/// `Δ_{ω,c}` on the weights carried by the graph.
#[derive(Clone, Debug)]
pub struct LaplacianSpec {
    graph: WeightedGraph,
}

/// `Δ_{1,a} + W`. The graph's conductances are `a`; its vertex weights are
/// normalized to 1 on construction.
#[derive(Clone, Debug)]
pub struct SchrodingerOperator {
    graph: WeightedGraph,
    potential: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum GaugeDirection {
    /// `f ↦ ω f`, from `l²_ω` to `l²`.
    Forward,
    /// `g ↦ g / ω`.
    Inverse,
}

impl LaplacianSpec {
    pub fn new(graph: WeightedGraph) -> Self {
        Self { graph }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn into_graph(self) -> WeightedGraph {
        self.graph
    }

    pub fn apply_at(&self, f: &GraphFunction, x: VertexId) -> Result<f64> {
        let i = self.graph.idx(x)?;
        let fx = f.get(x);
        let sum: f64 = self
            .graph
            .adj(i)
            .iter()
            .map(|&(j, c)| c * (fx - f.get(self.graph.id(j))))
            .sum();
        let w = self.graph.omega_at(i);
        Ok(sum / (w * w))
    }

    /// `Δf` on the support of `f` and its neighbors.
    pub fn apply(&self, f: &GraphFunction) -> Result<GraphFunction> {
        apply_on_neighborhood(&self.graph, f, |x| self.apply_at(f, x))
    }
}

impl SchrodingerOperator {
    pub fn new(graph: &WeightedGraph, potential: impl Fn(VertexId) -> f64) -> Result<Self> {
        let graph = graph.reweighted(|_| 1.0, |_, _, c| c)?;
        let potential: Vec<f64> = graph.vertices().map(&potential).collect();
        if let Some((x, w)) = graph.vertices().zip(&potential).find(|(_, w)| !w.is_finite()) {
            return Err(Error::InvalidGraph(format!("potential at {x} is {w}")));
        }
        Ok(Self { graph, potential })
    }

    /// `Δ_{1,a} + W` with `W` read from a function (zero off its support).
    pub fn with_potential(graph: &WeightedGraph, potential: &GraphFunction) -> Result<Self> {
        Self::new(graph, |x| potential.get(x))
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn potential(&self, x: VertexId) -> Result<f64> {
        Ok(self.potential[self.graph.idx(x)?])
    }

    pub fn potential_function(&self) -> GraphFunction {
        self.graph.vertices().zip(self.potential.iter().copied()).collect()
    }

    /// Same `a`, potential shifted by `s` (i.e. `P + s`).
    pub fn shifted(&self, s: f64) -> Self {
        Self {
            graph: self.graph.clone(),
            potential: self.potential.iter().map(|w| w + s).collect(),
        }
    }

    pub fn laplacian_part(&self) -> LaplacianSpec {
        LaplacianSpec::new(self.graph.clone())
    }

    pub fn apply_at(&self, f: &GraphFunction, x: VertexId) -> Result<f64> {
        let i = self.graph.idx(x)?;
        let fx = f.get(x);
        let sum: f64 = self
            .graph
            .adj(i)
            .iter()
            .map(|&(j, a)| a * (fx - f.get(self.graph.id(j))))
            .sum();
        Ok(sum + self.potential[i] * fx)
    }

    pub fn apply(&self, f: &GraphFunction) -> Result<GraphFunction> {
        apply_on_neighborhood(&self.graph, f, |x| self.apply_at(f, x))
    }

    /// Magnitude of the terms entering `(Pf)(x)`, used to make residuals relative.
    pub fn term_scale_at(&self, f: &GraphFunction, x: VertexId) -> Result<f64> {
        let i = self.graph.idx(x)?;
        let fx = f.get(x).abs();
        let s: f64 = self
            .graph
            .adj(i)
            .iter()
            .map(|&(j, a)| a * (fx + f.get(self.graph.id(j)).abs()))
            .sum();
        Ok(s + self.potential[i].abs() * fx)
    }

    /// `⟨Pg, g⟩` in plain `l²`, summed over the support of `g`.
    pub fn form(&self, g: &GraphFunction) -> Result<f64> {
        let mut total = 0.0;
        for (x, gx) in g.iter() {
            if gx != 0.0 {
                total += gx * self.apply_at(g, x)?;
            }
        }
        Ok(total)
    }

    pub(crate) fn potential_at(&self, i: usize) -> f64 {
        self.potential[i]
    }
}

fn apply_on_neighborhood(
    g: &WeightedGraph,
    f: &GraphFunction,
    at: impl Fn(VertexId) -> Result<f64>,
) -> Result<GraphFunction> {
    let mut targets = std::collections::BTreeSet::new();
    for x in f.support() {
        targets.insert(x);
        targets.extend(g.neighbors(x)?);
    }
    targets.into_iter().map(|x| Ok((x, at(x)?))).collect()
}

pub fn apply_laplacian(l: &LaplacianSpec, f: &GraphFunction, x: VertexId) -> Result<f64> {
    l.apply_at(f, x)
}

pub fn apply_schrodinger(p: &SchrodingerOperator, f: &GraphFunction, x: VertexId) -> Result<f64> {
    p.apply_at(f, x)
}

/// `Q_c(f) = Σ_{{x,y}∈E} c_{xy} (f(x) − f(y))²` over edges meeting the support.
pub fn quadratic_form(l: &LaplacianSpec, f: &GraphFunction) -> Result<f64> {
    let g = l.graph();
    for x in f.support() {
        g.idx(x)?;
    }
    // each edge once: from its smaller endpoint, or from the support side
    let mut total = 0.0;
    for x in f.support() {
        let fx = f.get(x);
        for (y, c) in g.neighbor_entries(x)? {
            if !f.contains(y) || x < y {
                let d = fx - f.get(y);
                total += c * d * d;
            }
        }
    }
    Ok(total)
}

/// `⟨f, g⟩_{l²_ω} = Σ ω_x² f(x) g(x)`.
pub fn inner_product_weighted(f: &GraphFunction, g: &GraphFunction, omega: &WeightedGraph) -> Result<f64> {
    let mut total = 0.0;
    for (x, fx) in f.iter() {
        let gx = g.get(x);
        if gx != 0.0 || fx != 0.0 {
            let w = omega.omega(x)?;
            total += w * w * fx * gx;
        }
    }
    Ok(total)
}

/// `U_ω` (forward) or its inverse.
pub fn vertex_weight_unitary(
    omega: &WeightedGraph,
    f: &GraphFunction,
    direction: GaugeDirection,
) -> Result<GraphFunction> {
    f.iter()
        .map(|(x, v)| {
            let w = omega.omega(x)?;
            Ok((
                x,
                match direction {
                    GaugeDirection::Forward => w * v,
                    GaugeDirection::Inverse => v / w,
                },
            ))
        })
        .collect()
}

/// The Schrödinger operator unitarily equivalent to `Δ_{ω,c}` under `U_ω`.
///
/// `W` is computed from the graph's actual adjacency, so a vertex of degree one
/// gets the one-sided sum.
pub fn gauge_to_schrodinger(l: &LaplacianSpec) -> Result<SchrodingerOperator> {
    let g = l.graph();
    let a_graph = g.reweighted(|_| 1.0, |x, y, c| c / (g.omega(x).unwrap() * g.omega(y).unwrap()))?;
    let mut potential = Vec::with_capacity(g.len());
    for i in 0..g.len() {
        let wx = g.omega_at(i);
        let inv_x = 1.0 / wx;
        let s: f64 = g
            .adj(i)
            .iter()
            .map(|&(j, c)| c * (inv_x - 1.0 / g.omega_at(j)))
            .sum();
        potential.push(s / wx);
    }
    Ok(SchrodingerOperator {
        graph: a_graph,
        potential,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::GraphBuilder;

    fn unit_path3() -> LaplacianSpec {
        LaplacianSpec::new(WeightedGraph::path(1, 3, |_| 1.0, |_| 1.0).unwrap())
    }

    #[test]
    fn laplacian_of_indicator_on_path() {
        let l = unit_path3();
        let f = GraphFunction::indicator(2);
        assert_eq!(apply_laplacian(&l, &f, 2).unwrap(), 2.0);
        assert_eq!(apply_laplacian(&l, &f, 1).unwrap(), -1.0);
        assert!(apply_laplacian(&l, &f, 9).is_err());
    }

    #[test]
    fn constants_are_harmonic() {
        let l = LaplacianSpec::new(WeightedGraph::path(0, 6, |n| 1.0 + n as f64, |n| 0.5 * (n + 1) as f64).unwrap());
        let f = GraphFunction::constant_on(0..=6, 3.25);
        for x in 0..=6 {
            assert_eq!(l.apply_at(&f, x).unwrap(), 0.0);
        }
    }

    #[test]
    fn weight_prefactor_scales_by_inverse_square() {
        let base = unit_path3();
        let heavy = LaplacianSpec::new(WeightedGraph::path(1, 3, |n| if n == 2 { 2.0 } else { 1.0 }, |_| 1.0).unwrap());
        let f: GraphFunction = [(1, 0.3), (2, -1.7), (3, 2.0)].into_iter().collect();
        assert_eq!(heavy.apply_at(&f, 2).unwrap(), 0.25 * base.apply_at(&f, 2).unwrap());
    }

    #[test]
    fn schrodinger_indicator_value() {
        let mut b = GraphBuilder::new();
        b.add_vertex(0, 1.0).add_vertex(1, 1.0).add_vertex(2, 1.0);
        b.add_edge(0, 1, 2.5).add_edge(0, 2, 0.5);
        let p = SchrodingerOperator::new(&b.build().unwrap(), |x| if x == 0 { -0.75 } else { 0.0 }).unwrap();
        assert_eq!(p.apply_at(&GraphFunction::indicator(0), 0).unwrap(), 3.0 - 0.75);
    }

    #[test]
    fn schrodinger_without_potential_is_unit_weight_laplacian() {
        let g = WeightedGraph::path(1, 3, |_| 1.0, |_| 1.0).unwrap();
        let p = SchrodingerOperator::new(&g, |_| 0.0).unwrap();
        let l = LaplacianSpec::new(g);
        let f: GraphFunction = [(1, 0.2), (2, 1.0), (3, -4.0)].into_iter().collect();
        for x in 1..=3 {
            assert_eq!(p.apply_at(&f, x).unwrap(), l.apply_at(&f, x).unwrap());
        }
    }

    #[test]
    fn single_edge_form() {
        let mut b = GraphBuilder::new();
        b.add_vertex(0, 1.0).add_vertex(1, 1.0).add_edge(0, 1, 5.0);
        let l = LaplacianSpec::new(b.build().unwrap());
        assert_eq!(quadratic_form(&l, &GraphFunction::indicator(0)).unwrap(), 5.0);
        assert_eq!(quadratic_form(&l, &GraphFunction::constant_on([0, 1], 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn weighted_inner_product() {
        let g = WeightedGraph::path(0, 2, |n| [1.0, 3.0, 0.5][n as usize], |_| 1.0).unwrap();
        let e = GraphFunction::indicator(1);
        assert_eq!(inner_product_weighted(&e, &e, &g).unwrap(), 9.0);
        let unit = WeightedGraph::path(0, 2, |_| 1.0, |_| 1.0).unwrap();
        let f: GraphFunction = [(0, 1.0), (2, -2.0)].into_iter().collect();
        assert_eq!(inner_product_weighted(&f, &f, &unit).unwrap(), f.norm_sq());
    }

    #[test]
    fn gauge_on_constant_weight_has_no_potential() {
        let g = WeightedGraph::path(0, 5, |_| 2.0, |n| 1.0 + n as f64).unwrap();
        let p = gauge_to_schrodinger(&LaplacianSpec::new(g)).unwrap();
        for x in 0..=5 {
            assert_eq!(p.potential(x).unwrap(), 0.0);
        }
        assert_eq!(p.graph().conductance(2, 3).unwrap(), Some(3.0 / 4.0));
    }

    #[test]
    fn gauge_of_inverse_weight_family() {
        // ω_n = 1/n, c_{n,n+1} = (n+1)²
        let g = WeightedGraph::path(1, 12, |n| 1.0 / n as f64, |n| ((n + 1) * (n + 1)) as f64).unwrap();
        let p = gauge_to_schrodinger(&LaplacianSpec::new(g)).unwrap();
        // endpoint: one-sided sum
        assert_eq!(p.potential(1).unwrap(), -4.0);
        for n in 2..12u64 {
            let expected = -((n * (2 * n + 1)) as f64);
            assert!((p.potential(n).unwrap() - expected).abs() <= 1e-12 * expected.abs());
            let a = p.graph().conductance(n, n + 1).unwrap().unwrap();
            let expected_a = (n * (n + 1).pow(3)) as f64;
            assert!((a - expected_a).abs() <= 1e-12 * expected_a);
        }
    }

    #[test]
    fn unitary_roundtrip() {
        let g = WeightedGraph::path(0, 3, |n| 0.5 + n as f64, |_| 1.0).unwrap();
        let f: GraphFunction = [(0, 1.0), (3, -2.0)].into_iter().collect();
        let there = vertex_weight_unitary(&g, &f, GaugeDirection::Forward).unwrap();
        assert_eq!(there.get(3), -7.0);
        let back = vertex_weight_unitary(&g, &there, GaugeDirection::Inverse).unwrap();
        assert_eq!(back, f);
        let e = vertex_weight_unitary(&g, &GraphFunction::indicator(1), GaugeDirection::Forward).unwrap();
        assert_eq!(e.get(1), 1.5);
    }
}
