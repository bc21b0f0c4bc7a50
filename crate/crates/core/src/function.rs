use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::graph::VertexId;

/// A finitely supported real function on vertices.
///
/// Vertices without an entry read as zero. Explicit zero entries are kept, so
/// "defined on K" can be expressed by inserting every vertex of `K`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GraphFunction {
    values: BTreeMap<VertexId, f64>,
}

impl GraphFunction {
    pub fn new() -> Self {
        Self::default()
    }

    /// The indicator of a single vertex.
    pub fn indicator(x: VertexId) -> Self {
        [(x, 1.0)].into_iter().collect()
    }

    pub fn constant_on(vertices: impl IntoIterator<Item = VertexId>, value: f64) -> Self {
        vertices.into_iter().map(|x| (x, value)).collect()
    }

    pub fn get(&self, x: VertexId) -> f64 {
        self.values.get(&x).copied().unwrap_or(0.0)
    }

    pub fn value(&self, x: VertexId) -> Option<f64> {
        self.values.get(&x).copied()
    }

    pub fn contains(&self, x: VertexId) -> bool {
        self.values.contains_key(&x)
    }

    pub fn set(&mut self, x: VertexId, value: f64) {
        self.values.insert(x, value);
    }

    pub fn remove(&mut self, x: VertexId) -> Option<f64> {
        self.values.remove(&x)
    }

    /// Keyed vertices, ascending.
    pub fn support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.values.keys().copied()
    }

    /// Vertices with a nonzero value, ascending.
    pub fn nonzero_support(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.values
            .iter()
            .filter(|(_, v)| **v != 0.0)
            .map(|(x, _)| *x)
    }

    pub fn iter(&self) -> impl Iterator<Item = (VertexId, f64)> + '_ {
        self.values.iter().map(|(x, v)| (*x, *v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn map(&self, mut f: impl FnMut(VertexId, f64) -> f64) -> Self {
        self.iter().map(|(x, v)| (x, f(x, v))).collect()
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|_, v| s * v)
    }

    /// Pointwise sum over the union of supports.
    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (x, v) in other.iter() {
            *out.values.entry(x).or_insert(0.0) += v;
        }
        out
    }

    /// Plain `l²` inner product, summed in ascending vertex order.
    pub fn dot(&self, other: &Self) -> f64 {
        self.iter().map(|(x, v)| v * other.get(x)).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.values.values().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn restrict(&self, keep: impl Fn(VertexId) -> bool) -> Self {
        self.iter().filter(|(x, _)| keep(*x)).collect()
    }
}

impl FromIterator<(VertexId, f64)> for GraphFunction {
    fn from_iter<I: IntoIterator<Item = (VertexId, f64)>>(iter: I) -> Self {
        Self {
            values: iter.into_iter().collect(),
        }
    }
}

impl Extend<(VertexId, f64)> for GraphFunction {
    fn extend<I: IntoIterator<Item = (VertexId, f64)>>(&mut self, iter: I) {
        self.values.extend(iter);
    }
}
