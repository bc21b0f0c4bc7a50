//! Graph-spec files: JSON with either explicit vertex and edge arrays or a
//! catalog family record.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::catalog::PathFamily;
use crate::error::{Error, Result};
use crate::function::GraphFunction;
use crate::graph::{GraphBuilder, VertexId, WeightedGraph};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: VertexId,
    pub v: VertexId,
    pub conductance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitGraph {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeRecord>,
    pub vertex_weights: BTreeMap<VertexId, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub potential: Option<BTreeMap<VertexId, f64>>,
    /// Vertices with neighbors outside the file.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub frontier: Vec<VertexId>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyRecord {
    pub name: String,
    #[serde(default)]
    pub params: BTreeMap<String, serde_json::Value>,
    pub n_max: VertexId,
}

impl FamilyRecord {
    pub fn family(&self) -> Result<PathFamily> {
        let mut parts = Vec::new();
        for (k, v) in &self.params {
            let text = match v {
                serde_json::Value::Number(n) => n.to_string(),
                serde_json::Value::Bool(b) => b.to_string(),
                other => return Err(Error::Parse(format!("parameter {k}: unsupported value {other}"))),
            };
            parts.push(format!("{k}={text}"));
        }
        let id = if parts.is_empty() {
            self.name.clone()
        } else {
            format!("{}:{}", self.name, parts.join(","))
        };
        id.parse()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FamilyFile {
    family: FamilyRecord,
}

/// A parsed graph-spec file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GraphSpec {
    Family { family: FamilyRecord },
    Explicit(ExplicitGraph),
}

/// A materialized graph together with what the file said about it.
#[derive(Clone, Debug)]
pub struct LoadedGraph {
    pub graph: WeightedGraph,
    pub potential: Option<GraphFunction>,
    pub family: Option<PathFamily>,
}

impl GraphSpec {
    pub fn parse(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)?;
        let is_family = value.as_object().is_some_and(|o| o.contains_key("family"));
        if is_family {
            let f: FamilyFile = serde_json::from_value(value)?;
            Ok(GraphSpec::Family { family: f.family })
        } else {
            Ok(GraphSpec::Explicit(serde_json::from_value(value)?))
        }
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn load(&self) -> Result<LoadedGraph> {
        match self {
            GraphSpec::Family { family } => {
                let fam = family.family()?;
                Ok(LoadedGraph {
                    graph: fam.instantiate(family.n_max)?,
                    potential: None,
                    family: Some(fam),
                })
            }
            GraphSpec::Explicit(e) => e.load(),
        }
    }
}

impl ExplicitGraph {
    pub fn load(&self) -> Result<LoadedGraph> {
        let declared: BTreeSet<VertexId> = self.vertices.iter().copied().collect();
        if declared.len() != self.vertices.len() {
            return Err(Error::InvalidGraph("duplicate vertex identifiers".into()));
        }
        let mut b = GraphBuilder::new();
        for &x in &self.vertices {
            let w = self
                .vertex_weights
                .get(&x)
                .ok_or_else(|| Error::InvalidGraph(format!("vertex {x} has no weight")))?;
            b.add_vertex(x, *w);
        }
        if let Some(x) = self.vertex_weights.keys().find(|x| !declared.contains(x)) {
            return Err(Error::InvalidGraph(format!("weight given for undeclared vertex {x}")));
        }
        for e in &self.edges {
            b.add_edge(e.u, e.v, e.conductance);
        }
        for &x in &self.frontier {
            b.mark_frontier(x);
        }
        let graph = b.build()?;
        let potential = match &self.potential {
            None => None,
            Some(map) => {
                if let Some(x) = map.keys().find(|x| !declared.contains(x)) {
                    return Err(Error::InvalidGraph(format!("potential given for undeclared vertex {x}")));
                }
                if let Some((x, w)) = map.iter().find(|(_, w)| !w.is_finite()) {
                    return Err(Error::InvalidGraph(format!("potential {w} at {x} is not finite")));
                }
                Some(map.iter().map(|(&x, &w)| (x, w)).collect())
            }
        };
        Ok(LoadedGraph {
            graph,
            potential,
            family: None,
        })
    }

    /// The explicit record of a materialized graph.
    pub fn from_graph(g: &WeightedGraph, potential: Option<&GraphFunction>) -> Result<Self> {
        let mut vertex_weights = BTreeMap::new();
        for x in g.vertices() {
            vertex_weights.insert(x, g.omega(x)?);
        }
        Ok(ExplicitGraph {
            vertices: g.vertices().collect(),
            edges: g.edges().map(|(u, v, conductance)| EdgeRecord { u, v, conductance }).collect(),
            vertex_weights,
            potential: potential.map(|p| p.iter().collect()),
            frontier: g.frontier().collect(),
        })
    }
}

pub fn read_graph(path: &Path) -> Result<LoadedGraph> {
    GraphSpec::read(path)?.load()
}
