//! JSON graph files: `{"nodes": n, "edges": [{"u": 0, "v": 1, "w": 1.0}, ...]}`.
//! Edge order in the file defines edge indices.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::WeightedGraph;
use crate::error::{Error, Result};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeRecord {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub nodes: usize,
    pub edges: Vec<EdgeRecord>,
}

impl GraphFile {
    pub fn from_graph<T: Real>(g: &WeightedGraph<T>) -> Self {
        Self {
            nodes: g.node_count(),
            edges: g
                .edges()
                .iter()
                .map(|e| EdgeRecord { u: e.tail, v: e.head, w: e.weight.to_f64().unwrap_or(f64::NAN) })
                .collect(),
        }
    }

    pub fn into_graph<T: Real>(self) -> Result<WeightedGraph<T>> {
        WeightedGraph::new(self.nodes, self.edges.into_iter().map(|e| (e.u, e.v, T::lit(e.w))))
    }
}

pub fn parse_graph<T: Real>(text: &str) -> Result<WeightedGraph<T>> {
    let file: GraphFile = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    file.into_graph()
}

pub fn to_json_string<T: Real>(g: &WeightedGraph<T>) -> String {
    serde_json::to_string_pretty(&GraphFile::from_graph(g)).expect("graph file serializes")
}

pub fn read_graph<T: Real>(path: impl AsRef<Path>) -> Result<WeightedGraph<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))?;
    parse_graph(&text)
}

pub fn write_graph<T: Real>(g: &WeightedGraph<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, to_json_string(g) + "\n")
        .map_err(|e| Error::Format(format!("cannot write {}: {e}", path.display())))
}
