//! JSON and DOT forms of embedded graphs.
//!
//! JSON: `{"vertices": [ids], "rotations": {"id": [ids...]}, "outer": [ids]}`
//! with counterclockwise rotations and the outer face in trace order.

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use super::{EmbeddedGraph, GraphError, NearTriangulation, Vertex};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub vertices: Vec<Vertex>,
    pub rotations: BTreeMap<Vertex, Vec<Vertex>>,
    pub outer: Vec<Vertex>,
}

impl TryFrom<GraphJson> for EmbeddedGraph {
    type Error = GraphError;

    fn try_from(j: GraphJson) -> Result<Self, GraphError> {
        let mut listed = j.vertices.clone();
        listed.sort();
        listed.dedup();
        if listed.len() != j.vertices.len() || !listed.iter().eq(j.rotations.keys()) {
            return Err(GraphError::VertexListMismatch);
        }
        EmbeddedGraph::new(j.rotations, j.outer)
    }
}

impl From<EmbeddedGraph> for GraphJson {
    fn from(g: EmbeddedGraph) -> Self {
        GraphJson { vertices: g.vertices().collect(), rotations: g.rotations().clone(), outer: g.outer_face().to_vec() }
    }
}

pub fn parse_graph(text: &str) -> Result<EmbeddedGraph, String> {
    let j: GraphJson = serde_json::from_str(text).map_err(|e| e.to_string())?;
    EmbeddedGraph::try_from(j).map_err(|e| e.to_string())
}

pub fn graph_to_json(g: &EmbeddedGraph) -> String {
    serde_json::to_string(&GraphJson::from(g.clone())).expect("plain data")
}

/// Undirected DOT rendering; outer-cycle edges are drawn bold.
pub fn to_dot(g: &EmbeddedGraph, name: &str) -> String {
    let outer = g.outer_face();
    let on_outer = |a: Vertex, b: Vertex| {
        let m = outer.len();
        (0..m).any(|i| {
            let (x, y) = (outer[i], outer[(i + 1) % m]);
            (x, y) == (a, b) || (y, x) == (a, b)
        })
    };
    let mut out = String::new();
    let _ = writeln!(out, "graph \"{name}\" {{");
    for v in g.vertices() {
        let _ = writeln!(out, "  {v};");
    }
    for (a, b) in g.edges() {
        if on_outer(a, b) {
            let _ = writeln!(out, "  {a} -- {b} [style=bold];");
        } else {
            let _ = writeln!(out, "  {a} -- {b};");
        }
    }
    out.push_str("}\n");
    out
}

pub fn near_to_dot(nt: &NearTriangulation, name: &str) -> String {
    to_dot(nt.graph(), name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let text = r#"{"vertices":[1,2,3],"rotations":{"1":[2,3],"2":[3,1],"3":[1,2]},"outer":[1,2,3]}"#;
        let g = parse_graph(text).unwrap();
        assert_eq!(g.edge_count(), 3);
        assert_eq!(graph_to_json(&g), text);
        let nt: NearTriangulation = serde_json::from_str(text).unwrap();
        assert_eq!(nt.k(), 3);
    }

    #[test]
    fn vertex_list_must_match() {
        let text = r#"{"vertices":[1,2],"rotations":{"1":[2,3],"2":[3,1],"3":[1,2]},"outer":[1,2,3]}"#;
        assert!(parse_graph(text).unwrap_err().contains("vertex list"));
    }

    #[test]
    fn dot_lists_every_edge() {
        let text = r#"{"vertices":[1,2,3],"rotations":{"1":[2,3],"2":[3,1],"3":[1,2]},"outer":[1,2,3]}"#;
        let dot = to_dot(&parse_graph(text).unwrap(), "t");
        assert!(dot.starts_with("graph \"t\" {"));
        assert_eq!(dot.matches(" -- ").count(), 3);
    }
}
