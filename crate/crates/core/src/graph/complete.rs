use std::collections::BTreeMap;

use super::embedded::trace_faces;
use super::{EmbeddedGraph, GraphError, NearTriangulation, Vertex};

/// Plane graph in which every face, the outer one included, is a triangle.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Triangulation {
    graph: EmbeddedGraph,
}

impl Triangulation {
    pub fn new(graph: EmbeddedGraph) -> Result<Self, GraphError> {
        if let Some(f) = graph.faces().iter().find(|f| f.len() != 3) {
            return Err(GraphError::NonTriangularInnerFace(f.clone()));
        }
        Ok(Triangulation { graph })
    }

    pub fn graph(&self) -> &EmbeddedGraph {
        &self.graph
    }

    pub fn n(&self) -> usize {
        self.graph.vertex_count()
    }

    /// View as a near-triangulation bounded by the designated outer triangle.
    pub fn as_near(&self) -> NearTriangulation {
        NearTriangulation::validate(self.graph.clone()).expect("all faces are triangles")
    }

    /// Same triangulation with `face` (in trace order) as the outer face.
    pub fn with_outer(&self, face: Vec<Vertex>) -> Result<Self, GraphError> {
        Ok(Triangulation { graph: self.graph.with_outer(face)? })
    }
}

impl From<Triangulation> for EmbeddedGraph {
    fn from(t: Triangulation) -> Self {
        t.graph
    }
}

#[derive(Clone, Debug)]
pub struct Completion {
    pub triangulation: Triangulation,
    pub added_edges: Vec<(Vertex, Vertex)>,
    /// Extra vertices, only inserted when a face admits no new diagonal.
    pub added_vertices: Vec<Vertex>,
}

/// Adds edges (and, for degenerate faces, vertices) until every face is a
/// triangle. Original edges and rotations are kept.
///
/// Each step picks the first non-triangular face, then the smallest vertex on
/// it that can take a diagonal to a non-adjacent corner of the same face.
pub fn complete_to_triangulation(g: &EmbeddedGraph) -> Result<Completion, GraphError> {
    if g.vertex_count() < 3 {
        return Err(GraphError::TooFewVertices(g.vertex_count()));
    }
    let mut cur = g.clone();
    let mut added_edges = Vec::new();
    let mut added_vertices = Vec::new();
    loop {
        let big: Vec<Vec<Vertex>> = cur.faces().iter().filter(|f| f.len() > 3).cloned().collect();
        if big.is_empty() {
            break;
        }
        let mut progressed = false;
        for face in &big {
            if let Some((i, j)) = pick_diagonal(&cur, face) {
                let m = face.len();
                let (a, b) = (face[i], face[j]);
                cur = cur.insert_edge_in_face(a, face[(i + 1) % m], b, face[(j + 1) % m])?;
                added_edges.push((a.min(b), a.max(b)));
                progressed = true;
                break;
            }
        }
        if progressed {
            continue;
        }
        let face = big
            .iter()
            .find(|f| {
                let mut s = f.to_vec();
                s.sort();
                s.dedup();
                s.len() == f.len()
            })
            .ok_or_else(|| GraphError::BadFaceList(big[0].clone()))?;
        let z = Vertex(cur.vertices().map(|v| v.0).max().unwrap_or(0) + 1);
        cur = insert_vertex_in_face(&cur, face, z)?;
        added_vertices.push(z);
    }
    let n = cur.vertex_count();
    debug_assert_eq!(cur.edge_count(), 3 * n - 6);
    Ok(Completion { triangulation: Triangulation::new(cur)?, added_edges, added_vertices })
}

fn pick_diagonal(g: &EmbeddedGraph, face: &[Vertex]) -> Option<(usize, usize)> {
    let m = face.len();
    let mut apexes: Vec<usize> = (0..m).collect();
    apexes.sort_by_key(|&i| (face[i], i));
    for i in apexes {
        for step in 2..m - 1 {
            let j = (i + step) % m;
            if face[j] != face[i] && !g.has_edge(face[i], face[j]) {
                return Some((i, j));
            }
        }
    }
    None
}

fn insert_vertex_in_face(g: &EmbeddedGraph, face: &[Vertex], z: Vertex) -> Result<EmbeddedGraph, GraphError> {
    let m = face.len();
    let mut rotations: BTreeMap<Vertex, Vec<Vertex>> = g.rotations().clone();
    for i in 0..m {
        let rot = rotations.get_mut(&face[i]).expect("vertex");
        let after = face[(i + 1) % m];
        let p = rot.iter().position(|&w| w == after).expect("neighbour");
        rot.insert(p + 1, z);
    }
    rotations.insert(z, face.to_vec());
    let outer = g.outer_face().to_vec();
    match EmbeddedGraph::new(rotations.clone(), outer.clone()) {
        Err(GraphError::OuterFaceNotAFace(_)) => {
            let faces = trace_faces(&rotations);
            let f = faces
                .into_iter()
                .find_map(|f| {
                    let p = f.iter().position(|&w| w == outer[0])?;
                    (f[(p + 1) % f.len()] == outer[1]).then(|| {
                        let mut f = f;
                        f.rotate_left(p);
                        f
                    })
                })
                .expect("anchor dart survives");
            EmbeddedGraph::new(rotations, f)
        }
        other => other,
    }
}
