use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use super::GraphError;

/// Opaque vertex identifier. Sub-instances keep the ids of their parent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Vertex(pub u32);

/// Accepts numbers and, as JSON object keys arrive, numeric strings.
impl<'de> Deserialize<'de> for Vertex {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct Id;

        impl Visitor<'_> for Id {
            type Value = Vertex;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a vertex id")
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Vertex, E> {
                u32::try_from(v).map(Vertex).map_err(|_| E::custom(format!("vertex id {v} out of range")))
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Vertex, E> {
                u64::try_from(v)
                    .map_err(|_| E::custom(format!("negative vertex id {v}")))
                    .and_then(|v| self.visit_u64(v))
            }

            fn visit_str<E: de::Error>(self, v: &str) -> Result<Vertex, E> {
                v.parse().map(Vertex).map_err(|_| E::custom(format!("bad vertex id {v:?}")))
            }
        }

        d.deserialize_any(Id)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl From<u32> for Vertex {
    fn from(id: u32) -> Self {
        Vertex(id)
    }
}

/// A connected simple graph with a combinatorial embedding.
///
/// Rotations list the neighbours of each vertex counterclockwise. A face is
/// traced by following a dart `u -> v` with `v -> w`, where `w` is the
/// neighbour immediately before `u` in the rotation at `v`; interior faces
/// then come out counterclockwise and the designated outer face clockwise.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "super::io::GraphJson", into = "super::io::GraphJson")]
pub struct EmbeddedGraph {
    rotations: BTreeMap<Vertex, Vec<Vertex>>,
    outer: Vec<Vertex>,
    faces: Vec<Vec<Vertex>>,
    edge_count: usize,
}

impl EmbeddedGraph {
    /// Validates a rotation system and designated outer face.
    ///
    /// The outer face must equal one of the traced faces as a cyclic
    /// sequence; its first entry is the anchor of the boundary enumeration.
    pub fn new(rotations: BTreeMap<Vertex, Vec<Vertex>>, outer: Vec<Vertex>) -> Result<Self, GraphError> {
        let mut degree_sum = 0usize;
        for (&v, rot) in &rotations {
            let mut seen = BTreeSet::new();
            for &w in rot {
                if w == v {
                    return Err(GraphError::LoopEdge(v));
                }
                if !rotations.contains_key(&w) {
                    return Err(GraphError::UnknownVertex { vertex: w, referenced_by: v });
                }
                if !seen.insert(w) {
                    return Err(GraphError::DuplicateNeighbour { vertex: v, neighbour: w });
                }
                if !rotations[&w].contains(&v) {
                    return Err(GraphError::AsymmetricEdge { from: v, to: w });
                }
            }
            degree_sum += rot.len();
        }
        if degree_sum == 0 {
            return Err(GraphError::NoEdges);
        }
        let edge_count = degree_sum / 2;

        let start = *rotations.keys().next().expect("nonempty");
        let mut reached = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &rotations[&v] {
                if reached.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        if reached.len() != rotations.len() {
            return Err(GraphError::DisconnectedGraph);
        }

        let faces = trace_faces(&rotations);
        let (v, e, f) = (rotations.len() as i64, edge_count as i64, faces.len() as i64);
        if v - e + f != 2 {
            return Err(GraphError::EulerViolation { vertices: v, edges: e, faces: f });
        }

        let mut g = EmbeddedGraph { rotations, outer: Vec::new(), faces, edge_count };
        g.set_outer(outer)?;
        Ok(g)
    }

    /// Builds a graph from its full list of traced faces. Every edge must
    /// appear once in each direction across the faces. `outer` indexes the
    /// face that becomes the outer face.
    pub fn from_faces(faces: &[Vec<Vertex>], outer: usize) -> Result<Self, GraphError> {
        // At each corner w_i of a face, w_{i+1} directly precedes w_{i-1}.
        let mut succ: BTreeMap<Vertex, BTreeMap<Vertex, Vertex>> = BTreeMap::new();
        for face in faces {
            let m = face.len();
            if m < 3 {
                return Err(GraphError::BadFaceList(face.clone()));
            }
            for i in 0..m {
                let here = face[i];
                let before = face[(i + m - 1) % m];
                let after = face[(i + 1) % m];
                if succ.entry(here).or_default().insert(after, before).is_some() {
                    return Err(GraphError::BadFaceList(face.clone()));
                }
            }
        }
        let mut rotations = BTreeMap::new();
        for (&v, links) in &succ {
            let first = *links.keys().next().expect("nonempty");
            let mut rot = vec![first];
            let mut cur = first;
            loop {
                let next = *links.get(&cur).ok_or_else(|| GraphError::BadFaceList(vec![v, cur]))?;
                if next == first {
                    break;
                }
                rot.push(next);
                cur = next;
                if rot.len() > links.len() {
                    return Err(GraphError::BadFaceList(vec![v]));
                }
            }
            if rot.len() != links.len() {
                // corners around v do not close up into a single wheel
                return Err(GraphError::BadFaceList(vec![v]));
            }
            rotations.insert(v, rot);
        }
        let outer_face = faces.get(outer).ok_or(GraphError::BadFaceList(Vec::new()))?.clone();
        EmbeddedGraph::new(rotations, outer_face)
    }

    /// Returns a copy with a different designated outer face.
    pub fn with_outer(&self, outer: Vec<Vertex>) -> Result<Self, GraphError> {
        let mut g = self.clone();
        g.set_outer(outer)?;
        Ok(g)
    }

    fn set_outer(&mut self, outer: Vec<Vertex>) -> Result<(), GraphError> {
        if !self.faces.iter().any(|f| same_cycle(f, &outer)) {
            return Err(GraphError::OuterFaceNotAFace(outer));
        }
        self.outer = outer;
        Ok(())
    }

    pub fn vertex_count(&self) -> usize {
        self.rotations.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.rotations.keys().copied()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.rotations.contains_key(&v)
    }

    pub fn rotations(&self) -> &BTreeMap<Vertex, Vec<Vertex>> {
        &self.rotations
    }

    /// Counterclockwise neighbours of `v`. Panics if `v` is not a vertex.
    pub fn rotation(&self, v: Vertex) -> &[Vertex] {
        &self.rotations[&v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.rotations[&v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.rotations.get(&u).is_some_and(|r| r.contains(&v))
    }

    /// Edges as ordered pairs `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::with_capacity(self.edge_count);
        for (&u, rot) in &self.rotations {
            for &v in rot {
                if u < v {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// All traced faces, each in trace order.
    pub fn faces(&self) -> &[Vec<Vertex>] {
        &self.faces
    }

    /// The designated outer face, starting at its anchor vertex.
    pub fn outer_face(&self) -> &[Vertex] {
        &self.outer
    }

    /// Faces other than the designated outer one.
    pub fn inner_faces(&self) -> impl Iterator<Item = &Vec<Vertex>> + '_ {
        let mut skipped = false;
        self.faces.iter().filter(move |f| {
            if !skipped && same_cycle(f, &self.outer) {
                skipped = true;
                false
            } else {
                true
            }
        })
    }

    /// Neighbour following `u` counterclockwise around `v`.
    pub fn next_around(&self, v: Vertex, u: Vertex) -> Vertex {
        let rot = &self.rotations[&v];
        let i = rot.iter().position(|&w| w == u).expect("not a neighbour");
        rot[(i + 1) % rot.len()]
    }

    /// Neighbour preceding `u` counterclockwise around `v`.
    pub fn prev_around(&self, v: Vertex, u: Vertex) -> Vertex {
        let rot = &self.rotations[&v];
        let i = rot.iter().position(|&w| w == u).expect("not a neighbour");
        rot[(i + rot.len() - 1) % rot.len()]
    }

    /// Subgraph induced by `keep`, with rotations restricted in place.
    pub fn induced(&self, keep: &BTreeSet<Vertex>, outer: Vec<Vertex>) -> Result<Self, GraphError> {
        let rotations = keep
            .iter()
            .map(|&v| {
                let rot = self.rotations[&v].iter().copied().filter(|w| keep.contains(w)).collect();
                (v, rot)
            })
            .collect();
        EmbeddedGraph::new(rotations, outer)
    }

    /// Mirror image: every rotation reversed, outer face traced backwards
    /// from the same anchor.
    pub fn mirrored(&self) -> Self {
        let rotations = self.rotations.iter().map(|(&v, rot)| (v, rot.iter().rev().copied().collect())).collect();
        let mut outer = self.outer.clone();
        outer[1..].reverse();
        EmbeddedGraph::new(rotations, outer).expect("mirror of a valid embedding is valid")
    }

    /// Renames vertices through `map`, which must be injective on the vertex set.
    pub fn relabelled(&self, map: &BTreeMap<Vertex, Vertex>) -> Result<Self, GraphError> {
        let rotations = self
            .rotations
            .iter()
            .map(|(v, rot)| (map[v], rot.iter().map(|w| map[w]).collect()))
            .collect::<BTreeMap<_, _>>();
        if rotations.len() != self.rotations.len() {
            return Err(GraphError::BadFaceList(Vec::new()));
        }
        EmbeddedGraph::new(rotations, self.outer.iter().map(|v| map[v]).collect())
    }

    /// Inserts the edge `a`-`b` into the face corner where `a` is followed by
    /// `a_next` and `b` by `b_next` along a traced face.
    pub(crate) fn insert_edge_in_face(
        &self,
        a: Vertex,
        a_next: Vertex,
        b: Vertex,
        b_next: Vertex,
    ) -> Result<Self, GraphError> {
        let mut rotations = self.rotations.clone();
        for (x, x_next, y) in [(a, a_next, b), (b, b_next, a)] {
            let rot = rotations.get_mut(&x).expect("vertex");
            let i = rot.iter().position(|&w| w == x_next).expect("neighbour");
            rot.insert(i + 1, y);
        }
        let outer = self.outer.clone();
        match EmbeddedGraph::new(rotations.clone(), outer) {
            Ok(g) => Ok(g),
            // the outer face itself was split; keep the half holding the anchor's first dart
            Err(GraphError::OuterFaceNotAFace(_)) => {
                let faces = trace_faces(&rotations);
                let (o0, o1) = (self.outer[0], self.outer[1 % self.outer.len()]);
                let face = faces
                    .into_iter()
                    .find_map(|f| {
                        let m = f.len();
                        (0..m).find(|&i| f[i] == o0 && f[(i + 1) % m] == o1).map(|i| {
                            let mut f = f;
                            f.rotate_left(i);
                            f
                        })
                    })
                    .expect("anchor dart lies on some face");
                EmbeddedGraph::new(rotations, face)
            }
            Err(e) => Err(e),
        }
    }
}

/// Traces every face of a rotation system, each starting from its smallest
/// dart, in ascending dart order.
pub(crate) fn trace_faces(rotations: &BTreeMap<Vertex, Vec<Vertex>>) -> Vec<Vec<Vertex>> {
    let mut visited: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    let mut faces = Vec::new();
    for (&u, rot) in rotations {
        for &v in rot {
            if visited.contains(&(u, v)) {
                continue;
            }
            let mut face = Vec::new();
            let (mut a, mut b) = (u, v);
            while visited.insert((a, b)) {
                face.push(a);
                let rb = &rotations[&b];
                let i = rb.iter().position(|&w| w == a).expect("symmetric");
                let c = rb[(i + rb.len() - 1) % rb.len()];
                a = b;
                b = c;
            }
            faces.push(face);
        }
    }
    faces
}

/// Whether two vertex sequences are equal up to cyclic rotation.
pub(crate) fn same_cycle(a: &[Vertex], b: &[Vertex]) -> bool {
    if a.len() != b.len() || a.is_empty() {
        return false;
    }
    (0..a.len()).any(|s| (0..a.len()).all(|i| a[(s + i) % a.len()] == b[i]))
}
