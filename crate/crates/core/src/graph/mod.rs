//! Embedded planar graphs, near-triangulations and the two structural
//! decompositions used by the colouring recursion.

mod complete;
pub(crate) mod embedded;
pub mod io;
pub(crate) mod near;

use thiserror::Error;

pub use complete::{complete_to_triangulation, Completion, Triangulation};
pub use embedded::{EmbeddedGraph, Vertex};
pub use near::{ChordSplit, Fan, NearTriangulation, OuterCycle};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("vertex {vertex} referenced by {referenced_by} is not in the graph")]
    UnknownVertex { vertex: Vertex, referenced_by: Vertex },
    #[error("loop at vertex {0}")]
    LoopEdge(Vertex),
    #[error("vertex {vertex} lists neighbour {neighbour} more than once")]
    DuplicateNeighbour { vertex: Vertex, neighbour: Vertex },
    #[error("edge {from}-{to} is missing its reverse")]
    AsymmetricEdge { from: Vertex, to: Vertex },
    #[error("graph is not connected")]
    DisconnectedGraph,
    #[error("graph has no edges")]
    NoEdges,
    #[error("V - E + F = {vertices} - {edges} + {faces} != 2")]
    EulerViolation { vertices: i64, edges: i64, faces: i64 },
    #[error("outer face {0:?} is not a traced face")]
    OuterFaceNotAFace(Vec<Vertex>),
    #[error("inner face {0:?} is not a triangle")]
    NonTriangularInnerFace(Vec<Vertex>),
    #[error("outer boundary {0:?} is not a cycle of length >= 3")]
    OuterNotACycle(Vec<Vertex>),
    #[error("{a}-{b} is not a chord of the outer cycle")]
    NotAChord { a: Vertex, b: Vertex },
    #[error("outer cycle has a chord at v_k (j = {j})")]
    ChordPresentAtVk { j: usize },
    #[error("need at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("vertex list does not match rotation keys")]
    VertexListMismatch,
    #[error("inconsistent face list near {0:?}")]
    BadFaceList(Vec<Vertex>),
}
