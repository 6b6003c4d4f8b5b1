//! The byte form of `planar_code`: a `>>planar_code<<` header, then per graph
//! its order `n` and, for each vertex `1..=n`, its neighbours in clockwise
//! order followed by `0`.

use std::collections::BTreeMap;

use thiserror::Error;

use super::generate::default_outer_face;
use crate::graph::{EmbeddedGraph, GraphError, NearTriangulation, Vertex};

pub const HEADER: &[u8] = b">>planar_code<<";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PlantriError {
    #[error("missing >>planar_code<< header")]
    BadHeader,
    #[error("record {record} ends early")]
    TruncatedRecord { record: usize },
    #[error("record {record}: {reason}")]
    InvalidRotation { record: usize, reason: String },
    #[error("record {record}: {source}")]
    Graph { record: usize, source: GraphError },
}

/// Parses every record of a `planar_code` byte stream. Rotations are turned
/// counterclockwise; the outer face is the only non-triangular face if there
/// is exactly one, otherwise the face with the smallest vertex set.
pub fn parse_planar_code(bytes: &[u8]) -> Result<Vec<NearTriangulation>, PlantriError> {
    let body = bytes.strip_prefix(HEADER).ok_or(PlantriError::BadHeader)?;
    let mut out = Vec::new();
    let mut i = 0;
    while i < body.len() {
        let record = out.len();
        let n = body[i] as usize;
        i += 1;
        if n == 0 {
            return Err(PlantriError::InvalidRotation { record, reason: "two-byte entries are not supported".into() });
        }
        let mut rotations = BTreeMap::new();
        for v in 1..=n {
            let mut rot = Vec::new();
            loop {
                let &w = body.get(i).ok_or(PlantriError::TruncatedRecord { record })?;
                i += 1;
                if w == 0 {
                    break;
                }
                if w as usize > n {
                    return Err(PlantriError::InvalidRotation {
                        record,
                        reason: format!("vertex {v} lists {w} > n = {n}"),
                    });
                }
                rot.push(Vertex(w as u32));
            }
            rot.reverse();
            rotations.insert(Vertex(v as u32), rot);
        }
        out.push(build(rotations).map_err(|source| PlantriError::Graph { record, source })?);
    }
    Ok(out)
}

fn build(rotations: BTreeMap<Vertex, Vec<Vertex>>) -> Result<NearTriangulation, GraphError> {
    let faces = crate::graph::embedded::trace_faces(&rotations);
    let big: Vec<&Vec<Vertex>> = faces.iter().filter(|f| f.len() != 3).collect();
    let outer = match big.as_slice() {
        [only] => (*only).clone(),
        _ => default_outer_face(&faces),
    };
    NearTriangulation::validate(EmbeddedGraph::new(rotations, outer)?)
}

/// Encodes graphs on vertices `1..=n` (`n < 256`), rotations clockwise.
pub fn write_planar_code<'a>(graphs: impl IntoIterator<Item = &'a EmbeddedGraph>) -> Vec<u8> {
    let mut out = HEADER.to_vec();
    for g in graphs {
        let ids: Vec<Vertex> = g.vertices().collect();
        let idx: BTreeMap<Vertex, u8> = ids.iter().enumerate().map(|(i, &v)| (v, i as u8 + 1)).collect();
        out.push(ids.len() as u8);
        for &v in &ids {
            out.extend(g.rotation(v).iter().rev().map(|w| idx[w]));
            out.push(0);
        }
    }
    out
}
