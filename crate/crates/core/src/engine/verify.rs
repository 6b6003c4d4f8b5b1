use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EmbeddedGraph, NearTriangulation, Vertex};
use crate::lists::{Color, ColorList, Colouring, ListAssignment};

#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "snake_case")]
pub enum ColouringViolation {
    #[error("vertex {vertex} has no colour")]
    MissingColour { vertex: Vertex },
    #[error("edge {u}-{v} has both ends coloured {colour}")]
    ImproperEdge { u: Vertex, v: Vertex, colour: Color },
    #[error("vertex {vertex} coloured {colour}, not in its list {list}")]
    NotInList { vertex: Vertex, colour: Color, list: ColorList },
    #[error("vertex {vertex} is coloured but not in the graph")]
    UnknownVertex { vertex: Vertex },
}

/// Totality and properness on `g`.
pub fn verify_proper(g: &EmbeddedGraph, c: &Colouring) -> Result<(), ColouringViolation> {
    for v in g.vertices() {
        if c.get(v).is_none() {
            return Err(ColouringViolation::MissingColour { vertex: v });
        }
    }
    if let Some(&vertex) = c.colors.keys().find(|v| !g.contains(**v)) {
        return Err(ColouringViolation::UnknownVertex { vertex });
    }
    for (u, v) in g.edges() {
        let cu = c.colors[&u];
        if cu == c.colors[&v] {
            return Err(ColouringViolation::ImproperEdge { u, v, colour: cu });
        }
    }
    Ok(())
}

/// Totality, properness, then list membership, reporting the first failure.
pub fn verify_colouring(nt: &NearTriangulation, a: &ListAssignment, c: &Colouring) -> Result<(), ColouringViolation> {
    verify_proper(nt.graph(), c)?;
    for v in nt.graph().vertices() {
        let colour = c.colors[&v];
        let list = a.get(v).unwrap_or(ColorList::EMPTY);
        if !list.contains(colour) {
            return Err(ColouringViolation::NotInList { vertex: v, colour, list });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::near::tests::nt;

    fn col(pairs: &[(u32, u8)]) -> Colouring {
        Colouring { colors: pairs.iter().map(|&(v, c)| (Vertex(v), Color(c))).collect() }
    }

    fn lists() -> ListAssignment {
        serde_json::from_str(r#"{"1":[1],"2":[2],"3":[1,2,3]}"#).unwrap()
    }

    #[test]
    fn valid_triangle() {
        let t = nt(&[&[1, 2, 3], &[1, 3, 2]]);
        assert_eq!(verify_colouring(&t, &lists(), &col(&[(1, 1), (2, 2), (3, 3)])), Ok(()));
    }

    #[test]
    fn improper_edge_reported() {
        let t = nt(&[&[1, 2, 3], &[1, 3, 2]]);
        assert_eq!(
            verify_colouring(&t, &lists(), &col(&[(1, 1), (2, 1), (3, 3)])),
            Err(ColouringViolation::ImproperEdge { u: Vertex(1), v: Vertex(2), colour: Color(1) })
        );
    }

    #[test]
    fn list_and_totality() {
        let t = nt(&[&[1, 2, 3], &[1, 3, 2]]);
        assert!(matches!(
            verify_colouring(&t, &lists(), &col(&[(1, 1), (2, 2), (3, 4)])),
            Err(ColouringViolation::NotInList { vertex: Vertex(3), .. })
        ));
        assert_eq!(
            verify_colouring(&t, &lists(), &col(&[(1, 1), (2, 2)])),
            Err(ColouringViolation::MissingColour { vertex: Vertex(3) })
        );
    }
}
