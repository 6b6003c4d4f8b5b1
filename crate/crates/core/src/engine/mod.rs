//! The four-colour list recursion, the plain four-colouring wrapper, the
//! five-choosability baseline and colouring verification.

mod theorem2;
mod thomassen;
mod verify;
mod witness;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{complete_to_triangulation, EmbeddedGraph, GraphError, NearTriangulation, Vertex};
use crate::lists::{Color, ColorList, Colouring, ListAssignment};
use crate::oracle;

pub use theorem2::{colour_theorem2, plan_sizes, Theorem2Engine, Theorem2Outcome};
pub use thomassen::{thomassen_five, ThomassenError};
pub use verify::{verify_colouring, verify_proper, ColouringViolation};
pub use witness::{replay, CaseLabel, FailureReason, FailureWitness, ReplayError, Step, TraceRecord, WitnessInstance};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EngineOptions {
    /// Complete with the oracle when the recursion stops with a witness.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FourColourError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("recursion stopped: {}", .0.reason.label())]
    Failed(Box<FailureWitness>),
}

/// Rooted instance used to four-colour `g`: a completion of `g` with its
/// smallest face outside, `{1}`, `{2}`, `{1,2,3}` on the outer triangle and
/// `L0` inside.
pub fn four_colour_instance(g: &EmbeddedGraph) -> Result<(NearTriangulation, ListAssignment), GraphError> {
    let completion = complete_to_triangulation(g)?;
    let t = completion.triangulation;
    let mut face = t
        .graph()
        .faces()
        .iter()
        .min_by_key(|f| {
            let mut s = f.to_vec();
            s.sort();
            s
        })
        .expect("a triangulation has faces")
        .clone();
    let p = face.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i).unwrap_or(0);
    face.rotate_left(p);
    let nt = NearTriangulation::validate(t.graph().with_outer(face)?)?;
    let mut lists: std::collections::BTreeMap<Vertex, ColorList> =
        nt.graph().vertices().map(|v| (v, ColorList::L0)).collect();
    let o = nt.outer().vertices();
    lists.insert(o[0], ColorList::singleton(Color(1)));
    lists.insert(o[1], ColorList::singleton(Color(2)));
    lists.insert(o[2], ColorList::from_colors([Color(1), Color(2), Color(3)]));
    Ok((nt, ListAssignment::new(lists)))
}

/// Proper colouring of `g` from `{1,2,3,4}`.
pub fn four_colour(g: &EmbeddedGraph, opts: EngineOptions) -> Result<Colouring, FourColourError> {
    let (nt, lists) = four_colour_instance(g)?;
    let outcome = colour_theorem2(&nt, &lists).expect("wrapper lists are admissible");
    let full = match outcome {
        Theorem2Outcome::Coloured(c) => c,
        Theorem2Outcome::Failed(w) => {
            match opts.fallback.then(|| oracle::first_colouring(nt.graph(), &lists)).flatten() {
                Some(c) => c,
                None => return Err(FourColourError::Failed(w)),
            }
        }
    };
    Ok(Colouring { colors: full.colors.into_iter().filter(|(v, _)| g.contains(*v)).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::near::tests::{nt, wheel};

    fn k4() -> NearTriangulation {
        nt(&[&[1, 2, 3], &[2, 1, 4], &[3, 2, 4], &[1, 3, 4]])
    }

    #[test]
    fn k4_uses_all_four() {
        let c = four_colour(k4().graph(), EngineOptions::default()).unwrap();
        assert_eq!(c.palette(), ColorList::L0);
        assert_eq!(verify_proper(k4().graph(), &c), Ok(()));
    }

    #[test]
    fn path_and_star() {
        let path: std::collections::BTreeMap<Vertex, Vec<Vertex>> = [(1, vec![2]), (2, vec![3, 1]), (3, vec![2])]
            .into_iter()
            .map(|(v, r)| (Vertex(v), r.into_iter().map(Vertex).collect()))
            .collect();
        let g = EmbeddedGraph::new(path, vec![Vertex(1), Vertex(2), Vertex(3), Vertex(2)]).unwrap();
        let c = four_colour(&g, EngineOptions::default()).unwrap();
        assert_eq!(c.len(), 3);
        assert_eq!(verify_proper(&g, &c), Ok(()));
    }

    #[test]
    fn wheels_four_colour() {
        for k in 3..=9 {
            let w = wheel(k);
            let c = four_colour(w.graph(), EngineOptions { fallback: true }).unwrap();
            assert_eq!(verify_proper(w.graph(), &c), Ok(()));
        }
    }
}
