use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, NearTriangulation, Vertex};
use crate::lists::{Color, ColorList, ListAssignment};

/// One descent of the recursion, enough to rebuild the child instance from
/// its parent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum Step {
    /// Into the part bounded by `v1 .. vj vk`.
    ChordFirst { j: usize },
    /// Into the part bounded by `vk vj .. vk-1`, with `vk`, `vj` fixed to the
    /// colours found in the first part.
    ChordSecond { j: usize, alpha: Color, beta: Color },
    /// `vk` has no inner neighbour; into `G - vk`.
    ChordlessFan,
    /// Outer triangle; into `G - vk` with `x` held back for `vk`.
    TriangulationFan { x: Color },
    /// `k > 3`; into `G - vk` with `x` held back for `vk`.
    ProperFan { x: Color },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FailureReason {
    /// Every admissible reserved colour came back as the colour of `vk-1`.
    NeighbourhoodConditionBroken { vk: Vertex, vk_minus_1: Vertex, tried: Vec<Color> },
    /// A part required `required` in the list of its third boundary vertex.
    ExclusionUnsatisfiable { vertex: Vertex, required: Color },
    /// No colour left for `vertex` (only reachable with malformed lists).
    ListExhausted { vertex: Vertex },
}

impl FailureReason {
    pub fn label(&self) -> &'static str {
        match self {
            FailureReason::NeighbourhoodConditionBroken { .. } => "neighbourhood_condition_broken",
            FailureReason::ExclusionUnsatisfiable { .. } => "exclusion_unsatisfiable",
            FailureReason::ListExhausted { .. } => "list_exhausted",
        }
    }
}

/// Instance at a recursion node: the graph and its lists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessInstance {
    pub graph: NearTriangulation,
    pub lists: ListAssignment,
}

/// Where the recursion could not continue.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    pub instance: WitnessInstance,
    pub stack: Vec<Step>,
    pub reason: FailureReason,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseLabel {
    Base,
    Chord,
    ChordlessFan,
    TriangulationFan,
    ProperFan,
}

/// One line of the optional JSON-lines trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TraceRecord {
    pub case: CaseLabel,
    pub k: usize,
    pub n: usize,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub chord_j: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub x: Option<Color>,
    pub node_id: u64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub parent_id: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReplayError {
    #[error("step {index} ({step:?}) does not apply: {source}")]
    Graph { index: usize, step: Step, source: GraphError },
    #[error("step {index} ({step:?}) does not match the instance's case")]
    WrongCase { index: usize, step: Step },
}

/// Rebuilds the sub-instance reached by `steps`, using the graph
/// decompositions directly.
pub fn replay(
    root: &NearTriangulation,
    lists: &ListAssignment,
    steps: &[Step],
) -> Result<WitnessInstance, ReplayError> {
    let mut g = root.clone();
    let mut l: BTreeMap<Vertex, ColorList> = lists.lists().clone();
    for (index, step) in steps.iter().enumerate() {
        let graph_err = |source| ReplayError::Graph { index, step: step.clone(), source };
        match *step {
            Step::ChordFirst { j } => {
                if g.find_chord_at() != Some(j) {
                    return Err(ReplayError::WrongCase { index, step: step.clone() });
                }
                g = g.split_on_chord(j).map_err(graph_err)?.g1;
            }
            Step::ChordSecond { j, alpha, beta } => {
                if g.find_chord_at() != Some(j) {
                    return Err(ReplayError::WrongCase { index, step: step.clone() });
                }
                let (vk, vj) = (g.outer().v(g.k()), g.outer().v(j));
                g = g.split_on_chord(j).map_err(graph_err)?.g2;
                l.insert(vk, ColorList::singleton(alpha));
                l.insert(vj, ColorList::singleton(beta));
            }
            Step::ChordlessFan | Step::TriangulationFan { .. } | Step::ProperFan { .. } => {
                if g.find_chord_at().is_some() {
                    return Err(ReplayError::WrongCase { index, step: step.clone() });
                }
                let fan = g.fan_at_last().map_err(graph_err)?;
                let expected = match (fan.u.is_empty(), g.k() == 3) {
                    (true, _) => matches!(step, Step::ChordlessFan),
                    (false, true) => matches!(step, Step::TriangulationFan { .. }),
                    (false, false) => matches!(step, Step::ProperFan { .. }),
                };
                if !expected {
                    return Err(ReplayError::WrongCase { index, step: step.clone() });
                }
                if let Step::TriangulationFan { x } | Step::ProperFan { x } = *step {
                    for u in &fan.u {
                        let cur = l[u];
                        l.insert(*u, cur.without(x));
                    }
                }
                g = fan.reduced;
            }
        }
        l.retain(|v, _| g.graph().contains(*v));
    }
    let mut out = ListAssignment::new(l);
    out.v3_exclusion = lists.v3_exclusion;
    Ok(WitnessInstance { graph: g, lists: out })
}
