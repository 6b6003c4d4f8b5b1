//! The list-colouring recursion for near-triangulations with sublists of `L0`.
//!
//! A [`Theorem2Engine`] decomposes its instance once (the decomposition
//! depends only on the graph and its rooting) and then colours any number of
//! list assignments against that plan. Recursion runs on an explicit stack.

use std::collections::BTreeMap;

use crate::graph::{NearTriangulation, Vertex};
use crate::lists::{check_admissible, Color, ColorList, Colouring, ListAssignment, ListError};

use super::witness::{CaseLabel, FailureReason, FailureWitness, Step, TraceRecord, WitnessInstance};

#[derive(Clone, Debug)]
struct PlanNode {
    nt: NearTriangulation,
    /// Outer cycle, dense indices, `v1` first.
    outer: Vec<usize>,
    vertices: Vec<usize>,
    kind: NodeKind,
}

#[derive(Clone, Debug)]
enum NodeKind {
    Base,
    Chord { j: usize, first: usize, second: usize },
    Fan { u: Vec<usize>, child: usize },
}

impl PlanNode {
    fn case(&self) -> CaseLabel {
        match &self.kind {
            NodeKind::Base => CaseLabel::Base,
            NodeKind::Chord { .. } => CaseLabel::Chord,
            NodeKind::Fan { u, .. } if u.is_empty() => CaseLabel::ChordlessFan,
            NodeKind::Fan { .. } if self.outer.len() == 3 => CaseLabel::TriangulationFan,
            NodeKind::Fan { .. } => CaseLabel::ProperFan,
        }
    }
}

/// Result of one run: a colouring, or the node where the recursion stopped.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Theorem2Outcome {
    Coloured(Colouring),
    Failed(Box<FailureWitness>),
}

impl Theorem2Outcome {
    pub fn colouring(&self) -> Option<&Colouring> {
        match self {
            Theorem2Outcome::Coloured(c) => Some(c),
            Theorem2Outcome::Failed(_) => None,
        }
    }

    pub fn witness(&self) -> Option<&FailureWitness> {
        match self {
            Theorem2Outcome::Coloured(_) => None,
            Theorem2Outcome::Failed(w) => Some(w),
        }
    }
}

/// Decomposition plan for one rooted near-triangulation.
#[derive(Clone, Debug)]
pub struct Theorem2Engine {
    ids: Vec<Vertex>,
    nodes: Vec<PlanNode>,
}

enum Flow {
    Enter { node: usize, lists: Vec<ColorList> },
    Return(Result<Vec<u8>, Box<FailureWitness>>),
}

#[allow(clippy::enum_variant_names)]
enum Pending {
    AfterFirst { node: usize, lists: Vec<ColorList> },
    AfterSecond { first: Vec<u8> },
    AfterChordless { node: usize, lists: Vec<ColorList> },
    AfterReserved { node: usize, lists: Vec<ColorList>, x: Color, tried: Vec<Color>, rest: Vec<Color> },
}

struct Frame {
    node_id: u64,
    pending: Pending,
}

struct Run<'a> {
    engine: &'a Theorem2Engine,
    exclusion: bool,
    frames: Vec<Frame>,
    path: Vec<Step>,
    trace: Option<Vec<TraceRecord>>,
    next_id: u64,
}

impl Theorem2Engine {
    pub fn new(nt: &NearTriangulation) -> Self {
        let ids: Vec<Vertex> = nt.graph().vertices().collect();
        let index: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut nodes: Vec<PlanNode> = Vec::new();
        let mut todo = vec![(0usize, nt.clone())];
        nodes.push(PlanNode { nt: nt.clone(), outer: Vec::new(), vertices: Vec::new(), kind: NodeKind::Base });
        while let Some((slot, g)) = todo.pop() {
            let kind = if g.n() == 3 {
                NodeKind::Base
            } else if let Some(j) = g.find_chord_at() {
                let split = g.split_on_chord(j).expect("chord found on a valid near-triangulation");
                let (first, second) = (nodes.len(), nodes.len() + 1);
                for (i, part) in [(first, split.g1), (second, split.g2)] {
                    nodes.push(PlanNode {
                        nt: part.clone(),
                        outer: Vec::new(),
                        vertices: Vec::new(),
                        kind: NodeKind::Base,
                    });
                    todo.push((i, part));
                }
                NodeKind::Chord { j, first, second }
            } else {
                let fan = g.fan_at_last().expect("no chord at vk");
                let child = nodes.len();
                nodes.push(PlanNode {
                    nt: fan.reduced.clone(),
                    outer: Vec::new(),
                    vertices: Vec::new(),
                    kind: NodeKind::Base,
                });
                todo.push((child, fan.reduced));
                NodeKind::Fan { u: fan.u.iter().map(|v| index[v]).collect(), child }
            };
            let node = &mut nodes[slot];
            node.outer = g.outer().vertices().iter().map(|v| index[v]).collect();
            node.vertices = g.graph().vertices().map(|v| index[&v]).collect();
            node.kind = kind;
        }
        Theorem2Engine { ids, nodes }
    }

    pub fn instance(&self) -> &NearTriangulation {
        &self.nodes[0].nt
    }

    /// Number of vertices of the root instance.
    pub fn n(&self) -> usize {
        self.ids.len()
    }

    /// Dense index of each outer vertex, `v1` first.
    pub fn outer_indices(&self) -> &[usize] {
        &self.nodes[0].outer
    }

    /// Lists indexed densely (vertex order) from an assignment.
    pub fn dense_lists(&self, a: &ListAssignment) -> Result<Vec<ColorList>, ListError> {
        self.ids.iter().map(|&v| a.get(v).ok_or(ListError::MissingVertexList(v))).collect()
    }

    /// Dense lists with the given outer lists and `L0` everywhere else.
    pub fn dense_from_outer(&self, outer_lists: &[ColorList]) -> Vec<ColorList> {
        let mut lists = vec![ColorList::L0; self.ids.len()];
        for (&i, &l) in self.nodes[0].outer.iter().zip(outer_lists) {
            lists[i] = l;
        }
        lists
    }

    pub fn colouring_from_dense(&self, colours: &[u8]) -> Colouring {
        Colouring {
            colors: self.ids.iter().zip(colours).filter(|(_, &c)| c != 0).map(|(&v, &c)| (v, Color(c))).collect(),
        }
    }

    /// Checks admissibility, then runs the recursion.
    pub fn colour(&self, a: &ListAssignment) -> Result<Theorem2Outcome, ListError> {
        check_admissible(self.instance(), a)?;
        let lists = self.dense_lists(a)?;
        Ok(match self.run_dense(lists, a.v3_exclusion, None) {
            Ok(c) => Theorem2Outcome::Coloured(self.colouring_from_dense(&c)),
            Err(w) => Theorem2Outcome::Failed(w),
        })
    }

    /// As [`colour`](Self::colour), also returning the per-node trace.
    pub fn colour_traced(&self, a: &ListAssignment) -> Result<(Theorem2Outcome, Vec<TraceRecord>), ListError> {
        check_admissible(self.instance(), a)?;
        let lists = self.dense_lists(a)?;
        let mut trace = Vec::new();
        let out = match self.run_dense(lists, a.v3_exclusion, Some(&mut trace)) {
            Ok(c) => Theorem2Outcome::Coloured(self.colouring_from_dense(&c)),
            Err(w) => Theorem2Outcome::Failed(w),
        };
        Ok((out, trace))
    }

    /// Runs on dense lists without the admissibility check. Colours come back
    /// densely, `0` for none.
    pub fn run_dense(
        &self,
        lists: Vec<ColorList>,
        exclusion: bool,
        trace: Option<&mut Vec<TraceRecord>>,
    ) -> Result<Vec<u8>, Box<FailureWitness>> {
        let mut run = Run {
            engine: self,
            exclusion,
            frames: Vec::new(),
            path: Vec::new(),
            trace: trace.as_ref().map(|_| Vec::new()),
            next_id: 0,
        };
        let result = run.drive(lists);
        if let (Some(out), Some(records)) = (trace, run.trace) {
            *out = records;
        }
        result
    }

    fn witness(
        &self,
        node: usize,
        lists: &[ColorList],
        exclusion: bool,
        path: &[Step],
        reason: FailureReason,
    ) -> Box<FailureWitness> {
        let n = &self.nodes[node];
        let map = n.vertices.iter().map(|&i| (self.ids[i], lists[i])).collect();
        let mut la = ListAssignment::new(map);
        la.v3_exclusion = exclusion;
        Box::new(FailureWitness {
            instance: WitnessInstance { graph: n.nt.clone(), lists: la },
            stack: path.to_vec(),
            reason,
        })
    }
}

impl Run<'_> {
    fn drive(&mut self, lists: Vec<ColorList>) -> Result<Vec<u8>, Box<FailureWitness>> {
        let mut flow = Flow::Enter { node: 0, lists };
        loop {
            flow = match flow {
                Flow::Enter { node, lists } => self.enter(node, lists),
                Flow::Return(Err(w)) => return Err(w),
                Flow::Return(Ok(colours)) => match self.frames.pop() {
                    None => return Ok(colours),
                    Some(frame) => {
                        self.path.pop();
                        self.resume(frame, colours)
                    }
                },
            };
        }
    }

    fn fail(&self, node: usize, lists: &[ColorList], reason: FailureReason) -> Flow {
        Flow::Return(Err(self.engine.witness(node, lists, self.exclusion, &self.path, reason)))
    }

    fn descend(&mut self, node_id: u64, pending: Pending, step: Step, child: usize, lists: Vec<ColorList>) -> Flow {
        self.frames.push(Frame { node_id, pending });
        self.path.push(step);
        Flow::Enter { node: child, lists }
    }

    fn record(&mut self, node: usize, chord_j: Option<usize>, x: Option<Color>) -> u64 {
        let id = self.next_id;
        self.next_id += 1;
        if let Some(trace) = self.trace.as_mut() {
            let p = &self.engine.nodes[node];
            trace.push(TraceRecord {
                case: p.case(),
                k: p.outer.len(),
                n: p.vertices.len(),
                chord_j,
                x,
                node_id: id,
                parent_id: self.frames.last().map(|f| f.node_id),
            });
        }
        id
    }

    fn enter(&mut self, node: usize, lists: Vec<ColorList>) -> Flow {
        let engine = self.engine;
        let p = &engine.nodes[node];
        let outer = &p.outer;
        let k = outer.len();
        let alpha = lists[outer[0]].min().expect("v1 has a 1-list");
        let beta = lists[outer[1]].min().expect("v2 has a 1-list");
        match &p.kind {
            NodeKind::Base => {
                self.record(node, None, None);
                let v3 = outer[2];
                let Some(c) = lists[v3].without(alpha).without(beta).min() else {
                    return self.fail(node, &lists, FailureReason::ListExhausted { vertex: engine.ids[v3] });
                };
                let mut colours = vec![0u8; engine.ids.len()];
                colours[outer[0]] = alpha.0;
                colours[outer[1]] = beta.0;
                colours[v3] = c.0;
                Flow::Return(Ok(colours))
            }
            &NodeKind::Chord { j, first, .. } => {
                let id = self.record(node, Some(j), None);
                let c1 = &engine.nodes[first].outer;
                if self.exclusion && c1.len() > 3 && !lists[c1[2]].contains(alpha) {
                    self.path.push(Step::ChordFirst { j });
                    let w = self.fail(
                        first,
                        &lists,
                        FailureReason::ExclusionUnsatisfiable { vertex: engine.ids[c1[2]], required: alpha },
                    );
                    self.path.pop();
                    return w;
                }
                self.descend(
                    id,
                    Pending::AfterFirst { node, lists: lists.clone() },
                    Step::ChordFirst { j },
                    first,
                    lists,
                )
            }
            NodeKind::Fan { u, child } => {
                let child = *child;
                if u.is_empty() {
                    let id = self.record(node, None, None);
                    return self.descend(
                        id,
                        Pending::AfterChordless { node, lists: lists.clone() },
                        Step::ChordlessFan,
                        child,
                        lists,
                    );
                }
                let vk = outer[k - 1];
                let mut candidates = lists[vk].without(alpha);
                if k == 3 {
                    candidates = candidates.without(beta);
                }
                let mut order = candidates.iter();
                let Some(x) = order.next() else {
                    self.record(node, None, None);
                    return self.fail(node, &lists, FailureReason::ListExhausted { vertex: engine.ids[vk] });
                };
                // only the k > 3 case retries further reserved colours
                let rest: Vec<Color> = if k == 3 { Vec::new() } else { order.collect() };
                let id = self.record(node, None, Some(x));
                self.reserve(id, node, lists, x, Vec::new(), rest)
            }
        }
    }

    fn reserve(
        &mut self,
        id: u64,
        node: usize,
        lists: Vec<ColorList>,
        x: Color,
        tried: Vec<Color>,
        rest: Vec<Color>,
    ) -> Flow {
        let p = &self.engine.nodes[node];
        let NodeKind::Fan { u, child } = &p.kind else { unreachable!() };
        let mut reduced = lists.clone();
        for &ui in u {
            reduced[ui] = reduced[ui].without(x);
        }
        let step = if p.outer.len() == 3 { Step::TriangulationFan { x } } else { Step::ProperFan { x } };
        let child = *child;
        self.descend(id, Pending::AfterReserved { node, lists, x, tried, rest }, step, child, reduced)
    }

    fn resume(&mut self, frame: Frame, mut colours: Vec<u8>) -> Flow {
        let engine = self.engine;
        let id = frame.node_id;
        match frame.pending {
            Pending::AfterFirst { node, lists } => {
                let NodeKind::Chord { j, second, .. } = engine.nodes[node].kind else { unreachable!() };
                let outer = &engine.nodes[node].outer;
                let (vk, vj) = (outer[outer.len() - 1], outer[j - 1]);
                let (a2, b2) = (Color(colours[vk]), Color(colours[vj]));
                let mut l2 = lists;
                l2[vk] = ColorList::singleton(a2);
                l2[vj] = ColorList::singleton(b2);
                let step = Step::ChordSecond { j, alpha: a2, beta: b2 };
                let c2 = &engine.nodes[second].outer;
                if self.exclusion && c2.len() > 3 && !l2[c2[2]].contains(a2) {
                    self.path.push(step);
                    let w = self.fail(
                        second,
                        &l2,
                        FailureReason::ExclusionUnsatisfiable { vertex: engine.ids[c2[2]], required: a2 },
                    );
                    self.path.pop();
                    return w;
                }
                self.descend(id, Pending::AfterSecond { first: colours }, step, second, l2)
            }
            Pending::AfterSecond { first } => {
                for (c, f) in colours.iter_mut().zip(first) {
                    if *c == 0 {
                        *c = f;
                    }
                }
                Flow::Return(Ok(colours))
            }
            Pending::AfterChordless { node, lists } => {
                let outer = &engine.nodes[node].outer;
                let (vk, vk1) = (outer[outer.len() - 1], outer[outer.len() - 2]);
                let alpha = lists[outer[0]].min().expect("1-list");
                match lists[vk].without(alpha).without(Color(colours[vk1])).min() {
                    Some(c) => {
                        colours[vk] = c.0;
                        Flow::Return(Ok(colours))
                    }
                    None => self.fail(node, &lists, FailureReason::ListExhausted { vertex: engine.ids[vk] }),
                }
            }
            Pending::AfterReserved { node, lists, x, mut tried, mut rest } => {
                let outer = &engine.nodes[node].outer;
                let (vk, vk1) = (outer[outer.len() - 1], outer[outer.len() - 2]);
                tried.push(x);
                if colours[vk1] != x.0 {
                    colours[vk] = x.0;
                    return Flow::Return(Ok(colours));
                }
                if rest.is_empty() {
                    return self.fail(
                        node,
                        &lists,
                        FailureReason::NeighbourhoodConditionBroken {
                            vk: engine.ids[vk],
                            vk_minus_1: engine.ids[vk1],
                            tried,
                        },
                    );
                }
                let next = rest.remove(0);
                self.reserve(id, node, lists, next, tried, rest)
            }
        }
    }
}

/// Colours `nt` under `a` with the four-colour recursion.
pub fn colour_theorem2(nt: &NearTriangulation, a: &ListAssignment) -> Result<Theorem2Outcome, ListError> {
    Theorem2Engine::new(nt).colour(a)
}

/// Vertices of the decomposition's sub-instances, for inspection.
pub fn plan_sizes(engine: &Theorem2Engine) -> Vec<(CaseLabel, usize, usize)> {
    engine.nodes.iter().map(|p| (p.case(), p.vertices.len(), p.outer.len())).collect()
}
