//! Brute-force ground truth: exact backtracking list colouring, plain
//! four-colourability, and the extensional neighbourhood check.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{EmbeddedGraph, NearTriangulation, Triangulation, Vertex};
use crate::lists::{Color, ColorList, Colouring, ListAssignment};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SearchMode {
    First,
    Count,
    All { limit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleOutcome {
    First(Option<Colouring>),
    Count(u64),
    All(Vec<Colouring>),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("vertex {0} has no list")]
    MissingList(Vertex),
    #[error("more than {limit} colourings")]
    LimitExceeded { limit: usize },
}

/// Graph flattened to dense indices in vertex order, reusable across many
/// list assignments.
#[derive(Clone, Debug)]
pub struct DenseSolver {
    ids: Vec<Vertex>,
    adj: Vec<Vec<usize>>,
}

impl DenseSolver {
    pub fn new(g: &EmbeddedGraph) -> Self {
        let ids: Vec<Vertex> = g.vertices().collect();
        let adj = ids
            .iter()
            .map(|&v| {
                let mut a: Vec<usize> = g.rotation(v).iter().map(|w| ids.binary_search(w).expect("vertex")).collect();
                a.sort_unstable();
                a
            })
            .collect();
        DenseSolver { ids, adj }
    }

    pub fn ids(&self) -> &[Vertex] {
        &self.ids
    }

    pub fn index(&self, v: Vertex) -> Option<usize> {
        self.ids.binary_search(&v).ok()
    }

    pub fn dense_lists(&self, a: &ListAssignment) -> Result<Vec<ColorList>, OracleError> {
        self.ids.iter().map(|&v| a.get(v).ok_or(OracleError::MissingList(v))).collect()
    }

    pub fn colouring(&self, colours: &[u8]) -> Colouring {
        Colouring { colors: self.ids.iter().zip(colours).map(|(&v, &c)| (v, Color(c))).collect() }
    }

    /// First colouring in search order.
    pub fn first(&self, lists: &[ColorList]) -> Option<Vec<u8>> {
        let mut found = None;
        self.search(lists, &mut |c| {
            found = Some(c.to_vec());
            false
        });
        found
    }

    pub fn satisfiable(&self, lists: &[ColorList]) -> bool {
        self.first(lists).is_some()
    }

    pub fn count(&self, lists: &[ColorList]) -> u64 {
        let mut n = 0u64;
        self.search(lists, &mut |_| {
            n += 1;
            true
        });
        n
    }

    /// Calls `visit` on each colouring until it returns `false`.
    pub fn search(&self, lists: &[ColorList], visit: &mut dyn FnMut(&[u8]) -> bool) {
        let n = self.ids.len();
        if lists.iter().any(|l| l.is_empty()) {
            return;
        }
        let mut colours = vec![0u8; n];
        let avail = lists.to_vec();
        self.step(&avail, &mut colours, n, visit);
    }

    fn step(&self, avail: &[ColorList], colours: &mut [u8], left: usize, visit: &mut dyn FnMut(&[u8]) -> bool) -> bool {
        if left == 0 {
            return visit(colours);
        }
        let mut pick = usize::MAX;
        let mut best = usize::MAX;
        for (i, l) in avail.iter().enumerate() {
            if colours[i] == 0 && l.len() < best {
                best = l.len();
                pick = i;
            }
        }
        for c in avail[pick].iter() {
            let mut next = avail.to_vec();
            let mut dead = false;
            for &w in &self.adj[pick] {
                if colours[w] == 0 {
                    next[w] = next[w].without(c);
                    dead |= next[w].is_empty();
                }
            }
            if dead {
                continue;
            }
            colours[pick] = c.0;
            let go_on = self.step(&next, colours, left - 1, visit);
            colours[pick] = 0;
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Exact list colouring by backtracking, smallest remaining list first with
/// ties to the smallest vertex id.
pub fn backtrack_list_colour(
    g: &EmbeddedGraph,
    a: &ListAssignment,
    mode: SearchMode,
) -> Result<OracleOutcome, OracleError> {
    let s = DenseSolver::new(g);
    let lists = s.dense_lists(a)?;
    Ok(match mode {
        SearchMode::First => OracleOutcome::First(s.first(&lists).map(|c| s.colouring(&c))),
        SearchMode::Count => OracleOutcome::Count(s.count(&lists)),
        SearchMode::All { limit } => {
            let mut out = Vec::new();
            let mut over = false;
            s.search(&lists, &mut |c| {
                if out.len() == limit {
                    over = true;
                    return false;
                }
                out.push(s.colouring(c));
                true
            });
            if over {
                return Err(OracleError::LimitExceeded { limit });
            }
            OracleOutcome::All(out)
        }
    })
}

/// Any list colouring of `g`, if one exists.
pub fn first_colouring(g: &EmbeddedGraph, a: &ListAssignment) -> Option<Colouring> {
    match backtrack_list_colour(g, a, SearchMode::First) {
        Ok(OracleOutcome::First(c)) => c,
        _ => None,
    }
}

/// Four-colourability with the outer triangle fixed to colours 1, 2, 3.
pub fn is_four_colourable(t: &Triangulation) -> bool {
    let s = DenseSolver::new(t.graph());
    let mut lists = vec![ColorList::L0; s.ids.len()];
    for (c, v) in t.graph().outer_face().iter().enumerate() {
        lists[s.index(*v).expect("outer vertex")] = ColorList::singleton(Color(c as u8 + 1));
    }
    s.satisfiable(&lists)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub v: Vertex,
    pub r: Vertex,
    pub candidate_lists: Vec<ColorList>,
    pub good_lists: Vec<ColorList>,
    pub satisfied: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConditionError {
    #[error("{r} is not the right neighbour of {v} on the outer cycle")]
    NotAdjacent { v: Vertex, r: Vertex },
    #[error("vertex {0} is v1, v2 or not on the outer cycle")]
    BadRole(Vertex),
    #[error("v = {vertex} must carry a 3-list")]
    NotAThreeList { vertex: Vertex },
    #[error(transparent)]
    Oracle(#[from] OracleError),
}

/// For each 3-list `L0 \ {x}` at `r` (skipping `x = excluded_at_r`), decides
/// whether `nt` has a colouring from `base` with that list at `r` and
/// `c(v) != x`. The list `base` gives at `r` is ignored.
pub fn check_neighbourhood_condition(
    nt: &NearTriangulation,
    base: &ListAssignment,
    v: Vertex,
    r: Vertex,
    excluded_at_r: Option<Color>,
) -> Result<ConditionReport, ConditionError> {
    let outer = nt.outer();
    for w in [v, r] {
        match outer.position(w) {
            Some(p) if p > 2 => {}
            _ => return Err(ConditionError::BadRole(w)),
        }
    }
    if outer.right_neighbour(v) != Some(r) {
        return Err(ConditionError::NotAdjacent { v, r });
    }
    let s = DenseSolver::new(nt.graph());
    let mut lists = Vec::with_capacity(s.ids.len());
    for &w in &s.ids {
        lists.push(if w == r { ColorList::L0 } else { base.get(w).ok_or(OracleError::MissingList(w))? });
    }
    let (vi, ri) = (s.index(v).expect("v"), s.index(r).expect("r"));
    if lists[vi].len() != 3 {
        return Err(ConditionError::NotAThreeList { vertex: v });
    }
    let good = condition_dense(&s, &mut lists, vi, ri, excluded_at_r);
    let candidates = condition_candidates(excluded_at_r);
    let good_lists: Vec<ColorList> =
        candidates.iter().copied().filter(|l| good.contains(l.missing_from_l0().expect("3-list"))).collect();
    Ok(ConditionReport { v, r, satisfied: good_lists.len() >= 3, candidate_lists: candidates, good_lists })
}

/// Candidate 3-lists at `r`, ordered by missing colour.
pub fn condition_candidates(excluded_at_r: Option<Color>) -> Vec<ColorList> {
    ColorList::L0.iter().filter(|&x| Some(x) != excluded_at_r).map(|x| ColorList::L0.without(x)).collect()
}

/// Dense form of the check: the set of missing colours `x` whose list works.
/// `lists[ri]` and `lists[vi]` are restored before returning.
pub fn condition_dense(
    s: &DenseSolver,
    lists: &mut [ColorList],
    vi: usize,
    ri: usize,
    excluded_at_r: Option<Color>,
) -> ColorList {
    let (keep_v, keep_r) = (lists[vi], lists[ri]);
    let mut good = ColorList::EMPTY;
    for x in ColorList::L0.iter() {
        if Some(x) == excluded_at_r {
            continue;
        }
        lists[ri] = ColorList::L0.without(x);
        lists[vi] = keep_v.without(x);
        if s.satisfiable(lists) {
            good = good.with(x);
        }
    }
    lists[vi] = keep_v;
    lists[ri] = keep_r;
    good
}
