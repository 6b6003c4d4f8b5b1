//! Canonical codes for rotation systems: breadth-first relabelling from a
//! start dart, in either orientation, minimised over a candidate set of
//! darts.

use std::collections::BTreeMap;

use crate::graph::{EmbeddedGraph, NearTriangulation, Vertex};

/// Canonical code: for each vertex in label order, its neighbours' labels in
/// rotation order from its reference neighbour, then `0`.
pub type Code = Vec<u8>;

/// Rotation system on `0..n`, counterclockwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Dense {
    pub rot: Vec<Vec<usize>>,
}

/// A start dart and orientation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Root {
    pub from: usize,
    pub to: usize,
    pub mirror: bool,
}

impl Dense {
    pub fn from_graph(g: &EmbeddedGraph) -> (Self, Vec<Vertex>) {
        let ids: Vec<Vertex> = g.vertices().collect();
        let idx: BTreeMap<Vertex, usize> = ids.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let rot = ids.iter().map(|&v| g.rotation(v).iter().map(|w| idx[w]).collect()).collect();
        (Dense { rot }, ids)
    }

    pub fn n(&self) -> usize {
        self.rot.len()
    }

    fn pos(&self, x: usize, y: usize) -> usize {
        self.rot[x].iter().position(|&w| w == y).expect("neighbour")
    }

    /// Code from `root`, or `None` as soon as it exceeds `bound`.
    pub fn code_from(&self, root: Root, bound: Option<&[u8]>) -> Option<(Code, Vec<usize>)> {
        let n = self.n();
        let mut label = vec![0u8; n];
        let mut reference = vec![usize::MAX; n];
        let mut order = Vec::with_capacity(n);
        let mut code: Code = Vec::with_capacity(n * 7);
        let mut smaller = bound.is_none();
        label[root.from] = 1;
        reference[root.from] = root.to;
        order.push(root.from);
        let mut qi = 0;
        while qi < order.len() {
            let x = order[qi];
            qi += 1;
            let d = self.rot[x].len();
            let p = self.pos(x, reference[x]);
            for t in 0..d {
                let w = if root.mirror { self.rot[x][(p + d - t) % d] } else { self.rot[x][(p + t) % d] };
                if label[w] == 0 {
                    order.push(w);
                    label[w] = order.len() as u8;
                    reference[w] = x;
                }
                if !push(&mut code, label[w], bound, &mut smaller) {
                    return None;
                }
            }
            if !push(&mut code, 0, bound, &mut smaller) {
                return None;
            }
        }
        Some((code, order))
    }

    /// Relabels so that `order[i]` becomes `i`, mirroring if asked.
    pub fn relabelled(&self, order: &[usize], mirror: bool) -> Dense {
        let mut label = vec![0usize; self.n()];
        for (i, &v) in order.iter().enumerate() {
            label[v] = i;
        }
        let rot = order
            .iter()
            .map(|&v| {
                let mut r: Vec<usize> = self.rot[v].iter().map(|&w| label[w]).collect();
                if mirror {
                    r.reverse();
                }
                let m = r.iter().enumerate().min_by_key(|(_, w)| **w).map(|(i, _)| i).unwrap_or(0);
                r.rotate_left(m);
                r
            })
            .collect();
        Dense { rot }
    }

    /// Minimum code over `roots`, with the root that attains it.
    pub fn min_code(&self, roots: impl IntoIterator<Item = Root>) -> (Code, Root, Vec<usize>) {
        let mut best: Option<(Code, Root, Vec<usize>)> = None;
        for r in roots {
            if let Some((c, order)) = self.code_from(r, best.as_ref().map(|b| b.0.as_slice())) {
                if best.as_ref().is_none_or(|b| c < b.0) {
                    best = Some((c, r, order));
                }
            }
        }
        best.expect("at least one root")
    }

    /// Darts whose end degrees are lexicographically smallest, in both
    /// orientations; enough for a canonical minimum on a sphere.
    pub fn sphere_roots(&self) -> Vec<Root> {
        let key = |u: usize, v: usize| (self.rot[u].len(), self.rot[v].len());
        let best = (0..self.n()).flat_map(|u| self.rot[u].iter().map(move |&v| key(u, v))).min().expect("edges");
        let mut out = Vec::new();
        for u in 0..self.n() {
            for &v in &self.rot[u] {
                if key(u, v) == best {
                    out.push(Root { from: u, to: v, mirror: false });
                    out.push(Root { from: u, to: v, mirror: true });
                }
            }
        }
        out
    }
}

/// Darts along an outer cycle given in trace order: forwards unmirrored,
/// backwards mirrored.
pub(crate) fn boundary_roots(outer: &[usize]) -> Vec<Root> {
    let k = outer.len();
    let mut out = Vec::with_capacity(2 * k);
    for i in 0..k {
        out.push(Root { from: outer[i], to: outer[(i + 1) % k], mirror: false });
        out.push(Root { from: outer[(i + 1) % k], to: outer[i], mirror: true });
    }
    out
}

/// Outer cycle walked from `root`: along the trace order, or against it.
pub(crate) fn boundary_from(outer: &[usize], root: Root) -> Vec<usize> {
    let k = outer.len();
    let s = outer.iter().position(|&v| v == root.from).expect("root on boundary");
    (0..k).map(|t| if root.mirror { outer[(s + k - t) % k] } else { outer[(s + t) % k] }).collect()
}

fn push(code: &mut Code, x: u8, bound: Option<&[u8]>, smaller: &mut bool) -> bool {
    if !*smaller {
        let b = bound.expect("bounded");
        match x.cmp(&b[code.len()]) {
            std::cmp::Ordering::Less => *smaller = true,
            std::cmp::Ordering::Greater => return false,
            std::cmp::Ordering::Equal => {}
        }
    }
    code.push(x);
    true
}

/// Isomorphism code of a plane graph, ignoring its outer face; reflections
/// count as isomorphic.
pub fn triangulation_code(g: &EmbeddedGraph) -> Code {
    let (d, _) = Dense::from_graph(g);
    let roots = d.sphere_roots();
    d.min_code(roots).0
}

fn dense_disk(nt: &NearTriangulation) -> (Dense, Vec<Vertex>, Vec<usize>) {
    let (d, ids) = Dense::from_graph(nt.graph());
    let outer = nt.outer().vertices().iter().map(|v| ids.binary_search(v).expect("outer vertex")).collect();
    (d, ids, outer)
}

/// Isomorphism code of a disk, preserving the outer cycle; reflections and
/// the choice of `v1` are forgotten.
pub fn disk_code(nt: &NearTriangulation) -> Code {
    let (d, _, outer) = dense_disk(nt);
    d.min_code(boundary_roots(&outer)).0
}

/// Code of a rooted instance: `v1`, `v2` and the orientation are kept.
pub fn rooted_code(nt: &NearTriangulation) -> Code {
    let (d, _, outer) = dense_disk(nt);
    d.code_from(Root { from: outer[0], to: outer[1], mirror: false }, None).expect("unbounded").0
}

/// Converts a dense rotation system on `0..n` to a graph on `1..=n`.
pub(crate) fn to_graph(d: &Dense, outer: &[usize]) -> EmbeddedGraph {
    let v = |i: usize| Vertex(i as u32 + 1);
    let rotations = d.rot.iter().enumerate().map(|(i, r)| (v(i), r.iter().map(|&w| v(w)).collect())).collect();
    EmbeddedGraph::new(rotations, outer.iter().map(|&i| v(i)).collect()).expect("dense map is a valid embedding")
}

/// `nt` relabelled `1..=n` in breadth-first order from `v1 -> v2`.
pub fn canonical_rooted(nt: &NearTriangulation) -> NearTriangulation {
    let (d, _, outer) = dense_disk(nt);
    let root = Root { from: outer[0], to: outer[1], mirror: false };
    let (_, order) = d.code_from(root, None).expect("unbounded");
    let relabelled = d.relabelled(&order, false);
    let mut label = vec![0usize; d.n()];
    for (i, &v) in order.iter().enumerate() {
        label[v] = i;
    }
    let cyc: Vec<usize> = outer.iter().map(|&v| label[v]).collect();
    NearTriangulation::validate(to_graph(&relabelled, &cyc)).expect("relabelling keeps the disk")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::near::tests::{nt, wheel};

    #[test]
    fn codes_ignore_labels_and_reflection() {
        let w = wheel(5);
        let map: BTreeMap<Vertex, Vertex> = (1..=6).map(|i| (Vertex(i), Vertex(7 - i))).collect();
        let moved = NearTriangulation::validate(w.graph().relabelled(&map).unwrap()).unwrap();
        assert_eq!(disk_code(&w), disk_code(&moved));
        assert_eq!(disk_code(&w), disk_code(&w.mirrored()));
        assert_eq!(triangulation_code(w.graph()), triangulation_code(w.mirrored().graph()));
    }

    #[test]
    fn rooted_codes_separate_rootings() {
        let pent = nt(&[&[1, 2, 3, 4, 5], &[2, 1, 3], &[3, 1, 5], &[5, 4, 3]]);
        let a = rooted_code(&pent);
        let b = rooted_code(&pent.reanchored(Vertex(3)).unwrap());
        assert_ne!(a, b);
        assert_eq!(a, rooted_code(&canonical_rooted(&pent)));
        let c = canonical_rooted(&pent);
        assert_eq!(&c.outer().vertices()[..2], &[Vertex(1), Vertex(2)]);
    }

    #[test]
    fn bounded_search_agrees_with_full() {
        let k4 = nt(&[&[1, 2, 3], &[2, 1, 4], &[3, 2, 4], &[1, 3, 4]]);
        let (d, _) = Dense::from_graph(k4.graph());
        let mut all: Vec<Code> = Vec::new();
        for u in 0..4 {
            for &v in &d.rot[u] {
                for mirror in [false, true] {
                    all.push(d.code_from(Root { from: u, to: v, mirror }, None).unwrap().0);
                }
            }
        }
        assert_eq!(triangulation_code(k4.graph()), all.into_iter().min().unwrap());
    }
}
