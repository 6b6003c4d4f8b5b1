use std::collections::{BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{EmbeddedGraph, GraphError, Vertex};

/// Boundary enumeration `v1, ..., vk` of a near-triangulation, in the trace
/// order of the outer face starting at its anchor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct OuterCycle {
    vertices: Vec<Vertex>,
}

impl OuterCycle {
    pub fn k(&self) -> usize {
        self.vertices.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// `v_i` for 1-based `i`.
    pub fn v(&self, i: usize) -> Vertex {
        self.vertices[i - 1]
    }

    /// 1-based position of `v` on the cycle.
    pub fn position(&self, v: Vertex) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v).map(|i| i + 1)
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.vertices.contains(&v)
    }

    /// The successor of `v` in the enumeration (`vk` wraps to `v1`).
    pub fn right_neighbour(&self, v: Vertex) -> Option<Vertex> {
        let i = self.position(v)?;
        Some(self.vertices[i % self.k()])
    }
}

/// A connected loopless plane graph whose inner faces are all triangles and
/// whose outer face is bounded by a cycle.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "EmbeddedGraph", into = "EmbeddedGraph")]
pub struct NearTriangulation {
    graph: EmbeddedGraph,
    outer: OuterCycle,
}

impl TryFrom<EmbeddedGraph> for NearTriangulation {
    type Error = GraphError;

    fn try_from(g: EmbeddedGraph) -> Result<Self, Self::Error> {
        NearTriangulation::validate(g)
    }
}

impl From<NearTriangulation> for EmbeddedGraph {
    fn from(nt: NearTriangulation) -> Self {
        nt.graph
    }
}

/// Result of cutting a near-triangulation along the chord `vk`-`vj`.
#[derive(Clone, Debug)]
pub struct ChordSplit {
    /// Index of the chord's endpoint on the `v1 v2` side, `2 <= j <= k - 2`.
    pub j: usize,
    /// Part bounded by `v1 v2 ... vj vk`.
    pub g1: NearTriangulation,
    /// Part bounded by `vk vj vj+1 ... vk-1`.
    pub g2: NearTriangulation,
}

/// Neighbourhood of `vk` when it has no chord, and the graph left after
/// deleting it.
#[derive(Clone, Debug)]
pub struct Fan {
    /// `u1 .. ul`, the inner neighbours of `vk`, `u1` next to `v1`.
    pub u: Vec<Vertex>,
    /// `v1 u1 ... ul vk-1`.
    pub path: Vec<Vertex>,
    /// `G - vk`, with outer cycle `v1 v2 ... vk-1 ul ... u1`.
    pub reduced: NearTriangulation,
}

impl NearTriangulation {
    /// Accepts `g` iff every face other than the designated outer one is a
    /// triangle and the outer face is a cycle of length at least 3.
    pub fn validate(g: EmbeddedGraph) -> Result<Self, GraphError> {
        let outer = g.outer_face().to_vec();
        let distinct: BTreeSet<_> = outer.iter().collect();
        if outer.len() < 3 || distinct.len() != outer.len() {
            return Err(GraphError::OuterNotACycle(outer));
        }
        if let Some(face) = g.inner_faces().find(|f| f.len() != 3) {
            let mut face = face.clone();
            let min_at = face.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i).unwrap_or(0);
            face.rotate_left(min_at);
            return Err(GraphError::NonTriangularInnerFace(face));
        }
        Ok(NearTriangulation { graph: g, outer: OuterCycle { vertices: outer } })
    }

    pub fn graph(&self) -> &EmbeddedGraph {
        &self.graph
    }

    pub fn outer(&self) -> &OuterCycle {
        &self.outer
    }

    pub fn n(&self) -> usize {
        self.graph.vertex_count()
    }

    pub fn k(&self) -> usize {
        self.outer.k()
    }

    pub fn is_boundary(&self, v: Vertex) -> bool {
        self.outer.contains(v)
    }

    pub fn interior(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.graph.vertices().filter(|v| !self.outer.contains(*v))
    }

    /// Same graph, boundary enumeration restarted at `anchor`.
    pub fn reanchored(&self, anchor: Vertex) -> Result<Self, GraphError> {
        let i = self.outer.position(anchor).ok_or(GraphError::OuterFaceNotAFace(vec![anchor]))? - 1;
        let mut cyc = self.outer.vertices.clone();
        cyc.rotate_left(i);
        NearTriangulation::validate(self.graph.with_outer(cyc)?)
    }

    /// Mirror image with the same anchor; the enumeration runs the other way.
    pub fn mirrored(&self) -> Self {
        NearTriangulation::validate(self.graph.mirrored()).expect("mirror keeps face lengths")
    }

    /// Smallest `j` in `[2, k-2]` such that `vk`-`vj` is a chord.
    pub fn find_chord_at(&self) -> Option<usize> {
        let k = self.k();
        if k < 4 {
            return None;
        }
        let vk = self.outer.v(k);
        (2..=k - 2).find(|&j| self.graph.has_edge(vk, self.outer.v(j)))
    }

    /// Splits along the chord `vk`-`vj`.
    pub fn split_on_chord(&self, j: usize) -> Result<ChordSplit, GraphError> {
        let k = self.k();
        let (vk, vj) = (self.outer.v(k), self.outer.v(j.clamp(1, k)));
        if k < 4 || !(2..=k - 2).contains(&j) || !self.graph.has_edge(vk, vj) {
            return Err(GraphError::NotAChord { a: vk, b: vj });
        }
        let (g1, g2) = self.split_cycle(j - 1, k - 1)?;
        let g2 = g2.reanchored(vk)?;
        Ok(ChordSplit { j, g1, g2 })
    }

    /// Cuts along a chord between 0-based boundary positions `i < j`.
    ///
    /// The first part is bounded by `c0 .. ci cj .. c(k-1)` and anchored at
    /// `c0`; the second by `ci .. cj`, anchored at `ci`. Both keep the parent's
    /// trace direction.
    pub fn split_cycle(&self, i: usize, j: usize) -> Result<(Self, Self), GraphError> {
        let k = self.k();
        let c = &self.outer.vertices;
        if !(i < j && j < k && j - i >= 2 && !(i == 0 && j == k - 1)) || !self.graph.has_edge(c[i], c[j]) {
            return Err(GraphError::NotAChord { a: c[i.min(k - 1)], b: c[j.min(k - 1)] });
        }
        let cut = [c[i], c[j]];
        let side_a_path: Vec<Vertex> = c[..i].iter().chain(&c[j + 1..]).copied().collect();
        let side_b_path: Vec<Vertex> = c[i + 1..j].to_vec();

        let reach = |seeds: &[Vertex]| {
            let mut seen: BTreeSet<Vertex> = seeds.iter().copied().collect();
            let mut queue: VecDeque<Vertex> = seeds.iter().copied().collect();
            while let Some(v) = queue.pop_front() {
                for &w in self.graph.rotation(v) {
                    if !cut.contains(&w) && seen.insert(w) {
                        queue.push_back(w);
                    }
                }
            }
            seen
        };
        let mut a = reach(&side_a_path);
        let mut b = reach(&side_b_path);
        if !a.is_disjoint(&b) || a.len() + b.len() + 2 != self.n() {
            return Err(GraphError::NotAChord { a: c[i], b: c[j] });
        }
        a.extend(cut);
        b.extend(cut);

        let outer_a: Vec<Vertex> = c[..=i].iter().chain(&c[j..]).copied().collect();
        let outer_b: Vec<Vertex> = c[i..=j].to_vec();
        let ga = NearTriangulation::validate(self.graph.induced(&a, outer_a)?)?;
        let gb = NearTriangulation::validate(self.graph.induced(&b, outer_b)?)?;
        Ok((ga, gb))
    }

    /// Any chord of the outer cycle, as 0-based positions `(i, j)`, smallest first.
    pub fn first_chord(&self) -> Option<(usize, usize)> {
        let k = self.k();
        let c = &self.outer.vertices;
        for i in 0..k {
            for j in i + 2..k {
                if i == 0 && j == k - 1 {
                    continue;
                }
                if self.graph.has_edge(c[i], c[j]) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Deletes `vk`, which must carry no chord.
    pub fn fan_at_last(&self) -> Result<Fan, GraphError> {
        if let Some(j) = self.find_chord_at() {
            return Err(GraphError::ChordPresentAtVk { j });
        }
        if self.n() <= 3 {
            return Err(GraphError::TooFewVertices(self.n() - 1));
        }
        let k = self.k();
        let (v1, vk, vk1) = (self.outer.v(1), self.outer.v(k), self.outer.v(k - 1));
        let mut u = Vec::new();
        let mut cur = self.graph.prev_around(vk, v1);
        while cur != vk1 {
            u.push(cur);
            cur = self.graph.prev_around(vk, cur);
        }
        let mut path = vec![v1];
        path.extend(&u);
        path.push(vk1);

        let keep: BTreeSet<Vertex> = self.graph.vertices().filter(|&w| w != vk).collect();
        let mut outer: Vec<Vertex> = self.outer.vertices[..k - 1].to_vec();
        outer.extend(u.iter().rev());
        let reduced = NearTriangulation::validate(self.graph.induced(&keep, outer)?)?;
        Ok(Fan { u, path, reduced })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn v(ids: &[u32]) -> Vec<Vertex> {
        ids.iter().map(|&i| Vertex(i)).collect()
    }

    pub(crate) fn nt(faces: &[&[u32]]) -> NearTriangulation {
        let faces: Vec<Vec<Vertex>> = faces.iter().map(|f| v(f)).collect();
        NearTriangulation::validate(EmbeddedGraph::from_faces(&faces, 0).unwrap()).unwrap()
    }

    /// Wheel with rim `1..=k` (outer, in order) and hub `k + 1`.
    pub(crate) fn wheel(k: u32) -> NearTriangulation {
        let hub = k + 1;
        let mut faces = vec![(1..=k).collect::<Vec<u32>>()];
        for i in 1..=k {
            let next = i % k + 1;
            faces.push(vec![next, i, hub]);
        }
        let refs: Vec<&[u32]> = faces.iter().map(|f| f.as_slice()).collect();
        nt(&refs)
    }

    #[test]
    fn triangle_outer_cycle() {
        let t = nt(&[&[1, 2, 3], &[1, 3, 2]]);
        assert_eq!(t.outer().vertices(), &v(&[1, 2, 3])[..]);
        assert_eq!(t.k(), 3);
        assert_eq!(t.find_chord_at(), None);
    }

    #[test]
    fn four_cycle_without_chord_is_rejected() {
        let g = EmbeddedGraph::from_faces(&[v(&[1, 2, 3, 4]), v(&[4, 3, 2, 1])], 0).unwrap();
        match NearTriangulation::validate(g) {
            Err(GraphError::NonTriangularInnerFace(f)) => {
                let set: BTreeSet<_> = f.into_iter().collect();
                assert_eq!(set, v(&[1, 2, 3, 4]).into_iter().collect());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn even_wheel_is_a_near_triangulation() {
        let w5 = wheel(4);
        assert_eq!((w5.n(), w5.k()), (5, 4));
        assert_eq!(w5.outer().vertices(), &v(&[1, 2, 3, 4])[..]);
        assert_eq!(w5.graph().inner_faces().count(), 4);
        assert_eq!(w5.find_chord_at(), None);
    }

    #[test]
    fn chord_found_and_split() {
        // 4-cycle with chord 4-2
        let g = nt(&[&[1, 2, 3, 4], &[2, 1, 4], &[4, 3, 2]]);
        assert_eq!(g.find_chord_at(), Some(2));
        let s = g.split_on_chord(2).unwrap();
        assert_eq!(s.g1.outer().vertices(), &v(&[1, 2, 4])[..]);
        assert_eq!(s.g2.outer().vertices(), &v(&[4, 2, 3])[..]);
        assert!(matches!(g.split_on_chord(3), Err(GraphError::NotAChord { .. })));
    }

    #[test]
    fn pentagon_split_at_chord_v5_v3() {
        // pentagon with chords 5-3 and 3-1
        let g = nt(&[&[1, 2, 3, 4, 5], &[2, 1, 3], &[3, 1, 5], &[5, 4, 3]]);
        assert_eq!(g.find_chord_at(), Some(3));
        let s = g.split_on_chord(3).unwrap();
        assert_eq!(s.g1.outer().vertices(), &v(&[1, 2, 3, 5])[..]);
        assert_eq!(s.g2.outer().vertices(), &v(&[5, 3, 4])[..]);
        assert_eq!(s.g1.n() + s.g2.n(), g.n() + 2);
        // g2 of a chord at j = 2 in a k = 5 instance
        let h = nt(&[&[1, 2, 3, 4, 5], &[2, 1, 5], &[5, 4, 2], &[4, 3, 2]]);
        let s = h.split_on_chord(2).unwrap();
        assert_eq!(s.g2.outer().vertices(), &v(&[5, 2, 3, 4])[..]);
        assert_eq!(s.g2.k(), 4);
    }

    #[test]
    fn wheel_fan() {
        let f = wheel(4).fan_at_last().unwrap();
        assert_eq!(f.u, v(&[5]));
        assert_eq!(f.path, v(&[1, 5, 3]));
        assert_eq!(f.reduced.outer().vertices(), &v(&[1, 2, 3, 5])[..]);
    }

    #[test]
    fn k4_fan_leaves_triangle() {
        let k4 = nt(&[&[1, 2, 3], &[2, 1, 4], &[3, 2, 4], &[1, 3, 4]]);
        let f = k4.fan_at_last().unwrap();
        assert_eq!(f.path, v(&[1, 4, 2]));
        assert_eq!(f.reduced.outer().vertices(), &v(&[1, 2, 4])[..]);
        assert_eq!(f.reduced.n(), 3);
    }

    #[test]
    fn octahedron_fan_has_two_inner_neighbours() {
        // outer 1 2 3, inner triangle 4 5 6 with 4 opposite 3, 5 opposite 1, 6 opposite 2
        let oct = nt(&[&[1, 2, 3], &[2, 1, 4], &[3, 2, 5], &[1, 3, 6], &[1, 6, 4], &[2, 4, 5], &[3, 5, 6], &[4, 6, 5]]);
        assert_eq!(oct.n(), 6);
        let f = oct.fan_at_last().unwrap();
        assert_eq!(f.u.len(), 2);
        assert_eq!(f.reduced.k(), 4);
        assert_eq!(f.u[0], Vertex(6));
        assert!(oct.graph().has_edge(Vertex(1), f.u[0]));
    }

    #[test]
    fn fan_refuses_chords_and_triangles() {
        let g = nt(&[&[1, 2, 3, 4], &[2, 1, 4], &[4, 3, 2]]);
        assert!(matches!(g.fan_at_last(), Err(GraphError::ChordPresentAtVk { j: 2 })));
        let t = nt(&[&[1, 2, 3], &[1, 3, 2]]);
        assert!(t.fan_at_last().is_err());
    }
}
