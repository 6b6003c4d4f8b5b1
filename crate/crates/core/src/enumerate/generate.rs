//! Plane triangulations by vertex splitting from `K4`, and triangulated disks
//! by deleting one vertex of a triangulation.

use std::collections::{BTreeMap, HashSet};
use std::ops::RangeInclusive;

use thiserror::Error;

use super::canon::{boundary_from, boundary_roots, to_graph, Code, Dense, Root};
use crate::graph::{NearTriangulation, Triangulation, Vertex};

pub const MAX_TRIANGULATION_N: usize = 12;
pub const MAX_DISK_N: usize = MAX_TRIANGULATION_N - 1;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumError {
    #[error("bound {requested} exceeds the supported maximum {limit}")]
    BoundTooLarge { requested: usize, limit: usize },
}

fn k4() -> Dense {
    Dense { rot: vec![vec![1, 2, 3], vec![2, 0, 3], vec![0, 1, 3], vec![2, 1, 0]] }
}

/// Splits `v` along neighbours at rotation positions `a != b`: `v` keeps the
/// arc from `a` to `b`, a new vertex takes the arc from `b` back to `a`.
fn split(d: &Dense, v: usize, a: usize, b: usize) -> Dense {
    let z = d.n();
    let r = &d.rot[v];
    let deg = r.len();
    let arc = |from: usize, to: usize| {
        let len = (to + deg - from) % deg + 1;
        (0..len).map(|t| r[(from + t) % deg]).collect::<Vec<_>>()
    };
    let (keep, give) = (arc(a, b), arc(b, a));
    let (wa, wb) = (r[a], r[b]);
    let mut rot = d.rot.clone();
    for &w in &give[1..give.len() - 1] {
        for x in rot[w].iter_mut() {
            if *x == v {
                *x = z;
            }
        }
    }
    let p = rot[wa].iter().position(|&x| x == v).expect("neighbour");
    rot[wa].insert(p + 1, z);
    let p = rot[wb].iter().position(|&x| x == v).expect("neighbour");
    rot[wb].insert(p, z);
    let mut rv = keep;
    rv.push(z);
    rot[v] = rv;
    let mut rz = give;
    rz.push(v);
    rot.push(rz);
    Dense { rot }
}

fn canonical_sphere(d: &Dense) -> (Code, Dense) {
    let (code, root, order) = d.min_code(d.sphere_roots());
    (code, d.relabelled(&order, root.mirror))
}

/// Canonical dense triangulations, one list per order `4..=max_n`.
pub(crate) fn triangulation_levels(max_n: usize) -> Vec<Vec<(Code, Dense)>> {
    let mut levels = vec![vec![canonical_sphere(&k4())]];
    while levels.len() + 3 < max_n {
        let mut seen: HashSet<Code> = HashSet::new();
        let mut next = Vec::new();
        for (_, d) in levels.last().expect("level") {
            for v in 0..d.n() {
                let deg = d.rot[v].len();
                for a in 0..deg {
                    for b in 0..deg {
                        if a == b {
                            continue;
                        }
                        let (code, rep) = canonical_sphere(&split(d, v, a, b));
                        if seen.insert(code.clone()) {
                            next.push((code, rep));
                        }
                    }
                }
            }
        }
        next.sort_by(|x, y| x.0.cmp(&y.0));
        levels.push(next);
    }
    levels
}

/// Outer face for a triangulation without one: the face with the smallest
/// sorted vertex set, starting at its smallest vertex.
pub fn default_outer_face(faces: &[Vec<Vertex>]) -> Vec<Vertex> {
    let mut f = faces
        .iter()
        .min_by_key(|f| {
            let mut s = f.to_vec();
            s.sort();
            s
        })
        .expect("faces")
        .clone();
    let m = f.iter().enumerate().min_by_key(|(_, v)| **v).map(|(i, _)| i).unwrap_or(0);
    f.rotate_left(m);
    f
}

fn as_triangulation(d: &Dense) -> Triangulation {
    let g = to_graph(d, &[0, d.rot[0][0], d.rot[0][1]]);
    let g = match g.with_outer(default_outer_face(g.faces())) {
        Ok(g) => g,
        Err(e) => panic!("traced face rejected: {e}"),
    };
    Triangulation::new(g).expect("every face is a triangle")
}

/// Every simple plane triangulation with `4 <= n <= max_n` up to isomorphism
/// (reflections identified), ordered by `(n, code)`, vertices `1..=n`.
pub fn gen_plane_triangulations(max_n: usize) -> Result<Vec<Triangulation>, EnumError> {
    if max_n > MAX_TRIANGULATION_N {
        return Err(EnumError::BoundTooLarge { requested: max_n, limit: MAX_TRIANGULATION_N });
    }
    if max_n < 4 {
        return Ok(Vec::new());
    }
    Ok(triangulation_levels(max_n).iter().flatten().map(|(_, d)| as_triangulation(d)).collect())
}

/// A disk class with its representative rooted at its minimal dart.
#[derive(Clone, Debug)]
pub struct DiskClass {
    pub code: Code,
    pub disk: NearTriangulation,
}

fn delete_vertex(d: &Dense, x: usize) -> (Dense, Vec<usize>) {
    let shift = |w: usize| if w > x { w - 1 } else { w };
    let rot = (0..d.n())
        .filter(|&v| v != x)
        .map(|v| d.rot[v].iter().filter(|&&w| w != x).map(|&w| shift(w)).collect())
        .collect();
    (Dense { rot }, d.rot[x].iter().map(|&w| shift(w)).collect())
}

fn canonical_disk(d: &Dense, outer: &[usize]) -> (Code, Dense, Vec<usize>) {
    let (code, root, order) = d.min_code(boundary_roots(outer));
    let (rep, cyc) = relabel_disk(d, outer, root, &order);
    (code, rep, cyc)
}

fn relabel_disk(d: &Dense, outer: &[usize], root: Root, order: &[usize]) -> (Dense, Vec<usize>) {
    let mut label = vec![0usize; d.n()];
    for (i, &v) in order.iter().enumerate() {
        label[v] = i;
    }
    let cyc = boundary_from(outer, root).into_iter().map(|v| label[v]).collect();
    (d.relabelled(order, root.mirror), cyc)
}

/// Every triangulated disk (inner faces triangles, outer face a cycle of
/// length `k`, chords allowed) with `3 <= n <= max_n` and `k` in `k_range`,
/// up to isomorphism, ordered by `(n, k, code)`.
pub fn gen_disk_triangulations(max_n: usize, k_range: RangeInclusive<usize>) -> Result<Vec<DiskClass>, EnumError> {
    if max_n > MAX_DISK_N {
        return Err(EnumError::BoundTooLarge { requested: max_n, limit: MAX_DISK_N });
    }
    let mut found: BTreeMap<(usize, usize, Code), DiskClass> = BTreeMap::new();
    if max_n < 3 {
        return Ok(Vec::new());
    }
    for level in triangulation_levels(max_n + 1) {
        for (_, d) in &level {
            for x in 0..d.n() {
                if !k_range.contains(&d.rot[x].len()) {
                    continue;
                }
                let (disk, outer) = delete_vertex(d, x);
                let key_nk = (disk.n(), outer.len());
                let (code, rep, cyc) = canonical_disk(&disk, &outer);
                let key = (key_nk.0, key_nk.1, code);
                if !found.contains_key(&key) {
                    let nt = NearTriangulation::validate(to_graph(&rep, &cyc)).expect("vertex deletion leaves a disk");
                    found.insert(key.clone(), DiskClass { code: key.2.clone(), disk: nt });
                }
            }
        }
    }
    Ok(found.into_values().collect())
}

/// One rooted instance: a disk with a chosen `v1`, `v2`.
#[derive(Clone, Debug)]
pub struct RootedInstance {
    pub code: Code,
    pub nt: NearTriangulation,
}

/// All rootings (anchor and direction) of `disk` up to isomorphism, each
/// relabelled `1..=n` breadth-first from `v1 -> v2`, ordered by code.
pub fn rooted_instances(disk: &NearTriangulation) -> Vec<RootedInstance> {
    let (d, ids) = Dense::from_graph(disk.graph());
    let outer: Vec<usize> = disk.outer().vertices().iter().map(|v| ids.binary_search(v).expect("outer")).collect();
    let mut out: BTreeMap<Code, NearTriangulation> = BTreeMap::new();
    for root in boundary_roots(&outer) {
        let (code, order) = d.code_from(root, None).expect("unbounded");
        if out.contains_key(&code) {
            continue;
        }
        let (rep, cyc) = relabel_disk(&d, &outer, root, &order);
        out.insert(code, NearTriangulation::validate(to_graph(&rep, &cyc)).expect("relabelling keeps the disk"));
    }
    out.into_iter().map(|(code, nt)| RootedInstance { code, nt }).collect()
}
