//! Test-local reference generators. They share no code with the library:
//! graphs are adjacency bitmasks, isomorphism is decided by brute force over
//! degree-respecting relabellings, triangulations come from the flip graph
//! and disks from ear growth.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use colourer::graph::Vertex;

/// Plane triangulations on n = 4..=12 vertices, up to isomorphism.
pub const TRIANGULATIONS: [usize; 9] = [1, 1, 2, 5, 14, 50, 233, 1249, 7595];

/// Catalan numbers from C(1).
pub const CATALAN: [usize; 10] = [1, 2, 5, 14, 42, 132, 429, 1430, 4862, 16796];

type Adj = Vec<u16>;

fn refine(adj: &Adj, mark: Option<usize>) -> Vec<(bool, u32, Vec<u32>)> {
    (0..adj.len())
        .map(|v| {
            let mut nd: Vec<u32> =
                (0..adj.len()).filter(|&w| adj[v] >> w & 1 == 1).map(|w| adj[w].count_ones()).collect();
            nd.sort();
            (mark != Some(v), adj[v].count_ones(), nd)
        })
        .collect()
}

/// Smallest upper-triangle bit string over relabellings that list vertices
/// by increasing invariant.
pub fn canon(adj: &Adj, mark: Option<usize>) -> Vec<u64> {
    let n = adj.len();
    let key = refine(adj, mark);
    let mut cells: BTreeMap<&(bool, u32, Vec<u32>), Vec<usize>> = BTreeMap::new();
    for (v, kv) in key.iter().enumerate() {
        cells.entry(kv).or_default().push(v);
    }
    let cells: Vec<Vec<usize>> = cells.into_values().collect();
    let mut best: Option<Vec<u64>> = None;
    let mut order = Vec::with_capacity(n);
    fn encode(adj: &Adj, order: &[usize]) -> Vec<u64> {
        let mut out = vec![0u64; 2];
        let mut bit = 0;
        for i in 0..order.len() {
            for j in i + 1..order.len() {
                if adj[order[i]] >> order[j] & 1 == 1 {
                    out[bit / 64] |= 1 << (bit % 64);
                }
                bit += 1;
            }
        }
        out
    }
    fn go(
        cells: &[Vec<usize>],
        c: usize,
        used: &mut u16,
        order: &mut Vec<usize>,
        adj: &Adj,
        best: &mut Option<Vec<u64>>,
    ) {
        if c == cells.len() {
            let code = encode(adj, order);
            if best.as_ref().is_none_or(|b| code < *b) {
                *best = Some(code);
            }
            return;
        }
        let placed_in_cell = cells[c].iter().filter(|&&v| *used >> v & 1 == 1).count();
        if placed_in_cell == cells[c].len() {
            return go(cells, c + 1, used, order, adj, best);
        }
        for &v in &cells[c] {
            if *used >> v & 1 == 0 {
                *used |= 1 << v;
                order.push(v);
                go(cells, c, used, order, adj, best);
                order.pop();
                *used &= !(1 << v);
            }
        }
    }
    go(&cells, 0, &mut 0, &mut order, adj, &mut best);
    best.expect("at least one labelling")
}

fn adj_from_triangles(n: usize, tris: &BTreeSet<[usize; 3]>) -> Adj {
    let mut adj = vec![0u16; n];
    for t in tris {
        for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[0], t[2])] {
            adj[a] |= 1 << b;
            adj[b] |= 1 << a;
        }
    }
    adj
}

fn tri(a: usize, b: usize, c: usize) -> [usize; 3] {
    let mut t = [a, b, c];
    t.sort();
    t
}

/// Isomorphism classes of triangulations on `n` vertices, by breadth-first
/// search of the edge-flip graph from a stacked triangulation.
pub fn flip_classes(n: usize) -> usize {
    let mut tris: BTreeSet<[usize; 3]> = [tri(0, 1, 2), tri(0, 1, 3), tri(0, 2, 3), tri(1, 2, 3)].into();
    for z in 4..n {
        let t = *tris.iter().next().unwrap();
        tris.remove(&t);
        tris.extend([tri(t[0], t[1], z), tri(t[0], t[2], z), tri(t[1], t[2], z)]);
    }
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut queue = VecDeque::new();
    seen.insert(canon(&adj_from_triangles(n, &tris), None));
    queue.push_back(tris);
    while let Some(tris) = queue.pop_front() {
        let adj = adj_from_triangles(n, &tris);
        let mut faces_at: HashMap<(usize, usize), Vec<usize>> = HashMap::new();
        for t in &tris {
            for (a, b, c) in [(t[0], t[1], t[2]), (t[0], t[2], t[1]), (t[1], t[2], t[0])] {
                faces_at.entry((a, b)).or_default().push(c);
            }
        }
        for (&(a, b), apex) in &faces_at {
            assert_eq!(apex.len(), 2, "every edge lies on two triangles");
            let (c, d) = (apex[0], apex[1]);
            if adj[c] >> d & 1 == 1 {
                continue;
            }
            let mut next = tris.clone();
            next.remove(&tri(a, b, c));
            next.remove(&tri(a, b, d));
            next.insert(tri(c, d, a));
            next.insert(tri(c, d, b));
            if seen.insert(canon(&adj_from_triangles(n, &next), None)) {
                queue.push_back(next);
            }
        }
    }
    seen.len()
}

#[derive(Clone)]
struct Disk {
    adj: Adj,
    boundary: Vec<usize>,
}

impl Disk {
    fn key(&self) -> Vec<u64> {
        // cone over the boundary: a sphere triangulation whose embedding is
        // unique up to reflection, with the apex marked
        let n = self.adj.len();
        let mut adj = self.adj.clone();
        adj.push(0);
        for &b in &self.boundary {
            adj[b] |= 1 << n;
            adj[n] |= 1 << b;
        }
        canon(&adj, Some(n))
    }
}

/// Disk triangulations with `n <= max_n` by `(n, k)`, grown from a triangle
/// by adding ears and by closing boundary paths of length two.
pub fn ear_disk_counts(max_n: usize) -> BTreeMap<(usize, usize), usize> {
    let start = Disk { adj: vec![0b110, 0b101, 0b011], boundary: vec![0, 1, 2] };
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut counts = BTreeMap::new();
    let mut queue = VecDeque::new();
    seen.insert(start.key());
    queue.push_back(start);
    while let Some(d) = queue.pop_front() {
        let (n, k) = (d.adj.len(), d.boundary.len());
        *counts.entry((n, k)).or_insert(0) += 1;
        let mut next = Vec::new();
        for i in 0..k {
            let (a, b) = (d.boundary[i], d.boundary[(i + 1) % k]);
            if n < max_n {
                let mut e = d.clone();
                e.adj.push((1 << a) | (1 << b));
                e.adj[a] |= 1 << n;
                e.adj[b] |= 1 << n;
                e.boundary.insert(i + 1, n);
                next.push(e);
            }
            let (u0, u1, u2) = (d.boundary[(i + k - 1) % k], d.boundary[i], d.boundary[(i + 1) % k]);
            if k >= 4 && d.adj[u0] >> u2 & 1 == 0 {
                let mut e = d.clone();
                e.adj[u0] |= 1 << u2;
                e.adj[u2] |= 1 << u0;
                e.boundary.retain(|&v| v != u1);
                next.push(e);
            }
        }
        for e in next {
            if seen.insert(e.key()) {
                queue.push_back(e);
            }
        }
    }
    counts
}

/// Faces of a rotation system: dart `u -> v` is followed by `v -> w` where
/// `w` precedes `u` in the rotation at `v`.
pub fn faces_of(rot: &BTreeMap<Vertex, Vec<Vertex>>) -> Vec<Vec<Vertex>> {
    let mut used: BTreeSet<(Vertex, Vertex)> = BTreeSet::new();
    let mut faces = Vec::new();
    for (&u, ns) in rot {
        for &v in ns {
            if used.contains(&(u, v)) {
                continue;
            }
            let mut face = Vec::new();
            let (mut a, mut b) = (u, v);
            while used.insert((a, b)) {
                face.push(a);
                let r = &rot[&b];
                let p = r.iter().position(|&x| x == a).unwrap();
                let w = r[(p + r.len() - 1) % r.len()];
                a = b;
                b = w;
            }
            faces.push(face);
        }
    }
    faces
}
