//! Five-choosability baseline: the classical recursion with two adjacent
//! precoloured boundary vertices, 3-lists on the rest of the boundary and
//! 5-lists inside.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::graph::{NearTriangulation, Vertex};
use crate::lists::{Color, ColorList, Colouring, ListAssignment};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ThomassenError {
    #[error("vertex {0} has no list")]
    MissingList(Vertex),
    #[error("v1 and v2 must carry distinct 1-lists")]
    BadPrecolouring,
    #[error("boundary vertex {0} has fewer than 3 colours")]
    ShortBoundaryList(Vertex),
    #[error("interior vertex {0} has fewer than 5 colours")]
    ShortInteriorList(Vertex),
    #[error("recursion stuck at vertex {vertex} on a {n}-vertex part")]
    Stuck { vertex: Vertex, n: usize },
}

/// List-colours `nt`; lists may come from any universe of up to 8 colours.
pub fn thomassen_five(nt: &NearTriangulation, a: &ListAssignment) -> Result<Colouring, ThomassenError> {
    let mut lists: BTreeMap<Vertex, ColorList> = BTreeMap::new();
    for v in nt.graph().vertices() {
        lists.insert(v, a.get(v).ok_or(ThomassenError::MissingList(v))?);
    }
    let (v1, v2) = (nt.outer().v(1), nt.outer().v(2));
    if lists[&v1].len() != 1 || lists[&v2].len() != 1 || lists[&v1] == lists[&v2] {
        return Err(ThomassenError::BadPrecolouring);
    }
    for &v in &nt.outer().vertices()[2..] {
        if lists[&v].len() < 3 {
            return Err(ThomassenError::ShortBoundaryList(v));
        }
    }
    for v in nt.interior() {
        if lists[&v].len() < 5 {
            return Err(ThomassenError::ShortInteriorList(v));
        }
    }
    let mut out = Colouring::default();
    colour(nt, &lists, &mut out)?;
    Ok(out)
}

fn colour(
    g: &NearTriangulation,
    lists: &BTreeMap<Vertex, ColorList>,
    out: &mut Colouring,
) -> Result<(), ThomassenError> {
    let c = g.outer().vertices();
    let k = c.len();
    let first = |v: Vertex| lists[&v].min().expect("nonempty");
    let (a, b) = (first(c[0]), first(c[1]));
    out.set(c[0], a);
    out.set(c[1], b);
    if g.n() == 3 {
        let pick = lists[&c[2]].without(a).without(b).min().ok_or(ThomassenError::Stuck { vertex: c[2], n: 3 })?;
        out.set(c[2], pick);
        return Ok(());
    }
    if let Some((i, j)) = g.first_chord() {
        let (part_a, part_b) = g.split_cycle(i, j).map_err(|_| ThomassenError::Stuck { vertex: c[i], n: g.n() })?;
        // colour the part holding the edge v1 v2 first, then the other with the chord ends fixed
        let (head, tail) = if i >= 1 { (part_a, part_b.reanchored(c[j])) } else { (part_b, Ok(part_a)) };
        let tail = tail.expect("chord end lies on the part boundary");
        colour(&head, lists, out)?;
        let mut tail_lists = lists.clone();
        for v in [tail.outer().v(1), tail.outer().v(2)] {
            tail_lists.insert(v, ColorList::singleton(out.get(v).expect("coloured in head")));
        }
        return colour(&tail, &tail_lists, out);
    }
    let vk = c[k - 1];
    let fan = g.fan_at_last().map_err(|_| ThomassenError::Stuck { vertex: vk, n: g.n() })?;
    let spare: Vec<Color> = lists[&vk].without(a).iter().take(2).collect();
    if spare.len() < 2 {
        return Err(ThomassenError::Stuck { vertex: vk, n: g.n() });
    }
    let mut reduced = lists.clone();
    for u in &fan.u {
        let l = reduced[u].without(spare[0]).without(spare[1]);
        reduced.insert(*u, l);
    }
    colour(&fan.reduced, &reduced, out)?;
    let before = out.get(c[k - 2]).expect("coloured");
    out.set(vk, if before != spare[0] { spare[0] } else { spare[1] });
    Ok(())
}
