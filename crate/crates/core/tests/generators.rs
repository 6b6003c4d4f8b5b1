mod common;

use std::collections::BTreeMap;

use colourer::enumerate::{
    disk_code, gen_disk_triangulations, gen_plane_triangulations, parse_planar_code, rooted_instances,
    triangulation_code, write_planar_code, MAX_DISK_N,
};

use common::{ear_disk_counts, flip_classes, CATALAN, TRIANGULATIONS};

#[test]
fn triangulation_counts_match_flip_graph() {
    let ours = gen_plane_triangulations(9).unwrap();
    for n in 4..=9 {
        let count = ours.iter().filter(|t| t.n() == n).count();
        assert_eq!(count, flip_classes(n), "n = {n}");
    }
}

#[test]
fn triangulation_counts_match_published_sequence() {
    let ours = gen_plane_triangulations(12).unwrap();
    for (i, &expected) in TRIANGULATIONS.iter().enumerate() {
        assert_eq!(ours.iter().filter(|t| t.n() == i + 4).count(), expected, "n = {}", i + 4);
    }
}

#[test]
fn disk_counts_match_ear_growth() {
    let expected = ear_disk_counts(7);
    let mut ours: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for c in gen_disk_triangulations(7, 3..=7).unwrap() {
        *ours.entry((c.disk.n(), c.disk.k())).or_default() += 1;
    }
    assert_eq!(ours, expected);
}

#[test]
fn outerplanar_rootings_are_catalan() {
    for n in 3..=8 {
        let total: usize = gen_disk_triangulations(n, n..=n)
            .unwrap()
            .iter()
            .filter(|c| c.disk.n() == n)
            .map(|c| rooted_instances(&c.disk).len())
            .sum();
        assert_eq!(total, CATALAN[n - 3], "n = k = {n}");
    }
}

#[test]
fn generated_codes_are_distinct_and_stable() {
    let ts = gen_plane_triangulations(9).unwrap();
    let mut codes: Vec<_> = ts.iter().map(|t| triangulation_code(t.graph())).collect();
    codes.sort();
    codes.dedup();
    assert_eq!(codes.len(), ts.len());
    let ds = gen_disk_triangulations(8, 3..=8).unwrap();
    for d in &ds {
        assert_eq!(disk_code(&d.disk), d.code);
    }
    assert!(gen_disk_triangulations(MAX_DISK_N + 1, 3..=4).is_err());
}

#[test]
fn planar_code_round_trip() {
    let ts = gen_plane_triangulations(9).unwrap();
    let bytes = write_planar_code(ts.iter().map(|t| t.graph()));
    let back = parse_planar_code(&bytes).unwrap();
    assert_eq!(back.len(), ts.len());
    for (t, nt) in ts.iter().zip(&back) {
        assert_eq!(triangulation_code(nt.graph()), triangulation_code(t.graph()));
        assert_eq!(nt.graph().rotations(), t.graph().rotations());
    }
    assert_eq!(write_planar_code(back.iter().map(|nt| nt.graph())), bytes);
}
