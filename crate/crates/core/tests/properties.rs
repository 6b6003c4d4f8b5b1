use std::collections::{BTreeMap, BTreeSet};
use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use colourer::engine::{colour_theorem2, replay, verify_colouring, Theorem2Outcome};
use colourer::enumerate::{disk_code, gen_disk_triangulations, rooted_instances, RootedInstance};
use colourer::graph::{NearTriangulation, Vertex};
use colourer::lists::{AssignmentSpace, Color, ColorList, ListAssignment};
use colourer::oracle::{
    backtrack_list_colour, check_neighbourhood_condition, first_colouring, OracleOutcome, SearchMode,
};

fn instances() -> &'static [RootedInstance] {
    static I: OnceLock<Vec<RootedInstance>> = OnceLock::new();
    I.get_or_init(|| {
        gen_disk_triangulations(7, 3..=7).unwrap().iter().flat_map(|c| rooted_instances(&c.disk)).collect()
    })
}

fn instance() -> impl Strategy<Value = NearTriangulation> {
    (0..instances().len()).prop_map(|i| instances()[i].nt.clone())
}

fn admissible(nt: &NearTriangulation, seed: u64) -> ListAssignment {
    let space = AssignmentSpace::new(nt, true);
    space.assemble(&space.sample(seed, 1)[0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn colour_list_ops_match_sets(a in 0u8..=255, b in 0u8..=255) {
        let (la, lb) = (ColorList::from_bits(a), ColorList::from_bits(b));
        let set = |l: ColorList| l.iter().collect::<BTreeSet<Color>>();
        prop_assert_eq!(set(la.union(lb)), set(la).union(&set(lb)).copied().collect());
        prop_assert_eq!(set(la.intersection(lb)), set(la).intersection(&set(lb)).copied().collect());
        prop_assert_eq!(set(la.difference(lb)), set(la).difference(&set(lb)).copied().collect());
        prop_assert_eq!(la.len(), set(la).len());
        prop_assert_eq!(la.is_subset(lb), set(la).is_subset(&set(lb)));
    }

    #[test]
    fn engine_colourings_verify(nt in instance(), seed in any::<u64>()) {
        let a = admissible(&nt, seed);
        match colour_theorem2(&nt, &a).unwrap() {
            Theorem2Outcome::Coloured(c) => prop_assert_eq!(verify_colouring(&nt, &a, &c), Ok(())),
            Theorem2Outcome::Failed(w) => prop_assert_eq!(replay(&nt, &a, &w.stack).unwrap(), w.instance),
        }
    }

    #[test]
    fn oracle_first_agrees_with_count(nt in instance(), seed in any::<u64>(), shrink in proptest::collection::vec(0u8..4, 10)) {
        let mut a = admissible(&nt, seed);
        // knock colours out of some lists so that unsatisfiable cases occur
        for (v, s) in nt.graph().vertices().zip(shrink) {
            let l = a.get(v).unwrap();
            if l.len() > 1 {
                a.set(v, l.without(Color(s + 1)));
            }
        }
        let first = first_colouring(nt.graph(), &a);
        let Ok(OracleOutcome::Count(count)) = backtrack_list_colour(nt.graph(), &a, SearchMode::Count) else {
            panic!("count mode returns a count");
        };
        prop_assert_eq!(first.is_some(), count > 0);
        if let Some(c) = first {
            prop_assert_eq!(verify_colouring(&nt, &a, &c), Ok(()));
        }
    }

    #[test]
    fn condition_is_monotone(nt in instance(), seed in any::<u64>(), grow in 0usize..16) {
        prop_assume!(nt.k() >= 4);
        let outer = nt.outer().vertices().to_vec();
        let (v, r) = (outer[2], outer[3]);
        let mut base = admissible(&nt, seed);
        base.set(v, ColorList::L0.without(Color(1 + (seed % 4) as u8)));
        let small = check_neighbourhood_condition(&nt, &base, v, r, None).unwrap();
        let others: Vec<Vertex> = outer[4..].to_vec();
        if others.is_empty() {
            return Ok(());
        }
        let w = others[grow % others.len()];
        let mut bigger = base.clone();
        bigger.set(w, ColorList::L0);
        let large = check_neighbourhood_condition(&nt, &bigger, v, r, None).unwrap();
        let s: BTreeSet<_> = small.good_lists.iter().collect();
        let l: BTreeSet<_> = large.good_lists.iter().collect();
        prop_assert!(s.is_subset(&l));
    }

    #[test]
    fn disk_code_ignores_labels_and_anchor(nt in instance(), shift in 0usize..8, perm_seed in any::<u64>()) {
        let code = disk_code(&nt);
        let ids: Vec<Vertex> = nt.graph().vertices().collect();
        let mut targets: Vec<u32> = (0..ids.len() as u32).map(|i| 100 + i).collect();
        targets.shuffle(&mut ChaCha8Rng::seed_from_u64(perm_seed));
        let map: BTreeMap<Vertex, Vertex> = ids.iter().copied().zip(targets.into_iter().map(Vertex)).collect();
        let relabelled = NearTriangulation::validate(nt.graph().relabelled(&map).unwrap()).unwrap();
        prop_assert_eq!(disk_code(&relabelled), code.clone());
        let anchor = nt.outer().vertices()[shift % nt.k()];
        prop_assert_eq!(disk_code(&nt.reanchored(anchor).unwrap()), code.clone());
        prop_assert_eq!(disk_code(&nt.mirrored()), code);
    }
}
