use polarcl::bitset::BitSet;
use polarcl::clsets::gq::{Gq, TightSetLabel};
use polarcl::clsets::{ClContext, Domain};
use polarcl::enumeration::GeneratorClass;
use polarcl::io;
use polarcl::search::{self, ClLabel, Constraint, Problem};
use polarcl::suite::SpaceCache;
use proptest::prelude::*;
use std::sync::{Arc, OnceLock};

fn ctx(s: &str) -> Arc<ClContext> {
    static C: OnceLock<SpaceCache> = OnceLock::new();
    C.get_or_init(SpaceCache::new).get(s).unwrap()
}

fn covers_once(c: &ClContext, s: &BitSet) -> bool {
    let inst = c.scheme().instance();
    let mut cover = vec![0; inst.num_points()];
    for g in s.iter() {
        for &p in inst.generator_points(g) {
            cover[p] += 1;
        }
    }
    cover.iter().all(|&k| k == 1)
}

#[test]
fn spread_counts() {
    for (s, n) in [("W(3,2)", 6), ("Q(4,2)", 6), ("Q-(5,2)", 200), ("Q+(3,2)", 2), ("Q+(5,2)", 0)] {
        let c = ctx(s);
        let r = search::find_spreads(&c, Domain::Full, 10_000_000).unwrap();
        assert!(r.complete, "{s}");
        assert_eq!(r.solutions.len(), n, "{s}");
        assert!(r.solutions.iter().all(|sp| covers_once(&c, sp)), "{s}");
    }
}

#[test]
fn class_spreads_of_q72() {
    let c = ctx("Q+(7,2)");
    let r = search::find_spreads(&c, Domain::Class(GeneratorClass::Latin), 10_000_000).unwrap();
    assert!(r.complete);
    assert_eq!(r.solutions.len(), 960);
}

#[test]
fn results_are_sorted_and_deterministic() {
    let c = ctx("Q-(5,2)");
    let a = search::find_spreads(&c, Domain::Full, 10_000_000).unwrap();
    let b = search::find_spreads(&c, Domain::Full, 10_000_000).unwrap();
    assert_eq!(a.solutions, b.solutions);
    let v: Vec<Vec<usize>> = a.solutions.iter().map(|s| s.to_vec()).collect();
    let mut sorted = v.clone();
    sorted.sort();
    assert_eq!(v, sorted);
}

#[test]
fn budget_exhaustion_is_reported() {
    let c = ctx("Q-(5,2)");
    let r = search::find_spreads(&c, Domain::Full, 10).unwrap();
    assert!(!r.complete);
    assert!(r.solutions.iter().all(|sp| covers_once(&c, sp)));
}

#[test]
fn q62_parameter_one_labels() {
    let c = ctx("Q(6,2)");
    let r = search::find_cl_parameter1(&c, Domain::Full, 100_000_000).unwrap();
    assert!(r.result.complete);
    let count = |k: &str| r.labels.iter().filter(|l| l.kind() == k).count();
    assert_eq!(count("point_pencil"), 63);
    assert_eq!(count("hyperbolic_class"), 72);
    assert_eq!(count("base_plane"), 135);
}

#[test]
fn q52_cl_sets_with_parameter_two() {
    let c = ctx("Q-(5,2)");
    let r = search::find_cl_sets(&c, Domain::Full, 2, true, 100_000_000).unwrap();
    assert_eq!(r.labels.len(), 216);
    assert!(r.labels.iter().all(|l| matches!(l, ClLabel::PencilUnion(v) if v.len() == 2)));
}

#[test]
fn tight_sets_of_the_dual() {
    // lines of Q-(5,2) as points of GQ(4,2)
    let c = ctx("Q-(5,2)");
    let gq = Gq::from_instance(c.scheme().instance()).unwrap().dual();
    assert_eq!(gq.order(), (4, 2));
    let r = search::find_tight_sets(&gq, 1, 10_000_000).unwrap();
    assert_eq!(r.labels.len(), 27);
    assert!(r.labels.iter().all(|&l| l == TightSetLabel::LineUnion));
}

#[test]
fn spread_file_round_trip() {
    let c = ctx("W(3,2)");
    let r = search::find_spreads(&c, Domain::Full, 1_000_000).unwrap();
    let text = io::write_spreads(&r.solutions, Some("W(3,2)"));
    assert_eq!(io::parse_spreads(&text, 15).unwrap(), r.solutions);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    // every returned solution satisfies every constraint, and the count
    // matches brute force over all subsets
    #[test]
    fn solver_matches_brute_force(
        n in 3usize..10,
        raw in proptest::collection::vec((proptest::collection::vec(any::<bool>(), 10), 0i64..3), 1..4),
    ) {
        let mut p = Problem::new(n);
        for (bits, t) in &raw {
            p.push(Constraint::fixed(BitSet::from_indices(n, (0..n).filter(|&i| bits[i])), *t));
        }
        let accept = |_: &BitSet| true;
        let r = p.solve(&accept, None, 1_000_000);
        prop_assert!(r.complete);
        let brute: Vec<Vec<usize>> = (0u32..1 << n)
            .map(|m| BitSet::from_indices(n, (0..n).filter(|&i| m >> i & 1 == 1)))
            .filter(|s| p.satisfied_by(s))
            .map(|s| s.to_vec())
            .collect();
        let mut got: Vec<Vec<usize>> = r.solutions.iter().map(|s| s.to_vec()).collect();
        got.sort();
        let mut brute = brute;
        brute.sort();
        prop_assert_eq!(got, brute);
    }
}
