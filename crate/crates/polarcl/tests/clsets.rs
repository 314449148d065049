use num_bigint::BigInt;
use num_rational::BigRational;
use polarcl::bitset::BitSet;
use polarcl::clsets::{ClContext, ConstructionSpec, Domain, GeneratorSet, SpaceType, Verdict};
use polarcl::enumeration::GeneratorClass;
use polarcl::suite::SpaceCache;
use proptest::prelude::*;
use std::sync::{Arc, OnceLock};

fn cache() -> &'static SpaceCache {
    static C: OnceLock<SpaceCache> = OnceLock::new();
    C.get_or_init(SpaceCache::new)
}

fn ctx(s: &str) -> Arc<ClContext> {
    cache().get(s).unwrap()
}

fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

fn pencil(c: &ClContext, p: usize) -> GeneratorSet {
    c.construct(&ConstructionSpec::PointPencil { point: p, domain: Domain::Full }).unwrap().set
}

#[test]
fn space_types() {
    let cases = [
        ("Q+(5,2)", SpaceType::I),
        ("Q+(7,2)", SpaceType::II),
        ("Q(6,2)", SpaceType::III),
        ("W(5,2)", SpaceType::III),
        ("W(5,3)", SpaceType::IV),
        ("Q-(5,2)", SpaceType::I),
        ("H(3,4)", SpaceType::I),
    ];
    for (s, t) in cases {
        let d = polarcl::geometry::PolarSpaceDescriptor::parse_symbol(s).unwrap();
        assert_eq!(SpaceType::of(&d), t, "{s}");
    }
}

#[test]
fn pencil_report_on_w32() {
    let c = ctx("W(3,2)");
    let r = c.check(&pencil(&c, 3), &[]).unwrap();
    assert!(r.is_cameron_liebler && r.consistent);
    assert_eq!(r.x, "1");
    assert_eq!(r.disjointness, Verdict::Pass);
    assert!(r.disjointness_witness.is_none());
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["space"], "W(3,2)");
}

#[test]
fn a_failing_set_has_witnesses() {
    let c = ctx("Q-(5,2)");
    let set = GeneratorSet::from_indices(45, [0, 1, 2], Domain::Full);
    let r = c.check(&set, &[]).unwrap();
    assert!(!r.is_cameron_liebler && r.consistent);
    assert!(r.disjointness_witness.is_some());
    assert_eq!(r.image, Verdict::Fail);
}

#[test]
fn embedded_quadrangle_and_unions() {
    let c = ctx("Q-(5,2)");
    let e = c.construct(&ConstructionSpec::EmbeddedPolarSpace { index: 0 }).unwrap();
    assert_eq!(c.parameter(&e.set), int(3));
    let inst = c.scheme().instance();
    let far = (1..inst.num_points()).find(|&p| !inst.collinear(0, p)).unwrap();
    let u = c
        .construct(&ConstructionSpec::Union { a: pencil(&c, 0), b: pencil(&c, far) })
        .unwrap();
    assert_eq!(u.predicted_x, int(2));
    assert!(c.check(&u.set, &[]).unwrap().is_cameron_liebler);
    let near = (1..inst.num_points()).find(|&p| inst.collinear(0, p)).unwrap();
    assert!(c
        .construct(&ConstructionSpec::Union { a: pencil(&c, 0), b: pencil(&c, near) })
        .is_err());
}

#[test]
fn class_sets_on_q72() {
    let c = ctx("Q+(7,2)");
    let latin = Domain::Class(GeneratorClass::Latin);
    let p = c.construct(&ConstructionSpec::PointPencil { point: 5, domain: latin }).unwrap();
    assert_eq!(p.set.len(), 15);
    let r = c.check(&p.set, &[]).unwrap();
    assert!(r.is_cameron_liebler && r.consistent);
    // a Latin pencil on its own is not Cameron-Liebler on all generators
    let full = GeneratorSet::new(p.set.members().clone(), Domain::Full);
    assert!(!c.check(&full, &[]).unwrap().is_cameron_liebler);
}

#[test]
fn regular_system_degrees() {
    let c = ctx("Q+(5,2)");
    let latin = c.domain_set(Domain::Full).unwrap().intersection(&BitSet::from_indices(
        30,
        c.scheme().instance().class_members(GeneratorClass::Latin).unwrap(),
    ));
    let set = GeneratorSet::new(latin, Domain::Full);
    let r = c.regular_system_check(&set).unwrap();
    assert_eq!(r.direct, Some(3));
    assert_eq!(r.via_matrix, Some(3));
}

#[test]
fn profiles_of_a_pencil() {
    let c = ctx("W(5,2)");
    let p = pencil(&c, 0);
    for pi in [0, 17, 100] {
        assert!(c.intersection_profile(&p, pi).unwrap().matches());
    }
}

fn w32_pencils() -> Vec<GeneratorSet> {
    let c = ctx("W(3,2)");
    (0..15).map(|p| pencil(&c, p)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn verdicts_agree_on_random_sets(bits in proptest::collection::vec(any::<bool>(), 45)) {
        let c = ctx("Q-(5,2)");
        let set = GeneratorSet::from_indices(45, (0..45).filter(|&i| bits[i]), Domain::Full);
        let r = c.check(&set, &[]).unwrap();
        prop_assert!(r.consistent);
    }

    #[test]
    fn complement_rule(p in 0usize..15, q in 0usize..15) {
        let c = ctx("W(3,2)");
        let ps = w32_pencils();
        let set = if p != q && !c.scheme().instance().collinear(p, q) {
            GeneratorSet::new(ps[p].members().union(ps[q].members()), Domain::Full)
        } else {
            ps[p].clone()
        };
        let comp = GeneratorSet::new(set.members().complement(), Domain::Full);
        let x = c.parameter(&set);
        prop_assert_eq!(c.parameter(&comp), int(5) - x.clone());
        prop_assert_eq!(
            c.check(&set, &[]).unwrap().is_cameron_liebler,
            c.check(&comp, &[]).unwrap().is_cameron_liebler
        );
    }

    #[test]
    fn parameter_is_additive(bits in proptest::collection::vec(any::<bool>(), 15)) {
        let c = ctx("W(3,2)");
        let a = GeneratorSet::from_indices(15, (0..15).filter(|&i| bits[i]), Domain::Full);
        let b = GeneratorSet::new(a.members().complement(), Domain::Full);
        let sum = c.parameter(&a) + c.parameter(&b);
        prop_assert_eq!(sum, int(5));
    }

    #[test]
    fn single_changes_break_pencils(p in 0usize..27, g in 0usize..45) {
        let c = ctx("Q-(5,2)");
        let mut m = pencil(&c, p).members().clone();
        if m.contains(g) { m.remove(g) } else { m.insert(g) }
        let r = c.check(&GeneratorSet::new(m, Domain::Full), &[]).unwrap();
        prop_assert!(!r.is_cameron_liebler);
        prop_assert!(r.consistent);
    }
}
