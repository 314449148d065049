//! The verification battery behind `polarcl suite`, and the seeded test
//! corpus of generator sets it runs on.

use crate::bitset::BitSet;
use crate::clsets::gq::{Gq, TightSetLabel};
use crate::clsets::{ClContext, Construction, ConstructionSpec, Domain, GeneratorSet, SpaceType};
use crate::combinatorics;
use crate::enumeration::{GeneratorClass, PolarSpaceInstance};
use crate::error::Result;
use crate::geometry::PolarSpaceDescriptor;
use crate::scheme::SchemeContext;
use crate::search::{self, ClLabel};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex};
use std::time::Instant;

/// Spaces of the count oracle.
pub const COUNT_SPACES: [&str; 10] = [
    "Q+(5,2)", "Q+(7,2)", "Q(4,2)", "Q(6,2)", "Q-(5,2)", "W(3,2)", "W(3,3)", "W(5,2)", "H(3,4)", "H(4,4)",
];

/// Spaces of the scheme checks.
pub const SCHEME_SPACES: [&str; 4] = ["Q(6,2)", "Q-(5,2)", "H(3,4)", "Q+(7,2)"];

/// Spaces on which statement (iv) is compared with the other statements.
pub const SPREAD_SPACES: [&str; 4] = ["W(3,2)", "Q-(5,2)", "Q+(5,2)", "Q(4,2)"];

#[derive(Clone, Debug, Serialize)]
pub struct SuiteOptions {
    pub seed: u64,
    pub corpus_size: usize,
    pub budget: u64,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            seed: 20240611,
            corpus_size: 500,
            budget: search::node_budget(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub details: Vec<String>,
    pub seconds: f64,
}

/// Enumerated spaces shared between criteria.
#[derive(Default)]
pub struct SpaceCache {
    spaces: Mutex<HashMap<String, Arc<ClContext>>>,
}

impl SpaceCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, symbol: &str) -> Result<Arc<ClContext>> {
        if let Some(c) = self.spaces.lock().expect("cache lock").get(symbol) {
            return Ok(c.clone());
        }
        let desc = PolarSpaceDescriptor::parse_symbol(symbol)?;
        let inst = Arc::new(PolarSpaceInstance::enumerate(&desc)?);
        let ctx = Arc::new(ClContext::new(Arc::new(SchemeContext::new(inst)?)));
        self.spaces
            .lock()
            .expect("cache lock")
            .insert(symbol.to_string(), ctx.clone());
        Ok(ctx)
    }
}

fn spaced(n: usize, k: usize) -> Vec<usize> {
    if n == 0 {
        return Vec::new();
    }
    let k = k.min(n);
    (0..k).map(|i| i * n / k).collect()
}

/// Standard constructions available on the space: pencils, embedded polar
/// spaces, hyperbolic classes, base-plane and base-solid sets, class pencils,
/// the mixed-class set on type II spaces, and complements of all of these.
pub fn standard_constructions(ctx: &ClContext, per_kind: usize) -> Result<Vec<Construction>> {
    let inst = ctx.scheme().instance();
    let n = ctx.num_generators();
    let mut out = Vec::new();
    for p in spaced(inst.num_points(), per_kind) {
        out.push(ctx.construct(&ConstructionSpec::PointPencil { point: p, domain: Domain::Full })?);
    }
    if let Ok(sections) = ctx.embedded_sections() {
        for i in spaced(sections.len(), per_kind) {
            out.push(ctx.construct(&ConstructionSpec::EmbeddedPolarSpace { index: i })?);
        }
    }
    if let Some(classes) = inst.hyperbolic_classes() {
        for i in spaced(classes.len(), per_kind) {
            out.push(ctx.construct(&ConstructionSpec::HyperbolicClass { index: i })?);
        }
        if ctx.scheme().rank() == 3 {
            for g in spaced(n, per_kind) {
                out.push(ctx.construct(&ConstructionSpec::BasePlane { generator: g })?);
            }
        }
    }
    if ctx.has_class_domain() {
        for class in [GeneratorClass::Latin, GeneratorClass::Greek] {
            for p in spaced(inst.num_points(), per_kind / 2 + 1) {
                out.push(ctx.construct(&ConstructionSpec::PointPencil {
                    point: p,
                    domain: Domain::Class(class),
                })?);
            }
        }
        if ctx.scheme().rank() == 4 {
            for g in spaced(n, per_kind) {
                out.push(ctx.construct(&ConstructionSpec::BaseSolid { generator: g })?);
            }
        }
        out.push(mixed_class_set(ctx)?);
    }
    let complements: Vec<Construction> = out
        .iter()
        .map(|k| ctx.construct(&ConstructionSpec::Complement { of: k.set.clone() }))
        .collect::<Result<_>>()?;
    out.extend(complements);
    Ok(out)
}

/// Latin generators through P together with Greek generators through a point
/// P′ not collinear with P: parameter 1 on all generators of Q+(2d−1,q), d even.
pub fn mixed_class_set(ctx: &ClContext) -> Result<Construction> {
    let inst = ctx.scheme().instance();
    let far = (1..inst.num_points())
        .find(|&p| !inst.collinear(0, p))
        .expect("non-collinear point");
    let a = ctx.construct(&ConstructionSpec::PointPencil {
        point: 0,
        domain: Domain::Class(GeneratorClass::Latin),
    })?;
    let b = ctx.construct(&ConstructionSpec::PointPencil {
        point: far,
        domain: Domain::Class(GeneratorClass::Greek),
    })?;
    let set = GeneratorSet::new(a.set.members().union(b.set.members()), Domain::Full);
    Ok(Construction {
        kind: "mixed_class",
        set,
        predicted_x: BigRational::from_integer(BigInt::from(1)),
    })
}

/// At least `min_size` distinct generator sets: constructions, their unions,
/// differences and complements, single-element perturbations of the
/// Cameron-Liebler ones, and random sets (some with integral x).
pub fn corpus(ctx: &ClContext, seed: u64, min_size: usize) -> Result<Vec<GeneratorSet>> {
    let n = ctx.num_generators();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (n as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
    let mut seen: HashSet<(Vec<usize>, Domain)> = HashSet::new();
    let mut out = Vec::new();
    let mut push = |s: GeneratorSet, out: &mut Vec<GeneratorSet>| {
        if seen.insert((s.to_vec(), s.domain())) {
            out.push(s);
        }
    };
    let cons = standard_constructions(ctx, 8)?;
    for k in &cons {
        push(k.set.clone(), &mut out);
    }
    // set algebra
    for _ in 0..60 {
        let a = cons.choose(&mut rng).expect("constructions");
        let b = cons.choose(&mut rng).expect("constructions");
        if a.set.domain() != b.set.domain() {
            continue;
        }
        if a.set.members().is_disjoint(b.set.members()) {
            push(GeneratorSet::new(a.set.members().union(b.set.members()), a.set.domain()), &mut out);
        }
        if b.set.members().is_subset(a.set.members()) {
            push(GeneratorSet::new(a.set.members().difference(b.set.members()), a.set.domain()), &mut out);
        }
        push(GeneratorSet::new(a.set.members().intersection(b.set.members()), a.set.domain()), &mut out);
        push(GeneratorSet::new(a.set.members().union(b.set.members()), a.set.domain()), &mut out);
    }
    // unions of pencils with pairwise non-collinear vertices
    let inst = ctx.scheme().instance();
    for _ in 0..20 {
        let mut pts: Vec<usize> = Vec::new();
        let want = rng.gen_range(2..=3);
        for _ in 0..50 {
            let p = rng.gen_range(0..inst.num_points());
            if pts.iter().all(|&r| !inst.collinear(p, r)) {
                pts.push(p);
            }
            if pts.len() == want {
                break;
            }
        }
        let members = pts
            .iter()
            .fold(BitSet::new(n), |acc, &p| acc.union(&BitSet::from_indices(n, inst.point_generators(p).iter().copied())));
        push(GeneratorSet::new(members, Domain::Full), &mut out);
    }
    // perturbations of Cameron-Liebler constructions
    let dom_sets: HashMap<Domain, BitSet> = cons
        .iter()
        .map(|k| k.set.domain())
        .collect::<HashSet<_>>()
        .into_iter()
        .map(|d| Ok((d, ctx.domain_set(d)?)))
        .collect::<Result<_>>()?;
    for k in cons.iter().take(24) {
        let dom = &dom_sets[&k.set.domain()];
        let inside = k.set.to_vec();
        let outside: Vec<usize> = dom.difference(k.set.members()).to_vec();
        for _ in 0..3 {
            let mut m = k.set.members().clone();
            match rng.gen_range(0..3) {
                0 if !inside.is_empty() => m.remove(*inside.choose(&mut rng).expect("non-empty")),
                1 if !outside.is_empty() => m.insert(*outside.choose(&mut rng).expect("non-empty")),
                _ if !inside.is_empty() && !outside.is_empty() => {
                    m.remove(*inside.choose(&mut rng).expect("non-empty"));
                    m.insert(*outside.choose(&mut rng).expect("non-empty"));
                }
                _ => {}
            }
            push(GeneratorSet::new(m, k.set.domain()), &mut out);
        }
    }
    // random sets until the corpus is large enough
    let pencil = combinatorics::pencil_size(ctx.descriptor());
    let pencil: usize = pencil.try_into().unwrap_or(usize::MAX);
    let mut attempts = 0;
    while out.len() < min_size && attempts < 100 * min_size {
        attempts += 1;
        let members = if attempts % 2 == 0 && pencil <= n {
            let x = rng.gen_range(1..=(n / pencil).max(1));
            let mut idx: Vec<usize> = (0..n).collect();
            idx.shuffle(&mut rng);
            BitSet::from_indices(n, idx.into_iter().take(x * pencil))
        } else {
            let p: f64 = rng.gen_range(0.05..0.95);
            BitSet::from_indices(n, (0..n).filter(|_| rng.gen_bool(p)))
        };
        push(GeneratorSet::new(members, Domain::Full), &mut out);
    }
    Ok(out)
}

/// Runs one criterion.
pub fn run_criterion(id: u8, opts: &SuiteOptions, cache: &SpaceCache) -> CriterionOutcome {
    let start = Instant::now();
    let (title, res): (&'static str, Result<(bool, Vec<String>)>) = match id {
        1 => ("subspace counts", criterion_counts(cache)),
        2 => ("distance-regularity", criterion_regularity(cache)),
        3 => ("spectrum of the disjointness matrix", criterion_spectrum(cache)),
        4 => ("characterisation equivalence", criterion_equivalence(cache, opts)),
        5 => ("example parameters", criterion_examples(cache)),
        6 => ("distance distribution", criterion_distribution(cache)),
        7 => ("2-regular systems in V0+V2 on Q+(5,2)", criterion_regular_systems(cache, opts)),
        8 => ("parameter-1 classification", criterion_parameter_one(cache, opts)),
        9 => ("tight-set classification", criterion_tight_sets(cache, opts)),
        10 => ("small-x classification on Q-(5,2)", criterion_small_x(cache, opts)),
        11 => ("two-generator disjointness counts", criterion_two_generators(cache)),
        12 => ("spread facts", criterion_spreads(cache, opts)),
        _ => ("unknown criterion", Ok((false, vec![format!("no criterion {id}")]))),
    };
    let (passed, details) = match res {
        Ok(r) => r,
        Err(e) => (false, vec![format!("error: {e}")]),
    };
    CriterionOutcome {
        id,
        title,
        passed,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all(opts: &SuiteOptions) -> Vec<CriterionOutcome> {
    let cache = SpaceCache::new();
    (1..=12).map(|id| run_criterion(id, opts, &cache)).collect()
}

type Check = Result<(bool, Vec<String>)>;

fn criterion_counts(cache: &SpaceCache) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    for s in COUNT_SPACES {
        let ctx = cache.get(s)?;
        let inst = ctx.scheme().instance();
        let desc = ctx.descriptor();
        let counts: Vec<usize> = (0..desc.rank()).map(|k| inst.level(k).len()).collect();
        let good = (0..desc.rank()).all(|k| BigInt::from(counts[k]) == combinatorics::subspace_count(desc, k));
        ok &= good;
        details.push(format!("{s}: levels {counts:?} {}", if good { "match" } else { "MISMATCH" }));
    }
    Ok((ok, details))
}

fn criterion_regularity(cache: &SpaceCache) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    for s in SCHEME_SPACES {
        let ctx = cache.get(s)?;
        match ctx.scheme().verify_distance_regularity() {
            Ok(p) => details.push(format!("{s}: b = {:?}, c = {:?}", p.b, p.c)),
            Err(v) => {
                ok = false;
                details.push(format!("{s}: {v}"));
            }
        }
    }
    Ok((ok, details))
}

fn criterion_spectrum(cache: &SpaceCache) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    for s in SCHEME_SPACES {
        let ctx = cache.get(s)?;
        let r = ctx.scheme().verify_spectrum()?;
        ok &= r.passed();
        details.push(format!("{s}: dims {:?}, {} vectors checked, {} failures", r.dims, r.vectors_checked, r.failures.len()));
    }
    Ok((ok, details))
}

fn criterion_equivalence(cache: &SpaceCache, opts: &SuiteOptions) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    for s in COUNT_SPACES {
        let ctx = cache.get(s)?;
        if ctx.num_generators() > 300 {
            continue;
        }
        let spreads = if SPREAD_SPACES.contains(&s) {
            search::find_spreads(&ctx, Domain::Full, opts.budget)?.solutions
        } else {
            Vec::new()
        };
        let sets = corpus(&ctx, opts.seed, opts.corpus_size)?;
        let mut cl = 0;
        let mut bad = 0;
        let mut spread_bad = 0;
        for set in &sets {
            let r = ctx.check(set, &spreads)?;
            cl += r.is_cameron_liebler as usize;
            bad += !r.consistent as usize;
            if let Some(v) = r.spreads.decided() {
                spread_bad += (v != r.is_cameron_liebler) as usize;
            }
        }
        ok &= bad == 0 && spread_bad == 0 && sets.len() >= opts.corpus_size;
        details.push(format!(
            "{s}: {} sets ({cl} Cameron-Liebler), {bad} disagreements, {} spreads, {spread_bad} spread disagreements",
            sets.len(),
            spreads.len()
        ));
    }
    Ok((ok, details))
}

fn criterion_examples(cache: &SpaceCache) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    let expect = |ctx: &ClContext, k: &Construction, x: i64, details: &mut Vec<String>| -> Result<bool> {
        let r = ctx.check(&k.set, &[])?;
        let got = ctx.parameter(&k.set);
        let good = r.is_cameron_liebler && r.consistent && got == BigRational::from_integer(x.into()) && k.predicted_x == got;
        details.push(format!("{} {}: x = {} {}", ctx.descriptor(), k.kind, r.x, if good { "ok" } else { "WRONG" }));
        Ok(good)
    };
    for s in COUNT_SPACES {
        let ctx = cache.get(s)?;
        let p = ctx.construct(&ConstructionSpec::PointPencil { point: 0, domain: Domain::Full })?;
        ok &= expect(&ctx, &p, 1, &mut details)?;
        let c = ctx.construct(&ConstructionSpec::Complement { of: p.set })?;
        let sz = combinatorics::spread_size(ctx.descriptor());
        ok &= expect(&ctx, &c, i64::try_from(sz).expect("small") - 1, &mut details)?;
    }
    let q5 = cache.get("Q-(5,2)")?;
    ok &= expect(&q5, &q5.construct(&ConstructionSpec::EmbeddedPolarSpace { index: 0 })?, 3, &mut details)?;
    let q6 = cache.get("Q(6,2)")?;
    let nclasses = q6.scheme().instance().hyperbolic_classes().map_or(0, |c| c.len());
    for i in 0..nclasses {
        let k = q6.construct(&ConstructionSpec::HyperbolicClass { index: i })?;
        let r = q6.check(&k.set, &[])?;
        ok &= r.is_cameron_liebler && q6.parameter(&k.set) == BigRational::from_integer(1.into());
    }
    details.push(format!("Q(6,2): all {nclasses} hyperbolic classes have x = 1"));
    for s in ["Q(6,2)", "W(5,2)"] {
        let ctx = cache.get(s)?;
        ok &= expect(&ctx, &ctx.construct(&ConstructionSpec::BasePlane { generator: 0 })?, 1, &mut details)?;
    }
    let q7 = cache.get("Q+(7,2)")?;
    ok &= expect(&q7, &q7.construct(&ConstructionSpec::BaseSolid { generator: 0 })?, 1, &mut details)?;
    Ok((ok, details))
}

fn criterion_distribution(cache: &SpaceCache) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    for s in COUNT_SPACES {
        let ctx = cache.get(s)?;
        let n = ctx.num_generators();
        for k in standard_constructions(&ctx, 2)? {
            let dom = ctx.domain_set(k.set.domain())?;
            let probes: Vec<usize> = {
                let members = dom.to_vec();
                spaced(members.len(), 24).into_iter().map(|i| members[i]).collect()
            };
            let in_scope = match k.set.domain() {
                Domain::Class(_) => true,
                Domain::Full => ctx.space_type() != SpaceType::II && ctx.scheme().set_eigenspace_membership(k.set.members(), &[0, 1]),
            };
            let mut matched = 0;
            for &pi in &probes {
                matched += ctx.intersection_profile(&k.set, pi)?.matches() as usize;
            }
            if in_scope {
                ok &= matched == probes.len() && probes.len() >= 20.min(n);
            }
            if in_scope || matched != probes.len() {
                details.push(format!(
                    "{s} {} ({}): {matched}/{} probes match{}",
                    k.kind,
                    k.set.domain(),
                    probes.len(),
                    if in_scope { "" } else { " (outside V0+V1, informational)" }
                ));
            }
        }
    }
    // the recursion for z_j on Q-(5,2)
    let ctx = cache.get("Q-(5,2)")?;
    let mut z_ok = 0;
    let mut z_total = 0;
    for k in standard_constructions(&ctx, 4)? {
        for pi in (0..ctx.num_generators()).filter(|&g| !k.set.contains(g)).take(20) {
            for &p in ctx.scheme().instance().generator_points(pi) {
                let z = ctx.z_profile(&k.set, pi, p)?;
                let top = *z.last().expect("d ≥ 2");
                let pred = crate::clsets::z_prediction(ctx.descriptor(), top);
                z_total += 1;
                z_ok += z.iter().zip(&pred).all(|(&a, b)| BigInt::from(a) == *b) as usize;
            }
        }
    }
    ok &= z_ok == z_total && z_total > 0;
    details.push(format!("Q-(5,2) z_j recursion: {z_ok}/{z_total} probes"));
    Ok((ok, details))
}

fn criterion_regular_systems(cache: &SpaceCache, opts: &SuiteOptions) -> Check {
    let ctx = cache.get("Q+(5,2)")?;
    let r = search::find_regular_systems(&ctx, Domain::Full, 2, Some(&[0, 2]), opts.budget, Some(1))?;
    let mut ok = !r.solutions.is_empty();
    let mut details = vec![format!("found {} system(s) after {} nodes", r.solutions.len(), r.nodes)];
    for s in &r.solutions {
        let set = GeneratorSet::new(s.clone(), Domain::Full);
        let rep = ctx.check(&set, &[])?;
        let in_space = ctx.scheme().set_eigenspace_membership(s, &[0, 2]);
        let fails_all = rep
            .verdicts()
            .iter()
            .filter_map(|(_, v)| v.decided())
            .all(|v| !v);
        ok &= in_space && !rep.is_cameron_liebler && fails_all;
        details.push(format!("system {:?}: in V0+V2 {in_space}, every test fails {fails_all}", s.to_vec()));
    }
    let latin = ctx.domain_set(Domain::Full)?.intersection(&BitSet::from_indices(
        ctx.num_generators(),
        ctx.scheme().instance().class_members(GeneratorClass::Latin)?,
    ));
    let class = GeneratorSet::new(latin, Domain::Full);
    let three = ctx.regular_system_degree(&class)? == Some(3) && ctx.scheme().set_eigenspace_membership(class.members(), &[0, 3]);
    ok &= three;
    details.push(format!("one class is a 3-regular system in V0+V3: {three}"));
    Ok((ok, details))
}

fn tally(labels: &[ClLabel]) -> BTreeMap<&'static str, usize> {
    let mut m = BTreeMap::new();
    for l in labels {
        *m.entry(l.kind()).or_insert(0) += 1;
    }
    m
}

fn criterion_parameter_one(cache: &SpaceCache, opts: &SuiteOptions) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    let cases: [(&str, Domain, &[(&str, usize)]); 4] = [
        ("W(3,2)", Domain::Full, &[("point_pencil", 15)]),
        ("Q-(5,2)", Domain::Full, &[("point_pencil", 27)]),
        (
            "Q(6,2)",
            Domain::Full,
            &[("base_plane", 135), ("hyperbolic_class", 72), ("point_pencil", 63)],
        ),
        (
            "Q+(7,2)",
            Domain::Class(GeneratorClass::Latin),
            &[("base_solid", 135), ("point_pencil", 135)],
        ),
    ];
    for (s, dom, want) in cases {
        let ctx = cache.get(s)?;
        let r = search::find_cl_parameter1(&ctx, dom, opts.budget)?;
        let got = tally(&r.labels);
        let want: BTreeMap<&str, usize> = want.iter().copied().collect();
        let good = r.result.complete && got == want;
        ok &= good;
        details.push(format!("{s} ({dom}): {got:?}, complete {}", r.result.complete));
    }
    Ok((ok, details))
}

fn criterion_tight_sets(cache: &SpaceCache, opts: &SuiteOptions) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    for (s, xmax) in [("W(3,2)", 2), ("H(3,4)", 3)] {
        let ctx = cache.get(s)?;
        let gq = Gq::from_instance(ctx.scheme().instance())?;
        for x in 1..=xmax {
            let r = search::find_tight_sets(&gq, x, opts.budget)?;
            let lines = r.labels.iter().filter(|&&l| l == TightSetLabel::LineUnion).count();
            let subs = r.labels.iter().filter(|&&l| l == TightSetLabel::Subquadrangle).count();
            let other = r.labels.len() - lines - subs;
            ok &= other == 0 && r.result.complete && !r.labels.is_empty();
            details.push(format!(
                "GQ{:?} x = {x}: {lines} line unions, {subs} subquadrangles, {other} other",
                gq.order()
            ));
        }
    }
    Ok((ok, details))
}

fn criterion_small_x(cache: &SpaceCache, opts: &SuiteOptions) -> Check {
    let ctx = cache.get("Q-(5,2)")?;
    let inst = ctx.scheme().instance();
    let mut ok = true;
    let mut details = Vec::new();
    for x in 1..=3u64 {
        let r = search::find_cl_sets(&ctx, Domain::Full, x, true, opts.budget)?;
        let good = r.labels.iter().all(|l| match l {
            ClLabel::PencilUnion(pts) => {
                pts.len() as u64 == x && pts.iter().all(|&a| pts.iter().all(|&b| a == b || !inst.collinear(a, b)))
            }
            ClLabel::EmbeddedPolarSpace => x == 3,
            _ => false,
        });
        ok &= good && r.result.complete;
        details.push(format!("x = {x}: {:?}, complete {}", tally(&r.labels), r.result.complete));
        if x <= 2 {
            let plain = search::find_cl_sets(&ctx, Domain::Full, x, false, opts.budget)?;
            let same = plain.result.solutions == r.result.solutions;
            ok &= same;
            details.push(format!("x = {x}: search without implied counts agrees: {same}"));
        }
    }
    Ok((ok, details))
}

fn criterion_two_generators(cache: &SpaceCache) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    for s in ["Q+(7,2)", "H(3,4)"] {
        let ctx = cache.get(s)?;
        let sc = ctx.scheme();
        let d = sc.rank() as i64;
        let mut seen: BTreeMap<i64, (BigInt, HashSet<usize>)> = BTreeMap::new();
        for g in spaced(ctx.num_generators(), 3) {
            for h in 0..ctx.num_generators() {
                let v = d - 1 - sc.distance(g, h) as i64;
                if let Ok(f) = combinatorics::kms_disjoint_to_two(ctx.descriptor(), v) {
                    let e = seen.entry(v).or_insert((f, HashSet::new()));
                    e.1.insert(search::disjoint_to_both(&ctx, g, h, None));
                }
            }
        }
        for (v, (f, counts)) in &seen {
            let good = counts.len() == 1 && counts.iter().all(|&c| BigInt::from(c) == *f);
            ok &= good;
            details.push(format!("{s} v = {v}: formula {f}, brute force {counts:?}"));
        }
    }
    let ctx = cache.get("Q+(7,2)")?;
    let sc = ctx.scheme();
    let latin = Domain::Class(GeneratorClass::Latin);
    let class = ctx.domain_set(latin)?;
    let full = GeneratorSet::new(class.clone(), latin);
    let sets = [
        ("point pencil", ctx.construct(&ConstructionSpec::PointPencil { point: 0, domain: latin })?.set),
        ("base solid", {
            let greek = sc.instance().class_members(GeneratorClass::Greek)?[0];
            ctx.construct(&ConstructionSpec::BaseSolid { generator: greek })?.set
        }),
        ("full class", full),
    ];
    let members = class.to_vec();
    for (name, set) in &sets {
        let x = ctx.parameter(set).to_integer();
        let x: i64 = x.try_into().expect("small parameter");
        let mut mismatches = 0;
        let mut pairs = 0;
        for &a in members.iter().step_by(9) {
            for &b in sc.relation(sc.rank(), a) {
                let b = b as usize;
                let f = combinatorics::disjoint_to_two_in_class(ctx.descriptor(), x, set.contains(a), set.contains(b))?;
                let got = search::disjoint_to_both(&ctx, a, b, Some(set.members()));
                pairs += 1;
                mismatches += (BigInt::from(got) != f) as usize;
            }
        }
        let max = search::max_pairwise_disjoint(&ctx, set);
        let c = (1..=max as i64 + 1).find(|&c| combinatorics::no_c_disjoint_margin(2, x, c) > 0);
        let bound_ok = c.map_or(true, |c| max as i64 <= c);
        ok &= mismatches == 0 && bound_ok;
        details.push(format!(
            "{name} (x = {x}): {pairs} disjoint pairs, {mismatches} mismatches; max disjoint {max}, inequality bound {c:?}"
        ));
    }
    let f = combinatorics::disjoint_to_two_in_class(ctx.descriptor(), 9, true, true)?;
    ok &= f == BigInt::from(28);
    details.push(format!("full class at q = 2 with exponent n(n-1): {f}"));
    Ok((ok, details))
}

fn criterion_spreads(cache: &SpaceCache, opts: &SuiteOptions) -> Check {
    let mut ok = true;
    let mut details = Vec::new();
    for s in ["Q+(3,2)", "Q+(5,2)", "Q+(7,2)"] {
        let ctx = cache.get(s)?;
        let r = search::find_spreads(&ctx, Domain::Full, opts.budget)?;
        let labels = ctx.scheme().instance().class_labels().expect("hyperbolic");
        let pure = r
            .solutions
            .iter()
            .all(|sp| sp.iter().all(|g| labels[g] == labels[sp.first().expect("non-empty")]));
        ok &= pure && r.complete;
        details.push(format!("{s}: {} spreads, all class-pure {pure}", r.solutions.len()));
    }
    for s in ["W(3,2)", "Q-(5,2)", "Q(4,2)", "Q+(7,2)"] {
        let ctx = cache.get(s)?;
        let desc = ctx.descriptor();
        let spreads = search::find_spreads(&ctx, Domain::Full, opts.budget)?.solutions;
        let pencil = combinatorics::pencil_size(desc);
        let keep: Vec<usize> = (0..=desc.rank())
            .filter(|j| !combinatorics::cl_eigenspace_indices(desc).contains(j))
            .collect();
        let orth = spreads.iter().all(|sp| {
            let w: Vec<BigInt> = (0..ctx.num_generators())
                .map(|g| &pencil * BigInt::from(sp.contains(g) as u8) - 1)
                .collect();
            ctx.scheme().eigenspace_membership_big(&w, &keep)
        });
        let dom = if ctx.has_class_domain() {
            Domain::Class(GeneratorClass::Latin)
        } else {
            Domain::Full
        };
        let cl_sets = search::find_cl_parameter1(&ctx, dom, opts.budget)?.result.solutions;
        let mut sets: Vec<GeneratorSet> = cl_sets.into_iter().map(|s| GeneratorSet::new(s, dom)).collect();
        sets.extend(
            standard_constructions(&ctx, 4)?
                .into_iter()
                .map(|k| k.set)
                .filter(|s| ctx.check(s, &[]).map(|r| r.is_cameron_liebler).unwrap_or(false)),
        );
        let meets = sets.iter().all(|set| {
            let x = ctx.parameter(set);
            let dset = ctx.domain_set(set.domain()).expect("domain");
            spreads
                .iter()
                .filter(|sp| sp.is_subset(&dset))
                .all(|sp| BigRational::from_integer(sp.intersection_count(set.members()).into()) == x)
        });
        let mut regular_ok = true;
        let mut nreg = 0;
        if s == "W(3,2)" {
            let reg = search::find_regular_systems(&ctx, Domain::Full, 2, None, opts.budget, None)?;
            nreg = reg.solutions.len();
            regular_ok = reg.complete
                && sets.iter().filter(|s| s.domain() == Domain::Full).all(|set| {
                    let x = ctx.parameter(set);
                    reg.solutions
                        .iter()
                        .all(|r| BigRational::from_integer(r.intersection_count(set.members()).into()) == &x * BigInt::from(2))
                });
        }
        ok &= orth && meets && regular_ok && !spreads.is_empty();
        details.push(format!(
            "{s}: {} spreads orthogonal to V{:?}: {orth}; {} CL sets meet every spread in x: {meets}{}",
            spreads.len(),
            combinatorics::cl_eigenspace_indices(desc),
            sets.len(),
            if s == "W(3,2)" {
                format!("; {nreg} 2-regular systems met in 2x: {regular_ok}")
            } else {
                String::new()
            }
        ));
    }
    Ok((ok, details))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn corpus_is_large_and_distinct() {
        let cache = SpaceCache::new();
        let ctx = cache.get("W(3,2)").unwrap();
        let c = corpus(&ctx, 1, 500).unwrap();
        assert!(c.len() >= 500);
        let distinct: HashSet<Vec<usize>> = c.iter().map(|s| s.to_vec()).collect();
        assert_eq!(distinct.len(), c.len());
        let again = corpus(&ctx, 1, 500).unwrap();
        assert_eq!(c, again);
    }

    #[test]
    fn first_criteria_pass() {
        let cache = SpaceCache::new();
        let opts = SuiteOptions::default();
        for id in [1, 7] {
            let o = run_criterion(id, &opts, &cache);
            assert!(o.passed, "{o:?}");
        }
    }
}
