//! Backtracking searches for spreads, regular systems, tight sets and
//! Cameron-Liebler sets.
//!
//! Every search is phrased as a family of counting constraints on a 0/1
//! vector: |L ∩ S| = t, where t may depend on whether an owner element is in
//! L. Constraints are propagated to a fixed point at every node, and the
//! search splits on the least included element so that disjoint subtrees can
//! run in parallel.

use crate::bitset::BitSet;
use crate::clsets::gq::{Gq, TightSetLabel};
use crate::clsets::{as_count, class_distance_prediction, distance_prediction, ClContext, Domain, GeneratorSet, SpaceType};
use crate::error::{Error, Result};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::Instant;

pub const DEFAULT_NODE_BUDGET: u64 = 500_000_000;

/// Node budget from POLARCL_BUDGET_NODES, or the default.
pub fn node_budget() -> u64 {
    std::env::var("POLARCL_BUDGET_NODES")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_NODE_BUDGET)
}

/// |L ∩ set| must equal `target_in` if the owner is in L and `target_out`
/// otherwise; without an owner both targets are equal. Negative targets are
/// unsatisfiable.
#[derive(Clone, Debug)]
pub struct Constraint {
    pub set: BitSet,
    pub owner: Option<usize>,
    pub target_in: i64,
    pub target_out: i64,
}

impl Constraint {
    pub fn fixed(set: BitSet, target: i64) -> Self {
        Constraint {
            set,
            owner: None,
            target_in: target,
            target_out: target,
        }
    }

    pub fn owned(owner: usize, set: BitSet, target_in: i64, target_out: i64) -> Self {
        Constraint {
            set,
            owner: Some(owner),
            target_in,
            target_out,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Problem {
    n: usize,
    constraints: Vec<Constraint>,
    forced_out: BitSet,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    #[serde(serialize_with = "ser_sets")]
    pub solutions: Vec<BitSet>,
    /// Whole search space covered (no budget cut, no solution limit hit).
    pub complete: bool,
    pub nodes: u64,
    pub seconds: f64,
}

fn ser_sets<S: serde::Serializer>(v: &[BitSet], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|b| b.to_vec()))
}

struct Shared<'a> {
    nodes: AtomicU64,
    budget: u64,
    stop: AtomicBool,
    truncated: AtomicBool,
    found: AtomicU64,
    limit: Option<u64>,
    accept: &'a (dyn Fn(&BitSet) -> bool + Sync),
}

#[derive(Clone)]
struct State {
    inc: BitSet,
    exc: BitSet,
}

enum Step {
    Conflict,
    Changed,
    Stable,
}

impl Problem {
    pub fn new(n: usize) -> Self {
        Problem {
            n,
            constraints: Vec::new(),
            forced_out: BitSet::new(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn push(&mut self, c: Constraint) {
        assert_eq!(c.set.len(), self.n);
        self.constraints.push(c);
    }

    pub fn exclude(&mut self, set: &BitSet) {
        self.forced_out = self.forced_out.union(set);
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    /// Whether a complete 0/1 assignment satisfies every constraint.
    pub fn satisfied_by(&self, set: &BitSet) -> bool {
        set.is_disjoint(&self.forced_out)
            && self.constraints.iter().all(|c| {
                let t = match c.owner {
                    Some(o) if set.contains(o) => c.target_in,
                    Some(_) => c.target_out,
                    None => c.target_in,
                };
                set.intersection_count(&c.set) as i64 == t
            })
    }

    fn propagate_once(&self, st: &mut State) -> Step {
        let mut changed = false;
        for c in &self.constraints {
            let inc = c.set.intersection_count(&st.inc) as i64;
            let exc = c.set.intersection_count(&st.exc) as i64;
            let und = c.set.count() as i64 - inc - exc;
            let ok = |t: i64| inc <= t && t <= inc + und;
            let target = match c.owner {
                None => c.target_in,
                Some(o) if st.inc.contains(o) => c.target_in,
                Some(o) if st.exc.contains(o) => c.target_out,
                Some(o) => match (ok(c.target_in), ok(c.target_out)) {
                    (false, false) => return Step::Conflict,
                    (true, false) => {
                        st.inc.insert(o);
                        changed = true;
                        c.target_in
                    }
                    (false, true) => {
                        st.exc.insert(o);
                        changed = true;
                        c.target_out
                    }
                    (true, true) => continue,
                },
            };
            if !ok(target) {
                return Step::Conflict;
            }
            if und > 0 && (inc == target || inc + und == target) {
                let open = c.set.difference(&st.inc).difference(&st.exc);
                if inc == target {
                    st.exc = st.exc.union(&open);
                } else {
                    st.inc = st.inc.union(&open);
                }
                changed = true;
            }
            if !st.inc.is_disjoint(&st.exc) {
                return Step::Conflict;
            }
        }
        if changed {
            Step::Changed
        } else {
            Step::Stable
        }
    }

    fn propagate(&self, st: &mut State) -> bool {
        loop {
            match self.propagate_once(st) {
                Step::Conflict => return false,
                Step::Changed => continue,
                Step::Stable => return true,
            }
        }
    }

    /// Undecided element of the tightest constraint with a known target.
    fn branch_element(&self, st: &State) -> Option<usize> {
        let decided = st.inc.union(&st.exc);
        let mut best: Option<(usize, usize)> = None;
        for c in &self.constraints {
            if let Some(o) = c.owner {
                if !decided.contains(o) {
                    continue;
                }
            }
            let open = c.set.count() - c.set.intersection_count(&decided);
            if open > 0 && best.map_or(true, |(b, _)| open < b) {
                let e = c.set.difference(&decided).first().expect("open element");
                best = Some((open, e));
            }
        }
        best.map(|(_, e)| e).or_else(|| decided.complement().first())
    }

    fn dfs(&self, mut st: State, shared: &Shared, out: &mut Vec<BitSet>) {
        if shared.stop.load(Ordering::Relaxed) {
            return;
        }
        if shared.nodes.fetch_add(1, Ordering::Relaxed) >= shared.budget {
            shared.truncated.store(true, Ordering::Relaxed);
            shared.stop.store(true, Ordering::Relaxed);
            return;
        }
        if !self.propagate(&mut st) {
            return;
        }
        match self.branch_element(&st) {
            None => {
                if self.satisfied_by(&st.inc) && (shared.accept)(&st.inc) {
                    out.push(st.inc);
                    let found = shared.found.fetch_add(1, Ordering::Relaxed) + 1;
                    if shared.limit.is_some_and(|l| found >= l) {
                        shared.stop.store(true, Ordering::Relaxed);
                    }
                }
            }
            Some(e) => {
                let mut with = st.clone();
                with.inc.insert(e);
                self.dfs(with, shared, out);
                st.exc.insert(e);
                self.dfs(st, shared, out);
            }
        }
    }

    /// All solutions accepted by `accept`, in canonical order. With a limit
    /// the anchors are explored in order, so the result is reproducible.
    pub fn solve(&self, accept: &(dyn Fn(&BitSet) -> bool + Sync), limit: Option<u64>, budget: u64) -> SearchResult {
        let start = Instant::now();
        let shared = Shared {
            nodes: AtomicU64::new(0),
            budget,
            stop: AtomicBool::new(false),
            truncated: AtomicBool::new(false),
            found: AtomicU64::new(0),
            limit,
            accept,
        };
        let empty = BitSet::new(self.n);
        let mut solutions = Vec::new();
        if self.satisfied_by(&empty) && accept(&empty) {
            solutions.push(empty.clone());
            shared.found.fetch_add(1, Ordering::Relaxed);
        }
        // subtree `a`: a is the least member
        let anchor_state = |a: usize| {
            let mut exc = self.forced_out.clone();
            for b in 0..a {
                exc.insert(b);
            }
            let mut inc = BitSet::new(self.n);
            inc.insert(a);
            State { inc, exc }
        };
        let anchors: Vec<usize> = (0..self.n).filter(|&a| !self.forced_out.contains(a)).collect();
        if limit.is_some_and(|l| shared.found.load(Ordering::Relaxed) >= l) {
            // already satisfied by the empty set
        } else if limit.is_some() {
            for &a in &anchors {
                self.dfs(anchor_state(a), &shared, &mut solutions);
                if shared.stop.load(Ordering::Relaxed) {
                    break;
                }
            }
        } else {
            let parts: Vec<Vec<BitSet>> = anchors
                .par_iter()
                .map(|&a| {
                    let mut out = Vec::new();
                    self.dfs(anchor_state(a), &shared, &mut out);
                    out
                })
                .collect();
            solutions.extend(parts.into_iter().flatten());
        }
        solutions.sort_by_key(|s| s.to_vec());
        let limited = limit.is_some_and(|l| solutions.len() as u64 >= l);
        SearchResult {
            solutions,
            complete: !shared.truncated.load(Ordering::Relaxed) && !limited,
            nodes: shared.nodes.load(Ordering::Relaxed),
            seconds: start.elapsed().as_secs_f64(),
        }
    }
}

fn accept_all(_: &BitSet) -> bool {
    true
}

/// m-regular systems of the domain: every point lies on exactly m members.
pub fn regular_system_problem(ctx: &ClContext, domain: Domain, m: usize) -> Result<Problem> {
    let dom = ctx.domain_set(domain)?;
    let inst = ctx.scheme().instance();
    let n = ctx.num_generators();
    let mut p = Problem::new(n);
    p.exclude(&dom.complement());
    for pt in 0..inst.num_points() {
        let pencil = BitSet::from_indices(n, inst.point_generators(pt).iter().copied().filter(|&g| dom.contains(g)));
        p.push(Constraint::fixed(pencil, m as i64));
    }
    Ok(p)
}

/// Cameron-Liebler sets of the domain with integer parameter x, through the
/// disjointness counts: π is disjoint from (x − χ(π))c members. With
/// `implied`, the intersection numbers at intermediate distances are added
/// as pruning constraints where they are forced.
pub fn cl_problem(ctx: &ClContext, domain: Domain, x: u64, implied: bool) -> Result<Problem> {
    let dom = ctx.domain_set(domain)?;
    let n = ctx.num_generators();
    let c = ctx
        .domain_disjoint_coefficient(domain)
        .to_i64()
        .ok_or_else(|| Error::InvalidInput("disjointness coefficient too large".into()))?;
    let size = (ctx.domain_pencil_size(domain) * x)
        .to_i64()
        .ok_or_else(|| Error::InvalidInput("set size too large".into()))?;
    let d = ctx.scheme().rank();
    let x = x as i64;
    let mut p = Problem::new(n);
    p.exclude(&dom.complement());
    p.push(Constraint::fixed(dom.clone(), size));
    for g in dom.iter() {
        let skew = BitSet::from_indices(n, ctx.scheme().relation(d, g).iter().map(|&h| h as usize).filter(|&h| dom.contains(h)));
        p.push(Constraint::owned(g, skew, (x - 1) * c, x * c));
    }
    // implied intersection numbers at the intermediate distances, valid when
    // every Cameron-Liebler set of the domain lies in V₀ ⊥ V₁
    let profiles = match (domain, ctx.space_type()) {
        _ if !implied => None,
        (Domain::Full, SpaceType::I) => Some((
            distance_prediction(ctx.descriptor(), &BigRational::from_integer(x.into()), true),
            distance_prediction(ctx.descriptor(), &BigRational::from_integer(x.into()), false),
            1,
        )),
        (Domain::Class(_), _) => Some((
            class_distance_prediction(ctx.descriptor(), &BigRational::from_integer(x.into()), true),
            class_distance_prediction(ctx.descriptor(), &BigRational::from_integer(x.into()), false),
            2,
        )),
        _ => None,
    };
    if let Some((inside, outside, step)) = profiles {
        for i in 1..inside.len() - 1 {
            let (Some(a), Some(b)) = (as_count(&inside[i]), as_count(&outside[i])) else {
                continue;
            };
            for g in dom.iter() {
                let ring = BitSet::from_indices(n, ctx.scheme().relation(step * i, g).iter().map(|&h| h as usize).filter(|&h| dom.contains(h)));
                p.push(Constraint::owned(g, ring, a as i64, b as i64));
            }
        }
    }
    Ok(p)
}

/// x-tight point sets of a generalized quadrangle.
pub fn tight_set_problem(gq: &Gq, x: usize) -> Problem {
    let (s, _) = gq.order();
    let n = gq.num_points();
    let mut p = Problem::new(n);
    p.push(Constraint::fixed(BitSet::full(n), (x * (s + 1)) as i64));
    for pt in 0..n {
        p.push(Constraint::owned(pt, gq.perp(pt).clone(), (s + x) as i64, x as i64));
    }
    p
}

/// Search outcome with every certificate re-verified.
#[derive(Clone, Debug, Serialize)]
pub struct Certified<L: Serialize> {
    pub result: SearchResult,
    pub labels: Vec<L>,
}

/// All spreads (1-regular systems) of the domain.
pub fn find_spreads(ctx: &ClContext, domain: Domain, budget: u64) -> Result<SearchResult> {
    find_regular_systems(ctx, domain, 1, None, budget, None)
}

/// m-regular systems, optionally filtered by χ ∈ ⊕_{j∈S} V_j, with every
/// result re-checked by direct counting and by A·χ = m·j.
pub fn find_regular_systems(
    ctx: &ClContext,
    domain: Domain,
    m: usize,
    eigenspaces: Option<&[usize]>,
    budget: u64,
    limit: Option<u64>,
) -> Result<SearchResult> {
    let problem = regular_system_problem(ctx, domain, m)?;
    let filter = |s: &BitSet| match eigenspaces {
        None => true,
        Some(idx) => ctx.scheme().set_eigenspace_membership(s, idx),
    };
    let result = problem.solve(&filter, limit, budget);
    let size = ctx.domain_spread_size(domain) * m;
    for s in &result.solutions {
        let set = GeneratorSet::new(s.clone(), domain);
        if ctx.regular_system_degree(&set)? != Some(m) || num_bigint::BigInt::from(s.count()) != size {
            return Err(Error::InvalidSpace("search returned a set that is not a regular system".into()));
        }
    }
    Ok(result)
}

/// How a Cameron-Liebler set arises from the standard constructions.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClLabel {
    /// Disjoint union of the pencils of pairwise non-collinear points.
    PencilUnion(Vec<usize>),
    EmbeddedPolarSpace,
    HyperbolicClass,
    BasePlane,
    BaseSolid,
    Other,
}

impl ClLabel {
    pub fn kind(&self) -> &'static str {
        match self {
            ClLabel::PencilUnion(v) if v.len() == 1 => "point_pencil",
            ClLabel::PencilUnion(_) => "pencil_union",
            ClLabel::EmbeddedPolarSpace => "embedded_polar_space",
            ClLabel::HyperbolicClass => "hyperbolic_class",
            ClLabel::BasePlane => "base_plane",
            ClLabel::BaseSolid => "base_solid",
            ClLabel::Other => "other",
        }
    }
}

/// Points whose domain pencils partition the set (pencils of collinear
/// points share a generator, so the vertices are pairwise non-collinear).
pub fn pencil_decomposition(ctx: &ClContext, set: &GeneratorSet) -> Result<Option<Vec<usize>>> {
    let dom = ctx.domain_set(set.domain())?;
    let inst = ctx.scheme().instance();
    let n = ctx.num_generators();
    let pencils: Vec<(usize, BitSet)> = (0..inst.num_points())
        .map(|p| (p, BitSet::from_indices(n, inst.point_generators(p).iter().copied().filter(|&g| dom.contains(g)))))
        .filter(|(_, b)| b.is_subset(set.members()))
        .collect();
    fn cover(rest: &BitSet, pencils: &[(usize, BitSet)], chosen: &mut Vec<usize>) -> bool {
        let Some(g) = rest.first() else {
            return true;
        };
        for (p, b) in pencils.iter().filter(|(_, b)| b.contains(g)) {
            if b.is_subset(rest) {
                chosen.push(*p);
                if cover(&rest.difference(b), pencils, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }
    let mut chosen = Vec::new();
    Ok(cover(set.members(), &pencils, &mut chosen).then(|| {
        chosen.sort_unstable();
        chosen
    }))
}

/// Identifies a Cameron-Liebler set among the standard constructions.
pub fn label_cl_set(ctx: &ClContext, set: &GeneratorSet) -> Result<ClLabel> {
    if set.is_empty() {
        return Ok(ClLabel::PencilUnion(Vec::new()));
    }
    if let Some(points) = pencil_decomposition(ctx, set)? {
        return Ok(ClLabel::PencilUnion(points));
    }
    let sc = ctx.scheme();
    let inst = sc.instance();
    let n = ctx.num_generators();
    if set.domain() == Domain::Full {
        if let Some(classes) = inst.hyperbolic_classes() {
            if classes.iter().any(|c| BitSet::from_indices(n, c.iter().copied()) == *set.members()) {
                return Ok(ClLabel::HyperbolicClass);
            }
        }
        if let Ok(sections) = ctx.embedded_sections() {
            if sections.iter().any(|s| s == set.members()) {
                return Ok(ClLabel::EmbeddedPolarSpace);
            }
        }
        if sc.rank() == 3 && inst.hyperbolic_classes().is_some() {
            let base = |g: usize| BitSet::from_indices(n, (0..n).filter(|&h| sc.distance(g, h) <= 1));
            if set.members().iter().any(|g| base(g) == *set.members()) {
                return Ok(ClLabel::BasePlane);
            }
        }
    } else if sc.rank() == 4 {
        let first = set.members().first().expect("non-empty");
        let solid = |g: usize| BitSet::from_indices(n, (0..n).filter(|&h| sc.distance(g, h) == 1));
        if sc.relation(1, first).iter().any(|&g| solid(g as usize) == *set.members()) {
            return Ok(ClLabel::BaseSolid);
        }
    }
    Ok(ClLabel::Other)
}

/// Cameron-Liebler sets with integer parameter x, each re-verified by the
/// characterisation tests and labelled.
pub fn find_cl_sets(ctx: &ClContext, domain: Domain, x: u64, implied: bool, budget: u64) -> Result<Certified<ClLabel>> {
    let problem = cl_problem(ctx, domain, x, implied)?;
    let result = problem.solve(&accept_all, None, budget);
    let labels = result
        .solutions
        .par_iter()
        .map(|s| -> Result<ClLabel> {
            let set = GeneratorSet::new(s.clone(), domain);
            let report = ctx.check(&set, &[])?;
            if !report.is_cameron_liebler || !report.consistent || ctx.parameter(&set) != BigRational::from_integer(x.into()) {
                return Err(Error::InvalidSpace(format!("search certificate failed verification: {report:?}")));
            }
            label_cl_set(ctx, &set)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Certified { result, labels })
}

/// Parameter-1 sets of the domain.
pub fn find_cl_parameter1(ctx: &ClContext, domain: Domain, budget: u64) -> Result<Certified<ClLabel>> {
    find_cl_sets(ctx, domain, 1, true, budget)
}

/// x-tight sets of a GQ, each re-verified and labelled.
pub fn find_tight_sets(gq: &Gq, x: usize, budget: u64) -> Result<Certified<TightSetLabel>> {
    let result = tight_set_problem(gq, x).solve(&accept_all, None, budget);
    let labels = result
        .solutions
        .iter()
        .map(|s| {
            if gq.tight_parameter(s) != Some(x) {
                return Err(Error::InvalidSpace("search returned a set that is not tight".into()));
            }
            Ok(gq.label(s))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Certified { result, labels })
}

/// Largest number of pairwise disjoint members of a generator set.
pub fn max_pairwise_disjoint(ctx: &ClContext, set: &GeneratorSet) -> usize {
    let sc = ctx.scheme();
    let d = sc.rank();
    let members = set.to_vec();
    let m = members.len();
    let adj: Vec<BitSet> = members
        .iter()
        .map(|&g| BitSet::from_indices(m, (0..m).filter(|&j| sc.distance(g, members[j]) == d)))
        .collect();
    fn grow(adj: &[BitSet], cand: BitSet, size: usize, best: &mut usize) {
        if size + cand.count() <= *best {
            return;
        }
        let Some(v) = cand.first() else {
            *best = (*best).max(size);
            return;
        };
        grow(adj, cand.intersection(&adj[v]), size + 1, best);
        let mut rest = cand;
        rest.remove(v);
        grow(adj, rest, size, best);
    }
    let mut best = 0;
    grow(&adj, BitSet::full(m), 0, &mut best);
    best
}

/// Number of generators disjoint from both g and h, by brute force.
pub fn disjoint_to_both(ctx: &ClContext, g: usize, h: usize, within: Option<&BitSet>) -> usize {
    let sc = ctx.scheme();
    let d = sc.rank();
    sc.relation(d, g)
        .iter()
        .map(|&k| k as usize)
        .filter(|&k| sc.distance(h, k) == d && within.map_or(true, |w| w.contains(k)))
        .count()
}
