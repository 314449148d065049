//! Cameron-Liebler sets of generators: the characterisation tests, the
//! standard constructions, regular systems and intersection profiles.

pub mod gq;

use crate::bitset::BitSet;
use crate::combinatorics::{self, binom2, gaussian_binomial, qpow_half};
use crate::enumeration::{is_type_three, GeneratorClass};
use crate::error::{Error, Result};
use crate::exact::{self, Kernel};
use crate::geometry::{Family, PolarSpaceDescriptor};
use crate::scheme::{RestrictedScheme, SchemeContext};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::{Arc, OnceLock};

/// Which characterisation applies to the whole generator set of a space.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceType {
    I,
    II,
    III,
    IV,
}

impl SpaceType {
    pub fn of(desc: &PolarSpaceDescriptor) -> Self {
        let d = desc.rank();
        match desc.family() {
            Family::HyperbolicQuadric if d % 2 == 0 => SpaceType::II,
            Family::Symplectic if d % 2 == 1 && desc.field().characteristic() != 2 => SpaceType::IV,
            _ if is_type_three(desc) => SpaceType::III,
            _ => SpaceType::I,
        }
    }
}

impl fmt::Display for SpaceType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SpaceType::I => "I",
            SpaceType::II => "II",
            SpaceType::III => "III",
            SpaceType::IV => "IV",
        };
        f.write_str(s)
    }
}

/// The generators a set lives in: all of Ω, or one class of Q+(2d−1,q), d even.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Full,
    Class(GeneratorClass),
}

impl fmt::Display for Domain {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Domain::Full => f.write_str("all generators"),
            Domain::Class(GeneratorClass::Latin) => f.write_str("latin class"),
            Domain::Class(GeneratorClass::Greek) => f.write_str("greek class"),
        }
    }
}

/// A set of generators, indexed over all generators of the space.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratorSet {
    members: BitSet,
    domain: Domain,
}

impl GeneratorSet {
    pub fn new(members: BitSet, domain: Domain) -> Self {
        GeneratorSet { members, domain }
    }

    pub fn from_indices(n: usize, idx: impl IntoIterator<Item = usize>, domain: Domain) -> Self {
        Self::new(BitSet::from_indices(n, idx), domain)
    }

    pub fn members(&self) -> &BitSet {
        &self.members
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn with_domain(mut self, domain: Domain) -> Self {
        self.domain = domain;
        self
    }

    pub fn len(&self) -> usize {
        self.members.count()
    }

    pub fn is_empty(&self) -> bool {
        self.members.count() == 0
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.contains(g)
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.members.to_vec()
    }
}

/// Outcome of one characterisation test.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
    /// No spreads were supplied.
    Vacuous,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    pub fn decided(self) -> Option<bool> {
        match self {
            Verdict::Pass => Some(true),
            Verdict::Fail => Some(false),
            _ => None,
        }
    }
}

/// The characterisation tests on one generator set.
#[derive(Clone, Debug, Serialize)]
pub struct ClReport {
    pub space: String,
    pub space_type: SpaceType,
    pub domain: Domain,
    pub size: usize,
    /// |L| divided by the number of domain generators through a point.
    pub x: String,
    pub x_integral: bool,
    /// Each generator π is disjoint from (x − χ(π))·c members.
    pub disjointness: Verdict,
    pub disjointness_witness: Option<usize>,
    /// χ − x/(spread size)·j is an eigenvector of the disjointness matrix for −c.
    pub eigenvector: Verdict,
    pub eigenvector_witness: Option<usize>,
    pub eigenspace: Verdict,
    pub eigenspace_indices: Vec<usize>,
    pub image: Verdict,
    pub image_matrix: String,
    pub spreads: Verdict,
    pub spreads_checked: usize,
    pub spread_witness: Option<usize>,
    /// For all generators of Q+(2d−1,q), d even: both class restrictions are
    /// Cameron-Liebler sets of their class with the same parameter.
    pub class_restrictions: Verdict,
    pub is_cameron_liebler: bool,
    /// All decided tests give the same answer.
    pub consistent: bool,
}

impl ClReport {
    pub fn verdicts(&self) -> [(&'static str, Verdict); 6] {
        [
            ("disjointness", self.disjointness),
            ("eigenvector", self.eigenvector),
            ("eigenspace", self.eigenspace),
            ("image", self.image),
            ("spreads", self.spreads),
            ("class_restrictions", self.class_restrictions),
        ]
    }

    /// The spread test is only an equivalence when every spread was supplied,
    /// so it is left out here.
    fn compute_consistency(&mut self) {
        let core: Vec<bool> = self
            .verdicts()
            .iter()
            .filter(|(name, _)| *name != "spreads")
            .filter_map(|(_, v)| v.decided())
            .collect();
        self.consistent = core.iter().all(|&b| b == self.is_cameron_liebler);
    }
}

/// A [`SchemeContext`] with the caches the Cameron-Liebler tests need.
pub struct ClContext {
    scheme: Arc<SchemeContext>,
    restricted: [OnceLock<RestrictedScheme>; 2],
    class_kernels: [OnceLock<Kernel>; 2],
    split_kernel: OnceLock<Kernel>,
    embedded: OnceLock<Vec<BitSet>>,
}

impl fmt::Debug for ClContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ClContext").field("scheme", &self.scheme).finish()
    }
}

fn cached<'a, T>(cell: &'a OnceLock<T>, make: impl FnOnce() -> Result<T>) -> Result<&'a T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = make()?;
    Ok(cell.get_or_init(|| v))
}

fn class_slot(c: GeneratorClass) -> usize {
    match c {
        GeneratorClass::Latin => 0,
        GeneratorClass::Greek => 1,
    }
}

/// q^(twice/2) as a rational, negative exponents allowed.
fn qpow_rat(q: u64, twice: i64) -> BigRational {
    if twice >= 0 {
        BigRational::from_integer(qpow_half(q, twice))
    } else {
        BigRational::new(BigInt::one(), qpow_half(q, -twice))
    }
}

fn rat(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

fn format_rational(x: &BigRational) -> String {
    if x.is_integer() {
        x.to_integer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

impl ClContext {
    pub fn new(scheme: Arc<SchemeContext>) -> Self {
        ClContext {
            scheme,
            restricted: [OnceLock::new(), OnceLock::new()],
            class_kernels: [OnceLock::new(), OnceLock::new()],
            split_kernel: OnceLock::new(),
            embedded: OnceLock::new(),
        }
    }

    pub fn scheme(&self) -> &SchemeContext {
        &self.scheme
    }

    pub fn scheme_arc(&self) -> &Arc<SchemeContext> {
        &self.scheme
    }

    pub fn descriptor(&self) -> &PolarSpaceDescriptor {
        self.scheme.descriptor()
    }

    pub fn num_generators(&self) -> usize {
        self.scheme.num_generators()
    }

    pub fn space_type(&self) -> SpaceType {
        SpaceType::of(self.descriptor())
    }

    /// Whether generator classes can serve as a domain (Q+(2d−1,q), d even).
    pub fn has_class_domain(&self) -> bool {
        self.space_type() == SpaceType::II
    }

    fn check_domain(&self, domain: Domain) -> Result<()> {
        if let Domain::Class(_) = domain {
            if !self.has_class_domain() {
                return Err(Error::WrongFamily(format!(
                    "{} has no generator classes carrying a scheme",
                    self.descriptor()
                )));
            }
        }
        Ok(())
    }

    pub fn restricted(&self, class: GeneratorClass) -> Result<&RestrictedScheme> {
        cached(&self.restricted[class_slot(class)], || self.scheme.restricted_scheme(class))
    }

    /// Generators of the domain, as a bitset over all generators.
    pub fn domain_set(&self, domain: Domain) -> Result<BitSet> {
        self.check_domain(domain)?;
        let n = self.num_generators();
        Ok(match domain {
            Domain::Full => BitSet::full(n),
            Domain::Class(c) => BitSet::from_indices(n, self.restricted(c)?.members().iter().copied()),
        })
    }

    pub fn class_of(&self, g: usize) -> Option<GeneratorClass> {
        self.scheme.instance().class_labels().map(|l| l[g])
    }

    /// Generators of the domain through a point.
    pub fn domain_pencil_size(&self, domain: Domain) -> BigInt {
        let p = combinatorics::pencil_size(self.descriptor());
        match domain {
            Domain::Full => p,
            Domain::Class(_) => p / 2,
        }
    }

    /// Size of a spread of the domain.
    pub fn domain_spread_size(&self, _domain: Domain) -> BigInt {
        combinatorics::spread_size(self.descriptor())
    }

    /// c with π disjoint from (x − χ(π))c members; for a class of Q+(2d−1,q)
    /// this is q^{binom(d−1,2)}, which coincides with the full coefficient.
    pub fn domain_disjoint_coefficient(&self, _domain: Domain) -> BigInt {
        combinatorics::disjoint_coefficient(self.descriptor())
    }

    /// Distance at which members count as disjoint, d.
    fn disjoint_distance(&self) -> usize {
        self.scheme.rank()
    }

    pub fn parameter(&self, set: &GeneratorSet) -> BigRational {
        BigRational::new(BigInt::from(set.len()), self.domain_pencil_size(set.domain()))
    }

    /// Full disjointness count of every generator of the domain with the set.
    fn disjoint_counts(&self, set: &GeneratorSet) -> Result<Vec<(usize, usize)>> {
        let dom = self.domain_set(set.domain())?;
        let d = self.disjoint_distance();
        Ok(dom
            .iter()
            .map(|g| {
                let c = self
                    .scheme
                    .relation(d, g)
                    .iter()
                    .filter(|&&h| set.contains(h as usize))
                    .count();
                (g, c)
            })
            .collect())
    }

    /// First generator of the domain violating the disjointness count.
    pub fn disjointness_witness(&self, set: &GeneratorSet) -> Result<Option<usize>> {
        let x = self.parameter(set);
        let c = rat(self.domain_disjoint_coefficient(set.domain()));
        Ok(self
            .disjoint_counts(set)?
            .into_iter()
            .find(|&(g, count)| {
                let chi = rat(set.contains(g) as u8);
                rat(count) != (&x - chi) * &c
            })
            .map(|(g, _)| g))
    }

    /// Index of the first coordinate where K·w ≠ −c·w for
    /// w = b·s·χ − a·j, x = a/b, s the spread size.
    pub fn eigenvector_witness(&self, set: &GeneratorSet) -> Result<Option<usize>> {
        let dom = set.domain();
        let x = self.parameter(set);
        let s = self.domain_spread_size(dom);
        let lambda = -self.domain_disjoint_coefficient(dom);
        let (a, b) = (x.numer().clone(), x.denom().clone());
        let scale = &b * &s;
        match dom {
            Domain::Full => {
                let w: Vec<BigInt> = (0..self.num_generators())
                    .map(|g| &scale * BigInt::from(set.contains(g) as u8) - &a)
                    .collect();
                let kw = self.scheme.apply_big(self.disjoint_distance(), &w);
                Ok((0..w.len()).find(|&g| kw[g] != &lambda * &w[g]))
            }
            Domain::Class(c) => {
                let r = self.restricted(c)?;
                let w: Vec<BigInt> = r
                    .members()
                    .iter()
                    .map(|&g| &scale * BigInt::from(set.contains(g) as u8) - &a)
                    .collect();
                let kw = r.apply(r.classes(), &w);
                Ok((0..w.len()).find(|&i| kw[i] != &lambda * &w[i]).map(|i| r.members()[i]))
            }
        }
    }

    /// The index set S with χ ∈ ⊕_{j∈S} V_j (or V′_j on a class).
    pub fn eigenspace_indices(&self, domain: Domain) -> Vec<usize> {
        match domain {
            Domain::Full => combinatorics::cl_eigenspace_indices(self.descriptor()),
            Domain::Class(_) => vec![0, 1],
        }
    }

    pub fn eigenspace_test(&self, set: &GeneratorSet) -> Result<bool> {
        let s = self.eigenspace_indices(set.domain());
        match set.domain() {
            Domain::Full => Ok(self.scheme.set_eigenspace_membership(set.members(), &s)),
            Domain::Class(c) => Ok(self.restricted(c)?.set_membership(set.members(), &s)),
        }
    }

    fn class_kernel(&self, c: GeneratorClass) -> Result<&Kernel> {
        cached(&self.class_kernels[class_slot(c)], || {
            let r = self.restricted(c)?;
            exact::certified_kernel(&r.point_incidence(self.scheme.instance()))
        })
    }

    fn split_kernel(&self) -> Result<&Kernel> {
        cached(&self.split_kernel, || {
            exact::certified_kernel(&self.scheme.class_split_point_incidence()?)
        })
    }

    /// Name of the matrix whose row space decides the image test.
    pub fn image_matrix_name(&self, domain: Domain) -> &'static str {
        match (domain, self.space_type()) {
            (Domain::Class(_), _) => "A' (points x class generators)",
            (Domain::Full, SpaceType::I) => "A (points x generators)",
            (Domain::Full, SpaceType::II) => "(point, class) x generators",
            (Domain::Full, SpaceType::III) => "B (hyperbolic classes x generators)",
            (Domain::Full, SpaceType::IV) => "none",
        }
    }

    /// χ_L in the row space of the type's incidence matrix; None when no
    /// such characterisation is available (type IV).
    pub fn image_test(&self, set: &GeneratorSet) -> Result<Option<bool>> {
        match (set.domain(), self.space_type()) {
            (Domain::Class(c), _) => {
                let r = self.restricted(c)?;
                let v: Vec<i64> = r.members().iter().map(|&g| set.contains(g) as i64).collect();
                Ok(Some(self.class_kernel(c)?.orthogonal_i64(&v)))
            }
            (Domain::Full, SpaceType::I) => Ok(Some(self.scheme.in_point_image(set.members())?)),
            (Domain::Full, SpaceType::II) => Ok(Some(self.split_kernel()?.orthogonal_set(set.members()))),
            (Domain::Full, SpaceType::III) => Ok(Some(self.scheme.in_hyperbolic_class_image(set.members())?)),
            (Domain::Full, SpaceType::IV) => Ok(None),
        }
    }

    /// χ_L ∈ im(Aᵗ) for the ordinary point-generator incidence, on any space.
    pub fn in_point_image(&self, set: &BitSet) -> Result<bool> {
        self.scheme.in_point_image(set)
    }

    /// Index of the first spread of the domain not meeting the set in x members.
    pub fn spread_witness(&self, set: &GeneratorSet, spreads: &[BitSet]) -> Result<Option<usize>> {
        let x = self.parameter(set);
        let dom = self.domain_set(set.domain())?;
        for (i, s) in spreads.iter().enumerate() {
            if !s.is_subset(&dom) {
                continue;
            }
            if rat(s.intersection_count(set.members())) != x {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Both class restrictions of a set of Q+(2d−1,q), d even, are
    /// Cameron-Liebler sets of their classes with parameter equal to that of the set.
    pub fn class_restriction_test(&self, set: &GeneratorSet) -> Result<bool> {
        let x = self.parameter(set);
        for c in [GeneratorClass::Latin, GeneratorClass::Greek] {
            let dom = self.domain_set(Domain::Class(c))?;
            let part = GeneratorSet::new(set.members().intersection(&dom), Domain::Class(c));
            if self.parameter(&part) != x || self.disjointness_witness(&part)?.is_some() {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Runs every applicable test.
    pub fn check(&self, set: &GeneratorSet, spreads: &[BitSet]) -> Result<ClReport> {
        self.check_domain(set.domain())?;
        let dom = self.domain_set(set.domain())?;
        if !set.members().is_subset(&dom) {
            return Err(Error::InvalidInput(format!("set has generators outside the {}", set.domain())));
        }
        let x = self.parameter(set);
        let dis = self.disjointness_witness(set)?;
        let eig = self.eigenvector_witness(set)?;
        let space_ok = self.eigenspace_test(set)?;
        let image = self.image_test(set)?;
        let relevant: Vec<&BitSet> = spreads.iter().filter(|s| s.is_subset(&dom)).collect();
        let spread_w = self.spread_witness(set, spreads)?;
        let class_restrictions = if set.domain() == Domain::Full && self.has_class_domain() {
            Verdict::from_bool(self.class_restriction_test(set)?)
        } else {
            Verdict::NotApplicable
        };
        let mut report = ClReport {
            space: self.descriptor().to_string(),
            space_type: self.space_type(),
            domain: set.domain(),
            size: set.len(),
            x: format_rational(&x),
            x_integral: x.is_integer(),
            disjointness: Verdict::from_bool(dis.is_none()),
            disjointness_witness: dis,
            eigenvector: Verdict::from_bool(eig.is_none()),
            eigenvector_witness: eig,
            eigenspace: Verdict::from_bool(space_ok),
            eigenspace_indices: self.eigenspace_indices(set.domain()),
            image: image.map_or(Verdict::NotApplicable, Verdict::from_bool),
            image_matrix: self.image_matrix_name(set.domain()).to_string(),
            spreads: if relevant.is_empty() {
                Verdict::Vacuous
            } else {
                Verdict::from_bool(spread_w.is_none())
            },
            spreads_checked: relevant.len(),
            spread_witness: spread_w,
            class_restrictions,
            is_cameron_liebler: dis.is_none(),
            consistent: true,
        };
        report.compute_consistency();
        Ok(report)
    }

    /// Number of generators of the domain through each point that lie in the set.
    pub fn point_degrees(&self, set: &GeneratorSet) -> Result<Vec<usize>> {
        let dom = self.domain_set(set.domain())?;
        let inst = self.scheme.instance();
        Ok((0..inst.num_points())
            .map(|p| {
                inst.point_generators(p)
                    .iter()
                    .filter(|&&g| dom.contains(g) && set.contains(g))
                    .count()
            })
            .collect())
    }

    /// Regular-system test computed twice: by direct counting, and by the
    /// matrix identity A·χ = m·j (with A restricted to the domain).
    pub fn regular_system_check(&self, set: &GeneratorSet) -> Result<RegularSystemCheck> {
        let degrees = self.point_degrees(set)?;
        let direct = match degrees.first() {
            Some(&m) if degrees.iter().all(|&c| c == m) => Some(m),
            _ => None,
        };
        let av: Vec<i128> = match set.domain() {
            Domain::Full => {
                let chi: Vec<i128> = (0..self.num_generators()).map(|g| set.contains(g) as i128).collect();
                self.scheme.point_incidence().mul_vec(&chi).expect("0/1 vectors do not overflow")
            }
            Domain::Class(c) => {
                let r = self.restricted(c)?;
                let chi: Vec<i128> = r.members().iter().map(|&g| set.contains(g) as i128).collect();
                r.point_incidence(self.scheme.instance())
                    .mul_vec(&chi)
                    .expect("0/1 vectors do not overflow")
            }
        };
        let via_matrix = match av.first() {
            Some(&m) if av.iter().all(|&c| c == m) => Some(m as usize),
            _ => None,
        };
        Ok(RegularSystemCheck { direct, via_matrix })
    }

    /// The degree m if the set is an m-regular system of the domain.
    pub fn regular_system_degree(&self, set: &GeneratorSet) -> Result<Option<usize>> {
        let c = self.regular_system_check(set)?;
        if c.direct != c.via_matrix {
            return Err(Error::InvalidSpace(format!(
                "regular system checks disagree: {:?} vs {:?}",
                c.direct, c.via_matrix
            )));
        }
        Ok(c.direct)
    }

    /// Generator sets of the embedded polar spaces of the same rank, parameter e − 1.
    pub fn embedded_sections(&self) -> Result<&[BitSet]> {
        cached(&self.embedded, || {
            let n = self.num_generators();
            Ok(self
                .scheme
                .instance()
                .embedded_sections()?
                .into_iter()
                .map(|v| BitSet::from_indices(n, v))
                .collect())
        })
        .map(|v| v.as_slice())
    }

    /// Standard constructions, with the parameter they are expected to have.
    pub fn construct(&self, spec: &ConstructionSpec) -> Result<Construction> {
        let n = self.num_generators();
        let inst = self.scheme.instance();
        let one = rat(1);
        let (set, predicted, kind) = match spec {
            ConstructionSpec::PointPencil { point, domain } => {
                if *point >= inst.num_points() {
                    return Err(Error::Construction(format!("no point {point}")));
                }
                let dom = self.domain_set(*domain)?;
                let set = GeneratorSet::from_indices(
                    n,
                    inst.point_generators(*point).iter().copied().filter(|&g| dom.contains(g)),
                    *domain,
                );
                (set, one, "point_pencil")
            }
            ConstructionSpec::HyperbolicClass { index } => {
                let classes = inst.hyperbolic_classes().ok_or_else(|| {
                    Error::Construction(format!("{} has no hyperbolic classes", self.descriptor()))
                })?;
                let cls = classes
                    .get(*index)
                    .ok_or_else(|| Error::Construction(format!("no hyperbolic class {index}")))?;
                (GeneratorSet::from_indices(n, cls.iter().copied(), Domain::Full), one, "hyperbolic_class")
            }
            ConstructionSpec::EmbeddedPolarSpace { index } => {
                let sections = self.embedded_sections()?;
                let s = sections
                    .get(*index)
                    .ok_or_else(|| Error::Construction(format!("no embedded polar space {index}")))?;
                let desc = self.descriptor();
                let x = rat(qpow_half(desc.q(), desc.twice_e() as i64 - 2) + 1);
                (GeneratorSet::new(s.clone(), Domain::Full), x, "embedded_polar_space")
            }
            ConstructionSpec::BasePlane { generator } => {
                if self.space_type() != SpaceType::III || self.scheme.rank() != 3 {
                    return Err(Error::Construction(
                        "base-plane sets need Q(6,q) or W(5,q), q even".into(),
                    ));
                }
                let g = self.generator(*generator)?;
                let set = GeneratorSet::from_indices(
                    n,
                    (0..n).filter(|&h| self.scheme.distance(g, h) <= 1),
                    Domain::Full,
                );
                (set, one, "base_plane")
            }
            ConstructionSpec::BaseSolid { generator } => {
                if !self.has_class_domain() || self.scheme.rank() != 4 {
                    return Err(Error::Construction("base-solid sets need Q+(7,q)".into()));
                }
                let g = self.generator(*generator)?;
                let class = self.class_of(g).expect("hyperbolic quadric").other();
                let set = GeneratorSet::from_indices(
                    n,
                    (0..n).filter(|&h| self.scheme.distance(g, h) == 1),
                    Domain::Class(class),
                );
                (set, one, "base_solid")
            }
            ConstructionSpec::Complement { of } => {
                let dom = self.domain_set(of.domain())?;
                let x = self.parameter(of);
                let predicted = rat(self.domain_spread_size(of.domain())) - x;
                let set = GeneratorSet::new(dom.difference(of.members()), of.domain());
                (set, predicted, "complement")
            }
            ConstructionSpec::Union { a, b } => {
                if a.domain() != b.domain() {
                    return Err(Error::Construction("union of sets in different domains".into()));
                }
                if !a.members().is_disjoint(b.members()) {
                    return Err(Error::Construction("union needs disjoint sets".into()));
                }
                let predicted = self.parameter(a) + self.parameter(b);
                (GeneratorSet::new(a.members().union(b.members()), a.domain()), predicted, "union")
            }
            ConstructionSpec::Difference { a, b } => {
                if a.domain() != b.domain() {
                    return Err(Error::Construction("difference of sets in different domains".into()));
                }
                if !b.members().is_subset(a.members()) {
                    return Err(Error::Construction("difference needs the second set inside the first".into()));
                }
                let predicted = self.parameter(a) - self.parameter(b);
                (GeneratorSet::new(a.members().difference(b.members()), a.domain()), predicted, "difference")
            }
        };
        Ok(Construction {
            kind,
            set,
            predicted_x: predicted,
        })
    }

    fn generator(&self, g: usize) -> Result<usize> {
        if g < self.num_generators() {
            Ok(g)
        } else {
            Err(Error::Construction(format!("no generator {g}")))
        }
    }

    /// n_i = number of members at distance i from π, i = 0..d (full domain),
    /// or at distance 2i, i = 0..⌊d/2⌋, on a class.
    pub fn intersection_profile(&self, set: &GeneratorSet, pi: usize) -> Result<IntersectionProfile> {
        let d = self.scheme.rank();
        let counts: Vec<usize> = match set.domain() {
            Domain::Full => (0..=d)
                .map(|i| self.scheme.relation(i, pi).iter().filter(|&&h| set.contains(h as usize)).count())
                .collect(),
            Domain::Class(c) => {
                if self.class_of(pi) != Some(c) {
                    return Err(Error::InvalidInput(format!("generator {pi} is not in the {}", set.domain())));
                }
                (0..=d / 2)
                    .map(|i| {
                        self.scheme
                            .relation(2 * i, pi)
                            .iter()
                            .filter(|&&h| set.contains(h as usize))
                            .count()
                    })
                    .collect()
            }
        };
        let x = self.parameter(set);
        let predicted = match set.domain() {
            Domain::Full => distance_prediction(self.descriptor(), &x, set.contains(pi)),
            Domain::Class(_) => class_distance_prediction(self.descriptor(), &x, set.contains(pi)),
        };
        Ok(IntersectionProfile {
            generator: pi,
            in_set: set.contains(pi),
            counts,
            predicted,
        })
    }

    /// z_j = number of members meeting π in a j-space through the point P,
    /// j = 0..d−2.
    pub fn z_profile(&self, set: &GeneratorSet, pi: usize, point: usize) -> Result<Vec<usize>> {
        let inst = self.scheme.instance();
        let d = self.scheme.rank();
        let pts = inst.generator_point_set(pi);
        if !pts.contains(point) {
            return Err(Error::InvalidInput(format!("point {point} is not on generator {pi}")));
        }
        let mut z = vec![0usize; d.saturating_sub(1)];
        for g in set.members().iter() {
            let meet = pts.intersection(inst.generator_point_set(g));
            if !meet.contains(point) {
                continue;
            }
            let j = inst.dim_from_point_count(meet.count()).expect("meet of generators");
            if (j as usize) < z.len() {
                z[j as usize] += 1;
            }
        }
        Ok(z)
    }
}

/// Outcome of the two regular-system computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct RegularSystemCheck {
    pub direct: Option<usize>,
    pub via_matrix: Option<usize>,
}

/// Requested construction.
#[derive(Clone, Debug)]
pub enum ConstructionSpec {
    PointPencil { point: usize, domain: Domain },
    HyperbolicClass { index: usize },
    EmbeddedPolarSpace { index: usize },
    /// Generators meeting a fixed generator of Q(6,q) or W(5,q) in at least a line.
    BasePlane { generator: usize },
    /// Generators of the class opposite to a fixed generator of Q+(7,q) meeting it in a plane.
    BaseSolid { generator: usize },
    Complement { of: GeneratorSet },
    Union { a: GeneratorSet, b: GeneratorSet },
    Difference { a: GeneratorSet, b: GeneratorSet },
}

#[derive(Clone, Debug)]
pub struct Construction {
    pub kind: &'static str,
    pub set: GeneratorSet,
    pub predicted_x: BigRational,
}

/// Intersection numbers of a set with one generator and their predicted values.
#[derive(Clone, Debug, Serialize)]
pub struct IntersectionProfile {
    pub generator: usize,
    pub in_set: bool,
    pub counts: Vec<usize>,
    #[serde(serialize_with = "ser_rationals")]
    pub predicted: Vec<BigRational>,
}

impl IntersectionProfile {
    pub fn matches(&self) -> bool {
        self.counts.len() == self.predicted.len()
            && self.counts.iter().zip(&self.predicted).all(|(&c, p)| rat(c) == *p)
    }
}

fn ser_rationals<S: serde::Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

/// Number of members at distance i = 0..d from a generator π, for a
/// Cameron-Liebler set with characteristic vector in V₀ ⊥ V₁:
/// π ∈ L: ((x−1)[d−1, i−1] + q^{i+e−1}[d−1, i]) q^{binom(i−1,2)+(i−1)e},
/// π ∉ L: x[d−1, i−1] q^{binom(i−1,2)+(i−1)e}.
pub fn distance_prediction(desc: &PolarSpaceDescriptor, x: &BigRational, in_set: bool) -> Vec<BigRational> {
    let d = desc.rank() as i64;
    let te = desc.twice_e() as i64;
    let q = desc.q();
    (0..=d)
        .map(|i| {
            let tail = 2 * binom2(i - 1) + (i - 1) * te;
            let g1 = rat(gaussian_binomial(d - 1, i - 1, q));
            let mut v = if g1.is_zero() {
                BigRational::zero()
            } else {
                let coeff = if in_set { x - rat(1) } else { x.clone() };
                coeff * g1 * qpow_rat(q, tail)
            };
            if in_set {
                v += rat(gaussian_binomial(d - 1, i, q)) * qpow_rat(q, 2 * (i - 1) + te + tail);
            }
            v
        })
        .collect()
}

/// The class version on Q+(2d−1,q), d even, for distances 2i, i = 0..d/2:
/// π ∈ L: ((x−1)[d−1, 2i−1] + q^{2i−1}[d−1, 2i]) q^{binom(2i−1,2)},
/// π ∉ L: x[d−1, 2i−1] q^{binom(2i−1,2)}.
pub fn class_distance_prediction(desc: &PolarSpaceDescriptor, x: &BigRational, in_set: bool) -> Vec<BigRational> {
    let d = desc.rank() as i64;
    let q = desc.q();
    (0..=d / 2)
        .map(|i| {
            let k = 2 * i;
            let tail = 2 * binom2(k - 1);
            let g1 = rat(gaussian_binomial(d - 1, k - 1, q));
            let mut v = if g1.is_zero() {
                BigRational::zero()
            } else {
                let coeff = if in_set { x - rat(1) } else { x.clone() };
                coeff * g1 * qpow_rat(q, tail)
            };
            if in_set {
                v += rat(gaussian_binomial(d - 1, k, q)) * qpow_rat(q, 2 * (k - 1) + tail);
            }
            v
        })
        .collect()
}

/// z_{d−j−2} predicted from z_{d−2}: z_{d−2}·[d−2, j]·q^{binom(j,2)+je}, j = 0..d−2.
/// Returned indexed by the meet dimension.
pub fn z_prediction(desc: &PolarSpaceDescriptor, z_top: usize) -> Vec<BigInt> {
    let d = desc.rank() as i64;
    let te = desc.twice_e() as i64;
    let q = desc.q();
    let mut out = vec![BigInt::zero(); (d - 1).max(0) as usize];
    for j in 0..=d - 2 {
        out[(d - j - 2) as usize] =
            BigInt::from(z_top) * gaussian_binomial(d - 2, j, q) * qpow_half(q, 2 * binom2(j) + j * te);
    }
    out
}

/// Whether a rational is a non-negative integer, returned as u64.
pub fn as_count(x: &BigRational) -> Option<u64> {
    if x.is_integer() && !x.is_negative() {
        x.to_integer().to_u64()
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::enumeration::PolarSpaceInstance;

    fn ctx(s: &str) -> ClContext {
        let desc = PolarSpaceDescriptor::parse_symbol(s).unwrap();
        let inst = Arc::new(PolarSpaceInstance::enumerate(&desc).unwrap());
        ClContext::new(Arc::new(SchemeContext::new(inst).unwrap()))
    }

    fn pencil(c: &ClContext, p: usize, domain: Domain) -> Construction {
        c.construct(&ConstructionSpec::PointPencil { point: p, domain }).unwrap()
    }

    fn assert_cl(c: &ClContext, k: &Construction) {
        let r = c.check(&k.set, &[]).unwrap();
        assert!(r.is_cameron_liebler, "{} on {}: {r:?}", k.kind, r.space);
        assert!(r.consistent, "{} on {}: {r:?}", k.kind, r.space);
        assert_eq!(c.parameter(&k.set), k.predicted_x, "{}", k.kind);
    }

    #[test]
    fn space_types() {
        let t = |s: &str| SpaceType::of(&PolarSpaceDescriptor::parse_symbol(s).unwrap());
        assert_eq!(t("Q+(7,2)"), SpaceType::II);
        assert_eq!(t("Q+(5,2)"), SpaceType::I);
        assert_eq!(t("Q(6,2)"), SpaceType::III);
        assert_eq!(t("W(5,2)"), SpaceType::III);
        assert_eq!(t("W(5,3)"), SpaceType::IV);
        assert_eq!(t("W(3,3)"), SpaceType::I);
        assert_eq!(t("H(3,4)"), SpaceType::I);
        assert_eq!(t("Q-(5,2)"), SpaceType::I);
    }

    #[test]
    fn pencils_are_parameter_one() {
        for s in ["W(3,2)", "Q-(5,2)", "Q+(5,2)", "H(3,4)"] {
            let c = ctx(s);
            assert_cl(&c, &pencil(&c, 3, Domain::Full));
        }
    }

    #[test]
    fn embedded_quadric_in_elliptic() {
        let c = ctx("Q-(5,2)");
        let k = c.construct(&ConstructionSpec::EmbeddedPolarSpace { index: 0 }).unwrap();
        assert_eq!(k.predicted_x, rat(3));
        assert_eq!(c.embedded_sections().unwrap().len(), 36);
        assert_cl(&c, &k);
    }

    #[test]
    fn type_three_constructions() {
        let c = ctx("Q(6,2)");
        assert_cl(&c, &c.construct(&ConstructionSpec::HyperbolicClass { index: 5 }).unwrap());
        let bp = c.construct(&ConstructionSpec::BasePlane { generator: 7 }).unwrap();
        assert_eq!(bp.set.len(), 15);
        assert_cl(&c, &bp);
        let emb = c.construct(&ConstructionSpec::EmbeddedPolarSpace { index: 0 }).unwrap();
        assert_eq!(emb.predicted_x, rat(2));
        assert_cl(&c, &emb);
        let p = pencil(&c, 0, Domain::Full);
        assert_cl(&c, &p);
        let comp = c.construct(&ConstructionSpec::Complement { of: p.set }).unwrap();
        assert_eq!(comp.predicted_x, rat(8));
        assert_cl(&c, &comp);
    }

    #[test]
    fn complement_union_difference() {
        let c = ctx("W(3,2)");
        let a = pencil(&c, 0, Domain::Full).set;
        let inst = c.scheme().instance();
        let far = (0..inst.num_points()).find(|&p| !inst.collinear(0, p)).unwrap();
        let b = pencil(&c, far, Domain::Full).set;
        let u = c.construct(&ConstructionSpec::Union { a: a.clone(), b: b.clone() }).unwrap();
        assert_eq!(u.predicted_x, rat(2));
        assert_cl(&c, &u);
        let back = c.construct(&ConstructionSpec::Difference { a: u.set, b }).unwrap();
        assert_eq!(back.set, a);
        let comp = c.construct(&ConstructionSpec::Complement { of: a }).unwrap();
        assert_eq!(comp.predicted_x, rat(4));
        assert_cl(&c, &comp);
        let near = (1..inst.num_points()).find(|&p| inst.collinear(0, p)).unwrap();
        let overlap = pencil(&c, near, Domain::Full).set;
        assert!(c
            .construct(&ConstructionSpec::Union { a: pencil(&c, 0, Domain::Full).set, b: overlap })
            .is_err());
    }

    #[test]
    fn class_sets_of_q72() {
        let c = ctx("Q+(7,2)");
        let k = pencil(&c, 0, Domain::Class(GeneratorClass::Latin));
        assert_eq!(k.set.len(), 15);
        assert_cl(&c, &k);
        let g = c.scheme().instance().class_members(GeneratorClass::Greek).unwrap()[0];
        let bs = c.construct(&ConstructionSpec::BaseSolid { generator: g }).unwrap();
        assert_eq!(bs.set.domain(), Domain::Class(GeneratorClass::Latin));
        assert_eq!(bs.set.len(), 15);
        assert_cl(&c, &bs);
        // the full pencil is a Cameron-Liebler set of all generators
        assert_cl(&c, &pencil(&c, 0, Domain::Full));
    }

    #[test]
    fn non_cl_sets_fail_every_test() {
        let c = ctx("Q-(5,2)");
        let set = GeneratorSet::from_indices(45, [0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 11, 13, 17, 19, 23], Domain::Full);
        let r = c.check(&set, &[]).unwrap();
        assert!(!r.is_cameron_liebler);
        assert!(r.consistent, "{r:?}");
        assert!(r.disjointness_witness.is_some());
    }

    #[test]
    fn regular_systems() {
        let c = ctx("W(3,2)");
        let all = GeneratorSet::new(BitSet::full(15), Domain::Full);
        assert_eq!(c.regular_system_degree(&all).unwrap(), Some(3));
        let p = pencil(&c, 0, Domain::Full).set;
        assert_eq!(c.regular_system_degree(&p).unwrap(), None);
    }

    #[test]
    fn profiles_follow_the_distance_formula() {
        let c = ctx("Q-(5,2)");
        let k = c.construct(&ConstructionSpec::EmbeddedPolarSpace { index: 2 }).unwrap();
        for pi in 0..45 {
            let prof = c.intersection_profile(&k.set, pi).unwrap();
            assert!(prof.matches(), "{prof:?}");
        }
    }

    #[test]
    fn predictions_sum_to_set_size() {
        for s in ["Q-(7,2)", "H(5,4)", "Q(8,3)", "W(7,3)"] {
            let desc = PolarSpaceDescriptor::parse_symbol(s).unwrap();
            let x = rat(2);
            let size = rat(combinatorics::pencil_size(&desc)) * &x;
            for in_set in [true, false] {
                let total: BigRational = distance_prediction(&desc, &x, in_set).into_iter().sum();
                assert_eq!(total, size, "{s}");
            }
        }
    }
}
