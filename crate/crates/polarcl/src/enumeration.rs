//! Enumeration of the totally isotropic subspaces of a polar space, generator
//! classes of hyperbolic quadrics and the hyperbolic classes of type III
//! spaces.

use crate::bitset::BitSet;
use crate::combinatorics;
use crate::error::{Error, Result};
use crate::field::Elem;
use crate::geometry::{dot, projective_points, Family, HyperplaneSection, PolarSpaceDescriptor, Subspace};
use num_traits::ToPrimitive;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::HashMap;

pub const DEFAULT_GENERATOR_BUDGET: u64 = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorClass {
    Latin,
    Greek,
}

impl GeneratorClass {
    pub fn other(self) -> Self {
        match self {
            GeneratorClass::Latin => GeneratorClass::Greek,
            GeneratorClass::Greek => GeneratorClass::Latin,
        }
    }
}

/// All totally isotropic subspaces of a polar space in canonical order.
#[derive(Clone, Debug)]
pub struct PolarSpaceInstance {
    descriptor: PolarSpaceDescriptor,
    /// levels[k] holds the k-spaces (projective dimension k), sorted.
    levels: Vec<Vec<Subspace>>,
    point_index: HashMap<Vec<Elem>, usize>,
    generator_points: Vec<Vec<usize>>,
    point_generators: Vec<Vec<usize>>,
    generator_point_sets: Vec<BitSet>,
    /// meet_dim_by_count[c] = projective dimension of a subspace with c points
    dim_by_point_count: HashMap<usize, isize>,
    class_labels: Option<Vec<GeneratorClass>>,
    hyperbolic_classes: Option<Vec<Vec<usize>>>,
}

impl PolarSpaceInstance {
    pub fn enumerate(descriptor: &PolarSpaceDescriptor) -> Result<Self> {
        Self::enumerate_with_budget(descriptor, DEFAULT_GENERATOR_BUDGET)
    }

    pub fn enumerate_with_budget(descriptor: &PolarSpaceDescriptor, budget: u64) -> Result<Self> {
        let expected = combinatorics::generator_count(descriptor);
        if expected.to_u64().map_or(true, |n| n > budget) {
            return Err(Error::BudgetExceeded {
                count: expected.to_string(),
                budget,
            });
        }
        let mut inst = Self::enumerate_levels(descriptor)?;
        if descriptor.family() == Family::HyperbolicQuadric {
            inst.class_labels = Some(inst.split_hyperbolic_classes()?);
        }
        if is_type_three(descriptor) {
            inst.hyperbolic_classes = Some(inst.compute_hyperbolic_classes()?);
        }
        Ok(inst)
    }

    fn enumerate_levels(descriptor: &PolarSpaceDescriptor) -> Result<Self> {
        let f = descriptor.field().clone();
        let n1 = descriptor.vector_len();
        let d = descriptor.rank();
        let point_vecs: Vec<Vec<Elem>> = projective_points(&f, n1)
            .filter(|v| descriptor.is_isotropic_vector(v))
            .collect();
        let mut points: Vec<Subspace> = point_vecs.iter().map(|v| Subspace::point(&f, v)).collect();
        points.sort();
        let point_index: HashMap<Vec<Elem>, usize> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.data().to_vec(), i))
            .collect();

        let mut levels = vec![points];
        for _k in 1..d {
            let prev = levels.last().unwrap();
            let pts = &levels[0];
            let mut next: Vec<Subspace> = prev
                .par_iter()
                .flat_map_iter(|s| {
                    let f = &**descriptor.field();
                    let perp = descriptor.perp(s);
                    pts.iter()
                        .filter(|p| perp.contains_vector(f, p.data()) && !s.contains_vector(f, p.data()))
                        .map(|p| s.join(f, p))
                        .collect::<Vec<_>>()
                })
                .collect();
            next.par_sort_unstable();
            next.dedup();
            levels.push(next);
        }

        for (k, level) in levels.iter().enumerate() {
            let expected = combinatorics::subspace_count(descriptor, k);
            if expected != level.len().into() {
                return Err(Error::InvalidSpace(format!(
                    "enumerated {} subspaces of dimension {k} in {descriptor}, expected {expected}",
                    level.len()
                )));
            }
        }

        let generator_points: Vec<Vec<usize>> = levels[d - 1]
            .par_iter()
            .map(|g| {
                let mut idx: Vec<usize> = g.point_vectors(descriptor.field()).iter().map(|v| point_index[v]).collect();
                idx.sort_unstable();
                idx
            })
            .collect();
        let np = levels[0].len();
        let mut point_generators = vec![Vec::new(); np];
        for (g, pts) in generator_points.iter().enumerate() {
            for &p in pts {
                point_generators[p].push(g);
            }
        }
        let generator_point_sets = generator_points
            .iter()
            .map(|pts| BitSet::from_indices(np, pts.iter().copied()))
            .collect();
        let q = descriptor.q() as usize;
        let dim_by_point_count = (0..=d)
            .map(|r| ((q.pow(r as u32) - 1) / (q - 1), r as isize - 1))
            .collect();
        Ok(PolarSpaceInstance {
            descriptor: descriptor.clone(),
            levels,
            point_index,
            generator_points,
            point_generators,
            generator_point_sets,
            dim_by_point_count,
            class_labels: None,
            hyperbolic_classes: None,
        })
    }

    pub fn descriptor(&self) -> &PolarSpaceDescriptor {
        &self.descriptor
    }
    pub fn rank(&self) -> usize {
        self.descriptor.rank()
    }
    pub fn points(&self) -> &[Subspace] {
        &self.levels[0]
    }
    pub fn num_points(&self) -> usize {
        self.levels[0].len()
    }
    /// The totally isotropic subspaces of projective dimension k.
    pub fn level(&self, k: usize) -> &[Subspace] {
        &self.levels[k]
    }
    pub fn generators(&self) -> &[Subspace] {
        &self.levels[self.rank() - 1]
    }
    pub fn num_generators(&self) -> usize {
        self.generators().len()
    }
    pub fn generator_points(&self, g: usize) -> &[usize] {
        &self.generator_points[g]
    }
    pub fn generator_point_set(&self, g: usize) -> &BitSet {
        &self.generator_point_sets[g]
    }
    pub fn point_generators(&self, p: usize) -> &[usize] {
        &self.point_generators[p]
    }
    pub fn point_index(&self, v: &[Elem]) -> Option<usize> {
        self.point_index.get(v).copied()
    }
    /// Index of a subspace within its level.
    pub fn index_of(&self, s: &Subspace) -> Option<usize> {
        let k = usize::try_from(s.dim()).ok()?;
        self.levels.get(k)?.binary_search(s).ok()
    }
    pub fn generator_index(&self, s: &Subspace) -> Option<usize> {
        (s.rank() == self.rank()).then(|| self.index_of(s)).flatten()
    }

    /// Indices of the points of a totally isotropic subspace.
    pub fn subspace_point_set(&self, s: &Subspace) -> BitSet {
        let f = self.descriptor.field();
        BitSet::from_indices(self.num_points(), s.point_vectors(f).iter().map(|v| self.point_index[v]))
    }

    /// Generators containing the given point set.
    pub fn generators_through(&self, points: &BitSet) -> Vec<usize> {
        match points.first() {
            None => (0..self.num_generators()).collect(),
            Some(p) => self.point_generators[p]
                .iter()
                .copied()
                .filter(|&g| points.is_subset(&self.generator_point_sets[g]))
                .collect(),
        }
    }

    /// Projective dimension of g ∩ h for generators g, h.
    pub fn generator_meet_dim(&self, g: usize, h: usize) -> isize {
        let c = self.generator_point_sets[g].intersection_count(&self.generator_point_sets[h]);
        self.dim_by_point_count[&c]
    }

    /// Projective dimension of a subspace spanned by points, given its point count.
    pub fn dim_from_point_count(&self, c: usize) -> Option<isize> {
        self.dim_by_point_count.get(&c).copied()
    }

    /// Two points are collinear (their join is totally isotropic), the point itself included.
    pub fn collinear(&self, p: usize, r: usize) -> bool {
        p == r || self.descriptor.pair(self.points()[p].data(), self.points()[r].data()) == 0
    }

    pub fn class_labels(&self) -> Option<&[GeneratorClass]> {
        self.class_labels.as_deref()
    }

    /// Generator indices of one class of a hyperbolic quadric.
    pub fn class_members(&self, class: GeneratorClass) -> Result<Vec<usize>> {
        let labels = self
            .class_labels
            .as_ref()
            .ok_or_else(|| Error::WrongFamily(format!("{} has no generator classes", self.descriptor)))?;
        Ok((0..labels.len()).filter(|&g| labels[g] == class).collect())
    }

    pub fn hyperbolic_classes(&self) -> Option<&[Vec<usize>]> {
        self.hyperbolic_classes.as_deref()
    }

    /// Latin/Greek labels: generator 0 is Latin, and g shares its label iff
    /// d − 1 − dim(g ∩ g₀) is even.
    pub fn split_hyperbolic_classes(&self) -> Result<Vec<GeneratorClass>> {
        if self.descriptor.family() != Family::HyperbolicQuadric {
            return Err(Error::WrongFamily(format!("{} is not a hyperbolic quadric", self.descriptor)));
        }
        let d = self.rank() as isize;
        let n = self.num_generators();
        let same = |a: usize, b: usize| (d - 1 - self.generator_meet_dim(a, b)) % 2 == 0;
        let labels: Vec<GeneratorClass> = (0..n)
            .map(|g| if same(g, 0) { GeneratorClass::Latin } else { GeneratorClass::Greek })
            .collect();
        // transitivity on a deterministic sample of triples
        let step = (n / 23).max(1);
        for a in (0..n).step_by(step) {
            for b in (0..n).step_by(step + 1) {
                let c = (a * 7 + b * 13 + 1) % n;
                let consistent = same(a, b) == (labels[a] == labels[b])
                    && same(b, c) == (labels[b] == labels[c]);
                if !consistent {
                    return Err(Error::InvalidSpace(format!(
                        "generator class labelling is not transitive on ({a}, {b}, {c})"
                    )));
                }
            }
        }
        let latin = labels.iter().filter(|&&l| l == GeneratorClass::Latin).count();
        if 2 * latin != n {
            return Err(Error::InvalidSpace(format!("unequal generator classes: {latin} of {n}")));
        }
        Ok(labels)
    }

    /// The two generator classes of every hyperbolic hyperplane section, in
    /// hyperplane order. Only defined for type III spaces.
    pub fn enumerate_hyperbolic_classes(&self) -> Result<Vec<Vec<usize>>> {
        if !is_type_three(&self.descriptor) {
            return Err(Error::WrongFamily(format!(
                "{} is not Q(2d,q) or W(2d-1,q), q even, with d odd",
                self.descriptor
            )));
        }
        self.compute_hyperbolic_classes()
    }

    /// Generator sets of the embedded polar spaces of the same rank with
    /// parameter e − 1: hyperbolic sections of Q(2d,q) (and their nucleus
    /// images in W(2d−1,q), q even), parabolic sections of Q−(2d+1,q) and
    /// non-degenerate sections of H(2d,q).
    pub fn embedded_sections(&self) -> Result<Vec<Vec<usize>>> {
        let family = self.descriptor.family();
        let even = self.descriptor.field().characteristic() == 2;
        match family {
            Family::ParabolicQuadric | Family::Symplectic if family != Family::Symplectic || even => {
                let classes = match &self.hyperbolic_classes {
                    Some(c) => c.clone(),
                    None => self.compute_hyperbolic_classes()?,
                };
                Ok(classes
                    .chunks(2)
                    .map(|pair| {
                        let mut v: Vec<usize> = pair.concat();
                        v.sort_unstable();
                        v
                    })
                    .collect())
            }
            Family::EllipticQuadric => self.sections_of_type(HyperplaneSection::Parabolic),
            Family::HermitianEven => self.sections_of_type(HyperplaneSection::HermitianNondegenerate),
            _ => Err(Error::WrongFamily(format!(
                "{} has no embedded polar space of the same rank",
                self.descriptor
            ))),
        }
    }

    fn sections_of_type(&self, wanted: HyperplaneSection) -> Result<Vec<Vec<usize>>> {
        let f = self.descriptor.field().clone();
        let normals: Vec<Vec<Elem>> = projective_points(&f, self.descriptor.vector_len()).collect();
        let found: Vec<Option<Vec<usize>>> = normals
            .par_iter()
            .map(|a| -> Result<Option<Vec<usize>>> {
                if self.descriptor.classify_hyperplane_section(a)? != wanted {
                    return Ok(None);
                }
                Ok(Some(
                    (0..self.num_generators())
                        .filter(|&g| self.generators()[g].rows().all(|r| dot(&f, a, r) == 0))
                        .collect(),
                ))
            })
            .collect::<Result<_>>()?;
        Ok(found.into_iter().flatten().collect())
    }

    fn compute_hyperbolic_classes(&self) -> Result<Vec<Vec<usize>>> {
        match self.descriptor.family() {
            Family::ParabolicQuadric => self.parabolic_hyperbolic_classes(),
            Family::Symplectic => {
                let model = PolarSpaceDescriptor::with_field(
                    Family::ParabolicQuadric,
                    self.rank(),
                    self.descriptor.field().clone(),
                )?;
                let q_inst = PolarSpaceInstance::enumerate_levels(&model)?;
                let classes = q_inst.parabolic_hyperbolic_classes()?;
                let map = self.nucleus_projection_map(&q_inst)?;
                Ok(classes
                    .into_iter()
                    .map(|cls| {
                        let mut v: Vec<usize> = cls.into_iter().map(|g| map[g]).collect();
                        v.sort_unstable();
                        v
                    })
                    .collect())
            }
            _ => Err(Error::WrongFamily(format!("{} is not of type III", self.descriptor))),
        }
    }

    /// For each generator of the model Q(2d,q), the index of its projection
    /// from the nucleus in this W(2d−1,q).
    fn nucleus_projection_map(&self, model: &PolarSpaceInstance) -> Result<Vec<usize>> {
        let f = self.descriptor.field().clone();
        let d = self.rank();
        let mut map = Vec::with_capacity(model.num_generators());
        for g in model.generators() {
            let rows: Vec<Vec<Elem>> = g
                .rows()
                .map(|r| {
                    let mut w = vec![0; 2 * d];
                    for k in 0..d {
                        w[k] = r[2 * k + 1];
                        w[d + k] = r[2 * k + 2];
                    }
                    w
                })
                .collect();
            let s = Subspace::from_rows(&f, &rows, 2 * d);
            let idx = self
                .generator_index(&s)
                .filter(|_| self.descriptor.is_totally_isotropic(&s))
                .ok_or_else(|| Error::InvalidSpace("nucleus projection does not map generators to generators".into()))?;
            map.push(idx);
        }
        let mut seen = map.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != map.len() {
            return Err(Error::InvalidSpace("nucleus projection is not injective on generators".into()));
        }
        Ok(map)
    }

    fn parabolic_hyperbolic_classes(&self) -> Result<Vec<Vec<usize>>> {
        let f = self.descriptor.field().clone();
        let d = self.rank() as isize;
        let n1 = self.descriptor.vector_len();
        let normals: Vec<Vec<Elem>> = projective_points(&f, n1).collect();
        let per_hyperplane: Vec<Option<Vec<Vec<usize>>>> = normals
            .par_iter()
            .map(|a| -> Result<Option<Vec<Vec<usize>>>> {
                let count = self
                    .points()
                    .iter()
                    .filter(|p| dot(&f, a, p.data()) == 0)
                    .count() as u64;
                if self.descriptor.section_from_count(count)? != HyperplaneSection::Hyperbolic {
                    return Ok(None);
                }
                let inside: Vec<usize> = (0..self.num_generators())
                    .filter(|&g| self.generators()[g].rows().all(|r| dot(&f, a, r) == 0))
                    .collect();
                let g0 = inside[0];
                let (first, second): (Vec<usize>, Vec<usize>) = inside
                    .iter()
                    .partition(|&&g| (d - 1 - self.generator_meet_dim(g, g0)) % 2 == 0);
                Ok(Some(vec![first, second]))
            })
            .collect::<Result<_>>()?;
        let classes: Vec<Vec<usize>> = per_hyperplane.into_iter().flatten().flatten().collect();
        Ok(classes)
    }
}

/// Q(2d,q) with d odd, or W(2d−1,q) with d odd and q even.
pub fn is_type_three(desc: &PolarSpaceDescriptor) -> bool {
    let odd = desc.rank() % 2 == 1;
    match desc.family() {
        Family::ParabolicQuadric => odd,
        Family::Symplectic => odd && desc.field().characteristic() == 2,
        _ => false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(s: &str) -> PolarSpaceInstance {
        PolarSpaceInstance::enumerate(&PolarSpaceDescriptor::parse_symbol(s).unwrap()).unwrap()
    }

    #[test]
    fn small_counts() {
        let w = inst("W(3,2)");
        assert_eq!((w.num_points(), w.num_generators()), (15, 15));
        let e = inst("Q-(5,2)");
        assert_eq!((e.num_points(), e.num_generators()), (27, 45));
        let h = inst("H(3,4)");
        assert_eq!((h.num_points(), h.num_generators()), (45, 27));
    }

    #[test]
    fn generator_classes() {
        let q3 = inst("Q+(3,2)");
        let labels = q3.class_labels().unwrap();
        assert_eq!(labels.iter().filter(|&&l| l == GeneratorClass::Latin).count(), 3);
        // lines of one regulus are pairwise disjoint
        let latin = q3.class_members(GeneratorClass::Latin).unwrap();
        for &a in &latin {
            for &b in &latin {
                if a != b {
                    assert_eq!(q3.generator_meet_dim(a, b), -1);
                }
            }
        }
        let q5 = inst("Q+(5,2)");
        assert_eq!(q5.class_members(GeneratorClass::Greek).unwrap().len(), 15);
        assert_eq!(q5.class_labels().unwrap()[0], GeneratorClass::Latin);
    }

    #[test]
    fn budget_guard() {
        let d = PolarSpaceDescriptor::parse_symbol("Q+(7,2)").unwrap();
        assert!(matches!(
            PolarSpaceInstance::enumerate_with_budget(&d, 100),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn lookups() {
        let w = inst("W(3,2)");
        for (i, g) in w.generators().iter().enumerate() {
            assert_eq!(w.generator_index(g), Some(i));
        }
        for (i, p) in w.points().iter().enumerate() {
            assert_eq!(w.point_index(p.data()), Some(i));
        }
        assert!(w.generators().windows(2).all(|x| x[0] < x[1]));
    }

    #[test]
    fn q42_has_no_hyperbolic_classes() {
        assert!(inst("Q(4,2)").hyperbolic_classes().is_none());
        assert!(inst("Q(4,2)").enumerate_hyperbolic_classes().is_err());
    }
}
