//! Generalized quadrangles from rank 2 polar spaces, tight sets of points
//! and the equivalent descriptions of Cameron-Liebler line sets.

use crate::bitset::BitSet;
use crate::enumeration::PolarSpaceInstance;
use crate::error::{Error, Result};
use crate::exact::{self, IntMatrix};
use crate::scheme::SchemeContext;
use num_bigint::BigInt;
use num_rational::BigRational;
use serde::Serialize;

/// Point-line incidence structure of a generalized quadrangle of order (s, t).
#[derive(Clone, Debug)]
pub struct Gq {
    s: usize,
    t: usize,
    lines: Vec<Vec<usize>>,
    point_lines: Vec<Vec<usize>>,
    line_sets: Vec<BitSet>,
    /// perp[p] = points collinear with p, p included
    perp: Vec<BitSet>,
}

impl Gq {
    /// Points and lines of a rank 2 polar space.
    pub fn from_instance(inst: &PolarSpaceInstance) -> Result<Self> {
        if inst.rank() != 2 {
            return Err(Error::WrongFamily(format!("{} is not of rank 2", inst.descriptor())));
        }
        let lines: Vec<Vec<usize>> = (0..inst.num_generators()).map(|g| inst.generator_points(g).to_vec()).collect();
        Self::from_lines(inst.num_points(), lines)
    }

    /// A point-line geometry with constant line size s+1 and point degree t+1.
    pub fn from_lines(num_points: usize, lines: Vec<Vec<usize>>) -> Result<Self> {
        let mut point_lines = vec![Vec::new(); num_points];
        for (l, pts) in lines.iter().enumerate() {
            for &p in pts {
                point_lines[p].push(l);
            }
        }
        let s = lines.first().map_or(0, |l| l.len()).saturating_sub(1);
        let t = point_lines.first().map_or(0, |l| l.len()).saturating_sub(1);
        if lines.iter().any(|l| l.len() != s + 1) || point_lines.iter().any(|l| l.len() != t + 1) {
            return Err(Error::InvalidSpace("line sizes or point degrees are not constant".into()));
        }
        let line_sets: Vec<BitSet> = lines.iter().map(|l| BitSet::from_indices(num_points, l.iter().copied())).collect();
        let perp = (0..num_points)
            .map(|p| {
                point_lines[p]
                    .iter()
                    .fold(BitSet::from_indices(num_points, [p]), |acc, &l| acc.union(&line_sets[l]))
            })
            .collect();
        Ok(Gq {
            s,
            t,
            lines,
            point_lines,
            line_sets,
            perp,
        })
    }

    /// Points and lines swapped: order (t, s).
    pub fn dual(&self) -> Gq {
        Self::from_lines(self.lines.len(), self.point_lines.clone()).expect("dual of a valid geometry")
    }

    pub fn order(&self) -> (usize, usize) {
        (self.s, self.t)
    }

    pub fn num_points(&self) -> usize {
        self.perp.len()
    }

    pub fn num_lines(&self) -> usize {
        self.lines.len()
    }

    pub fn line(&self, l: usize) -> &[usize] {
        &self.lines[l]
    }

    pub fn line_set(&self, l: usize) -> &BitSet {
        &self.line_sets[l]
    }

    pub fn lines_through(&self, p: usize) -> &[usize] {
        &self.point_lines[p]
    }

    pub fn perp(&self, p: usize) -> &BitSet {
        &self.perp[p]
    }

    /// For every antiflag (P, ℓ) there is exactly one point on ℓ collinear with P.
    pub fn satisfies_axiom(&self) -> bool {
        (0..self.num_points()).all(|p| {
            (0..self.num_lines())
                .filter(|&l| !self.line_sets[l].contains(p))
                .all(|l| self.perp[p].intersection_count(&self.line_sets[l]) == 1)
        })
    }

    /// x with |P^⊥ ∩ T| = s + x for P ∈ T and x for P ∉ T, if T is tight.
    pub fn tight_parameter(&self, set: &BitSet) -> Option<usize> {
        let n = set.count();
        if n % (self.s + 1) != 0 {
            return None;
        }
        let x = n / (self.s + 1);
        (0..self.num_points())
            .all(|p| {
                let want = if set.contains(p) { self.s + x } else { x };
                self.perp[p].intersection_count(set) == want
            })
            .then_some(x)
    }

    /// Lines contained in the point set.
    pub fn lines_inside(&self, set: &BitSet) -> Vec<usize> {
        (0..self.num_lines()).filter(|&l| self.line_sets[l].is_subset(set)).collect()
    }

    /// Pairwise disjoint lines partitioning the set, if any.
    pub fn line_partition(&self, set: &BitSet) -> Option<Vec<usize>> {
        let inside = self.lines_inside(set);
        let mut chosen = Vec::new();
        self.cover(set.clone(), &inside, &mut chosen).then_some(chosen)
    }

    fn cover(&self, rest: BitSet, lines: &[usize], chosen: &mut Vec<usize>) -> bool {
        let Some(p) = rest.first() else {
            return true;
        };
        for &l in lines.iter().filter(|&&l| self.line_sets[l].contains(p)) {
            if self.line_sets[l].is_subset(&rest) {
                chosen.push(l);
                if self.cover(rest.difference(&self.line_sets[l]), lines, chosen) {
                    return true;
                }
                chosen.pop();
            }
        }
        false
    }

    /// Whether the set with the lines it contains is a subquadrangle of
    /// order (s′, t), s′ = s/t.
    pub fn is_subquadrangle(&self, set: &BitSet) -> bool {
        if self.t == 0 || self.s % self.t != 0 {
            return false;
        }
        let s2 = self.s / self.t;
        // lines meet the set in 0, 1 or s′+1 points; exactly t+1 such lines through each point
        let full: Vec<usize> = (0..self.num_lines())
            .filter(|&l| self.line_sets[l].intersection_count(set) == s2 + 1)
            .collect();
        if (0..self.num_lines()).any(|l| {
            let c = self.line_sets[l].intersection_count(set);
            c > 1 && c != s2 + 1
        }) {
            return false;
        }
        let sub: Vec<Vec<usize>> = full
            .iter()
            .map(|&l| self.lines[l].iter().copied().filter(|&p| set.contains(p)).collect())
            .collect();
        let members = set.to_vec();
        let index: std::collections::HashMap<usize, usize> = members.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        let relabelled: Vec<Vec<usize>> = sub.iter().map(|l| l.iter().map(|p| index[p]).collect()).collect();
        match Gq::from_lines(members.len(), relabelled) {
            Ok(g) => g.order() == (s2, self.t) && g.satisfies_axiom(),
            Err(_) => false,
        }
    }

    pub fn label(&self, set: &BitSet) -> TightSetLabel {
        if self.line_partition(set).is_some() {
            TightSetLabel::LineUnion
        } else if self.is_subquadrangle(set) {
            TightSetLabel::Subquadrangle
        } else {
            TightSetLabel::Other
        }
    }

    /// Tight-set report for a point set.
    pub fn tight_set(&self, set: &BitSet) -> TightSet {
        let x = self.tight_parameter(set);
        TightSet {
            size: set.count(),
            x,
            label: x.map(|_| self.label(set)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TightSetLabel {
    /// x pairwise disjoint lines.
    LineUnion,
    /// The points of a subquadrangle of order (s/t, t).
    Subquadrangle,
    Other,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TightSet {
    pub size: usize,
    pub x: Option<usize>,
    pub label: Option<TightSetLabel>,
}

/// The equivalent statements for a line set L of a GQ of order (s, t),
/// with x = |L|/(t+1).
#[derive(Clone, Debug, Serialize)]
pub struct GqClReport {
    pub x: String,
    /// χ ∈ im(Aᵗ), decided by a rank comparison.
    pub in_image: bool,
    /// χ ⊥ ker(A).
    pub orthogonal_to_kernel: bool,
    /// Each line ℓ is disjoint from (x − χ(ℓ))t members.
    pub disjoint_counts: bool,
    /// Each line ℓ meets x + χ(ℓ)(t − 1) members in a point.
    pub meeting_counts: bool,
    /// K(χ − x/(st+1)·j) = −t(χ − x/(st+1)·j).
    pub eigenvector: bool,
    /// L is an x-tight set of the dual quadrangle.
    pub dual_tight: bool,
}

impl GqClReport {
    pub fn all_agree(&self) -> bool {
        let v = [
            self.in_image,
            self.orthogonal_to_kernel,
            self.disjoint_counts,
            self.meeting_counts,
            self.eigenvector,
            self.dual_tight,
        ];
        v.iter().all(|&b| b == v[0])
    }

    pub fn holds(&self) -> bool {
        self.disjoint_counts
    }
}

/// Evaluates every statement for a line set of a rank 2 polar space.
pub fn gq_cl_test(scheme: &SchemeContext, dual: &Gq, lines: &BitSet) -> Result<GqClReport> {
    if scheme.rank() != 2 {
        return Err(Error::WrongFamily(format!("{} is not of rank 2", scheme.descriptor())));
    }
    let n = scheme.num_generators();
    let (s, t) = dual.order();
    // the dual has order (t, s)
    let (s, t) = (t, s);
    let size = lines.count();
    let x = BigRational::new(BigInt::from(size), BigInt::from(t + 1));
    let chi = |g: usize| BigInt::from(lines.contains(g) as u8);
    let xi = |g: usize| BigRational::from_integer(chi(g));
    let v: Vec<BigRational> = (0..n).map(xi).collect();
    let a: &IntMatrix = scheme.point_incidence();
    let in_image = exact::row_space_contains_by_rank(a, &v)?;
    let orthogonal_to_kernel = scheme.in_point_image(lines)?;
    let tr = BigRational::from_integer(BigInt::from(t));
    let count_at = |g: usize, dist: usize| {
        BigRational::from_integer(BigInt::from(
            scheme.relation(dist, g).iter().filter(|&&h| lines.contains(h as usize)).count(),
        ))
    };
    let disjoint_counts = (0..n).all(|g| count_at(g, 2) == (&x - xi(g)) * &tr);
    let one = BigRational::from_integer(BigInt::from(1));
    let meeting_counts = (0..n).all(|g| count_at(g, 1) == &x + xi(g) * (&tr - &one));
    // w = (st+1)b·χ − a·j with x = a/b
    let m = BigInt::from(s * t + 1);
    let scale = &m * x.denom();
    let w: Vec<BigInt> = (0..n).map(|g| &scale * chi(g) - x.numer()).collect();
    let kw = scheme.apply_big(2, &w);
    let tb = BigInt::from(t);
    let eigenvector = kw.iter().zip(&w).all(|(a, b)| *a == -(&tb * b));
    let dual_tight = dual.tight_parameter(lines).is_some();
    Ok(GqClReport {
        x: if x.is_integer() {
            x.to_integer().to_string()
        } else {
            format!("{}/{}", x.numer(), x.denom())
        },
        in_image,
        orthogonal_to_kernel,
        disjoint_counts,
        meeting_counts,
        eigenvector,
        dual_tight,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::PolarSpaceDescriptor;
    use std::sync::Arc;

    fn inst(s: &str) -> PolarSpaceInstance {
        PolarSpaceInstance::enumerate(&PolarSpaceDescriptor::parse_symbol(s).unwrap()).unwrap()
    }

    #[test]
    fn orders_and_axiom() {
        for (s, order) in [("W(3,2)", (2, 2)), ("Q-(5,2)", (2, 4)), ("H(3,4)", (4, 2)), ("Q+(3,2)", (2, 1))] {
            let g = Gq::from_instance(&inst(s)).unwrap();
            assert_eq!(g.order(), order, "{s}");
            assert!(g.satisfies_axiom(), "{s}");
            assert_eq!(g.dual().order(), (order.1, order.0));
            assert!(g.dual().satisfies_axiom());
        }
    }

    #[test]
    fn lines_and_perps_are_tight() {
        let g = Gq::from_instance(&inst("H(3,4)")).unwrap();
        let l = g.line_set(0).clone();
        assert_eq!(g.tight_parameter(&l), Some(1));
        assert_eq!(g.label(&l), TightSetLabel::LineUnion);
        // a point perp is not tight: it has 1 + s(t+1) points
        assert_eq!(g.tight_parameter(g.perp(0)), None);
        assert_eq!(g.tight_parameter(&BitSet::full(g.num_points())), Some(g.order().1 * g.order().0 + 1));
    }

    #[test]
    fn pencil_statements_agree() {
        let i = Arc::new(inst("W(3,2)"));
        let sc = SchemeContext::new(i.clone()).unwrap();
        let dual = Gq::from_instance(&i).unwrap().dual();
        let pencil = BitSet::from_indices(15, i.point_generators(4).iter().copied());
        let r = gq_cl_test(&sc, &dual, &pencil).unwrap();
        assert!(r.holds() && r.all_agree(), "{r:?}");
        let odd = BitSet::from_indices(15, [0, 1, 5]);
        let r = gq_cl_test(&sc, &dual, &odd).unwrap();
        assert!(!r.holds() && r.all_agree(), "{r:?}");
    }
}
