//! The association scheme of the dual polar graph on an enumerated polar
//! space: distance relations, incidence matrices, eigenspace membership and
//! the scheme on one generator class of a hyperbolic quadric.

use crate::bitset::BitSet;
use crate::combinatorics::{self, EigenvalueTable, SchemeParameters};
use crate::enumeration::{GeneratorClass, PolarSpaceInstance};
use crate::error::{Error, Result};
use crate::exact::{self, clear_denominators, IntMatrix, Kernel};
use crate::geometry::{Family, PolarSpaceDescriptor};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;
use std::fmt;
use std::sync::{Arc, OnceLock};

/// A pair of generators at which an empirical parameter differs from the closed form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RegularityViolation {
    pub g: usize,
    pub h: usize,
    pub distance: usize,
    /// 'b' or 'c'
    pub parameter: char,
    pub expected: BigInt,
    pub found: usize,
}

impl fmt::Display for RegularityViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}_{} = {} at generators ({}, {}), expected {}",
            self.parameter, self.distance, self.found, self.g, self.h, self.expected
        )
    }
}

/// A pair (g, h) at distance k whose count of w with δ(g,w)=i, δ(w,h)=j is not p^k_{ij}.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntersectionViolation {
    pub g: usize,
    pub h: usize,
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub expected: BigInt,
    pub found: usize,
}

/// Outcome of the spectrum check on V_0, …, V_d built from the incidence matrices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpectrumReport {
    /// rank(C_k) for k = 0..d, with C_0 the all-ones row
    pub incidence_ranks: Vec<usize>,
    /// dim V_j = rank(C_j) − rank(C_{j−1})
    pub dims: Vec<usize>,
    /// rank of the constructed spanning set of each V_j
    pub spanning_ranks: Vec<usize>,
    pub vectors_checked: usize,
    pub failures: Vec<String>,
}

impl SpectrumReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

pub struct SchemeContext {
    instance: Arc<PolarSpaceInstance>,
    params: SchemeParameters,
    eigen: EigenvalueTable,
    /// P_{j,1} as machine integers
    p1: Vec<i128>,
    n: usize,
    dist: Vec<u8>,
    /// rel[i][g] = generators at distance i from g
    rel: Vec<Vec<Vec<u32>>>,
    point_matrix: OnceLock<IntMatrix>,
    point_kernel: OnceLock<Kernel>,
    b_matrix: OnceLock<IntMatrix>,
    b_kernel: OnceLock<Kernel>,
}

impl fmt::Debug for SchemeContext {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SchemeContext")
            .field("space", &self.instance.descriptor().to_string())
            .field("generators", &self.n)
            .finish()
    }
}

fn cached<'a, T>(cell: &'a OnceLock<T>, make: impl FnOnce() -> Result<T>) -> Result<&'a T> {
    if let Some(v) = cell.get() {
        return Ok(v);
    }
    let v = make()?;
    Ok(cell.get_or_init(|| v))
}

fn to_i128(v: &BigInt) -> Result<i128> {
    v.to_i128()
        .ok_or_else(|| Error::InvalidInput(format!("eigenvalue {v} exceeds 128 bits")))
}

impl SchemeContext {
    pub fn new(instance: Arc<PolarSpaceInstance>) -> Result<Self> {
        let desc = instance.descriptor();
        let d = desc.rank();
        let params = SchemeParameters::new(desc);
        let eigen = EigenvalueTable::new(desc)?;
        let p1 = (0..=d).map(|j| to_i128(eigen.get(j, 1))).collect::<Result<_>>()?;
        let n = instance.num_generators();
        let rows: Vec<Vec<u8>> = (0..n)
            .into_par_iter()
            .map(|g| {
                (0..n)
                    .map(|h| (d as isize - 1 - instance.generator_meet_dim(g, h)) as u8)
                    .collect()
            })
            .collect();
        let dist: Vec<u8> = rows.into_iter().flatten().collect();
        let mut rel = vec![vec![Vec::new(); n]; d + 1];
        for g in 0..n {
            for h in 0..n {
                rel[dist[g * n + h] as usize][g].push(h as u32);
            }
        }
        Ok(SchemeContext {
            instance,
            params,
            eigen,
            p1,
            n,
            dist,
            rel,
            point_matrix: OnceLock::new(),
            point_kernel: OnceLock::new(),
            b_matrix: OnceLock::new(),
            b_kernel: OnceLock::new(),
        })
    }

    pub fn instance(&self) -> &PolarSpaceInstance {
        &self.instance
    }

    pub fn instance_arc(&self) -> &Arc<PolarSpaceInstance> {
        &self.instance
    }

    pub fn descriptor(&self) -> &PolarSpaceDescriptor {
        self.instance.descriptor()
    }

    pub fn rank(&self) -> usize {
        self.instance.rank()
    }

    pub fn num_generators(&self) -> usize {
        self.n
    }

    pub fn parameters(&self) -> &SchemeParameters {
        &self.params
    }

    pub fn eigenvalues(&self) -> &EigenvalueTable {
        &self.eigen
    }

    /// d − 1 − dim(g ∩ h).
    #[inline]
    pub fn distance(&self, g: usize, h: usize) -> usize {
        self.dist[g * self.n + h] as usize
    }

    /// Generators at distance i from g.
    pub fn relation(&self, i: usize, g: usize) -> &[u32] {
        &self.rel[i][g]
    }

    /// Empirical b_i, c_i over all ordered pairs, compared with the closed forms.
    pub fn verify_distance_regularity(&self) -> std::result::Result<SchemeParameters, RegularityViolation> {
        let n = self.n;
        let first = (0..n)
            .into_par_iter()
            .filter_map(|g| {
                for h in 0..n {
                    let i = self.distance(g, h);
                    let (mut b, mut c) = (0usize, 0usize);
                    for &w in &self.rel[1][h] {
                        let dw = self.distance(g, w as usize);
                        if dw + 1 == i {
                            c += 1;
                        } else if dw == i + 1 {
                            b += 1;
                        }
                    }
                    for (parameter, found, expected) in [('b', b, &self.params.b[i]), ('c', c, &self.params.c[i])] {
                        if BigInt::from(found) != *expected {
                            return Some(RegularityViolation {
                                g,
                                h,
                                distance: i,
                                parameter,
                                expected: expected.clone(),
                                found,
                            });
                        }
                    }
                }
                None
            })
            .min_by_key(|v| (v.g, v.h));
        match first {
            Some(v) => Err(v),
            None => Ok(self.params.clone()),
        }
    }

    /// Checks A_iA_j = Σ_k p^k_{ij}A_k on every pair (g, h) with g in the sample.
    pub fn verify_intersection_numbers(&self, sample: Option<usize>) -> std::result::Result<(), IntersectionViolation> {
        let d = self.rank();
        let n = self.n;
        let p = self.params.intersection_numbers();
        let step = sample.map_or(1, |s| (n / s.max(1)).max(1));
        let sources: Vec<usize> = (0..n).step_by(step).collect();
        let found = sources
            .par_iter()
            .filter_map(|&g| {
                for h in 0..n {
                    let k = self.distance(g, h);
                    let mut hist = vec![0usize; (d + 1) * (d + 1)];
                    for w in 0..n {
                        hist[self.distance(g, w) * (d + 1) + self.distance(w, h)] += 1;
                    }
                    for i in 0..=d {
                        for j in 0..=d {
                            let c = hist[i * (d + 1) + j];
                            if BigInt::from(c) != p[i][j][k] {
                                return Some(IntersectionViolation {
                                    g,
                                    h,
                                    i,
                                    j,
                                    k,
                                    expected: p[i][j][k].clone(),
                                    found: c,
                                });
                            }
                        }
                    }
                }
                None
            })
            .min_by_key(|v| (v.g, v.h));
        match found {
            Some(v) => Err(v),
            None => Ok(()),
        }
    }

    /// A_i·v, or None on overflow.
    pub fn apply(&self, i: usize, v: &[i128]) -> Option<Vec<i128>> {
        assert_eq!(v.len(), self.n);
        self.rel[i]
            .iter()
            .map(|nb| nb.iter().try_fold(0i128, |acc, &h| acc.checked_add(v[h as usize])))
            .collect()
    }

    pub fn apply_big(&self, i: usize, v: &[BigInt]) -> Vec<BigInt> {
        self.rel[i]
            .iter()
            .map(|nb| nb.iter().fold(BigInt::zero(), |acc, &h| acc + &v[h as usize]))
            .collect()
    }

    /// Whether A_i·v = λ·v.
    pub fn is_eigenvector(&self, i: usize, v: &[BigInt], lambda: &BigInt) -> bool {
        self.apply_big(i, v).iter().zip(v).all(|(a, b)| *a == lambda * b)
    }

    /// Membership of an integer vector in ⊕_{j∈S} V_j: the product of
    /// (A₁ − P_{j,1}·I) over j ∈ S annihilates v.
    pub fn eigenspace_membership_int(&self, v: &[i128], s: &[usize]) -> bool {
        let mut w = v.to_vec();
        for j in (0..=self.rank()).filter(|j| s.contains(j)) {
            let Some(next) = self.apply(1, &w).and_then(|aw| {
                aw.iter()
                    .zip(&w)
                    .map(|(&a, &x)| a.checked_sub(self.p1[j].checked_mul(x)?))
                    .collect::<Option<Vec<i128>>>()
            }) else {
                let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
                return self.eigenspace_membership_big(&big, s);
            };
            w = next;
        }
        w.iter().all(|&x| x == 0)
    }

    pub fn eigenspace_membership_big(&self, v: &[BigInt], s: &[usize]) -> bool {
        let mut w = v.to_vec();
        for j in (0..=self.rank()).filter(|j| s.contains(j)) {
            let p = self.eigen.get(j, 1);
            w = self.apply_big(1, &w).into_iter().zip(&w).map(|(a, x)| a - p * x).collect();
        }
        w.iter().all(|x| x.is_zero())
    }

    pub fn eigenspace_membership(&self, v: &[BigRational], s: &[usize]) -> bool {
        assert_eq!(v.len(), self.n);
        self.eigenspace_membership_big(&clear_denominators(v), s)
    }

    pub fn set_eigenspace_membership(&self, set: &BitSet, s: &[usize]) -> bool {
        let v: Vec<i128> = (0..self.n).map(|g| set.contains(g) as i128).collect();
        self.eigenspace_membership_int(&v, s)
    }

    /// Incidence of (k−1)-spaces and generators, k = 1..d; C_1 = A and C_d = I.
    pub fn incidence_matrix(&self, k: usize) -> Result<IntMatrix> {
        let d = self.rank();
        if k == 0 || k > d {
            return Err(Error::InvalidInput(format!("incidence matrix C_{k} needs 1 ≤ k ≤ {d}")));
        }
        let inst = &self.instance;
        let rows: Vec<Vec<usize>> = inst
            .level(k - 1)
            .par_iter()
            .map(|s| inst.generators_through(&inst.subspace_point_set(s)))
            .collect();
        Ok(IntMatrix::from_index_rows(self.n, rows))
    }

    /// The point-generator incidence matrix A.
    pub fn point_incidence(&self) -> &IntMatrix {
        self.point_matrix.get_or_init(|| {
            IntMatrix::from_index_rows(
                self.n,
                (0..self.instance.num_points()).map(|p| self.instance.point_generators(p).to_vec()),
            )
        })
    }

    pub fn point_kernel(&self) -> Result<&Kernel> {
        cached(&self.point_kernel, || exact::certified_kernel(self.point_incidence()))
    }

    /// Whether χ_L ∈ im(Aᵗ).
    pub fn in_point_image(&self, set: &BitSet) -> Result<bool> {
        Ok(self.point_kernel()?.orthogonal_set(set))
    }

    /// Whether v ∈ im(Mᵗ), exactly.
    pub fn image_membership(&self, v: &[BigRational], m: &IntMatrix) -> Result<bool> {
        if m.ncols() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                got: m.ncols(),
            });
        }
        exact::row_space_contains(m, v)
    }

    /// Incidence of hyperbolic classes and generators (type III spaces).
    pub fn hyperbolic_class_matrix(&self) -> Result<&IntMatrix> {
        cached(&self.b_matrix, || {
            let classes = self.instance.hyperbolic_classes().ok_or_else(|| {
                Error::WrongFamily(format!("{} has no hyperbolic classes", self.descriptor()))
            })?;
            Ok(IntMatrix::from_index_rows(self.n, classes.iter().cloned()))
        })
    }

    pub fn hyperbolic_class_kernel(&self) -> Result<&Kernel> {
        cached(&self.b_kernel, || exact::certified_kernel(self.hyperbolic_class_matrix()?))
    }

    /// Whether χ_L ∈ im(Bᵗ).
    pub fn in_hyperbolic_class_image(&self, set: &BitSet) -> Result<bool> {
        Ok(self.hyperbolic_class_kernel()?.orthogonal_set(set))
    }

    /// Checks (BᵗB)_{π,π′} = q^{d−δ(π,π′)}: the number of hyperbolic classes
    /// containing both generators.
    pub fn verify_btb(&self) -> Result<bool> {
        let classes = self.instance.hyperbolic_classes().ok_or_else(|| {
            Error::WrongFamily(format!("{} has no hyperbolic classes", self.descriptor()))
        })?;
        let n = self.n;
        let mut count = vec![0u32; n * n];
        for c in classes {
            for &a in c {
                for &b in c {
                    count[a * n + b] += 1;
                }
            }
        }
        let q = self.descriptor().q() as u32;
        let d = self.rank() as u32;
        Ok((0..n).all(|a| (0..n).all(|b| count[a * n + b] == q.pow(d - self.distance(a, b) as u32))))
    }

    /// Rows (P, Ω_c): the generators of class c through P, for hyperbolic quadrics.
    pub fn class_split_point_incidence(&self) -> Result<IntMatrix> {
        let labels = self.class_labels()?;
        let inst = &self.instance;
        let rows = (0..inst.num_points()).flat_map(|p| {
            [GeneratorClass::Latin, GeneratorClass::Greek].map(|c| {
                inst.point_generators(p)
                    .iter()
                    .copied()
                    .filter(|&g| labels[g] == c)
                    .collect::<Vec<usize>>()
            })
        });
        Ok(IntMatrix::from_index_rows(self.n, rows))
    }

    fn class_labels(&self) -> Result<&[GeneratorClass]> {
        self.instance
            .class_labels()
            .ok_or_else(|| Error::WrongFamily(format!("{} has no generator classes", self.descriptor())))
    }

    /// Builds V_j as the image of im(C_jᵗ) under ∏_{i<j}(A₁ − P_{i,1}I), checks
    /// K·w = P_{j,d}·w and A₁·w = P_{j,1}·w on every spanning vector and compares
    /// ranks with the dimensions dim V_j = rank C_j − rank C_{j−1}.
    pub fn verify_spectrum(&self) -> Result<SpectrumReport> {
        let d = self.rank();
        let n = self.n;
        let desc = self.descriptor();
        let mut ranks = vec![1usize];
        let mut spanning_ranks = vec![1usize];
        let mut failures = Vec::new();
        let mut checked = 0usize;
        let ones = vec![1i128; n];
        let k_ones = self.apply(d, &ones).expect("small");
        if k_ones.iter().any(|&x| BigInt::from(x) != *self.eigen.get(0, d)) {
            failures.push("all-ones vector is not an eigenvector of K for P_{0,d}".into());
        }
        for j in 1..=d {
            let c = self.incidence_matrix(j)?;
            ranks.push(exact::rank(&c)?);
            let kd = combinatorics::disjointness_eigenvalue(desc, j);
            if kd != *self.eigen.get(j, d) {
                failures.push(format!("closed form P_{{{j},{d}}} = {kd} differs from the table"));
            }
            let kd = to_i128(&kd)?;
            let ws: Vec<Option<Vec<i128>>> = c
                .rows()
                .par_iter()
                .map(|row| {
                    let mut w = vec![0i128; n];
                    for &(g, x) in row {
                        w[g] = x as i128;
                    }
                    for i in 0..j {
                        let aw = self.apply(1, &w)?;
                        w = aw
                            .iter()
                            .zip(&w)
                            .map(|(&a, &x)| a.checked_sub(self.p1[i].checked_mul(x)?))
                            .collect::<Option<Vec<_>>>()?;
                    }
                    Some(w)
                })
                .collect();
            let mut span = IntMatrix::new(n);
            for w in ws {
                let w = w.ok_or_else(|| Error::InvalidInput("spectrum vectors overflow 128 bits".into()))?;
                checked += 1;
                let kw = self.apply(d, &w);
                let aw = self.apply(1, &w);
                let ok_k = kw.is_some_and(|kw| kw.iter().zip(&w).all(|(&a, &b)| Some(a) == kd.checked_mul(b)));
                let ok_a = aw.is_some_and(|aw| aw.iter().zip(&w).all(|(&a, &b)| Some(a) == self.p1[j].checked_mul(b)));
                if !(ok_k && ok_a) {
                    failures.push(format!("a spanning vector of V_{j} is not an eigenvector"));
                }
                let row = w
                    .iter()
                    .enumerate()
                    .filter(|(_, &x)| x != 0)
                    .map(|(g, &x)| i64::try_from(x).map(|x| (g, x)))
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| Error::InvalidInput("spectrum vectors exceed 64 bits".into()))?;
                span.push_row(row);
            }
            spanning_ranks.push(exact::rank(&span)?);
        }
        let mut dims = vec![1usize];
        for j in 1..=d {
            if ranks[j] < ranks[j - 1] {
                failures.push(format!("rank C_{j} < rank C_{}", j - 1));
            }
            dims.push(ranks[j].saturating_sub(ranks[j - 1]));
            if spanning_ranks[j] != dims[j] {
                failures.push(format!(
                    "V_{j}: spanning set has rank {}, expected {}",
                    spanning_ranks[j], dims[j]
                ));
            }
        }
        if ranks[d] != n {
            failures.push(format!("rank C_{d} = {} ≠ {n}", ranks[d]));
        }
        Ok(SpectrumReport {
            incidence_ranks: ranks,
            dims,
            spanning_ranks,
            vectors_checked: checked,
            failures,
        })
    }

    /// The ⌊d/2⌋-class scheme on one generator class of Q+(2d−1,q).
    pub fn restricted_scheme(&self, class: GeneratorClass) -> Result<RestrictedScheme> {
        if self.descriptor().family() != Family::HyperbolicQuadric {
            return Err(Error::WrongFamily(format!("{} is not a hyperbolic quadric", self.descriptor())));
        }
        RestrictedScheme::new(self, class)
    }
}

/// Relations R′_i = R_{2i} on one class Ω_c, with eigenvalues P′_{j,i} = P_{j,2i}
/// on V′_j = (V_j ⊥ V_{d−j}) ∩ R^{Ω_c}.
#[derive(Clone, Debug)]
pub struct RestrictedScheme {
    class: GeneratorClass,
    members: Vec<usize>,
    /// position of a generator of Ω in the class, if any
    position: Vec<Option<usize>>,
    /// rel[i][a] = positions at restricted distance i from position a
    rel: Vec<Vec<Vec<u32>>>,
    /// p[j][i] = P_{j,2i}
    p: Vec<Vec<BigInt>>,
    /// coefficients c_i of the operator Σ c_i A′_i used for membership
    coefficients: Vec<i64>,
    /// eigenvalues of that operator on V′_0, …, V′_{⌊d/2⌋}
    theta: Vec<BigInt>,
}

impl RestrictedScheme {
    fn new(ctx: &SchemeContext, class: GeneratorClass) -> Result<Self> {
        let labels = ctx.class_labels()?;
        let d = ctx.rank();
        let half = d / 2;
        let members: Vec<usize> = (0..ctx.n).filter(|&g| labels[g] == class).collect();
        let mut position = vec![None; ctx.n];
        for (i, &g) in members.iter().enumerate() {
            position[g] = Some(i);
        }
        let m = members.len();
        let mut rel = vec![vec![Vec::new(); m]; half + 1];
        for (a, &g) in members.iter().enumerate() {
            for (b, &h) in members.iter().enumerate() {
                let dist = ctx.distance(g, h);
                if dist % 2 != 0 {
                    return Err(Error::InvalidSpace("odd distance inside a generator class".into()));
                }
                rel[dist / 2][a].push(b as u32);
            }
        }
        let p: Vec<Vec<BigInt>> = (0..=half)
            .map(|j| (0..=half).map(|i| ctx.eigen.get(j, 2 * i).clone()).collect())
            .collect();
        let (coefficients, theta) = separating_combination(&p)?;
        Ok(RestrictedScheme {
            class,
            members,
            position,
            rel,
            p,
            coefficients,
            theta,
        })
    }

    pub fn class(&self) -> GeneratorClass {
        self.class
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Number of restricted relations minus one, ⌊d/2⌋.
    pub fn classes(&self) -> usize {
        self.rel.len() - 1
    }

    pub fn position(&self, g: usize) -> Option<usize> {
        self.position[g]
    }

    pub fn relation(&self, i: usize, a: usize) -> &[u32] {
        &self.rel[i][a]
    }

    /// P′_{j,i} = P_{j,2i}.
    pub fn eigenvalue(&self, j: usize, i: usize) -> &BigInt {
        &self.p[j][i]
    }

    /// Whether the A′₁ eigenvalues collide and a combination of the A′_i is used.
    pub fn uses_combination(&self) -> bool {
        self.coefficients.iter().skip(2).any(|&c| c != 0) || self.coefficients[1] != 1
    }

    pub fn apply(&self, i: usize, v: &[BigInt]) -> Vec<BigInt> {
        self.rel[i]
            .iter()
            .map(|nb| nb.iter().fold(BigInt::zero(), |acc, &b| acc + &v[b as usize]))
            .collect()
    }

    fn apply_operator(&self, v: &[BigInt]) -> Vec<BigInt> {
        let mut out = vec![BigInt::zero(); v.len()];
        for (i, &c) in self.coefficients.iter().enumerate() {
            if c != 0 {
                for (o, x) in out.iter_mut().zip(self.apply(i, v)) {
                    *o += x * c;
                }
            }
        }
        out
    }

    /// Membership of a vector indexed by the class in ⊕_{j∈S} V′_j.
    pub fn membership(&self, v: &[BigInt], s: &[usize]) -> bool {
        assert_eq!(v.len(), self.members.len());
        let mut w = v.to_vec();
        for j in (0..self.theta.len()).filter(|j| s.contains(j)) {
            let t = &self.theta[j];
            w = self.apply_operator(&w).into_iter().zip(&w).map(|(a, x)| a - t * x).collect();
        }
        w.iter().all(|x| x.is_zero())
    }

    /// Restriction of a generator set to the class.
    pub fn restrict(&self, set: &BitSet) -> Vec<BigInt> {
        self.members.iter().map(|&g| BigInt::from(set.contains(g) as u8)).collect()
    }

    pub fn set_membership(&self, set: &BitSet, s: &[usize]) -> bool {
        self.membership(&self.restrict(set), s)
    }

    /// Incidence of points and the generators of this class, columns in class order.
    pub fn point_incidence(&self, inst: &PolarSpaceInstance) -> IntMatrix {
        IntMatrix::from_index_rows(
            self.members.len(),
            (0..inst.num_points()).map(|p| {
                inst.point_generators(p)
                    .iter()
                    .filter_map(|&g| self.position[g])
                    .collect()
            }),
        )
    }
}

/// Small integer coefficients c with Σ_i c_i P′_{j,i} pairwise distinct in j.
fn separating_combination(p: &[Vec<BigInt>]) -> Result<(Vec<i64>, Vec<BigInt>)> {
    let m = p.len();
    let eval = |c: &[i64]| -> Vec<BigInt> {
        (0..m)
            .map(|j| c.iter().enumerate().map(|(i, &ci)| &p[j][i] * ci).sum())
            .collect()
    };
    let distinct = |t: &[BigInt]| (0..t.len()).all(|a| (0..a).all(|b| t[a] != t[b]));
    if m == 1 {
        return Ok((vec![1], vec![p[0][0].clone()]));
    }
    let mut c = vec![0i64; m];
    c[1] = 1;
    let t = eval(&c);
    if distinct(&t) {
        return Ok((c, t));
    }
    // weights 1, w, w², … on A′_1, A′_2, … for growing w
    for w in 2i64..64 {
        let mut c = vec![0i64; m];
        let mut x = 1;
        for ci in c.iter_mut().skip(1) {
            *ci = x;
            x *= w;
        }
        let t = eval(&c);
        if distinct(&t) {
            return Ok((c, t));
        }
    }
    Err(Error::InvalidSpace("restricted eigenspaces cannot be separated".into()))
}
