//! Projective subspaces over GF(q), the standard forms of the classical polar
//! spaces, isotropy, perp and hyperplane sections.

use crate::combinatorics;
use crate::error::{Error, Result};
use crate::field::{Elem, FieldSpec};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::sync::Arc;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    HyperbolicQuadric,
    ParabolicQuadric,
    EllipticQuadric,
    HermitianOdd,
    HermitianEven,
    Symplectic,
}

impl Family {
    pub const ALL: [Family; 6] = [
        Family::HyperbolicQuadric,
        Family::ParabolicQuadric,
        Family::EllipticQuadric,
        Family::HermitianOdd,
        Family::HermitianEven,
        Family::Symplectic,
    ];

    /// The parameter e, doubled so that it is an integer.
    pub fn twice_e(self) -> u32 {
        match self {
            Family::HyperbolicQuadric => 0,
            Family::HermitianOdd => 1,
            Family::Symplectic | Family::ParabolicQuadric => 2,
            Family::HermitianEven => 3,
            Family::EllipticQuadric => 4,
        }
    }

    /// Projective dimension of the ambient space for rank `d`.
    pub fn ambient_dim(self, d: usize) -> usize {
        match self {
            Family::HyperbolicQuadric | Family::Symplectic | Family::HermitianOdd => 2 * d - 1,
            Family::ParabolicQuadric | Family::HermitianEven => 2 * d,
            Family::EllipticQuadric => 2 * d + 1,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Family::HyperbolicQuadric => "Q+",
            Family::ParabolicQuadric => "Q",
            Family::EllipticQuadric => "Q-",
            Family::HermitianOdd | Family::HermitianEven => "H",
            Family::Symplectic => "W",
        }
    }

    pub fn is_hermitian(self) -> bool {
        matches!(self, Family::HermitianOdd | Family::HermitianEven)
    }

    pub fn is_quadric(self) -> bool {
        matches!(
            self,
            Family::HyperbolicQuadric | Family::ParabolicQuadric | Family::EllipticQuadric
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FormKind {
    Quadratic,
    Sesquilinear,
    Alternating,
}

/// The standard form of a polar space together with its pairing.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormMatrix {
    pub kind: FormKind,
    pub size: usize,
    /// Upper-triangular coefficient matrix for quadratic kinds; the pairing
    /// matrix otherwise. Row-major.
    pub matrix: Vec<Elem>,
    /// Matrix of the (polarized) pairing f(v,w) = v^t M σ(w).
    pub pairing: Vec<Elem>,
    pairing_terms: Vec<(usize, usize, Elem)>,
    hermitian: bool,
}

impl FormMatrix {
    fn build(kind: FormKind, size: usize, matrix: Vec<Elem>, pairing: Vec<Elem>, hermitian: bool) -> Self {
        let pairing_terms = (0..size * size)
            .filter(|&k| pairing[k] != 0)
            .map(|k| (k / size, k % size, pairing[k]))
            .collect();
        FormMatrix {
            kind,
            size,
            matrix,
            pairing,
            pairing_terms,
            hermitian,
        }
    }

    fn standard(family: Family, d: usize, field: &FieldSpec) -> Self {
        let n1 = family.ambient_dim(d) + 1;
        let mut m = vec![0; n1 * n1];
        let set = |m: &mut Vec<Elem>, i: usize, j: usize, v: Elem| m[i * n1 + j] = v;
        match family {
            Family::HyperbolicQuadric | Family::ParabolicQuadric | Family::EllipticQuadric => {
                let offset = usize::from(family == Family::ParabolicQuadric);
                if offset == 1 {
                    set(&mut m, 0, 0, 1);
                }
                for k in 0..d {
                    set(&mut m, offset + 2 * k, offset + 2 * k + 1, 1);
                }
                if family == Family::EllipticQuadric {
                    // X_0X_1 + ... + X_{2d-2}X_{2d-1} + g(X_{2d}, X_{2d+1})
                    let (b, c) = field.find_irreducible_quadratic();
                    set(&mut m, 2 * d, 2 * d, 1);
                    set(&mut m, 2 * d, 2 * d + 1, b);
                    set(&mut m, 2 * d + 1, 2 * d + 1, c);
                }
                let mut pairing = vec![0; n1 * n1];
                for i in 0..n1 {
                    for j in 0..n1 {
                        pairing[i * n1 + j] = field.add(m[i * n1 + j], m[j * n1 + i]);
                    }
                }
                FormMatrix::build(FormKind::Quadratic, n1, m, pairing, false)
            }
            Family::HermitianOdd | Family::HermitianEven => {
                for i in 0..n1 {
                    set(&mut m, i, i, 1);
                }
                FormMatrix::build(FormKind::Sesquilinear, n1, m.clone(), m, true)
            }
            Family::Symplectic => {
                let minus_one = field.neg(1);
                for i in 0..d {
                    set(&mut m, i, d + i, 1);
                    set(&mut m, d + i, i, minus_one);
                }
                FormMatrix::build(FormKind::Alternating, n1, m.clone(), m, false)
            }
        }
    }

    /// f(v, w) = Σ v_i M_ij σ(w_j), with σ the conjugation for Hermitian forms.
    pub fn pair(&self, field: &FieldSpec, v: &[Elem], w: &[Elem]) -> Elem {
        let mut acc = 0;
        for &(i, j, c) in &self.pairing_terms {
            if v[i] == 0 || w[j] == 0 {
                continue;
            }
            let wj = if self.hermitian { field.conj_or_id(w[j]) } else { w[j] };
            acc = field.add(acc, field.mul(field.mul(v[i], c), wj));
        }
        acc
    }

    /// The linear functional v ↦ f(v, w) as a coefficient vector.
    pub fn functional(&self, field: &FieldSpec, w: &[Elem]) -> Vec<Elem> {
        let mut u = vec![0; self.size];
        for &(i, j, c) in &self.pairing_terms {
            if w[j] == 0 {
                continue;
            }
            let wj = if self.hermitian { field.conj_or_id(w[j]) } else { w[j] };
            u[i] = field.add(u[i], field.mul(c, wj));
        }
        u
    }

    pub fn evaluate(&self, field: &FieldSpec, v: &[Elem]) -> Elem {
        match self.kind {
            FormKind::Quadratic => {
                let n = self.size;
                let mut acc = 0;
                for i in 0..n {
                    if v[i] == 0 {
                        continue;
                    }
                    for j in i..n {
                        let c = self.matrix[i * n + j];
                        if c != 0 && v[j] != 0 {
                            acc = field.add(acc, field.mul(c, field.mul(v[i], v[j])));
                        }
                    }
                }
                acc
            }
            FormKind::Sesquilinear => self.pair(field, v, v),
            FormKind::Alternating => 0,
        }
    }
}

/// A classical polar space: family, rank and field, with its standard form.
#[derive(Clone, Debug)]
pub struct PolarSpaceDescriptor {
    family: Family,
    rank: usize,
    field: Arc<FieldSpec>,
    form: FormMatrix,
}

impl PartialEq for PolarSpaceDescriptor {
    fn eq(&self, other: &Self) -> bool {
        self.family == other.family && self.rank == other.rank && self.field == other.field
    }
}
impl Eq for PolarSpaceDescriptor {}

impl PolarSpaceDescriptor {
    pub fn new(family: Family, rank: usize, q: u32) -> Result<Self> {
        Self::with_field(family, rank, FieldSpec::shared(q)?)
    }

    pub fn with_field(family: Family, rank: usize, field: Arc<FieldSpec>) -> Result<Self> {
        if rank < 2 {
            return Err(Error::InvalidSpace(format!("rank must be at least 2, got {rank}")));
        }
        if family.is_hermitian() && field.sqrt_order().is_none() {
            return Err(Error::InvalidSpace(format!(
                "Hermitian spaces need a square field order, got {}",
                field.order()
            )));
        }
        let form = FormMatrix::standard(family, rank, &field);
        Ok(PolarSpaceDescriptor {
            family,
            rank,
            field,
            form,
        })
    }

    /// Parses `Q+(5,2)`, `Q(6,2)`, `Q-(5,2)`, `W(3,2)`, `H(3,4)`, `H(4,4)`.
    pub fn parse_symbol(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("cannot parse polar space symbol '{s}'"));
        let s = s.trim();
        let open = s.find('(').ok_or_else(bad)?;
        let inner = s[open + 1..].strip_suffix(')').ok_or_else(bad)?;
        let mut parts = inner.split(',').map(|t| t.trim().parse::<usize>());
        let n = parts.next().and_then(|r| r.ok()).ok_or_else(bad)?;
        let q = parts.next().and_then(|r| r.ok()).ok_or_else(bad)?;
        if parts.next().is_some() {
            return Err(bad());
        }
        Self::from_ambient(&s[..open], n, q as u32)
    }

    /// Builds a space from its family symbol and ambient projective dimension.
    pub fn from_ambient(symbol: &str, n: usize, q: u32) -> Result<Self> {
        let bad = || Error::InvalidSpace(format!("{symbol}({n},{q}) is not a polar space of rank at least 2"));
        let (family, rank) = match symbol {
            "Q+" if n % 2 == 1 => (Family::HyperbolicQuadric, (n + 1) / 2),
            "Q" if n % 2 == 0 => (Family::ParabolicQuadric, n / 2),
            "Q-" if n % 2 == 1 && n >= 3 => (Family::EllipticQuadric, (n - 1) / 2),
            "W" if n % 2 == 1 => (Family::Symplectic, (n + 1) / 2),
            "H" if n % 2 == 1 => (Family::HermitianOdd, (n + 1) / 2),
            "H" => (Family::HermitianEven, n / 2),
            _ => return Err(bad()),
        };
        Self::new(family, rank, q)
    }

    /// Builds a space from the CLI triple. `dim` selects the Hermitian variant
    /// and defaults to the odd-dimensional one.
    pub fn from_cli(symbol: &str, rank: usize, q: u32, dim: Option<usize>) -> Result<Self> {
        let family = match symbol {
            "Q+" => Family::HyperbolicQuadric,
            "Q" => Family::ParabolicQuadric,
            "Q-" => Family::EllipticQuadric,
            "W" => Family::Symplectic,
            "H" => match dim {
                None => Family::HermitianOdd,
                Some(n) if n == 2 * rank - 1 => Family::HermitianOdd,
                Some(n) if n == 2 * rank => Family::HermitianEven,
                Some(n) => {
                    return Err(Error::InvalidSpace(format!(
                        "H of rank {rank} lives in dimension {} or {}, not {n}",
                        2 * rank - 1,
                        2 * rank
                    )))
                }
            },
            other => return Err(Error::InvalidInput(format!("unknown family '{other}'"))),
        };
        let d = Self::new(family, rank, q)?;
        if let Some(n) = dim {
            if n != d.ambient_dim() {
                return Err(Error::InvalidSpace(format!(
                    "{} has ambient dimension {}, not {n}",
                    d,
                    d.ambient_dim()
                )));
            }
        }
        Ok(d)
    }

    pub fn family(&self) -> Family {
        self.family
    }
    pub fn rank(&self) -> usize {
        self.rank
    }
    pub fn field(&self) -> &Arc<FieldSpec> {
        &self.field
    }
    pub fn q(&self) -> u64 {
        self.field.order() as u64
    }
    pub fn twice_e(&self) -> u32 {
        self.family.twice_e()
    }
    pub fn ambient_dim(&self) -> usize {
        self.family.ambient_dim(self.rank)
    }
    /// Length of coordinate vectors.
    pub fn vector_len(&self) -> usize {
        self.ambient_dim() + 1
    }
    pub fn form(&self) -> &FormMatrix {
        &self.form
    }

    /// The parameter e as a string, e.g. "3/2".
    pub fn e_string(&self) -> String {
        let t = self.twice_e();
        if t % 2 == 0 {
            (t / 2).to_string()
        } else {
            format!("{t}/2")
        }
    }

    pub fn evaluate_form(&self, v: &[Elem]) -> Result<Elem> {
        self.check_len(v.len())?;
        Ok(self.form.evaluate(&self.field, v))
    }

    pub fn pair(&self, v: &[Elem], w: &[Elem]) -> Elem {
        self.form.pair(&self.field, v, w)
    }

    pub fn is_isotropic_vector(&self, v: &[Elem]) -> bool {
        self.form.evaluate(&self.field, v) == 0
    }

    fn check_len(&self, got: usize) -> Result<()> {
        if got != self.vector_len() {
            return Err(Error::DimensionMismatch {
                expected: self.vector_len(),
                got,
            });
        }
        Ok(())
    }

    /// All basis vectors are singular and pairwise orthogonal.
    pub fn is_totally_isotropic(&self, s: &Subspace) -> bool {
        let rows: Vec<&[Elem]> = s.rows().collect();
        rows.iter().all(|r| self.is_isotropic_vector(r))
            && (0..rows.len()).all(|i| (i + 1..rows.len()).all(|j| self.pair(rows[i], rows[j]) == 0))
    }

    /// {v : f(v, w) = 0 for all w in s}.
    pub fn perp(&self, s: &Subspace) -> Subspace {
        let functionals: Vec<Vec<Elem>> = s.rows().map(|w| self.form.functional(&self.field, w)).collect();
        null_space(&self.field, &functionals, self.vector_len())
    }

    /// Classifies the section of the polar space by the hyperplane `a·x = 0`
    /// by counting its isotropic points.
    pub fn classify_hyperplane_section(&self, normal: &[Elem]) -> Result<HyperplaneSection> {
        self.check_len(normal.len())?;
        if normal.iter().all(|&c| c == 0) {
            return Err(Error::DegenerateHyperplane);
        }
        let count = self.hyperplane_point_count(normal);
        self.section_from_count(count)
    }

    /// Section type of a hyperplane meeting the polar space in `count` points.
    pub(crate) fn section_from_count(&self, count: u64) -> Result<HyperplaneSection> {
        let q = self.q();
        let d = self.rank;
        let pc = |f: Family, r: usize| combinatorics::point_count_raw(r, f.twice_e(), q);
        let cone = |f: Family, r: usize| -> u64 { 1 + q * pc(f, r) };
        let candidates: Vec<(u64, HyperplaneSection)> = match self.family {
            Family::ParabolicQuadric => vec![
                (pc(Family::HyperbolicQuadric, d), HyperplaneSection::Hyperbolic),
                (pc(Family::EllipticQuadric, d - 1), HyperplaneSection::Elliptic),
                (cone(Family::ParabolicQuadric, d - 1), HyperplaneSection::Tangent),
            ],
            Family::EllipticQuadric => vec![
                (pc(Family::ParabolicQuadric, d), HyperplaneSection::Parabolic),
                (cone(Family::EllipticQuadric, d - 1), HyperplaneSection::Tangent),
            ],
            Family::HyperbolicQuadric => vec![
                (pc(Family::ParabolicQuadric, d - 1), HyperplaneSection::Parabolic),
                (cone(Family::HyperbolicQuadric, d - 1), HyperplaneSection::Tangent),
            ],
            Family::HermitianEven => vec![
                (pc(Family::HermitianOdd, d), HyperplaneSection::HermitianNondegenerate),
                (cone(Family::HermitianEven, d - 1), HyperplaneSection::Tangent),
            ],
            Family::HermitianOdd => vec![
                (pc(Family::HermitianEven, d - 1), HyperplaneSection::HermitianNondegenerate),
                (cone(Family::HermitianOdd, d - 1), HyperplaneSection::Tangent),
            ],
            Family::Symplectic => vec![(
                (q.pow(2 * d as u32 - 1) - 1) / (q - 1),
                HyperplaneSection::Tangent,
            )],
        };
        candidates
            .into_iter()
            .find(|&(c, _)| c == count)
            .map(|(_, s)| s)
            .ok_or(Error::DegenerateHyperplane)
    }

    fn hyperplane_point_count(&self, normal: &[Elem]) -> u64 {
        let f = &self.field;
        projective_points(f, self.vector_len())
            .filter(|v| dot(f, normal, v) == 0 && self.is_isotropic_vector(v))
            .count() as u64
    }
}

impl fmt::Display for PolarSpaceDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}({},{})", self.family.symbol(), self.ambient_dim(), self.q())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HyperplaneSection {
    Tangent,
    Hyperbolic,
    Elliptic,
    Parabolic,
    HermitianNondegenerate,
}

/// Standard dot product.
pub fn dot(f: &FieldSpec, a: &[Elem], b: &[Elem]) -> Elem {
    a.iter()
        .zip(b)
        .filter(|(&x, &y)| x != 0 && y != 0)
        .fold(0, |acc, (&x, &y)| f.add(acc, f.mul(x, y)))
}

/// Scales `v` so that its first nonzero entry is 1. Returns false for the zero vector.
pub fn normalize(f: &FieldSpec, v: &mut [Elem]) -> bool {
    match v.iter().position(|&c| c != 0) {
        None => false,
        Some(k) => {
            let s = f.inv_nz(v[k]);
            for c in v.iter_mut() {
                *c = f.mul(*c, s);
            }
            true
        }
    }
}

/// All normalized nonzero vectors of length `len`, in lexicographic order.
pub fn projective_points(f: &FieldSpec, len: usize) -> impl Iterator<Item = Vec<Elem>> + '_ {
    let q = f.order();
    // leading 1 at position `lead`, free coordinates after it
    (0..len).rev().flat_map(move |lead| {
        let free = len - lead - 1;
        let total = q.pow(free as u32);
        (0..total).map(move |mut code| {
            let mut v = vec![0; len];
            v[lead] = 1;
            for k in (lead + 1..len).rev() {
                v[k] = (code % q) as Elem;
                code /= q;
            }
            v
        })
    })
}

/// Reduces `m` to reduced row echelon form in place, dropping zero rows.
/// Returns the pivot columns.
pub fn rref(f: &FieldSpec, m: &mut Vec<Vec<Elem>>, cols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| m[i][c] != 0) else {
            continue;
        };
        m.swap(r, p);
        let s = f.inv_nz(m[r][c]);
        if s != 1 {
            for x in m[r].iter_mut() {
                *x = f.mul(*x, s);
            }
        }
        for i in 0..m.len() {
            if i != r && m[i][c] != 0 {
                let t = m[i][c];
                for k in c..cols {
                    if m[r][k] != 0 {
                        let v = f.mul(t, m[r][k]);
                        m[i][k] = f.sub(m[i][k], v);
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    m.truncate(r);
    pivots
}

/// Reduced echelon basis of {v : r·v = 0 for every row r}.
pub fn null_space(f: &FieldSpec, rows: &[Vec<Elem>], cols: usize) -> Subspace {
    let mut m = rows.to_vec();
    let pivots = rref(f, &mut m, cols);
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis: Vec<Vec<Elem>> = free
        .iter()
        .map(|&fc| {
            let mut v = vec![0; cols];
            v[fc] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                v[pc] = f.neg(m[i][fc]);
            }
            v
        })
        .collect();
    Subspace::from_rows(f, &basis, cols)
}

/// A projective subspace stored as a reduced row echelon basis.
///
/// The representation is canonical, so equality of subspaces is equality of
/// the stored matrices. The derived order compares row count first, then the
/// matrix entries lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subspace {
    nrows: usize,
    cols: usize,
    data: Vec<Elem>,
}

impl Subspace {
    pub fn empty(cols: usize) -> Self {
        Subspace {
            nrows: 0,
            cols,
            data: Vec::new(),
        }
    }

    pub fn whole(cols: usize) -> Self {
        let mut data = vec![0; cols * cols];
        for i in 0..cols {
            data[i * cols + i] = 1;
        }
        Subspace {
            nrows: cols,
            cols,
            data,
        }
    }

    pub fn from_rows(f: &FieldSpec, rows: &[Vec<Elem>], cols: usize) -> Self {
        let mut m = rows.to_vec();
        rref(f, &mut m, cols);
        Subspace {
            nrows: m.len(),
            cols,
            data: m.concat(),
        }
    }

    /// The point spanned by a nonzero vector.
    pub fn point(f: &FieldSpec, v: &[Elem]) -> Self {
        let mut w = v.to_vec();
        assert!(normalize(f, &mut w), "zero vector does not span a point");
        Subspace {
            nrows: 1,
            cols: w.len(),
            data: w,
        }
    }

    /// Number of basis rows (vector space dimension).
    pub fn rank(&self) -> usize {
        self.nrows
    }
    /// Projective dimension; −1 for the empty subspace.
    pub fn dim(&self) -> isize {
        self.nrows as isize - 1
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn data(&self) -> &[Elem] {
        &self.data
    }
    pub fn row(&self, i: usize) -> &[Elem] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    pub fn rows(&self) -> impl Iterator<Item = &[Elem]> {
        self.data.chunks(self.cols.max(1)).take(self.nrows)
    }
    pub fn to_rows(&self) -> Vec<Vec<Elem>> {
        self.rows().map(|r| r.to_vec()).collect()
    }
    pub fn pivots(&self) -> Vec<usize> {
        self.rows()
            .map(|r| r.iter().position(|&c| c != 0).unwrap())
            .collect()
    }

    /// Reduces `v` against the basis and reports whether it vanishes.
    pub fn contains_vector(&self, f: &FieldSpec, v: &[Elem]) -> bool {
        let mut w = v.to_vec();
        for r in self.rows() {
            let p = r.iter().position(|&c| c != 0).unwrap();
            if w[p] != 0 {
                let t = w[p];
                for (k, &rk) in r.iter().enumerate().skip(p) {
                    if rk != 0 {
                        w[k] = f.sub(w[k], f.mul(t, rk));
                    }
                }
            }
        }
        w.iter().all(|&c| c == 0)
    }

    pub fn contains(&self, f: &FieldSpec, other: &Subspace) -> bool {
        other.nrows <= self.nrows && other.rows().all(|r| self.contains_vector(f, r))
    }

    pub fn join(&self, f: &FieldSpec, other: &Subspace) -> Subspace {
        let mut rows = self.to_rows();
        rows.extend(other.to_rows());
        Subspace::from_rows(f, &rows, self.cols)
    }

    /// Annihilator under the standard dot product.
    pub fn annihilator(&self, f: &FieldSpec) -> Subspace {
        null_space(f, &self.to_rows(), self.cols)
    }

    pub fn meet(&self, f: &FieldSpec, other: &Subspace) -> Subspace {
        self.annihilator(f).join(f, &other.annihilator(f)).annihilator(f)
    }

    /// Projective dimension of the intersection, computed from ranks.
    pub fn meet_dim(&self, f: &FieldSpec, other: &Subspace) -> isize {
        let mut rows = self.to_rows();
        rows.extend(other.to_rows());
        let r = rref(f, &mut rows, self.cols).len();
        (self.nrows + other.nrows) as isize - r as isize - 1
    }

    /// All points of the subspace as normalized vectors.
    pub fn point_vectors(&self, f: &FieldSpec) -> Vec<Vec<Elem>> {
        let q = f.order();
        let r = self.nrows;
        let mut out = Vec::new();
        for coeffs in projective_points(f, r) {
            let mut v = vec![0; self.cols];
            for (i, &c) in coeffs.iter().enumerate() {
                if c == 0 {
                    continue;
                }
                for (k, &x) in self.row(i).iter().enumerate() {
                    if x != 0 {
                        v[k] = f.add(v[k], f.mul(c, x));
                    }
                }
            }
            normalize(f, &mut v);
            out.push(v);
        }
        debug_assert_eq!(out.len(), (q.pow(r as u32) - 1) / (q - 1));
        out
    }

    /// Semicolon-separated rows of comma-separated encodings.
    pub fn serialize(&self) -> String {
        self.rows()
            .map(|r| r.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(","))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parses the serialization and insists on canonical (reduced echelon) input.
    pub fn parse(f: &FieldSpec, text: &str, cols: usize) -> Result<Self> {
        let mut rows = Vec::new();
        for row in text.trim().split(';') {
            let vals: std::result::Result<Vec<usize>, _> = row.split(',').map(|t| t.trim().parse()).collect();
            let vals = vals.map_err(|_| Error::InvalidInput(format!("bad subspace row '{row}'")))?;
            if vals.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    got: vals.len(),
                });
            }
            if vals.iter().any(|&v| v >= f.order()) {
                return Err(Error::InvalidInput(format!("entry out of field range in '{row}'")));
            }
            rows.push(vals.into_iter().map(|v| v as Elem).collect::<Vec<Elem>>());
        }
        let s = Subspace::from_rows(f, &rows, cols);
        if s.to_rows() != rows {
            return Err(Error::InvalidInput(format!(
                "subspace '{}' is not in reduced echelon form; normalized form is '{}'",
                text.trim(),
                s.serialize()
            )));
        }
        Ok(s)
    }
}
