//! Exact linear algebra over Q for integer matrices.
//!
//! Ranks and kernels are computed by elimination modulo several word-sized
//! primes, lifted by CRT and rational reconstruction, and then certified: a
//! kernel is accepted only after M·k = 0 has been checked in exact integer
//! arithmetic. Since rank over Q is at least the rank modulo any prime, a
//! verified kernel of dimension n − r together with a modular rank r pins the
//! rational rank to r.

use crate::bitset::BitSet;
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::sync::OnceLock;

/// Sparse integer matrix with row-major coordinate lists.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    ncols: usize,
    rows: Vec<Vec<(usize, i64)>>,
}

impl IntMatrix {
    pub fn new(ncols: usize) -> Self {
        IntMatrix { ncols, rows: Vec::new() }
    }

    pub fn from_sparse(ncols: usize, rows: Vec<Vec<(usize, i64)>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.retain(|&(_, v)| v != 0);
                r.sort_unstable();
                r
            })
            .collect();
        IntMatrix { ncols, rows }
    }

    pub fn from_dense(ncols: usize, rows: &[Vec<i64>]) -> Self {
        let rows = rows
            .iter()
            .map(|r| {
                assert_eq!(r.len(), ncols);
                r.iter().enumerate().filter(|(_, &v)| v != 0).map(|(c, &v)| (c, v)).collect()
            })
            .collect();
        IntMatrix { ncols, rows }
    }

    /// 0/1 matrix with one row per index set.
    pub fn from_index_rows(ncols: usize, rows: impl IntoIterator<Item = Vec<usize>>) -> Self {
        let rows = rows
            .into_iter()
            .map(|mut r| {
                r.sort_unstable();
                r.dedup();
                r.into_iter().map(|c| (c, 1)).collect()
            })
            .collect();
        IntMatrix { ncols, rows }
    }

    pub fn from_bitsets(ncols: usize, rows: &[BitSet]) -> Self {
        Self::from_index_rows(ncols, rows.iter().map(|b| b.to_vec()))
    }

    pub fn push_row(&mut self, row: Vec<(usize, i64)>) {
        self.rows.push(row);
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn row(&self, i: usize) -> &[(usize, i64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, i64)>] {
        &self.rows
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut t = vec![Vec::new(); self.ncols];
        for (i, r) in self.rows.iter().enumerate() {
            for &(c, v) in r {
                t[c].push((i, v));
            }
        }
        IntMatrix {
            ncols: self.rows.len(),
            rows: t,
        }
    }

    /// M·v with overflow checking.
    pub fn mul_vec(&self, v: &[i128]) -> Option<Vec<i128>> {
        assert_eq!(v.len(), self.ncols);
        self.rows
            .iter()
            .map(|r| {
                r.iter()
                    .try_fold(0i128, |acc, &(c, x)| acc.checked_add((x as i128).checked_mul(v[c])?))
            })
            .collect()
    }

    pub fn mul_vec_big(&self, v: &[BigInt]) -> Vec<BigInt> {
        self.rows
            .iter()
            .map(|r| r.iter().fold(BigInt::zero(), |acc, &(c, x)| acc + &v[c] * x))
            .collect()
    }

    /// Stack another matrix with the same column count below this one.
    pub fn stack(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.ncols, other.ncols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        IntMatrix { ncols: self.ncols, rows }
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut a: u64, mut e: u64, m: u64) -> u64 {
    let mut r = 1 % m;
    a %= m;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, m);
        }
        a = mul_mod(a, a, m);
        e >>= 1;
    }
    r
}

/// Deterministic Miller–Rabin for 64-bit inputs.
pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const BASES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &BASES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &BASES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

const MAX_PRIMES: usize = 256;

/// Primes below 2³¹ in decreasing order; products of two residues fit in u64.
fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let mut v = Vec::with_capacity(MAX_PRIMES);
        let mut n = (1u64 << 31) - 1;
        while v.len() < MAX_PRIMES {
            if is_prime_u64(n) {
                v.push(n);
            }
            n -= 2;
        }
        v
    })
}

struct ModRref {
    pivots: Vec<usize>,
    /// rows[i] has a 1 at pivots[i] and 0 at every other pivot column
    rows: Vec<Vec<u64>>,
}

fn rref_mod(m: &IntMatrix, p: u64) -> ModRref {
    let n = m.ncols;
    let mut basis: Vec<Vec<u64>> = Vec::new();
    let mut pivots: Vec<usize> = Vec::new();
    let pi = p as i64;
    for row in &m.rows {
        if basis.len() == n {
            break;
        }
        let mut r = vec![0u64; n];
        for &(c, v) in row {
            r[c] = v.rem_euclid(pi) as u64;
        }
        for (b, &pc) in basis.iter().zip(&pivots) {
            let c = r[pc];
            if c != 0 {
                let f = p - c;
                for (x, &y) in r.iter_mut().zip(b) {
                    if y != 0 {
                        *x = (*x + f * y) % p;
                    }
                }
            }
        }
        let Some(pc) = r.iter().position(|&x| x != 0) else {
            continue;
        };
        let inv = pow_mod(r[pc], p - 2, p);
        for x in r.iter_mut() {
            *x = *x * inv % p;
        }
        for b in basis.iter_mut() {
            let c = b[pc];
            if c != 0 {
                let f = p - c;
                for (x, &y) in b.iter_mut().zip(&r) {
                    if y != 0 {
                        *x = (*x + f * y) % p;
                    }
                }
            }
        }
        basis.push(r);
        pivots.push(pc);
    }
    let mut order: Vec<usize> = (0..pivots.len()).collect();
    order.sort_by_key(|&i| pivots[i]);
    ModRref {
        pivots: order.iter().map(|&i| pivots[i]).collect(),
        rows: order.into_iter().map(|i| std::mem::take(&mut basis[i])).collect(),
    }
}

/// Rank of M modulo a single prime: a lower bound for the rational rank.
pub fn rank_mod_prime(m: &IntMatrix, p: u64) -> usize {
    rref_mod(m, p).pivots.len()
}

/// Rational reconstruction of a mod m with |num|, den ≤ √(m/2).
pub fn rational_reconstruction(a: &BigInt, m: &BigInt) -> Option<BigRational> {
    let bound = (m / 2u32).sqrt();
    let (mut r0, mut r1) = (m.clone(), a.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(BigRational::new(r1, t1))
}

/// Certified kernel of an integer matrix.
#[derive(Clone, Debug)]
pub struct Kernel {
    ncols: usize,
    rank: usize,
    pivots: Vec<usize>,
    basis: Vec<Vec<BigInt>>,
    small: Option<Vec<Vec<i128>>>,
}

impl Kernel {
    pub fn ncols(&self) -> usize {
        self.ncols
    }

    /// Rank of the matrix over Q.
    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Pivot columns of the rational row echelon form.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// v·k = 0 for every kernel vector, i.e. v lies in the row space.
    pub fn orthogonal_i64(&self, v: &[i64]) -> bool {
        assert_eq!(v.len(), self.ncols);
        if let Some(small) = self.small.as_ref().filter(|_| self.fits(v)) {
            return small
                .iter()
                .all(|k| k.iter().zip(v).map(|(&a, &b)| a * b as i128).sum::<i128>() == 0);
        }
        let big: Vec<BigInt> = v.iter().map(|&x| BigInt::from(x)).collect();
        self.orthogonal(&big)
    }

    fn fits(&self, v: &[i64]) -> bool {
        // |k|·|v|·n stays below 2^126 when both factors are below 2^62/n
        let vmax = v.iter().map(|x| x.unsigned_abs()).max().unwrap_or(0) as u128;
        let kmax = self
            .small
            .as_ref()
            .map(|s| s.iter().flatten().map(|x| x.unsigned_abs()).max().unwrap_or(0))
            .unwrap_or(u128::MAX);
        let n = self.ncols.max(1) as u128;
        kmax.checked_mul(vmax)
            .and_then(|x| x.checked_mul(n))
            .is_some_and(|x| x < (1u128 << 126))
    }

    pub fn orthogonal(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ncols);
        self.basis
            .iter()
            .all(|k| k.iter().zip(v).fold(BigInt::zero(), |acc, (a, b)| acc + a * b).is_zero())
    }

    pub fn orthogonal_rational(&self, v: &[BigRational]) -> bool {
        self.orthogonal(&clear_denominators(v))
    }

    /// Orthogonality of a characteristic vector: the kernel entries over the set sum to zero.
    pub fn orthogonal_set(&self, set: &BitSet) -> bool {
        assert_eq!(set.len(), self.ncols);
        match &self.small {
            Some(small) => small.iter().all(|k| set.iter().map(|i| k[i]).sum::<i128>() == 0),
            None => self
                .basis
                .iter()
                .all(|k| set.iter().fold(BigInt::zero(), |acc, i| acc + &k[i]).is_zero()),
        }
    }
}

/// Integer vector proportional to a rational one.
pub fn clear_denominators(v: &[BigRational]) -> Vec<BigInt> {
    let l = v.iter().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    v.iter().map(|x| x.numer() * (&l / x.denom())).collect()
}

fn verify_kernel(m: &IntMatrix, basis: &[Vec<BigInt>]) -> bool {
    let small: Option<Vec<Vec<i128>>> = basis
        .iter()
        .map(|k| k.iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>())
        .collect();
    match small {
        Some(small) => small.iter().zip(basis).all(|(k, kb)| match m.mul_vec(k) {
            Some(r) => r.iter().all(|&x| x == 0),
            None => m.mul_vec_big(kb).iter().all(|x| x.is_zero()),
        }),
        None => basis.iter().all(|k| m.mul_vec_big(k).iter().all(|x| x.is_zero())),
    }
}

/// Kernel of M over Q with exactly verified basis vectors.
pub fn certified_kernel(m: &IntMatrix) -> Result<Kernel> {
    let n = m.ncols;
    // state: pivots, CRT residues of RREF entries in free columns, modulus
    let mut best: Option<(Vec<usize>, Vec<BigInt>, BigInt)> = None;
    let mut used = 0usize;
    let (mut agree, mut disagree) = (0usize, 0usize);
    for &p in primes() {
        used += 1;
        let rr = rref_mod(m, p);
        let free: Vec<usize> = free_columns(n, &rr.pivots);
        let residues: Vec<BigInt> = rr
            .rows
            .iter()
            .flat_map(|r| free.iter().map(move |&f| BigInt::from(r[f])))
            .collect();
        // an unlucky prime has lower rank or, rarely, a different pivot set;
        // a pivot set outvoted by later primes is dropped
        let replace = match &best {
            None => true,
            Some((piv, _, _)) => {
                if rr.pivots.len() != piv.len() {
                    rr.pivots.len() > piv.len()
                } else if rr.pivots != *piv {
                    disagree += 1;
                    disagree > agree
                } else {
                    false
                }
            }
        };
        if replace {
            best = Some((rr.pivots, residues, BigInt::from(p)));
            agree = 1;
            disagree = 0;
        } else {
            let (piv, acc, modulus) = best.as_mut().unwrap();
            if rr.pivots != *piv {
                continue;
            }
            agree += 1;
            let pb = BigInt::from(p);
            // x ≡ acc (mod M), x ≡ r (mod p): x = acc + M·((r − acc)·M⁻¹ mod p)
            let minv = BigInt::from(pow_mod((&*modulus % p).to_u64().unwrap(), p - 2, p));
            for (a, r) in acc.iter_mut().zip(residues) {
                let t = ((r - &*a) * &minv).mod_floor(&pb);
                *a += &*modulus * t;
            }
            *modulus *= pb;
        }
        let (piv, acc, modulus) = best.as_ref().unwrap();
        if used < 2 {
            continue;
        }
        if let Some(basis) = reconstruct(n, piv, acc, modulus) {
            if verify_kernel(m, &basis) {
                let small = basis
                    .iter()
                    .map(|k| k.iter().map(|x| x.to_i128()).collect::<Option<Vec<_>>>())
                    .collect();
                return Ok(Kernel {
                    ncols: n,
                    rank: piv.len(),
                    pivots: piv.clone(),
                    basis,
                    small,
                });
            }
        }
    }
    Err(Error::InvalidInput(format!(
        "kernel reconstruction did not converge after {MAX_PRIMES} primes"
    )))
}

fn free_columns(n: usize, pivots: &[usize]) -> Vec<usize> {
    let mut is_pivot = vec![false; n];
    for &p in pivots {
        is_pivot[p] = true;
    }
    (0..n).filter(|&c| !is_pivot[c]).collect()
}

fn reconstruct(n: usize, pivots: &[usize], acc: &[BigInt], modulus: &BigInt) -> Option<Vec<Vec<BigInt>>> {
    let free = free_columns(n, pivots);
    let nf = free.len();
    let entries: Vec<BigRational> = acc
        .iter()
        .map(|a| rational_reconstruction(a, modulus))
        .collect::<Option<_>>()?;
    let basis = free
        .iter()
        .enumerate()
        .map(|(fi, &f)| {
            let mut k = vec![BigRational::zero(); n];
            k[f] = BigRational::one();
            for (ri, &pc) in pivots.iter().enumerate() {
                k[pc] = -entries[ri * nf + fi].clone();
            }
            clear_denominators(&k)
        })
        .collect();
    Some(basis)
}

/// Certified rank over Q.
pub fn rank(m: &IntMatrix) -> Result<usize> {
    Ok(certified_kernel(m)?.rank())
}

/// Whether v lies in the row space of M, by orthogonality to the certified kernel.
pub fn row_space_contains(m: &IntMatrix, v: &[BigRational]) -> Result<bool> {
    Ok(certified_kernel(m)?.orthogonal_rational(v))
}

/// Whether v lies in the row space of M, by comparing rank(M) with rank(M; v).
pub fn row_space_contains_by_rank(m: &IntMatrix, v: &[BigRational]) -> Result<bool> {
    let w = clear_denominators(v);
    let row = w
        .iter()
        .enumerate()
        .filter(|(_, x)| !x.is_zero())
        .map(|(c, x)| {
            x.to_i64()
                .map(|x| (c, x))
                .ok_or_else(|| Error::InvalidInput("vector entries exceed 64 bits".into()))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut stacked = m.clone();
    stacked.push_row(row);
    Ok(rank(&stacked)? == rank(m)?)
}

/// Fraction-free (Bareiss) rank of a small dense integer matrix.
pub fn bareiss_rank(rows: &[Vec<BigInt>]) -> usize {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let nrows = a.len();
    if nrows == 0 {
        return 0;
    }
    let ncols = a[0].len();
    let mut prev = BigInt::one();
    let mut r = 0;
    for c in 0..ncols {
        let Some(piv) = (r..nrows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, piv);
        for i in r + 1..nrows {
            for j in c + 1..ncols {
                let v = &a[r][c] * &a[i][j] - &a[i][c] * &a[r][j];
                a[i][j] = v / &prev;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[r][c].clone();
        r += 1;
        if r == nrows {
            break;
        }
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn big_rows(rows: &[Vec<i64>]) -> Vec<Vec<BigInt>> {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn primes_are_prime() {
        assert!(is_prime_u64((1 << 31) - 1));
        assert!(!is_prime_u64(561));
        assert!(!is_prime_u64(3_215_031_751));
        assert_eq!(primes()[0], (1 << 31) - 1);
        assert!(primes().windows(2).all(|w| w[0] > w[1]));
    }

    #[test]
    fn reconstruction_roundtrip() {
        let m = BigInt::from(1_000_000_007u64) * BigInt::from(998_244_353u64);
        let x = BigRational::new(BigInt::from(-355), BigInt::from(113));
        // a ≡ −355·113⁻¹ mod m, computed through the extended gcd
        let e = BigInt::from(113).extended_gcd(&m);
        let a = (BigInt::from(-355) * e.x).mod_floor(&m);
        assert_eq!(rational_reconstruction(&a, &m), Some(x));
    }

    #[test]
    fn kernel_of_small_matrix() {
        let m = IntMatrix::from_dense(4, &[vec![1, 2, 3, 4], vec![2, 4, 6, 8], vec![1, 0, 1, 0]]);
        let k = certified_kernel(&m).unwrap();
        assert_eq!(k.rank(), 2);
        assert_eq!(k.dim(), 2);
        let half = BigRational::new(1.into(), 2.into());
        let v = vec![half.clone(), half.clone() * BigInt::from(2), half.clone() * BigInt::from(3), half * BigInt::from(4)];
        assert!(k.orthogonal_rational(&v));
        assert!(!k.orthogonal_i64(&[0, 0, 0, 1]));
        assert!(k.orthogonal_i64(&[2, 2, 4, 4]));
    }

    #[test]
    fn zero_and_full_rank() {
        let z = IntMatrix::from_dense(3, &[vec![0, 0, 0]]);
        assert_eq!(rank(&z).unwrap(), 0);
        assert_eq!(certified_kernel(&z).unwrap().dim(), 3);
        let id = IntMatrix::from_dense(3, &[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(rank(&id).unwrap(), 3);
    }

    #[test]
    fn rank_depends_on_characteristic_zero() {
        // singular mod 2^31-1 would be a coincidence; this one is singular only mod 3
        let m = IntMatrix::from_dense(2, &[vec![1, 1], vec![1, 4]]);
        assert_eq!(rank(&m).unwrap(), 2);
        assert_eq!(rank_mod_prime(&m, 3), 1);
    }

    #[test]
    fn large_entries() {
        let big = 1i64 << 40;
        let m = IntMatrix::from_dense(3, &[vec![big, 1, 0], vec![0, big, 1]]);
        let k = certified_kernel(&m).unwrap();
        assert_eq!(k.rank(), 2);
        assert_eq!(k.basis()[0], vec![BigInt::one(), BigInt::from(-big), BigInt::from(big) * big]);
    }

    proptest! {
        #[test]
        fn certified_rank_matches_bareiss(rows in prop::collection::vec(prop::collection::vec(-3i64..4, 6), 1..8)) {
            let m = IntMatrix::from_dense(6, &rows);
            let k = certified_kernel(&m).unwrap();
            prop_assert_eq!(k.rank(), bareiss_rank(&big_rows(&rows)));
            prop_assert_eq!(k.rank() + k.dim(), 6);
            for r in &rows {
                prop_assert!(k.orthogonal_i64(r));
            }
        }

        #[test]
        fn membership_routes_agree(rows in prop::collection::vec(prop::collection::vec(0i64..2, 5), 1..5),
                                   v in prop::collection::vec(-2i64..3, 5)) {
            let m = IntMatrix::from_dense(5, &rows);
            let vr: Vec<BigRational> = v.iter().map(|&x| BigRational::from_integer(x.into())).collect();
            prop_assert_eq!(row_space_contains(&m, &vr).unwrap(), row_space_contains_by_rank(&m, &vr).unwrap());
        }
    }
}
