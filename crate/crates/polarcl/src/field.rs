//! Finite fields GF(p^n) in the polynomial basis.
//!
//! Elements are stored as their canonical encoding `Σ c_i p^i` in a `u8`, so
//! every field handled here has at most 256 elements. All arithmetic goes
//! through precomputed tables.

use crate::error::{Error, Result};
use std::fmt;
use std::sync::Arc;

/// Element of a [`FieldSpec`], given by its canonical encoding.
pub type Elem = u8;

/// A finite field with its arithmetic tables.
#[derive(Clone)]
pub struct FieldSpec {
    p: u32,
    degree: u32,
    q: usize,
    /// Monic modulus, coefficients from the constant term upwards (length degree+1).
    modulus: Vec<u32>,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    inv: Vec<Elem>,
    conj: Option<Vec<Elem>>,
}

impl fmt::Debug for FieldSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldSpec")
            .field("p", &self.p)
            .field("degree", &self.degree)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldSpec {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.degree == other.degree && self.modulus == other.modulus
    }
}
impl Eq for FieldSpec {}

fn is_prime(n: u32) -> bool {
    n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
}

/// Splits `q` into `(p, n)` with `q = p^n`, if `q` is a prime power.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q % d == 0)?;
    let mut rest = q;
    let mut n = 0;
    while rest % p == 0 {
        rest /= p;
        n += 1;
    }
    (rest == 1 && is_prime(p)).then_some((p, n))
}

// Polynomials over GF(p) as coefficient vectors, constant term first.

fn poly_trim(a: &mut Vec<u32>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u32], m: &[u32], p: u32) -> Vec<u32> {
    // m is monic
    let mut r = a.to_vec();
    poly_trim(&mut r);
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        for (i, &c) in m.iter().enumerate() {
            let t = (lead * c) % p;
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        poly_trim(&mut r);
    }
    r
}

fn decode(mut v: u32, p: u32, n: u32) -> Vec<u32> {
    (0..n)
        .map(|_| {
            let c = v % p;
            v /= p;
            c
        })
        .collect()
}

fn encode(coeffs: &[u32], p: u32) -> u32 {
    coeffs.iter().rev().fold(0, |acc, &c| acc * p + c)
}

/// Monic polynomial of degree `deg` whose lower coefficients have encoding `code`.
fn monic_from_code(code: u32, p: u32, deg: u32) -> Vec<u32> {
    let mut c = decode(code, p, deg);
    c.push(1);
    c
}

/// Irreducibility over GF(p) by trial division against every monic polynomial
/// of degree at most `deg/2`.
pub fn is_irreducible(poly: &[u32], p: u32) -> bool {
    let deg = poly.len() as u32 - 1;
    if deg == 0 {
        return false;
    }
    for dd in 1..=deg / 2 {
        for code in 0..p.pow(dd) {
            let f = monic_from_code(code, p, dd);
            if poly_rem(poly, &f, p).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible polynomial of degree `n` over GF(p), ordered by
/// the encoding of its lower coefficients.
fn least_irreducible(p: u32, n: u32) -> Vec<u32> {
    (0..p.pow(n))
        .map(|code| monic_from_code(code, p, n))
        .find(|f| is_irreducible(f, p))
        .expect("an irreducible polynomial exists in every degree")
}

impl FieldSpec {
    /// Builds GF(q). Supports every prime power q ≤ 256.
    pub fn new(q: u32) -> Result<Self> {
        let (p, n) = prime_power(q).ok_or(Error::UnsupportedField(q))?;
        if q > 256 {
            return Err(Error::UnsupportedField(q));
        }
        let modulus = if n == 1 {
            vec![0, 1]
        } else {
            least_irreducible(p, n)
        };
        Self::with_modulus(p, modulus)
    }

    /// Builds GF(p^n) from an explicit monic modulus of degree n.
    pub fn with_modulus(p: u32, modulus: Vec<u32>) -> Result<Self> {
        let n = modulus.len() as u32 - 1;
        let q = p.pow(n) as usize;
        if !is_prime(p) || q > 256 || modulus.last() != Some(&1) {
            return Err(Error::UnsupportedField(q as u32));
        }
        if !is_irreducible(&modulus, p) {
            return Err(Error::ReducibleModulus);
        }
        let mut add = vec![0; q * q];
        let mut mul = vec![0; q * q];
        let polys: Vec<Vec<u32>> = (0..q as u32).map(|a| decode(a, p, n)).collect();
        for a in 0..q {
            for b in 0..q {
                let s: Vec<u32> = (0..n as usize)
                    .map(|i| (polys[a][i] + polys[b][i]) % p)
                    .collect();
                add[a * q + b] = encode(&s, p) as Elem;
                let mut prod = vec![0; 2 * n as usize];
                for i in 0..n as usize {
                    for j in 0..n as usize {
                        prod[i + j] = (prod[i + j] + polys[a][i] * polys[b][j]) % p;
                    }
                }
                let mut r = poly_rem(&prod, &modulus, p);
                r.resize(n as usize, 0);
                mul[a * q + b] = encode(&r, p) as Elem;
            }
        }
        let mut neg = vec![0; q];
        let mut inv = vec![0; q];
        for a in 0..q {
            neg[a] = (0..q).find(|&b| add[a * q + b] == 0).unwrap() as Elem;
            if a != 0 {
                inv[a] = (0..q).find(|&b| mul[a * q + b] == 1).unwrap() as Elem;
            }
        }
        let mut f = FieldSpec {
            p,
            degree: n,
            q,
            modulus,
            add,
            mul,
            neg,
            inv,
            conj: None,
        };
        if n % 2 == 0 {
            let q0 = p.pow(n / 2);
            let conj = (0..q as u32).map(|a| f.pow(a as Elem, q0 as u64)).collect();
            f.conj = Some(conj);
        }
        Ok(f)
    }

    pub fn shared(q: u32) -> Result<Arc<Self>> {
        Self::new(q).map(Arc::new)
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }
    pub fn degree(&self) -> u32 {
        self.degree
    }
    pub fn order(&self) -> usize {
        self.q
    }
    pub fn modulus(&self) -> &[u32] {
        &self.modulus
    }

    /// Coefficient vector of `a` in the polynomial basis.
    pub fn coefficients(&self, a: Elem) -> Vec<u32> {
        decode(a as u32, self.p, self.degree)
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a as usize * self.q + b as usize]
    }
    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg[b as usize])
    }
    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a as usize * self.q + b as usize]
    }
    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            Err(Error::DivisionByZero)
        } else {
            Ok(self.inv[a as usize])
        }
    }

    /// Inverse of a nonzero element; panics on zero. For internal elimination loops.
    #[inline]
    pub(crate) fn inv_nz(&self, a: Elem) -> Elem {
        debug_assert!(a != 0);
        self.inv[a as usize]
    }

    pub fn pow(&self, a: Elem, mut e: u64) -> Elem {
        let mut base = a;
        let mut acc = 1;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn has_conjugation(&self) -> bool {
        self.conj.is_some()
    }

    /// The involution `a ↦ a^√q`; only defined when the degree is even.
    pub fn conjugate(&self, a: Elem) -> Result<Elem> {
        self.conj
            .as_ref()
            .map(|c| c[a as usize])
            .ok_or(Error::UnsupportedConjugation(self.q as u32))
    }

    /// `conjugate` for fields known to have one, or the identity otherwise.
    #[inline]
    pub(crate) fn conj_or_id(&self, a: Elem) -> Elem {
        match &self.conj {
            Some(c) => c[a as usize],
            None => a,
        }
    }

    /// Square root of the order, for square orders.
    pub fn sqrt_order(&self) -> Option<usize> {
        (self.degree % 2 == 0).then(|| self.p.pow(self.degree / 2) as usize)
    }

    /// First `(b, c)` in encoding order such that `t² + b t + c` has no root.
    pub fn find_irreducible_quadratic(&self) -> (Elem, Elem) {
        let q = self.q as u32;
        for b in 0..q {
            for c in 0..q {
                let (b, c) = (b as Elem, c as Elem);
                let has_root = (0..q).any(|t| {
                    let t = t as Elem;
                    let v = self.add(self.add(self.mul(t, t), self.mul(b, t)), c);
                    v == 0
                });
                if !has_root {
                    return (b, c);
                }
            }
        }
        unreachable!("every finite field has an irreducible quadratic")
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> {
        (0..self.q).map(|a| a as Elem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ORDERS: [u32; 12] = [2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 25, 27];

    #[test]
    fn small_examples() {
        let f2 = FieldSpec::new(2).unwrap();
        assert_eq!(f2.add(1, 1), 0);
        let f4 = FieldSpec::new(4).unwrap();
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        assert_eq!(f4.mul(2, 2), 3);
        let f3 = FieldSpec::new(3).unwrap();
        assert_eq!(f3.inv(2).unwrap(), 2);
        assert!(f3.inv(0).is_err());
    }

    #[test]
    fn moduli_table() {
        let expect: [(u32, &[u32]); 6] = [
            (4, &[1, 1, 1]),
            (8, &[1, 1, 0, 1]),
            (9, &[1, 0, 1]),
            (16, &[1, 1, 0, 0, 1]),
            (25, &[2, 0, 1]),
            (27, &[1, 2, 0, 1]),
        ];
        for (q, m) in expect {
            let f = FieldSpec::new(q).unwrap();
            assert_eq!(f.modulus(), m, "q = {q}");
        }
    }

    #[test]
    fn reducible_modulus_rejected() {
        assert!(matches!(
            FieldSpec::with_modulus(2, vec![1, 0, 1]),
            Err(Error::ReducibleModulus)
        ));
        assert!(FieldSpec::new(6).is_err());
        assert!(FieldSpec::new(1).is_err());
    }

    #[test]
    fn field_axioms_exhaustive() {
        for q in ORDERS.into_iter().filter(|&q| q <= 16) {
            let f = FieldSpec::new(q).unwrap();
            for a in f.elements() {
                assert_eq!(f.add(a, 0), a);
                assert_eq!(f.mul(a, 1), a);
                assert_eq!(f.add(a, f.neg(a)), 0);
                if a != 0 {
                    assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
                }
                for b in f.elements() {
                    assert_eq!(f.add(a, b), f.add(b, a));
                    assert_eq!(f.mul(a, b), f.mul(b, a));
                    for c in f.elements() {
                        assert_eq!(f.add(f.add(a, b), c), f.add(a, f.add(b, c)));
                        assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
                        assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn conjugation_is_involutory_automorphism() {
        for q in [4u32, 9, 16, 25] {
            let f = FieldSpec::new(q).unwrap();
            let q0 = f.sqrt_order().unwrap();
            let fixed = f.elements().filter(|&a| f.conjugate(a).unwrap() == a).count();
            assert_eq!(fixed, q0);
            for a in f.elements() {
                let ca = f.conjugate(a).unwrap();
                assert_eq!(f.conjugate(ca).unwrap(), a);
                for b in f.elements() {
                    let cb = f.conjugate(b).unwrap();
                    assert_eq!(f.conjugate(f.add(a, b)).unwrap(), f.add(ca, cb));
                    assert_eq!(f.conjugate(f.mul(a, b)).unwrap(), f.mul(ca, cb));
                }
            }
        }
        assert!(FieldSpec::new(8).unwrap().conjugate(1).is_err());
    }

    #[test]
    fn conjugation_examples() {
        let f4 = FieldSpec::new(4).unwrap();
        assert_eq!(f4.conjugate(2).unwrap(), f4.mul(2, 2));
        // GF(9) = GF(3)[t]/(t²+1): t ↦ t³ = −t
        let f9 = FieldSpec::new(9).unwrap();
        let t = 3; // encoding of t
        assert_eq!(f9.conjugate(t).unwrap(), f9.neg(t));
    }

    #[test]
    fn irreducible_quadratics() {
        assert_eq!(FieldSpec::new(2).unwrap().find_irreducible_quadratic(), (1, 1));
        assert_eq!(FieldSpec::new(3).unwrap().find_irreducible_quadratic(), (0, 1));
        for q in ORDERS {
            let f = FieldSpec::new(q).unwrap();
            let (b, c) = f.find_irreducible_quadratic();
            for t in f.elements() {
                let v = f.add(f.add(f.mul(t, t), f.mul(b, t)), c);
                assert_ne!(v, 0);
            }
        }
    }
}
