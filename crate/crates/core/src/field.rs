//! Prime fields `F_p` (odd `p < 2^63`) and explicit extensions `F_p[X]/(m(X))`.
//!
//! Field contexts are small immutable values passed by reference; elements
//! carry no pointer back to their field.

use std::fmt;

use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::FieldError;

/// Arithmetic in a finite field of odd characteristic.
pub trait Field: Clone + fmt::Debug + Send + Sync {
    type Elem: Clone + PartialEq + Eq + fmt::Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn from_u64(&self, v: u64) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn inv(&self, a: &Self::Elem) -> Result<Self::Elem, FieldError>;
    fn characteristic(&self) -> u64;
    /// Number of elements of the field.
    fn size(&self) -> BigUint;
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Self::Elem;

    fn from_i64(&self, v: i64) -> Self::Elem {
        let p = self.characteristic() as i128;
        let r = (v as i128).rem_euclid(p) as u64;
        self.from_u64(r)
    }

    fn is_zero(&self, a: &Self::Elem) -> bool {
        *a == self.zero()
    }

    fn div(&self, a: &Self::Elem, b: &Self::Elem) -> Result<Self::Elem, FieldError> {
        Ok(self.mul(a, &self.inv(b)?))
    }

    fn square(&self, a: &Self::Elem) -> Self::Elem {
        self.mul(a, a)
    }

    fn pow_u64(&self, a: &Self::Elem, mut e: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.square(&base);
            e >>= 1;
        }
        acc
    }

    fn pow(&self, a: &Self::Elem, e: &BigUint) -> Self::Elem {
        let mut acc = self.one();
        for i in (0..e.bits()).rev() {
            acc = self.square(&acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// Euler criterion; zero counts as a square.
    fn is_square(&self, a: &Self::Elem) -> bool {
        if self.is_zero(a) {
            return true;
        }
        let e = (self.size() - 1u32) >> 1;
        self.pow(a, &e) == self.one()
    }

    /// A square root of `a`, if one exists (Tonelli-Shanks).
    fn sqrt(&self, a: &Self::Elem) -> Option<Self::Elem> {
        if self.is_zero(a) {
            return Some(self.zero());
        }
        if !self.is_square(a) {
            return None;
        }
        let q_minus_1 = self.size() - 1u32;
        let s = q_minus_1.trailing_zeros().unwrap_or(0);
        let m = &q_minus_1 >> s;
        // deterministic non-residue
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let z = loop {
            let c = self.random(&mut rng);
            if !self.is_square(&c) {
                break c;
            }
        };
        let mut c = self.pow(&z, &m);
        let mut x = self.pow(a, &((&m + 1u32) >> 1));
        let mut t = self.pow(a, &m);
        let mut r = s;
        let one = self.one();
        while t != one {
            let mut i = 0u64;
            let mut t2 = t.clone();
            while t2 != one {
                t2 = self.square(&t2);
                i += 1;
            }
            let mut b = c.clone();
            for _ in 0..(r - i - 1) {
                b = self.square(&b);
            }
            x = self.mul(&x, &b);
            c = self.square(&b);
            t = self.mul(&t, &c);
            r = i;
        }
        Some(x)
    }

    fn half(&self) -> Self::Elem {
        self.inv(&self.from_u64(2)).expect("odd characteristic")
    }
}

/// The prime field `Z/pZ` for an odd prime `p < 2^63`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Fp {
    p: u64,
}

impl Fp {
    /// Fails unless `p` is an odd prime below `2^63`.
    pub fn new(p: u64) -> Result<Self, FieldError> {
        if p < 3 || p.is_multiple_of(2) || p >= 1 << 63 || !is_prime(p) {
            return Err(FieldError::BadModulus(p));
        }
        Ok(Fp { p })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: u64) -> u64 {
        v % self.p
    }

    /// Representative in `(-p/2, p/2]`.
    pub fn centered(&self, a: u64) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    /// 2-adic valuation of `p - 1`.
    pub fn two_adicity(&self) -> u32 {
        (self.p - 1).trailing_zeros()
    }

    /// A generator of the multiplicative group.
    pub fn primitive_root(&self) -> u64 {
        let factors = factor_u64(self.p - 1);
        (2..self.p)
            .find(|&g| {
                factors
                    .iter()
                    .all(|&(q, _)| self.pow_u64(&g, (self.p - 1) / q) != 1)
            })
            .expect("cyclic group has a generator")
    }

    /// A primitive `n`-th root of unity, if `n | p - 1`.
    pub fn root_of_unity(&self, n: u64) -> Option<u64> {
        if n == 0 || !(self.p - 1).is_multiple_of(n) {
            return None;
        }
        let g = self.primitive_root();
        Some(self.pow_u64(&g, (self.p - 1) / n))
    }
}

impl Field for Fp {
    type Elem = u64;

    #[inline]
    fn zero(&self) -> u64 {
        0
    }
    #[inline]
    fn one(&self) -> u64 {
        1
    }
    #[inline]
    fn from_u64(&self, v: u64) -> u64 {
        v % self.p
    }
    #[inline]
    fn add(&self, a: &u64, b: &u64) -> u64 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }
    #[inline]
    fn sub(&self, a: &u64, b: &u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }
    #[inline]
    fn neg(&self, a: &u64) -> u64 {
        if *a == 0 {
            0
        } else {
            self.p - a
        }
    }
    #[inline]
    fn mul(&self, a: &u64, b: &u64) -> u64 {
        ((*a as u128 * *b as u128) % self.p as u128) as u64
    }
    fn inv(&self, a: &u64) -> Result<u64, FieldError> {
        if *a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        let (mut r0, mut r1) = (self.p as i128, *a as i128);
        let (mut s0, mut s1) = (0i128, 1i128);
        while r1 != 0 {
            let q = r0 / r1;
            (r0, r1) = (r1, r0 - q * r1);
            (s0, s1) = (s1, s0 - q * s1);
        }
        debug_assert_eq!(r0, 1);
        Ok(s0.rem_euclid(self.p as i128) as u64)
    }
    fn characteristic(&self) -> u64 {
        self.p
    }
    fn size(&self) -> BigUint {
        BigUint::from(self.p)
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.gen_range(0..self.p)
    }
    fn is_square(&self, a: &u64) -> bool {
        *a == 0 || self.pow_u64(a, (self.p - 1) / 2) == 1
    }
    fn sqrt(&self, a: &u64) -> Option<u64> {
        if *a == 0 {
            return Some(0);
        }
        if !self.is_square(a) {
            return None;
        }
        if self.p % 4 == 3 {
            return Some(self.pow_u64(a, (self.p + 1) / 4));
        }
        let s = (self.p - 1).trailing_zeros();
        let m = (self.p - 1) >> s;
        let z = (2..self.p).find(|z| !self.is_square(z)).unwrap();
        let mut c = self.pow_u64(&z, m);
        let mut x = self.pow_u64(a, m.div_ceil(2));
        let mut t = self.pow_u64(a, m);
        let mut r = s;
        while t != 1 {
            let mut i = 0;
            let mut t2 = t;
            while t2 != 1 {
                t2 = self.mul(&t2, &t2);
                i += 1;
            }
            let mut b = c;
            for _ in 0..(r - i - 1) {
                b = self.mul(&b, &b);
            }
            x = self.mul(&x, &b);
            c = self.mul(&b, &b);
            t = self.mul(&t, &c);
            r = i;
        }
        Some(x)
    }
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for small in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(small) {
            return n == small;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let powmod = |mut a: u64, mut e: u64| {
        let mut r = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                r = mulmod(r, a);
            }
            a = mulmod(a, a);
            e >>= 1;
        }
        r
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Trial-division factorisation, `(prime, exponent)` pairs in increasing order.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut q = 2u64;
    while q.saturating_mul(q) <= n {
        if n.is_multiple_of(q) {
            let mut e = 0;
            while n.is_multiple_of(q) {
                n /= q;
                e += 1;
            }
            out.push((q, e));
        }
        q += if q == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Dense univariate polynomials over `F_p`, little-endian coefficient vectors.
pub mod poly {
    use super::{Field, Fp};

    pub fn trim(a: &mut Vec<u64>) {
        while a.last() == Some(&0) {
            a.pop();
        }
    }

    pub fn degree(a: &[u64]) -> Option<usize> {
        a.iter().rposition(|&c| c != 0)
    }

    pub fn add(fp: &Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| fp.add(a.get(i).unwrap_or(&0), b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub fn sub(fp: &Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
        let n = a.len().max(b.len());
        let mut out: Vec<u64> = (0..n)
            .map(|i| fp.sub(a.get(i).unwrap_or(&0), b.get(i).unwrap_or(&0)))
            .collect();
        trim(&mut out);
        out
    }

    pub fn mul(fp: &Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                out[i + j] = fp.add(&out[i + j], &fp.mul(ai, bj));
            }
        }
        trim(&mut out);
        out
    }

    /// Quotient and remainder; `b` must be nonzero.
    pub fn divrem(fp: &Fp, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let db = degree(b).expect("division by zero polynomial");
        let lead_inv = fp.inv(&b[db]).unwrap();
        let mut r = a.to_vec();
        trim(&mut r);
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        for i in (db..r.len()).rev() {
            let c = fp.mul(&r[i], &lead_inv);
            if c == 0 {
                continue;
            }
            q[i - db] = c;
            for j in 0..=db {
                let t = fp.mul(&c, &b[j]);
                r[i - db + j] = fp.sub(&r[i - db + j], &t);
            }
        }
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn rem(fp: &Fp, a: &[u64], m: &[u64]) -> Vec<u64> {
        divrem(fp, a, m).1
    }

    pub fn mulmod(fp: &Fp, a: &[u64], b: &[u64], m: &[u64]) -> Vec<u64> {
        rem(fp, &mul(fp, a, b), m)
    }

    /// `a^e mod m` for an arbitrary-size exponent.
    pub fn powmod(fp: &Fp, a: &[u64], e: &num_bigint::BigUint, m: &[u64]) -> Vec<u64> {
        let mut acc = vec![1u64];
        let base = rem(fp, a, m);
        for i in (0..e.bits()).rev() {
            acc = mulmod(fp, &acc, &acc, m);
            if e.bit(i) {
                acc = mulmod(fp, &acc, &base, m);
            }
        }
        acc
    }

    /// Monic gcd.
    pub fn gcd(fp: &Fp, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut x = a.to_vec();
        let mut y = b.to_vec();
        trim(&mut x);
        trim(&mut y);
        while !y.is_empty() {
            let r = rem(fp, &x, &y);
            x = y;
            y = r;
        }
        if let Some(d) = degree(&x) {
            let inv = fp.inv(&x[d]).unwrap();
            for c in x.iter_mut() {
                *c = fp.mul(c, &inv);
            }
        }
        x
    }

    pub fn eval(fp: &Fp, a: &[u64], x: u64) -> u64 {
        a.iter().rev().fold(0, |acc, c| fp.add(&fp.mul(&acc, &x), c))
    }

    /// Rabin's irreducibility test for a monic polynomial of degree `k >= 1`.
    pub fn is_irreducible(fp: &Fp, m: &[u64]) -> bool {
        let Some(k) = degree(m) else { return false };
        if k == 0 {
            return false;
        }
        if k == 1 {
            return true;
        }
        let p = num_bigint::BigUint::from(fp.modulus());
        let x = vec![0u64, 1];
        let frob_pow = |j: usize| powmod(fp, &x, &p.pow(j as u32), m);
        if sub(fp, &frob_pow(k), &x) != Vec::<u64>::new() {
            return false;
        }
        for (r, _) in super::factor_u64(k as u64) {
            let h = sub(fp, &frob_pow(k / r as usize), &x);
            if degree(&gcd(fp, &h, m)) != Some(0) {
                return false;
            }
        }
        true
    }
}

/// First monic irreducible polynomial of degree `k` over `F_p`, enumerating
/// lower coefficients as base-`p` digits (constant term least significant).
pub fn find_irreducible(fp: &Fp, k: usize) -> Vec<u64> {
    assert!(k >= 1);
    let p = fp.modulus();
    let mut n: u128 = 0;
    loop {
        let mut coeffs = Vec::with_capacity(k + 1);
        let mut rest = n;
        for _ in 0..k {
            coeffs.push((rest % p as u128) as u64);
            rest /= p as u128;
        }
        coeffs.push(1);
        if poly::is_irreducible(fp, &coeffs) {
            return coeffs;
        }
        n += 1;
    }
}

/// `F_p[X]/(m(X))` for a monic irreducible `m` of degree `k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtField {
    base: Fp,
    modulus: Vec<u64>,
}

impl ExtField {
    pub fn new(base: Fp, modulus: Vec<u64>) -> Result<Self, FieldError> {
        let deg = poly::degree(&modulus).unwrap_or(0);
        if deg == 0 || modulus[deg] != 1 || modulus.len() != deg + 1 {
            return Err(FieldError::NotIrreducible);
        }
        if !poly::is_irreducible(&base, &modulus) {
            return Err(FieldError::NotIrreducible);
        }
        Ok(ExtField { base, modulus })
    }

    /// Skips the irreducibility test; `modulus` must come from a checked field.
    pub(crate) fn from_checked(base: Fp, modulus: Vec<u64>) -> Self {
        ExtField { base, modulus }
    }

    /// Extension of degree `k` using [`find_irreducible`].
    pub fn of_degree(base: Fp, k: usize) -> Self {
        let m = find_irreducible(&base, k);
        ExtField { base, modulus: m }
    }

    pub fn base(&self) -> &Fp {
        &self.base
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn degree(&self) -> usize {
        self.modulus.len() - 1
    }

    pub fn embed(&self, a: u64) -> Vec<u64> {
        let mut v = vec![0u64; self.degree()];
        v[0] = a % self.base.modulus();
        v
    }

    /// The base-field value of `a`, if `a` lies in `F_p`.
    pub fn descend(&self, a: &[u64]) -> Option<u64> {
        if a[1..].iter().all(|&c| c == 0) {
            Some(a[0])
        } else {
            None
        }
    }

    /// The class of `X`.
    pub fn generator(&self) -> Vec<u64> {
        let mut v = vec![0u64; self.degree()];
        if self.degree() == 1 {
            v[0] = self.base.neg(&self.modulus[0]);
        } else {
            v[1] = 1;
        }
        v
    }

    pub fn from_poly(&self, a: &[u64]) -> Vec<u64> {
        let mut r = poly::rem(&self.base, a, &self.modulus);
        r.resize(self.degree(), 0);
        r
    }

    /// `a^p`.
    pub fn frobenius(&self, a: &[u64]) -> Vec<u64> {
        self.pow_u64(&a.to_vec(), self.base.modulus())
    }

    /// `a^(p^k)` iterated Frobenius for `k` steps.
    pub fn frobenius_pow(&self, a: &[u64], k: usize) -> Vec<u64> {
        let mut x = a.to_vec();
        for _ in 0..k {
            x = self.frobenius(&x);
        }
        x
    }
}

impl Field for ExtField {
    type Elem = Vec<u64>;

    fn zero(&self) -> Vec<u64> {
        vec![0; self.degree()]
    }
    fn one(&self) -> Vec<u64> {
        self.embed(1)
    }
    fn from_u64(&self, v: u64) -> Vec<u64> {
        self.embed(v)
    }
    fn add(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.add(x, y)).collect()
    }
    fn sub(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| self.base.sub(x, y)).collect()
    }
    fn neg(&self, a: &Vec<u64>) -> Vec<u64> {
        a.iter().map(|x| self.base.neg(x)).collect()
    }
    fn mul(&self, a: &Vec<u64>, b: &Vec<u64>) -> Vec<u64> {
        let k = self.degree();
        let fp = &self.base;
        let mut prod = vec![0u64; 2 * k - 1];
        for (i, ai) in a.iter().enumerate() {
            if *ai == 0 {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                prod[i + j] = fp.add(&prod[i + j], &fp.mul(ai, bj));
            }
        }
        // reduce by the monic modulus from the top
        for i in (k..prod.len()).rev() {
            let c = prod[i];
            if c == 0 {
                continue;
            }
            for j in 0..k {
                let t = fp.mul(&c, &self.modulus[j]);
                prod[i - k + j] = fp.sub(&prod[i - k + j], &t);
            }
        }
        prod.truncate(k);
        prod
    }
    fn inv(&self, a: &Vec<u64>) -> Result<Vec<u64>, FieldError> {
        if a.iter().all(|&c| c == 0) {
            return Err(FieldError::DivisionByZero);
        }
        let fp = &self.base;
        // extended Euclid on (m, a)
        let (mut r0, mut r1) = (self.modulus.clone(), a.clone());
        poly::trim(&mut r1);
        let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = poly::divrem(fp, &r0, &r1);
            let s2 = poly::sub(fp, &s0, &poly::mul(fp, &q, &s1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant
        let c = fp.inv(&r0[0])?;
        let out: Vec<u64> = s0.iter().map(|x| fp.mul(x, &c)).collect();
        Ok(self.from_poly(&out))
    }
    fn characteristic(&self) -> u64 {
        self.base.modulus()
    }
    fn size(&self) -> BigUint {
        BigUint::from(self.base.modulus()).pow(self.degree() as u32)
    }
    fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<u64> {
        (0..self.degree()).map(|_| self.base.random(rng)).collect()
    }
}

/// Multiplicative order helper used by the Kummer construction.
pub fn multiplicative_order(fp: &Fp, a: u64) -> u64 {
    let n = fp.modulus() - 1;
    let mut order = n;
    for (q, e) in factor_u64(n) {
        for _ in 0..e {
            if order.is_multiple_of(q) && fp.pow_u64(&a, order / q) == 1 {
                order /= q;
            }
        }
    }
    order
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    #[test]
    fn small_prime_examples() {
        let f = Fp::new(13).unwrap();
        assert_eq!(f.add(&7, &9), 3);
        assert_eq!(f.inv(&5).unwrap(), 8);
        assert_eq!(f.inv(&0), Err(FieldError::DivisionByZero));
        assert_eq!(f.from_i64(-1), 12);
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(Fp::new(2).is_err());
        assert!(Fp::new(15).is_err());
        assert!(Fp::new(1 << 63).is_err());
        assert!(Fp::new(998244353).is_ok());
    }

    #[test]
    fn f9_generator_squares_to_minus_one() {
        let f3 = Fp::new(3).unwrap();
        let m = find_irreducible(&f3, 2);
        assert_eq!(m, vec![1, 0, 1]);
        let f9 = ExtField::new(f3, m).unwrap();
        let x = f9.generator();
        assert_eq!(f9.mul(&x, &x), f9.embed(2));
    }

    #[test]
    fn irreducible_small_cases() {
        let f3 = Fp::new(3).unwrap();
        assert_eq!(find_irreducible(&f3, 1), vec![0, 1]);
        let f13 = Fp::new(13).unwrap();
        let m = find_irreducible(&f13, 4);
        assert_eq!(m.len(), 5);
        // brute force: no root
        assert!((0..13).all(|x| poly::eval(&f13, &m, x) != 0));
        // no quadratic factor: gcd(X^169 - X, m) = 1
        let x = vec![0u64, 1];
        let h = poly::sub(
            &f13,
            &poly::powmod(&f13, &x, &BigUint::from(169u32), &m),
            &x,
        );
        assert_eq!(poly::gcd(&f13, &h, &m), vec![1]);
    }

    #[test]
    fn reducible_polynomial_rejected() {
        let f13 = Fp::new(13).unwrap();
        // (X^2+2)(X^2+5) with both factors irreducible mod 13
        let a = vec![2u64, 0, 1];
        let b = vec![5u64, 0, 1];
        assert!(poly::is_irreducible(&f13, &a));
        assert!(poly::is_irreducible(&f13, &b));
        assert!(!poly::is_irreducible(&f13, &poly::mul(&f13, &a, &b)));
        assert!(ExtField::new(f13, poly::mul(&f13, &a, &b)).is_err());
    }

    #[test]
    fn field_axioms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let f = Fp::new(1_000_000_007).unwrap();
        for _ in 0..1000 {
            let (a, b, c) = (f.random(&mut rng), f.random(&mut rng), f.random(&mut rng));
            assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
            assert_eq!(
                f.mul(&a, &f.add(&b, &c)),
                f.add(&f.mul(&a, &b), &f.mul(&a, &c))
            );
            if a != 0 {
                assert_eq!(f.mul(&a, &f.inv(&a).unwrap()), 1);
            }
        }
    }

    #[test]
    fn ext_field_axioms_and_frobenius() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let fp = Fp::new(10007).unwrap();
        let e = ExtField::of_degree(fp, 4);
        for _ in 0..1000 {
            let (a, b, c) = (e.random(&mut rng), e.random(&mut rng), e.random(&mut rng));
            assert_eq!(e.add(&e.add(&a, &b), &c), e.add(&a, &e.add(&b, &c)));
            assert_eq!(
                e.mul(&a, &e.add(&b, &c)),
                e.add(&e.mul(&a, &b), &e.mul(&a, &c))
            );
            if !e.is_zero(&a) {
                assert_eq!(e.mul(&a, &e.inv(&a).unwrap()), e.one());
            }
        }
        for _ in 0..50 {
            let (a, b) = (e.random(&mut rng), e.random(&mut rng));
            assert_eq!(
                e.frobenius(&e.add(&a, &b)),
                e.add(&e.frobenius(&a), &e.frobenius(&b))
            );
            assert_eq!(
                e.frobenius(&e.mul(&a, &b)),
                e.mul(&e.frobenius(&a), &e.frobenius(&b))
            );
        }
        let a = e.random(&mut rng);
        assert_eq!(e.frobenius_pow(&a, 4), a);
    }

    #[test]
    fn square_roots() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for p in [10007u64, 998244353, 13] {
            let f = Fp::new(p).unwrap();
            for _ in 0..100 {
                let a = f.random(&mut rng);
                let s = f.square(&a);
                let r = f.sqrt(&s).unwrap();
                assert_eq!(f.square(&r), s);
            }
        }
        let e = ExtField::of_degree(Fp::new(97).unwrap(), 4);
        for _ in 0..30 {
            let a = e.random(&mut rng);
            let s = e.square(&a);
            let r = e.sqrt(&s).unwrap();
            assert_eq!(e.square(&r), s);
        }
    }

    #[test]
    fn primality_and_roots_of_unity() {
        assert!(is_prime(998244353));
        assert!(!is_prime(998244351));
        let f = Fp::new(998244353).unwrap();
        assert_eq!(f.two_adicity(), 23);
        let w = f.root_of_unity(1 << 10).unwrap();
        assert_eq!(f.pow_u64(&w, 1 << 10), 1);
        assert_eq!(f.pow_u64(&w, 1 << 9), f.neg(&1));
        assert_eq!(multiplicative_order(&f, w), 1 << 10);
    }
}
