//! Exact coefficient domains.
//!
//! Every domain is a context value implementing [`Ring`]; elements are plain
//! data and all arithmetic goes through the context. This keeps the prime of
//! a p-local ring or the modulus of a finite field out of every element.

mod fq;
mod plocal;

pub use fq::{fq_build, fq_pow, FqElem, FqField, MAX_ELL};
pub use plocal::{p_valuation, valuation_of_integer, PLocalRational, PLocalRing};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt::Debug;

/// A commutative ring with identity, described by a context value.
pub trait Ring: Sync {
    type Elem: Clone + PartialEq + Debug + Send + Sync;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn is_zero(&self, a: &Self::Elem) -> bool;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    /// Image of an integer under the canonical map from the integers.
    #[allow(clippy::wrong_self_convention)]
    fn from_int(&self, n: &BigInt) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }

    fn is_one(&self, a: &Self::Elem) -> bool {
        *a == self.one()
    }

    /// Square-and-multiply; `pow(a, 0)` is one.
    fn pow(&self, a: &Self::Elem, mut k: u64) -> Self::Elem {
        let mut base = a.clone();
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base);
            }
        }
        acc
    }
}

/// The integers with arbitrary precision.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct IntegerRing;

impl Ring for IntegerRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        BigInt::one()
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a + b
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        -a
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a * b
    }
    fn from_int(&self, n: &BigInt) -> BigInt {
        n.clone()
    }
    fn sub(&self, a: &BigInt, b: &BigInt) -> BigInt {
        a - b
    }
}

/// The rationals.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RationalField;

impl Ring for RationalField {
    type Elem = BigRational;

    fn zero(&self) -> BigRational {
        BigRational::zero()
    }
    fn one(&self) -> BigRational {
        BigRational::one()
    }
    fn is_zero(&self, a: &BigRational) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a + b
    }
    fn neg(&self, a: &BigRational) -> BigRational {
        -a
    }
    fn mul(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a * b
    }
    fn from_int(&self, n: &BigInt) -> BigRational {
        BigRational::from_integer(n.clone())
    }
    fn sub(&self, a: &BigRational, b: &BigRational) -> BigRational {
        a - b
    }
}

/// Residues modulo `m >= 1`, stored in `[0, m)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZModRing {
    m: BigInt,
}

impl ZModRing {
    pub fn new(m: BigInt) -> Self {
        assert!(m.is_positive(), "modulus must be positive");
        ZModRing { m }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.m
    }
}

impl Ring for ZModRing {
    type Elem = BigInt;

    fn zero(&self) -> BigInt {
        BigInt::zero()
    }
    fn one(&self) -> BigInt {
        mod_floor(&BigInt::one(), &self.m)
    }
    fn is_zero(&self, a: &BigInt) -> bool {
        a.is_zero()
    }
    fn add(&self, a: &BigInt, b: &BigInt) -> BigInt {
        let s = a + b;
        if s >= self.m {
            s - &self.m
        } else {
            s
        }
    }
    fn neg(&self, a: &BigInt) -> BigInt {
        if a.is_zero() {
            BigInt::zero()
        } else {
            &self.m - a
        }
    }
    fn mul(&self, a: &BigInt, b: &BigInt) -> BigInt {
        (a * b) % &self.m
    }
    fn from_int(&self, n: &BigInt) -> BigInt {
        mod_floor(n, &self.m)
    }
}

/// Deterministic primality test for the desk-scale primes used here.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) || n.is_multiple_of(3) {
        return false;
    }
    let mut d = 5u64;
    while d.saturating_mul(d) <= n {
        if n.is_multiple_of(d) || n.is_multiple_of(d + 2) {
            return false;
        }
        d += 6;
    }
    true
}

/// Least non-negative residue of `a` modulo `m` (`m > 0`).
pub fn mod_floor(a: &BigInt, m: &BigInt) -> BigInt {
    let r = a % m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let egcd = num_integer::Integer::extended_gcd(&mod_floor(a, m), m);
    if !egcd.gcd.is_one() {
        return None;
    }
    Some(mod_floor(&egcd.x, m))
}
