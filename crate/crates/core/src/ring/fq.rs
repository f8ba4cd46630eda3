use super::{is_prime, Ring};
use crate::error::{guard, Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use std::fmt;

pub const MAX_ELL: u32 = 4;

/// Fields up to this order get log/antilog tables.
const TABLE_LIMIT: u64 = 1 << 16;

/// Element of a finite field `F_q`, `q = p^ell`.
///
/// The `ell` residues of the polynomial-basis representation (little-endian
/// in the modulus root) are packed base `p` into one word, so element `k`
/// has coefficients equal to the base-`p` digits of `k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FqElem(u64);

impl FqElem {
    pub fn code(self) -> u64 {
        self.0
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone)]
struct Tables {
    log: Vec<u32>,
    exp: Vec<u64>,
}

/// `F_q` realised as `F_p[x]/(m(x))` with a deterministic modulus.
#[derive(Debug, Clone)]
pub struct FqField {
    p: u64,
    ell: u32,
    q: u64,
    /// Monic modulus, constant term first, length `ell + 1`.
    modulus: Vec<u64>,
    tables: Option<Tables>,
}

impl PartialEq for FqField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.ell == other.ell && self.modulus == other.modulus
    }
}
impl Eq for FqField {}

/// Builds `F_{p^ell}` with the lexicographically smallest monic irreducible modulus.
pub fn fq_build(p: u64, ell: u32) -> Result<FqField> {
    FqField::new(p, ell)
}

/// `a^k` by square-and-multiply.
pub fn fq_pow(field: &FqField, a: FqElem, k: u64) -> FqElem {
    field.pow(&a, k)
}

impl FqField {
    pub fn new(p: u64, ell: u32) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if !(1..=MAX_ELL).contains(&ell) {
            return Err(Error::OutOfRange {
                what: "extension degree",
                detail: format!("ell = {ell}, allowed 1..={MAX_ELL}"),
            });
        }
        let q = p
            .checked_pow(ell)
            .filter(|&q| q < (1 << 62))
            .ok_or_else(|| Error::OutOfRange {
                what: "field order",
                detail: format!("{p}^{ell} does not fit the element encoding"),
            })?;
        let modulus = if ell == 1 {
            vec![0, 1]
        } else {
            smallest_irreducible(p, ell as usize)?
        };
        let mut field = FqField {
            p,
            ell,
            q,
            modulus,
            tables: None,
        };
        if q <= TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.ell
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    /// Monic modulus coefficients, constant term first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn elem(&self, code: u64) -> Result<FqElem> {
        if code >= self.q {
            return Err(Error::OutOfRange {
                what: "field element code",
                detail: format!("{code} >= q = {}", self.q),
            });
        }
        Ok(FqElem(code))
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> Result<FqElem> {
        if coeffs.len() != self.ell as usize {
            return Err(Error::LengthMismatch {
                expected: self.ell as usize,
                got: coeffs.len(),
            });
        }
        if let Some(c) = coeffs.iter().find(|&&c| c >= self.p) {
            return Err(Error::OutOfRange {
                what: "field coefficient",
                detail: format!("{c} >= p = {}", self.p),
            });
        }
        Ok(FqElem(self.pack(coeffs)))
    }

    pub fn coeffs(&self, a: FqElem) -> Vec<u64> {
        self.unpack(a.0)
    }

    /// The root of the modulus (`x` itself); for `ell = 1` this is `0`.
    pub fn generator(&self) -> FqElem {
        if self.ell == 1 {
            FqElem(0)
        } else {
            FqElem(self.p)
        }
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.q).map(FqElem)
    }

    pub fn inv(&self, a: FqElem) -> Option<FqElem> {
        if a.0 == 0 {
            return None;
        }
        Some(self.pow(&a, self.q - 2))
    }

    fn pack(&self, coeffs: &[u64]) -> u64 {
        coeffs.iter().rev().fold(0, |acc, &c| acc * self.p + c)
    }

    fn unpack(&self, mut code: u64) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.ell as usize);
        for _ in 0..self.ell {
            out.push(code % self.p);
            code /= self.p;
        }
        out
    }

    fn mul_slow(&self, a: u64, b: u64) -> u64 {
        let p = self.p as u128;
        let ell = self.ell as usize;
        let (ac, bc) = (self.unpack(a), self.unpack(b));
        let mut prod = vec![0u128; 2 * ell - 1];
        for (i, &x) in ac.iter().enumerate() {
            for (j, &y) in bc.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x as u128 * y as u128) % p;
            }
        }
        // Reduce using x^ell = -(m_0 + ... + m_{ell-1} x^{ell-1}).
        for top in (ell..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            prod[top] = 0;
            for k in 0..ell {
                let sub = c * self.modulus[k] as u128 % p;
                let slot = &mut prod[top - ell + k];
                *slot = (*slot + p - sub) % p;
            }
        }
        let low: Vec<u64> = prod[..ell].iter().map(|&c| c as u64).collect();
        self.pack(&low)
    }

    fn build_tables(&self) -> Tables {
        let order = self.q - 1;
        let prime_factors = distinct_prime_factors(order);
        let primitive = (1..self.q)
            .find(|&g| {
                prime_factors
                    .iter()
                    .all(|&f| self.pow_slow(g, order / f) != 1)
            })
            .expect("multiplicative group of a finite field is cyclic");
        let mut log = vec![0u32; self.q as usize];
        let mut exp = vec![0u64; order as usize];
        let mut cur = 1u64;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = cur;
            log[cur as usize] = k as u32;
            cur = self.mul_slow(cur, primitive);
        }
        Tables { log, exp }
    }

    fn pow_slow(&self, a: u64, mut k: u64) -> u64 {
        let (mut base, mut acc) = (a, 1u64);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_slow(acc, base);
            }
            base = self.mul_slow(base, base);
            k >>= 1;
        }
        acc
    }
}

impl Ring for FqField {
    type Elem = FqElem;

    fn zero(&self) -> FqElem {
        FqElem(0)
    }
    fn one(&self) -> FqElem {
        FqElem(1)
    }
    fn is_zero(&self, a: &FqElem) -> bool {
        a.0 == 0
    }
    fn add(&self, a: &FqElem, b: &FqElem) -> FqElem {
        if self.ell == 1 {
            return FqElem((a.0 + b.0) % self.p);
        }
        let (mut x, mut y, mut out, mut scale) = (a.0, b.0, 0u64, 1u64);
        for _ in 0..self.ell {
            out += ((x % self.p + y % self.p) % self.p) * scale;
            x /= self.p;
            y /= self.p;
            scale *= self.p;
        }
        FqElem(out)
    }
    fn neg(&self, a: &FqElem) -> FqElem {
        let (mut x, mut out, mut scale) = (a.0, 0u64, 1u64);
        for _ in 0..self.ell {
            out += ((self.p - x % self.p) % self.p) * scale;
            x /= self.p;
            scale *= self.p;
        }
        FqElem(out)
    }
    fn mul(&self, a: &FqElem, b: &FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem(0);
        }
        match &self.tables {
            Some(t) => {
                let k = t.log[a.0 as usize] as u64 + t.log[b.0 as usize] as u64;
                FqElem(t.exp[(k % (self.q - 1)) as usize])
            }
            None => FqElem(self.mul_slow(a.0, b.0)),
        }
    }
    fn from_int(&self, n: &BigInt) -> FqElem {
        let r = n.mod_floor(&BigInt::from(self.p));
        FqElem(r.to_u64().expect("residue below p"))
    }
    fn pow(&self, a: &FqElem, k: u64) -> FqElem {
        if k == 0 {
            return FqElem(1);
        }
        if a.0 == 0 {
            return FqElem(0);
        }
        match &self.tables {
            Some(t) => {
                let order = self.q - 1;
                let e = (t.log[a.0 as usize] as u128 * (k % order) as u128) % order as u128;
                FqElem(t.exp[e as usize])
            }
            None => FqElem(self.pow_slow(a.0, k)),
        }
    }
}

fn distinct_prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Remainder of `f` modulo the monic `g` over `F_p` (coefficients constant first).
fn poly_rem(f: &[u64], g: &[u64], p: u64) -> Vec<u64> {
    let mut r: Vec<u128> = f.iter().map(|&c| c as u128).collect();
    let dg = g.len() - 1;
    let p = p as u128;
    while r.len() > dg {
        let lead = r.pop().unwrap() % p;
        if lead == 0 {
            continue;
        }
        let shift = r.len() - dg;
        for k in 0..dg {
            let sub = lead * g[k] as u128 % p;
            r[shift + k] = (r[shift + k] + p - sub) % p;
        }
    }
    r.into_iter().map(|c| (c % p) as u64).collect()
}

/// Exhaustive factor check: no monic factor of degree `1..=deg/2`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let deg = f.len() - 1;
    for d in 1..=deg / 2 {
        let count = p.pow(d as u32);
        for code in 0..count {
            let mut g: Vec<u64> = (0..d)
                .scan(code, |c, _| {
                    let digit = *c % p;
                    *c /= p;
                    Some(digit)
                })
                .collect();
            g.push(1);
            if poly_rem(f, &g, p).iter().all(|&c| c == 0) {
                return false;
            }
        }
    }
    true
}

fn smallest_irreducible(p: u64, ell: usize) -> Result<Vec<u64>> {
    let checks = (p as u128).pow((ell / 2) as u32);
    if checks > 1_000_000 {
        return Err(guard("irreducibility trial divisors", checks, 1_000_000));
    }
    let total = p.pow(ell as u32);
    // Lexicographic order on (m_0, ..., m_{ell-1}): m_0 is the most significant digit.
    for rank in 0..total {
        let mut digits = vec![0u64; ell];
        let mut r = rank;
        for slot in digits.iter_mut().rev() {
            *slot = r % p;
            r /= p;
        }
        let mut f = digits;
        f.push(1);
        if is_irreducible(&f, p) {
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orders_and_moduli() {
        let f2 = fq_build(2, 1).unwrap();
        assert_eq!(f2.order(), 2);
        let f4 = fq_build(2, 2).unwrap();
        assert_eq!(f4.order(), 4);
        assert_eq!(f4.modulus(), &[1, 1, 1]);
        let f9 = fq_build(3, 2).unwrap();
        assert_eq!(f9.order(), 9);
        assert_eq!(f9.modulus(), &[1, 0, 1]);
    }

    /// Independent scan: first (m0, m1) in lexicographic order with no root in F_p.
    #[test]
    fn quadratic_modulus_matches_root_scan() {
        for p in [2u64, 3, 5, 7, 11] {
            let mut expected = None;
            'outer: for m0 in 0..p {
                for m1 in 0..p {
                    if (0..p).all(|x| (x * x + m1 * x + m0) % p != 0) {
                        expected = Some(vec![m0, m1, 1]);
                        break 'outer;
                    }
                }
            }
            assert_eq!(
                fq_build(p, 2).unwrap().modulus(),
                expected.unwrap().as_slice()
            );
        }
    }

    #[test]
    fn gf4_generator_identities() {
        let f = fq_build(2, 2).unwrap();
        let g = f.generator();
        let g2 = fq_pow(&f, g, 2);
        assert_eq!(g2, f.add(&g, &f.one()));
        assert_eq!(fq_pow(&f, g, 4), g);
        assert_eq!(fq_pow(&f, g, 3), f.one());
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(fq_build(4, 1), Err(Error::NotPrime(_))));
        assert!(matches!(fq_build(2, 0), Err(Error::OutOfRange { .. })));
        assert!(matches!(fq_build(2, 5), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn table_and_direct_products_agree() {
        for (p, ell) in [(2, 4), (3, 3), (5, 2), (7, 2)] {
            let f = fq_build(p, ell).unwrap();
            for a in f.elements() {
                for b in f.elements() {
                    assert_eq!(
                        f.mul(&a, &b).code(),
                        if a.0 == 0 || b.0 == 0 {
                            0
                        } else {
                            f.mul_slow(a.0, b.0)
                        }
                    );
                }
            }
        }
    }

    #[test]
    fn large_field_without_tables() {
        let f = fq_build(257, 3).unwrap();
        assert!(f.tables.is_none());
        let a = f.from_coeffs(&[3, 7, 11]).unwrap();
        assert_eq!(f.pow(&a, f.order()), a);
        let inv = f.inv(a).unwrap();
        assert_eq!(f.mul(&a, &inv), f.one());
    }

    #[test]
    fn coefficient_round_trip() {
        let f = fq_build(3, 3).unwrap();
        for a in f.elements() {
            assert_eq!(f.from_coeffs(&f.coeffs(a)).unwrap(), a);
        }
        assert!(f.from_coeffs(&[0, 3, 0]).is_err());
        assert!(f.from_coeffs(&[0, 1]).is_err());
    }
}
