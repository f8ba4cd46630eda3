use super::{mod_floor, mod_inverse, Ring};
use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::fmt;

/// A rational number whose denominator is prime to the ring's prime.
///
/// Always stored in lowest terms with a positive denominator. The prime is
/// not stored here: it belongs to the [`PLocalRing`] that built the value.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PLocalRational {
    num: BigInt,
    den: BigInt,
}

impl PLocalRational {
    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigInt {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn to_rational(&self) -> BigRational {
        BigRational::new_raw(self.num.clone(), self.den.clone())
    }

    fn normalized(num: BigInt, den: BigInt) -> Self {
        let g = num.gcd(&den);
        let (mut num, mut den) = if g.is_one() || g.is_zero() {
            (num, den)
        } else {
            (num / &g, den / &g)
        };
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        if num.is_zero() {
            den = BigInt::one();
        }
        PLocalRational { num, den }
    }
}

impl fmt::Display for PLocalRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

/// The localization of the integers at a prime `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PLocalRing {
    p: u64,
    p_big: BigInt,
}

impl PLocalRing {
    pub fn new(p: u64) -> Result<Self> {
        if !super::is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        Ok(PLocalRing {
            p,
            p_big: BigInt::from(p),
        })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn prime_big(&self) -> &BigInt {
        &self.p_big
    }

    /// Builds `num/den`, rejecting zero denominators and denominators divisible by `p`.
    pub fn elem(&self, num: BigInt, den: BigInt) -> Result<PLocalRational> {
        if den.is_zero() {
            return Err(Error::Invalid("zero denominator".into()));
        }
        let x = PLocalRational::normalized(num, den);
        self.check(&x)?;
        Ok(x)
    }

    pub fn from_rational(&self, r: &BigRational) -> Result<PLocalRational> {
        self.elem(r.numer().clone(), r.denom().clone())
    }

    /// Verifies that a value built elsewhere belongs to this context.
    pub fn check(&self, x: &PLocalRational) -> Result<()> {
        if (&x.den % &self.p_big).is_zero() {
            return Err(Error::NotPLocal {
                den: x.den.to_string(),
                p: self.p.to_string(),
            });
        }
        Ok(())
    }

    pub fn valuation(&self, x: &PLocalRational) -> Result<u64> {
        p_valuation(x, self.p)
    }

    /// Image in `Z/mZ`; fails when the denominator is not a unit mod `m`.
    pub fn reduce_mod(&self, x: &PLocalRational, m: &BigInt) -> Result<BigInt> {
        let inv = mod_inverse(&x.den, m).ok_or_else(|| Error::NotInvertible {
            den: x.den.to_string(),
            modulus: m.to_string(),
        })?;
        Ok(mod_floor(&(&x.num * inv), m))
    }

    /// Exact division by `p`, valid only when the value has positive valuation.
    pub fn div_by_p(&self, x: &PLocalRational) -> Result<PLocalRational> {
        if !(&x.num % &self.p_big).is_zero() {
            return Err(Error::DeltaNotIntegral(x.to_string()));
        }
        Ok(PLocalRational {
            num: &x.num / &self.p_big,
            den: x.den.clone(),
        })
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn valuation_of_integer(n: &BigInt, p: u64) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let p = BigInt::from(p);
    let mut n = n.abs();
    let mut v = 0;
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return Ok(v);
        }
        n = q;
        v += 1;
    }
}

/// The p-adic valuation of a nonzero p-local rational.
pub fn p_valuation(x: &PLocalRational, p: u64) -> Result<u64> {
    if x.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    if (x.denom() % BigInt::from(p)).is_zero() {
        return Err(Error::NotPLocal {
            den: x.denom().to_string(),
            p: p.to_string(),
        });
    }
    valuation_of_integer(x.numer(), p)
}

impl Ring for PLocalRing {
    type Elem = PLocalRational;

    fn zero(&self) -> PLocalRational {
        PLocalRational {
            num: BigInt::zero(),
            den: BigInt::one(),
        }
    }
    fn one(&self) -> PLocalRational {
        PLocalRational {
            num: BigInt::one(),
            den: BigInt::one(),
        }
    }
    fn is_zero(&self, a: &PLocalRational) -> bool {
        a.num.is_zero()
    }
    fn add(&self, a: &PLocalRational, b: &PLocalRational) -> PLocalRational {
        if a.den.is_one() && b.den.is_one() {
            return PLocalRational {
                num: &a.num + &b.num,
                den: BigInt::one(),
            };
        }
        if a.den == b.den {
            return PLocalRational::normalized(&a.num + &b.num, a.den.clone());
        }
        PLocalRational::normalized(&a.num * &b.den + &b.num * &a.den, &a.den * &b.den)
    }
    fn neg(&self, a: &PLocalRational) -> PLocalRational {
        PLocalRational {
            num: -&a.num,
            den: a.den.clone(),
        }
    }
    fn mul(&self, a: &PLocalRational, b: &PLocalRational) -> PLocalRational {
        if a.den.is_one() && b.den.is_one() {
            return PLocalRational {
                num: &a.num * &b.num,
                den: BigInt::one(),
            };
        }
        PLocalRational::normalized(&a.num * &b.num, &a.den * &b.den)
    }
    fn from_int(&self, n: &BigInt) -> PLocalRational {
        PLocalRational {
            num: n.clone(),
            den: BigInt::one(),
        }
    }
}
