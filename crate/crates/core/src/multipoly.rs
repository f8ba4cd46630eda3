//! Sparse multivariate polynomials over any [`Ring`].

use crate::error::{Error, Result};
use crate::ring::{FqField, IntegerRing, PLocalRing, RationalField, Ring, ZModRing};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde_json::Value;
use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;

/// Exponent vector `(e_1, ..., e_n)` of `t_1^{e_1} ... t_n^{e_n}`.
///
/// Ordered graded-lexicographically: total degree first, then the exponent
/// of `t_1`, then `t_2`, and so on.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Monomial(exponents)
    }

    pub fn one(nvars: usize) -> Self {
        Monomial(vec![0; nvars])
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u64 {
        self.0.iter().map(|&e| e as u64).sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Total degree, with the zero polynomial below every finite degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Degree {
    NegInfinity,
    Finite(u64),
}

impl Degree {
    pub fn finite(self) -> Option<u64> {
        match self {
            Degree::NegInfinity => None,
            Degree::Finite(d) => Some(d),
        }
    }

    /// Finite degree, with the zero polynomial counted as degree 0.
    pub fn or_zero(self) -> u64 {
        self.finite().unwrap_or(0)
    }
}

impl fmt::Display for Degree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Degree::NegInfinity => write!(f, "-inf"),
            Degree::Finite(d) => write!(f, "{d}"),
        }
    }
}

/// A polynomial in `nvars` variables; no stored coefficient is zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly<E> {
    nvars: usize,
    terms: BTreeMap<Monomial, E>,
}

impl<E: Clone + PartialEq + fmt::Debug + Send + Sync> MultiPoly<E> {
    pub fn zero(nvars: usize) -> Self {
        MultiPoly {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<R: Ring<Elem = E>>(ring: &R, c: E, nvars: usize) -> Self {
        Self::from_map(ring, nvars, [(Monomial::one(nvars), c)])
    }

    /// The variable `t_{index+1}` (0-based `index`).
    pub fn var<R: Ring<Elem = E>>(ring: &R, index: usize, nvars: usize) -> Self {
        let mut e = vec![0; nvars];
        e[index] = 1;
        Self::from_map(ring, nvars, [(Monomial(e), ring.one())])
    }

    /// Collects terms, merging repeated monomials and dropping zeros.
    pub fn from_terms<R, I>(ring: &R, nvars: usize, terms: I) -> Result<Self>
    where
        R: Ring<Elem = E>,
        I: IntoIterator<Item = (Vec<u32>, E)>,
    {
        let mut acc: BTreeMap<Monomial, E> = BTreeMap::new();
        for (exps, c) in terms {
            if exps.len() != nvars {
                return Err(Error::LengthMismatch {
                    expected: nvars,
                    got: exps.len(),
                });
            }
            accumulate(ring, &mut acc, Monomial(exps), c);
        }
        acc.retain(|_, c| !ring.is_zero(c));
        Ok(MultiPoly { nvars, terms: acc })
    }

    fn from_map<R: Ring<Elem = E>, I: IntoIterator<Item = (Monomial, E)>>(
        ring: &R,
        nvars: usize,
        terms: I,
    ) -> Self {
        let terms = terms
            .into_iter()
            .filter(|(_, c)| !ring.is_zero(c))
            .collect();
        MultiPoly { nvars, terms }
    }

    fn from_hash<R: Ring<Elem = E>>(ring: &R, nvars: usize, acc: HashMap<Monomial, E>) -> Self {
        Self::from_map(ring, nvars, acc)
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &E)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Option<&E> {
        self.terms.get(&Monomial(exps.to_vec()))
    }

    pub fn constant_term(&self) -> Option<&E> {
        self.terms.get(&Monomial::one(self.nvars))
    }

    pub fn total_degree(&self) -> Degree {
        self.terms
            .keys()
            .map(Monomial::degree)
            .max()
            .map_or(Degree::NegInfinity, Degree::Finite)
    }

    /// Largest exponent of variable `index` across all terms.
    pub fn degree_in(&self, index: usize) -> u32 {
        self.terms.keys().map(|m| m.0[index]).max().unwrap_or(0)
    }

    /// True if every term mentions only the variable `index`.
    pub fn is_univariate_in(&self, index: usize) -> bool {
        self.terms
            .keys()
            .all(|m| m.0.iter().enumerate().all(|(j, &e)| j == index || e == 0))
    }

    fn check_arity(&self, other: &Self) -> Result<()> {
        if self.nvars != other.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: other.nvars,
            });
        }
        Ok(())
    }

    pub fn add<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        self.check_arity(other)?;
        let mut acc = self.terms.clone();
        for (m, c) in &other.terms {
            accumulate(ring, &mut acc, m.clone(), c.clone());
        }
        acc.retain(|_, c| !ring.is_zero(c));
        Ok(MultiPoly {
            nvars: self.nvars,
            terms: acc,
        })
    }

    pub fn neg<R: Ring<Elem = E>>(&self, ring: &R) -> Self {
        MultiPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), ring.neg(c)))
                .collect(),
        }
    }

    pub fn sub<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        self.add(&other.neg(ring), ring)
    }

    pub fn scale<R: Ring<Elem = E>>(&self, c: &E, ring: &R) -> Self {
        Self::from_map(
            ring,
            self.nvars,
            self.terms.iter().map(|(m, a)| (m.clone(), ring.mul(a, c))),
        )
    }

    /// Naive term-by-term product.
    pub fn mul<R: Ring<Elem = E>>(&self, other: &Self, ring: &R) -> Result<Self> {
        self.check_arity(other)?;
        if self.is_zero() || other.is_zero() {
            return Ok(Self::zero(self.nvars));
        }
        let caps: Vec<u32> = (0..self.nvars)
            .map(|i| self.degree_in(i) + other.degree_in(i))
            .collect();
        if let Some(packer) = Packer::new(&caps) {
            let lhs: Vec<(u128, &E)> = self
                .terms
                .iter()
                .map(|(m, c)| (packer.pack(m), c))
                .collect();
            let rhs: Vec<(u128, &E)> = other
                .terms
                .iter()
                .map(|(m, c)| (packer.pack(m), c))
                .collect();
            let mut acc: HashMap<u128, E> = HashMap::with_capacity(lhs.len() * rhs.len() / 2 + 1);
            let mut push = |key: u128, prod: E| match acc.entry(key) {
                std::collections::hash_map::Entry::Occupied(mut e) => {
                    let sum = ring.add(e.get(), &prod);
                    *e.get_mut() = sum;
                }
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(prod);
                }
            };
            if std::ptr::eq(self, other) {
                // Squaring: each unordered pair once, doubled.
                let two = ring.from_int(&BigInt::from(2));
                for (i, (k1, c1)) in lhs.iter().enumerate() {
                    push(k1 + k1, ring.mul(c1, c1));
                    for (k2, c2) in &lhs[i + 1..] {
                        push(k1 + k2, ring.mul(&two, &ring.mul(c1, c2)));
                    }
                }
            } else {
                for (k1, c1) in &lhs {
                    for (k2, c2) in &rhs {
                        push(k1 + k2, ring.mul(c1, c2));
                    }
                }
            }
            let nvars = self.nvars;
            return Ok(Self::from_map(
                ring,
                nvars,
                acc.into_iter().map(|(k, c)| (packer.unpack(k, nvars), c)),
            ));
        }
        let mut acc: HashMap<Monomial, E> =
            HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let prod = ring.mul(c1, c2);
                match acc.entry(m1.mul(m2)) {
                    std::collections::hash_map::Entry::Occupied(mut e) => {
                        let sum = ring.add(e.get(), &prod);
                        *e.get_mut() = sum;
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                }
            }
        }
        Ok(Self::from_hash(ring, self.nvars, acc))
    }

    pub fn pow<R: Ring<Elem = E>>(&self, mut k: u64, ring: &R) -> Self {
        let mut acc = Self::constant(ring, ring.one(), self.nvars);
        let mut base = self.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base, ring).expect("same arity");
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base, ring).expect("same arity");
            }
        }
        acc
    }

    /// Exact evaluation at `point`.
    pub fn evaluate<R: Ring<Elem = E>>(&self, point: &[E], ring: &R) -> Result<E> {
        if point.len() != self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: point.len(),
            });
        }
        let powers: Vec<Vec<E>> = (0..self.nvars)
            .map(|i| power_table(ring, &point[i], self.degree_in(i)))
            .collect();
        let mut total = ring.zero();
        for (m, c) in &self.terms {
            let mut term = c.clone();
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = ring.mul(&term, &powers[i][e as usize]);
                }
            }
            total = ring.add(&total, &term);
        }
        Ok(total)
    }

    /// Substitutes `subs[i]` (a polynomial in `t_{i+1}` alone) for `t_{i+1}`.
    pub fn compose_per_variable<R: Ring<Elem = E>>(&self, subs: &[Self], ring: &R) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: subs.len(),
            });
        }
        for (i, s) in subs.iter().enumerate() {
            s.check_arity(self)?;
            if !s.is_univariate_in(i) {
                return Err(Error::Invalid(format!(
                    "substitution for t{} mentions other variables",
                    i + 1
                )));
            }
        }
        let powers: Vec<Vec<Self>> = subs
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let top = self.degree_in(i) as usize;
                let mut table = Vec::with_capacity(top + 1);
                table.push(Self::constant(ring, ring.one(), self.nvars));
                for k in 1..=top {
                    let next = table[k - 1].mul(s, ring).expect("same arity");
                    table.push(next);
                }
                table
            })
            .collect();
        let mut acc: HashMap<Monomial, E> = HashMap::new();
        for (m, c) in &self.terms {
            // The factors live in disjoint variables, so their product is a
            // cartesian product of terms with no collisions.
            let mut partial: Vec<(Monomial, E)> = vec![(Monomial::one(self.nvars), c.clone())];
            for (i, &e) in m.0.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                let factor = &powers[i][e as usize];
                let mut next = Vec::with_capacity(partial.len() * factor.len());
                for (pm, pc) in &partial {
                    for (fm, fc) in &factor.terms {
                        next.push((pm.mul(fm), ring.mul(pc, fc)));
                    }
                }
                partial = next;
            }
            for (pm, pc) in partial {
                match acc.entry(pm) {
                    std::collections::hash_map::Entry::Occupied(mut en) => {
                        let sum = ring.add(en.get(), &pc);
                        *en.get_mut() = sum;
                    }
                    std::collections::hash_map::Entry::Vacant(en) => {
                        en.insert(pc);
                    }
                }
            }
        }
        Ok(Self::from_hash(ring, self.nvars, acc))
    }

    /// Substitutes arbitrary polynomials (sharing one arity) for the variables.
    pub fn substitute<R: Ring<Elem = E>>(&self, subs: &[Self], ring: &R) -> Result<Self> {
        if subs.len() != self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: subs.len(),
            });
        }
        let target = subs.first().map_or(0, |s| s.nvars);
        if let Some(bad) = subs.iter().find(|s| s.nvars != target) {
            return Err(Error::LengthMismatch {
                expected: target,
                got: bad.nvars,
            });
        }
        let one = Self::constant(ring, ring.one(), target);
        let mut tables: Vec<Vec<Self>> = Vec::with_capacity(self.nvars);
        for (i, s) in subs.iter().enumerate() {
            let mut table = vec![one.clone()];
            for k in 1..=self.degree_in(i) as usize {
                let next = table[k - 1].mul(s, ring)?;
                table.push(next);
            }
            tables.push(table);
        }
        let mut out = Self::zero(target);
        for (m, c) in &self.terms {
            let mut term = Self::constant(ring, c.clone(), target);
            for (i, &e) in m.0.iter().enumerate() {
                if e > 0 {
                    term = term.mul(&tables[i][e as usize], ring)?;
                }
            }
            out = out.add(&term, ring)?;
        }
        Ok(out)
    }

    /// Coefficientwise image under `f` into `target`; zero images are dropped.
    pub fn map_coefficients<R2, F>(&self, target: &R2, f: F) -> Result<MultiPoly<R2::Elem>>
    where
        R2: Ring,
        F: Fn(&E) -> Result<R2::Elem>,
    {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let img = f(c)?;
            if !target.is_zero(&img) {
                terms.insert(m.clone(), img);
            }
        }
        Ok(MultiPoly {
            nvars: self.nvars,
            terms,
        })
    }

    /// Re-embeds a polynomial in one variable as a polynomial in slot `index` of `nvars`.
    pub fn embed_univariate(&self, index: usize, nvars: usize) -> Result<Self> {
        if self.nvars != 1 {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: self.nvars,
            });
        }
        if index >= nvars {
            return Err(Error::OutOfRange {
                what: "variable index",
                detail: format!("{index} >= {nvars}"),
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0; nvars];
                e[index] = m.0[0];
                (Monomial(e), c.clone())
            })
            .collect();
        Ok(MultiPoly { nvars, terms })
    }

    /// Adds `extra` unused variables after the existing ones.
    pub fn widen(&self, nvars: usize) -> Result<Self> {
        if nvars < self.nvars {
            return Err(Error::LengthMismatch {
                expected: self.nvars,
                got: nvars,
            });
        }
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.0.clone();
                e.resize(nvars, 0);
                (Monomial(e), c.clone())
            })
            .collect();
        Ok(MultiPoly { nvars, terms })
    }

    /// Coefficients of a polynomial in one variable, indexed by exponent.
    pub fn univariate_coeffs<R: Ring<Elem = E>>(&self, ring: &R) -> Result<Vec<E>> {
        if self.nvars != 1 {
            return Err(Error::LengthMismatch {
                expected: 1,
                got: self.nvars,
            });
        }
        let len = self.total_degree().finite().map_or(0, |d| d as usize + 1);
        let mut out = vec![ring.zero(); len];
        for (m, c) in &self.terms {
            out[m.0[0] as usize] = c.clone();
        }
        Ok(out)
    }
}

/// Packs exponent vectors into one integer so that monomial products are additions.
struct Packer {
    bits: u32,
}

impl Packer {
    /// `caps[i]` bounds the exponent of variable `i` in every packed monomial.
    fn new(caps: &[u32]) -> Option<Packer> {
        if caps.is_empty() {
            return None;
        }
        let bits = (128 / caps.len() as u32).min(32);
        let limit = 1u64 << bits;
        caps.iter()
            .all(|&c| (c as u64) < limit)
            .then_some(Packer { bits })
    }

    fn pack(&self, m: &Monomial) -> u128 {
        m.0.iter()
            .fold(0u128, |acc, &e| (acc << self.bits) | e as u128)
    }

    fn unpack(&self, mut key: u128, nvars: usize) -> Monomial {
        let mask = (1u128 << self.bits) - 1;
        let mut e = vec![0u32; nvars];
        for slot in e.iter_mut().rev() {
            *slot = (key & mask) as u32;
            key >>= self.bits;
        }
        Monomial(e)
    }
}

fn accumulate<R: Ring>(ring: &R, acc: &mut BTreeMap<Monomial, R::Elem>, m: Monomial, c: R::Elem) {
    match acc.get_mut(&m) {
        Some(slot) => *slot = ring.add(slot, &c),
        None => {
            acc.insert(m, c);
        }
    }
}

fn power_table<R: Ring>(ring: &R, x: &R::Elem, top: u32) -> Vec<R::Elem> {
    let mut out = Vec::with_capacity(top as usize + 1);
    out.push(ring.one());
    for k in 1..=top as usize {
        out.push(ring.mul(&out[k - 1], x));
    }
    out
}

/// Unique polynomial of degree `< points.len()` through `(points[i], values[i])`.
pub fn lagrange_interpolate(
    points: &[BigRational],
    values: &[BigRational],
) -> Result<MultiPoly<BigRational>> {
    if points.len() != values.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            got: values.len(),
        });
    }
    for (i, a) in points.iter().enumerate() {
        if points[..i].contains(a) {
            return Err(Error::DuplicatePoint(a.to_string()));
        }
    }
    let ring = RationalField;
    let x = MultiPoly::var(&ring, 0, 1);
    let mut result = MultiPoly::zero(1);
    for (i, (a, y)) in points.iter().zip(values).enumerate() {
        if y.is_zero() {
            continue;
        }
        let mut basis = MultiPoly::constant(&ring, y.clone(), 1);
        for (j, b) in points.iter().enumerate() {
            if i == j {
                continue;
            }
            let factor = x
                .sub(&MultiPoly::constant(&ring, b.clone(), 1), &ring)?
                .scale(&(BigRational::one() / (a - b)), &ring);
            basis = basis.mul(&factor, &ring)?;
        }
        result = result.add(&basis, &ring)?;
    }
    Ok(result)
}

/// An integer polynomial with coefficients reduced once, evaluated modulo `m`.
pub struct ModEvaluator {
    ring: ZModRing,
    poly: MultiPoly<BigInt>,
}

impl ModEvaluator {
    pub fn new(f: &MultiPoly<BigInt>, ring: &ZModRing) -> Self {
        let poly = f
            .map_coefficients(ring, |c| Ok(ring.from_int(c)))
            .expect("reduction is total");
        ModEvaluator {
            ring: ring.clone(),
            poly,
        }
    }

    pub fn eval(&self, point: &[BigInt]) -> BigInt {
        let reduced: Vec<BigInt> = point.iter().map(|x| self.ring.from_int(x)).collect();
        self.poly
            .evaluate(&reduced, &self.ring)
            .expect("arity checked by caller")
    }
}

/// Coefficient encoding for the JSON term-list format.
pub trait CoeffCodec: Ring {
    fn encode(&self, c: &Self::Elem) -> Value;
    fn decode(&self, v: &Value) -> Result<Self::Elem>;
}

fn decode_rational(v: &Value) -> Result<BigRational> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) => n.to_string(),
        other => {
            return Err(Error::Invalid(format!(
                "coefficient {other} is not a string"
            )))
        }
    };
    let parse = |s: &str| -> Result<BigInt> {
        s.trim()
            .parse::<BigInt>()
            .map_err(|_| Error::Invalid(format!("bad integer {s:?}")))
    };
    match text.split_once('/') {
        Some((n, d)) => {
            let d = parse(d)?;
            if d.is_zero() {
                return Err(Error::Invalid("zero denominator".into()));
            }
            Ok(BigRational::new(parse(n)?, d))
        }
        None => Ok(BigRational::from_integer(parse(&text)?)),
    }
}

impl CoeffCodec for IntegerRing {
    fn encode(&self, c: &BigInt) -> Value {
        Value::String(c.to_string())
    }
    fn decode(&self, v: &Value) -> Result<BigInt> {
        let r = decode_rational(v)?;
        if !r.is_integer() {
            return Err(Error::Invalid(format!("{r} is not an integer")));
        }
        Ok(r.to_integer())
    }
}

impl CoeffCodec for RationalField {
    fn encode(&self, c: &BigRational) -> Value {
        Value::String(c.to_string())
    }
    fn decode(&self, v: &Value) -> Result<BigRational> {
        decode_rational(v)
    }
}

impl CoeffCodec for PLocalRing {
    fn encode(&self, c: &crate::ring::PLocalRational) -> Value {
        Value::String(c.to_string())
    }
    fn decode(&self, v: &Value) -> Result<crate::ring::PLocalRational> {
        self.from_rational(&decode_rational(v)?)
    }
}

impl CoeffCodec for FqField {
    /// Prime-subfield elements as decimal strings, others as residue lists.
    fn encode(&self, c: &crate::ring::FqElem) -> Value {
        if c.code() < self.characteristic() {
            Value::String(c.code().to_string())
        } else {
            Value::Array(self.coeffs(*c).into_iter().map(Value::from).collect())
        }
    }
    fn decode(&self, v: &Value) -> Result<crate::ring::FqElem> {
        match v {
            Value::Array(items) => {
                let coeffs = items
                    .iter()
                    .map(|x| {
                        x.as_u64()
                            .ok_or_else(|| Error::Invalid(format!("bad residue {x}")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                self.from_coeffs(&coeffs)
            }
            other => Ok(self.from_int(&IntegerRing.decode(other)?)),
        }
    }
}

impl<E: Clone + PartialEq + fmt::Debug + Send + Sync> MultiPoly<E> {
    /// `[[coeff, [e1, ..., en]], ...]`, leading term first.
    pub fn to_json<R: CoeffCodec<Elem = E>>(&self, ring: &R) -> Value {
        Value::Array(
            self.terms
                .iter()
                .rev()
                .map(|(m, c)| {
                    Value::Array(vec![
                        ring.encode(c),
                        Value::Array(m.0.iter().map(|&e| Value::from(e)).collect()),
                    ])
                })
                .collect(),
        )
    }

    pub fn from_json<R: CoeffCodec<Elem = E>>(ring: &R, nvars: usize, v: &Value) -> Result<Self> {
        let items = v
            .as_array()
            .ok_or_else(|| Error::Invalid("polynomial must be a list of terms".into()))?;
        let mut terms = Vec::with_capacity(items.len());
        for item in items {
            let pair = item
                .as_array()
                .filter(|p| p.len() == 2)
                .ok_or_else(|| Error::Invalid(format!("term {item} is not [coeff, exps]")))?;
            let exps = pair[1]
                .as_array()
                .ok_or_else(|| Error::Invalid(format!("exponents {} not a list", pair[1])))?
                .iter()
                .map(|e| {
                    e.as_u64()
                        .and_then(|e| u32::try_from(e).ok())
                        .ok_or_else(|| Error::Invalid(format!("bad exponent {e}")))
                })
                .collect::<Result<Vec<u32>>>()?;
            terms.push((exps, ring.decode(&pair[0])?));
        }
        Self::from_terms(ring, nvars, terms)
    }
}

impl<E: fmt::Display> fmt::Display for MultiPoly<E> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "({c})")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*t{}", i + 1)?,
                    _ => write!(f, "*t{}^{}", i + 1, e)?,
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::fq_build;

    fn zpoly(nvars: usize, terms: &[(i64, &[u32])]) -> MultiPoly<BigInt> {
        MultiPoly::from_terms(
            &IntegerRing,
            nvars,
            terms.iter().map(|(c, e)| (e.to_vec(), BigInt::from(*c))),
        )
        .unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn degree_examples() {
        assert_eq!(
            zpoly(2, &[(1, &[1, 1]), (1, &[1, 0])]).total_degree(),
            Degree::Finite(2)
        );
        assert_eq!(zpoly(2, &[(5, &[0, 0])]).total_degree(), Degree::Finite(0));
        let zero = MultiPoly::<BigInt>::zero(2);
        assert_eq!(zero.total_degree(), Degree::NegInfinity);
        assert!(Degree::NegInfinity < Degree::Finite(0));
    }

    #[test]
    fn zero_coefficients_are_dropped() {
        let p = zpoly(1, &[(2, &[1]), (-2, &[1]), (3, &[0])]);
        assert_eq!(p.len(), 1);
        assert!(matches!(
            MultiPoly::from_terms(&IntegerRing, 2, [(vec![1], BigInt::one())]),
            Err(Error::LengthMismatch { .. })
        ));
    }

    #[test]
    fn evaluate_examples() {
        let r = IntegerRing;
        let f = zpoly(2, &[(1, &[1, 0]), (1, &[0, 1])]);
        assert_eq!(
            f.evaluate(&[BigInt::one(), BigInt::one()], &r).unwrap(),
            BigInt::from(2)
        );
        let g = zpoly(2, &[(1, &[1, 1])]);
        assert_eq!(
            g.evaluate(&[BigInt::zero(), BigInt::from(7)], &r).unwrap(),
            BigInt::zero()
        );
        assert!(g.evaluate(&[BigInt::zero()], &r).is_err());
    }

    #[test]
    fn indicator_over_fq() {
        for (p, ell) in [(2, 1), (2, 2), (3, 1), (3, 2), (5, 1)] {
            let f = fq_build(p, ell).unwrap();
            let t = MultiPoly::var(&f, 0, 1);
            let ind = MultiPoly::constant(&f, f.one(), 1)
                .sub(&t.pow(f.order() - 1, &f), &f)
                .unwrap();
            for a in f.elements() {
                let expect = if a.code() == 0 { f.one() } else { f.zero() };
                assert_eq!(ind.evaluate(&[a], &f).unwrap(), expect);
            }
        }
    }

    #[test]
    fn compose_examples() {
        let r = IntegerRing;
        let f = zpoly(2, &[(1, &[1, 0]), (1, &[0, 1])]);
        let subs = [zpoly(2, &[(1, &[2, 0])]), zpoly(2, &[(1, &[0, 2])])];
        assert_eq!(
            f.compose_per_variable(&subs, &r).unwrap(),
            zpoly(2, &[(1, &[2, 0]), (1, &[0, 2])])
        );
        let g = zpoly(2, &[(1, &[1, 1])]);
        let subs = [
            zpoly(2, &[(1, &[1, 0]), (1, &[0, 0])]),
            zpoly(2, &[(1, &[0, 1])]),
        ];
        assert_eq!(
            g.compose_per_variable(&subs, &r).unwrap(),
            zpoly(2, &[(1, &[1, 1]), (1, &[0, 1])])
        );
        let h = zpoly(1, &[(1, &[1])]);
        let sigma = zpoly(1, &[(1, &[3]), (-3, &[2]), (3, &[1])]);
        assert_eq!(
            h.compose_per_variable(std::slice::from_ref(&sigma), &r)
                .unwrap(),
            sigma
        );
    }

    #[test]
    fn general_substitution() {
        let r = IntegerRing;
        // f(x, y) = x*y + 2 with x -> a + b, y -> a - b gives a^2 - b^2 + 2.
        let f = zpoly(2, &[(1, &[1, 1]), (2, &[0, 0])]);
        let subs = [
            zpoly(2, &[(1, &[1, 0]), (1, &[0, 1])]),
            zpoly(2, &[(1, &[1, 0]), (-1, &[0, 1])]),
        ];
        assert_eq!(
            f.substitute(&subs, &r).unwrap(),
            zpoly(2, &[(1, &[2, 0]), (-1, &[0, 2]), (2, &[0, 0])])
        );
        let into_three = [zpoly(3, &[(1, &[0, 0, 1])]), zpoly(3, &[(1, &[1, 0, 0])])];
        assert_eq!(
            f.substitute(&into_three, &r).unwrap(),
            zpoly(3, &[(1, &[1, 0, 1]), (2, &[0, 0, 0])])
        );
    }

    #[test]
    fn mod_evaluator_matches_integer_evaluation() {
        let f = zpoly(2, &[(7, &[3, 1]), (-5, &[0, 2]), (11, &[0, 0])]);
        let ring = ZModRing::new(BigInt::from(9));
        let ev = ModEvaluator::new(&f, &ring);
        for x in -4..5i64 {
            for y in -4..5i64 {
                let pt = [BigInt::from(x), BigInt::from(y)];
                let exact = f.evaluate(&pt, &IntegerRing).unwrap();
                assert_eq!(
                    ev.eval(&pt),
                    crate::ring::mod_floor(&exact, &BigInt::from(9))
                );
            }
        }
    }

    #[test]
    fn compose_rejects_cross_variable_substitution() {
        let r = IntegerRing;
        let f = zpoly(2, &[(1, &[1, 0])]);
        let subs = [zpoly(2, &[(1, &[0, 1])]), zpoly(2, &[(1, &[0, 1])])];
        assert!(f.compose_per_variable(&subs, &r).is_err());
        assert!(f.compose_per_variable(&subs[..1], &r).is_err());
    }

    #[test]
    fn interpolation_examples() {
        let zero = lagrange_interpolate(&[q(0, 1), q(1, 1)], &[q(0, 1), q(0, 1)]).unwrap();
        assert!(zero.is_zero());
        let quad =
            lagrange_interpolate(&[q(0, 1), q(1, 1), q(2, 1)], &[q(0, 1), q(0, 1), q(-2, 1)])
                .unwrap();
        assert_eq!(
            quad.univariate_coeffs(&RationalField).unwrap(),
            vec![q(0, 1), q(1, 1), q(-1, 1)]
        );
        let line = lagrange_interpolate(&[q(0, 1), q(1, 1)], &[q(3, 1), q(5, 1)]).unwrap();
        assert_eq!(
            line.univariate_coeffs(&RationalField).unwrap(),
            vec![q(3, 1), q(2, 1)]
        );
        assert!(matches!(
            lagrange_interpolate(&[q(1, 1), q(1, 1)], &[q(0, 1), q(0, 1)]),
            Err(Error::DuplicatePoint(_))
        ));
    }

    #[test]
    fn map_coefficients_examples() {
        let r = IntegerRing;
        let two = BigInt::from(2);
        let f = zpoly(1, &[(2, &[1]), (3, &[0])]);
        let red = f
            .map_coefficients(&r, |c| Ok(crate::ring::mod_floor(c, &two)))
            .unwrap();
        assert_eq!(red, zpoly(1, &[(1, &[0])]));

        let three = BigInt::from(3);
        let g = zpoly(1, &[(-1, &[2]), (1, &[1])]);
        let red = g
            .map_coefficients(&r, |c| Ok(crate::ring::mod_floor(c, &three)))
            .unwrap();
        assert_eq!(red, zpoly(1, &[(2, &[2]), (1, &[1])]));

        let local = PLocalRing::new(3).unwrap();
        let half_x = MultiPoly::from_terms(
            &local,
            1,
            [(vec![1], local.elem(BigInt::one(), two.clone()).unwrap())],
        )
        .unwrap();
        let red = half_x
            .map_coefficients(&r, |c| local.reduce_mod(c, &three))
            .unwrap();
        assert_eq!(red, zpoly(1, &[(2, &[1])]));
    }

    #[test]
    fn json_round_trip_and_order() {
        let r = RationalField;
        let f = MultiPoly::from_terms(
            &r,
            2,
            [
                (vec![0, 0], q(1, 2)),
                (vec![2, 0], q(-3, 1)),
                (vec![1, 1], q(1, 1)),
            ],
        )
        .unwrap();
        let v = f.to_json(&r);
        assert_eq!(v.to_string(), r#"[["-3",[2,0]],["1",[1,1]],["1/2",[0,0]]]"#);
        assert_eq!(MultiPoly::from_json(&r, 2, &v).unwrap(), f);
    }

    #[test]
    fn fq_json_uses_residue_lists() {
        let f = fq_build(2, 2).unwrap();
        let g = f.generator();
        let p = MultiPoly::from_terms(&f, 1, [(vec![1], g), (vec![0], f.one())]).unwrap();
        let v = p.to_json(&f);
        assert_eq!(v.to_string(), r#"[[[0,1],[1]],["1",[0]]]"#);
        assert_eq!(MultiPoly::from_json(&f, 1, &v).unwrap(), p);
    }
}
