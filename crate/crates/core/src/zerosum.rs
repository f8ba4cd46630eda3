//! Zero-sum problems in finite abelian p-groups and set systems, each paired
//! with the lower bound the polynomial method predicts.

use crate::balls_bins::{min_product, BinProfile};
use crate::error::{guard, Error, Result};
use crate::grid;
use crate::multipoly::MultiPoly;
use crate::report::{CountReport, Verdict};
use crate::ring::{is_prime, mod_floor, PLocalRational, PLocalRing, Ring};
use crate::schanuel_brink::RestrictedBox;
use crate::warning_verify::{grid_bound, integer_point_json, COUNT_GRID_LIMIT};
use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::Value;
use std::collections::{BTreeMap, BTreeSet};

pub const MAX_GROUP_ORDER: u64 = 1 << 14;
pub const DAVENPORT_ORDER_LIMIT: u64 = 256;
pub const DAVENPORT_LOWER_LIMIT: u64 = 13;
/// Search nodes allowed in one Davenport computation.
pub const DAVENPORT_NODE_LIMIT: u64 = 50_000_000;
pub const SUBSET_LENGTH_LIMIT: usize = 24;
pub const UNION_POLY_LIMIT: usize = 16;
pub const EXTREMAL_LENGTH_LIMIT: u64 = 16;
pub const EGZ_CLASSIC_LIMIT: u64 = 5;
/// Multisets allowed in one minimum-over-sequences sweep.
pub const MULTISET_LIMIT: u128 = 5_000_000;

/// `Z/p^{v_1} + ... + Z/p^{v_r}` with `v_1 <= ... <= v_r`.
///
/// An element with components `(c_1, ..., c_r)` has code
/// `c_1 + p^{v_1} (c_2 + p^{v_2} (c_3 + ...))`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GroupSpec {
    p: u64,
    exps: Vec<u32>,
    #[serde(skip)]
    moduli: Vec<u64>,
    #[serde(skip)]
    order: u64,
}

impl GroupSpec {
    pub fn new(p: u64, exps: Vec<u32>) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if exps.is_empty() || exps.contains(&0) {
            return Err(Error::Invalid(
                "group exponents must be positive and nonempty".into(),
            ));
        }
        if exps.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::Invalid(format!(
                "group exponents {exps:?} must be non-decreasing"
            )));
        }
        let mut order: u128 = 1;
        let mut moduli = Vec::with_capacity(exps.len());
        for &v in &exps {
            let m = (p as u128).checked_pow(v).unwrap_or(u128::MAX);
            order = order.saturating_mul(m);
            if order > MAX_GROUP_ORDER as u128 {
                return Err(guard("group order", order, MAX_GROUP_ORDER));
            }
            moduli.push(m as u64);
        }
        Ok(GroupSpec {
            p,
            exps,
            moduli,
            order: order as u64,
        })
    }

    pub fn cyclic(p: u64, v: u32) -> Result<Self> {
        Self::new(p, vec![v])
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    /// `p^{v_i}` for each summand.
    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponent(&self) -> u64 {
        *self.moduli.last().expect("nonempty")
    }

    /// `sum (p^{v_i} - 1)`.
    pub fn rank_excess(&self) -> u64 {
        self.moduli.iter().map(|m| m - 1).sum()
    }

    /// `1 + sum (p^{v_i} - 1)`.
    pub fn davenport_lower(&self) -> u64 {
        1 + self.rank_excess()
    }

    pub fn encode(&self, comps: &[u64]) -> Result<u64> {
        if comps.len() != self.moduli.len() {
            return Err(Error::LengthMismatch {
                expected: self.moduli.len(),
                got: comps.len(),
            });
        }
        let mut code = 0;
        for (&c, &m) in comps.iter().zip(&self.moduli).rev() {
            if c >= m {
                return Err(Error::OutOfRange {
                    what: "group component",
                    detail: format!("{c} >= {m}"),
                });
            }
            code = code * m + c;
        }
        Ok(code)
    }

    pub fn decode(&self, mut code: u64) -> Vec<u64> {
        self.moduli
            .iter()
            .map(|&m| {
                let c = code % m;
                code /= m;
                c
            })
            .collect()
    }

    pub fn check(&self, code: u64) -> Result<u64> {
        if code >= self.order {
            return Err(Error::OutOfRange {
                what: "group element",
                detail: format!("code {code} >= order {}", self.order),
            });
        }
        Ok(code)
    }

    pub fn add(&self, a: u64, b: u64) -> u64 {
        let (mut a, mut b) = (a, b);
        let (mut out, mut scale) = (0, 1);
        for &m in &self.moduli {
            out += ((a % m + b % m) % m) * scale;
            scale *= m;
            a /= m;
            b /= m;
        }
        out
    }

    pub fn neg(&self, a: u64) -> u64 {
        let comps: Vec<u64> = self
            .decode(a)
            .iter()
            .zip(&self.moduli)
            .map(|(&c, &m)| (m - c) % m)
            .collect();
        self.encode(&comps).expect("reduced components")
    }

    /// `a x` for an integer `a`.
    pub fn scale(&self, a: &BigInt, x: u64) -> u64 {
        let k = mod_floor(a, &BigInt::from(self.exponent()))
            .to_u64()
            .expect("below the exponent");
        let comps: Vec<u64> = self
            .decode(x)
            .iter()
            .zip(&self.moduli)
            .map(|(&c, &m)| ((c as u128 * k as u128) % m as u128) as u64)
            .collect();
        self.encode(&comps).expect("reduced components")
    }

    fn addition_table(&self) -> Vec<u16> {
        let n = self.order as usize;
        let mut t = vec![0u16; n * n];
        for a in 0..n {
            for b in 0..n {
                t[a * n + b] = self.add(a as u64, b as u64) as u16;
            }
        }
        t
    }

    pub fn element_json(&self, code: u64) -> Value {
        Value::from(self.decode(code))
    }
}

/// A finite sequence of group elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GSequence {
    group: GroupSpec,
    entries: Vec<u64>,
}

impl GSequence {
    pub fn new(group: GroupSpec, entries: Vec<u64>) -> Result<Self> {
        for &x in &entries {
            group.check(x)?;
        }
        Ok(GSequence { group, entries })
    }

    pub fn from_components(group: GroupSpec, entries: &[Vec<u64>]) -> Result<Self> {
        let codes = entries
            .iter()
            .map(|c| group.encode(c))
            .collect::<Result<Vec<_>>>()?;
        Ok(GSequence {
            group,
            entries: codes,
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DavenportResult {
    #[serde(rename = "D")]
    pub davenport: u64,
    #[serde(rename = "d")]
    pub lower: u64,
    /// Sorted element codes of a longest zero-sum-free sequence.
    pub witness: Vec<u64>,
    pub nodes: u64,
}

/// Bitset of group elements, at most 256 wide.
#[derive(Clone, Copy, Default)]
struct Sums([u64; 4]);

impl Sums {
    fn has(&self, x: usize) -> bool {
        self.0[x >> 6] >> (x & 63) & 1 == 1
    }

    fn set(&mut self, x: usize) {
        self.0[x >> 6] |= 1 << (x & 63);
    }

    fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..4).flat_map(move |w| {
            let mut bits = self.0[w];
            std::iter::from_fn(move || {
                if bits == 0 {
                    return None;
                }
                let b = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(w * 64 + b)
            })
        })
    }
}

struct DavenportSearch<'a> {
    order: usize,
    table: &'a [u16],
    neg: Vec<u16>,
    nodes: u64,
    max_nodes: u64,
    best: Vec<u64>,
    stack: Vec<u64>,
}

impl DavenportSearch<'_> {
    fn extend(&mut self, sums: Sums, from: usize) -> Result<()> {
        if self.stack.len() > self.best.len() {
            self.best = self.stack.clone();
        }
        for x in from..self.order {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                return Err(guard("Davenport search nodes", self.nodes, self.max_nodes));
            }
            // Appending x closes a zero sum exactly when -x is already reachable.
            if sums.has(self.neg[x] as usize) {
                continue;
            }
            let mut next = sums;
            next.set(x);
            for s in sums.iter() {
                next.set(self.table[s * self.order + x] as usize);
            }
            self.stack.push(x as u64);
            self.extend(next, x)?;
            self.stack.pop();
        }
        Ok(())
    }
}

/// Least `D` such that every length-`D` sequence has a nonempty zero-sum subsequence.
///
/// Depth-first search over sorted zero-sum-free sequences, tracking the set of
/// nonempty subsequence sums. The witness is the first longest one found, which
/// is the lexicographically smallest by element codes.
pub fn davenport_constant(group: &GroupSpec) -> Result<DavenportResult> {
    davenport_constant_budgeted(group, DAVENPORT_NODE_LIMIT)
}

/// [`davenport_constant`] with an explicit cap on search nodes.
pub fn davenport_constant_budgeted(group: &GroupSpec, max_nodes: u64) -> Result<DavenportResult> {
    if group.order() > DAVENPORT_ORDER_LIMIT {
        return Err(guard("group order", group.order(), DAVENPORT_ORDER_LIMIT));
    }
    let lower = group.davenport_lower();
    if lower > DAVENPORT_LOWER_LIMIT {
        return Err(guard("d(G)", lower, DAVENPORT_LOWER_LIMIT));
    }
    let table = group.addition_table();
    let mut search = DavenportSearch {
        order: group.order() as usize,
        table: &table,
        neg: (0..group.order()).map(|a| group.neg(a) as u16).collect(),
        nodes: 0,
        max_nodes,
        best: Vec::new(),
        stack: Vec::new(),
    };
    search.extend(Sums::default(), 1)?;
    let davenport = search.best.len() as u64 + 1;
    if davenport < lower || davenport > group.order() {
        return Err(Error::Invalid(format!(
            "search gave D = {davenport} outside [{lower}, {}]",
            group.order()
        )));
    }
    Ok(DavenportResult {
        davenport,
        lower,
        witness: search.best,
        nodes: search.nodes,
    })
}

/// `counts[s]` = number of subsets `J` with `sum_{i in J} x_i = s`.
fn subset_sum_counts(x: &GSequence) -> Vec<u64> {
    let g = &x.group;
    let mut counts = vec![0u64; g.order() as usize];
    counts[0] = 1;
    for &e in &x.entries {
        let mut next = counts.clone();
        for (s, &c) in counts.iter().enumerate() {
            if c > 0 {
                next[g.add(s as u64, e) as usize] += c;
            }
        }
        counts = next;
    }
    counts
}

/// `N_g(x)`: subsets of positions whose entries sum to `g`; the empty set sums to 0.
pub fn gsum_count(x: &GSequence, g: u64) -> Result<u64> {
    x.group.check(g)?;
    if x.len() > SUBSET_LENGTH_LIMIT {
        return Err(guard("sequence length", x.len(), SUBSET_LENGTH_LIMIT));
    }
    Ok(subset_sum_counts(x)[g as usize])
}

/// `N_g(x)` against `2^{n - sum (p^{v_i} - 1)}`.
pub fn ng_bound_report(x: &GSequence, g: u64) -> Result<CountReport> {
    let count = gsum_count(x, g)?;
    let excess = x.group.rank_excess();
    let n = x.len() as u64;
    let bound = if n >= excess {
        BigUint::one() << (n - excess)
    } else {
        BigUint::one()
    };
    Ok(CountReport::new(
        BigUint::from(count),
        bound,
        BigInt::from(excess),
    ))
}

/// Calls `f` on every non-decreasing sequence of length `n` over `0..k`.
fn for_each_multiset<F: FnMut(&[u64])>(k: u64, n: usize, mut f: F) {
    let mut cur = vec![0u64; n];
    loop {
        f(&cur);
        let Some(pos) = (0..n).rev().find(|&i| cur[i] + 1 < k) else {
            return;
        };
        let v = cur[pos] + 1;
        for slot in &mut cur[pos..] {
            *slot = v;
        }
    }
}

fn multiset_count(k: u64, n: usize) -> u128 {
    // C(k + n - 1, n)
    let mut c: u128 = 1;
    for i in 0..n as u128 {
        c = c * (k as u128 + i) / (i + 1);
    }
    c
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MinZeroSumReport {
    pub n: usize,
    #[serde(rename = "D")]
    pub davenport: u64,
    pub minimum: u64,
    pub expected: u64,
    pub pass: bool,
    /// Sorted element codes of a sequence attaining the minimum.
    pub witness: Vec<u64>,
}

/// Minimum of `N_0` over all length-`n` sequences, against `max(1, 2^{n+1-D})`.
pub fn min_zero_sum_report(group: &GroupSpec, n: usize) -> Result<MinZeroSumReport> {
    if n > SUBSET_LENGTH_LIMIT {
        return Err(guard("sequence length", n, SUBSET_LENGTH_LIMIT));
    }
    let total = multiset_count(group.order(), n);
    if total > MULTISET_LIMIT {
        return Err(guard("multisets", total, MULTISET_LIMIT));
    }
    let davenport = davenport_constant(group)?.davenport;
    let mut best: Option<(u64, Vec<u64>)> = None;
    for_each_multiset(group.order(), n, |xs| {
        let seq = GSequence {
            group: group.clone(),
            entries: xs.to_vec(),
        };
        let c = subset_sum_counts(&seq)[0];
        if best.as_ref().is_none_or(|(b, _)| c < *b) {
            best = Some((c, xs.to_vec()));
        }
    });
    let (minimum, witness) = best.expect("at least one multiset");
    let expected = if n as u64 + 1 >= davenport {
        1u64 << (n as u64 + 1 - davenport)
    } else {
        1
    };
    Ok(MinZeroSumReport {
        n,
        davenport,
        minimum,
        expected,
        pass: minimum == expected,
        witness,
    })
}

fn check_weights(x: &GSequence, boxed: &RestrictedBox) -> Result<()> {
    if boxed.prime() != x.group.prime() {
        return Err(Error::PrimeMismatch(
            x.group.prime().to_string(),
            boxed.prime().to_string(),
        ));
    }
    if boxed.nvars() != x.len() {
        return Err(Error::LengthMismatch {
            expected: x.len(),
            got: boxed.nvars(),
        });
    }
    grid::check_grid(boxed.sets(), COUNT_GRID_LIMIT)?;
    Ok(())
}

/// `a x_i` for every weight `a` in `A_i`, in box order.
fn weighted_images(x: &GSequence, boxed: &RestrictedBox) -> Vec<Vec<u64>> {
    boxed
        .sets()
        .iter()
        .zip(&x.entries)
        .map(|(set, &xi)| set.iter().map(|a| x.group.scale(a, xi)).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedCount {
    pub count: u64,
    /// First solution in odometer order.
    pub first: Option<Vec<BigInt>>,
    /// First solution other than the all-zero tuple.
    pub first_nonzero: Option<Vec<BigInt>>,
}

/// `N_{g,A}(x)`: weight tuples `a` in the box with `a_1 x_1 + ... + a_n x_n = g`.
///
/// Counted by dynamic programming over partial sums; witnesses are recovered
/// by walking the suffix table in odometer order.
pub fn generalized_count(x: &GSequence, g: u64, boxed: &RestrictedBox) -> Result<WeightedCount> {
    x.group.check(g)?;
    check_weights(x, boxed)?;
    let group = &x.group;
    let order = group.order() as usize;
    let images = weighted_images(x, boxed);
    let n = x.len();
    // suffix[i][s]: tuples over positions i.. summing to s.
    let mut suffix = vec![vec![0u64; order]; n + 1];
    suffix[n][0] = 1;
    for i in (0..n).rev() {
        let (head, tail) = suffix.split_at_mut(i + 1);
        for (s, &c) in tail[0].iter().enumerate() {
            if c == 0 {
                continue;
            }
            for &img in &images[i] {
                head[i][group.add(s as u64, img) as usize] += c;
            }
        }
    }
    let zero_idx: Vec<Option<usize>> = boxed
        .sets()
        .iter()
        .map(|s| s.iter().position(|a| a.is_zero()))
        .collect();
    // zero_tail[i]: the all-zero tuple exists on positions i..
    let mut zero_tail = vec![true; n + 1];
    for i in (0..n).rev() {
        zero_tail[i] = zero_tail[i + 1] && zero_idx[i].is_some();
    }
    let walk = |skip_zero: bool| -> Option<Vec<BigInt>> {
        let mut need = g;
        let mut all_zero = true;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let mut chosen = None;
            for (k, &img) in images[i].iter().enumerate() {
                let rest = group.add(need, group.neg(img));
                let mut ways = suffix[i + 1][rest as usize];
                let stays_zero = all_zero && Some(k) == zero_idx[i];
                if skip_zero && stays_zero && rest == 0 && zero_tail[i + 1] {
                    ways -= 1;
                }
                if ways > 0 {
                    chosen = Some((k, rest, stays_zero));
                    break;
                }
            }
            let (k, rest, stays_zero) = chosen?;
            out.push(boxed.sets()[i][k].clone());
            need = rest;
            all_zero = stays_zero;
        }
        Some(out)
    };
    let count = suffix[0][g as usize];
    Ok(WeightedCount {
        count,
        first: if count > 0 { walk(false) } else { None },
        first_nonzero: walk(true),
    })
}

/// `N_{g,A}(x)` against `m(#A; sum #A - sum (p^{v_i} - 1))`.
pub fn generalized_report(x: &GSequence, g: u64, boxed: &RestrictedBox) -> Result<CountReport> {
    let counted = generalized_count(x, g, boxed)?;
    let excess = BigInt::from(x.group.rank_excess());
    let bound = grid_bound(&boxed.sizes(), &excess)?;
    let mut report = CountReport::new(BigUint::from(counted.count), bound, excess);
    if let Some(a) = counted.first {
        report = report.with_witness(integer_point_json(&a));
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WeightedNonUniqueReport {
    pub count: u64,
    pub hypothesis: bool,
    pub box_contains_zero: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nonzero_witness: Option<Value>,
}

/// With `sum (#A_i - 1) > sum (p^{v_j} - 1)`: the zero-sum count is not 1, and
/// a nonzero solution exists when every `A_i` contains 0.
pub fn generalized_nonunique_report(
    x: &GSequence,
    boxed: &RestrictedBox,
) -> Result<WeightedNonUniqueReport> {
    let counted = generalized_count(x, 0, boxed)?;
    let spare: u64 = boxed.sizes().iter().map(|s| s - 1).sum();
    let hypothesis = spare > x.group.rank_excess();
    let has_zero = boxed.sets().iter().all(|s| s.iter().any(Zero::is_zero));
    let verdict = if !hypothesis {
        Verdict::NotApplicable
    } else if counted.count == 1 || (has_zero && counted.first_nonzero.is_none()) {
        Verdict::Violated
    } else if counted.count == 0 {
        Verdict::Vacuous
    } else {
        Verdict::Holds
    };
    Ok(WeightedNonUniqueReport {
        count: counted.count,
        hypothesis,
        box_contains_zero: has_zero,
        verdict,
        nonzero_witness: counted.first_nonzero.map(|a| integer_point_json(&a)),
    })
}

/// A box of weights with `0` in every coordinate set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightBox(RestrictedBox);

impl WeightBox {
    pub fn new(boxed: RestrictedBox) -> Result<Self> {
        if let Some(i) = boxed
            .sets()
            .iter()
            .position(|s| !s.iter().any(Zero::is_zero))
        {
            return Err(Error::Invalid(format!("weight set {} lacks 0", i + 1)));
        }
        Ok(WeightBox(boxed))
    }

    pub fn inner(&self) -> &RestrictedBox {
        &self.0
    }

    /// `max #A_i`.
    pub fn max_size(&self) -> u64 {
        self.0.sizes().into_iter().max().unwrap_or(1)
    }
}

/// `C_A(t) = 1 - prod_{a in A, a != 0} (a - t)/a`: 0 at 0 and 1 on the rest of `A`.
pub fn indicator_poly(set: &[BigInt], ring: &PLocalRing) -> Result<MultiPoly<PLocalRational>> {
    if !set.iter().any(Zero::is_zero) {
        return Err(Error::Invalid("indicator set must contain 0".into()));
    }
    RestrictedBox::new(ring.prime(), vec![set.to_vec()])?;
    let one = MultiPoly::constant(ring, ring.one(), 1);
    let t = MultiPoly::var(ring, 0, 1);
    let mut prod = one.clone();
    for a in set.iter().filter(|a| !a.is_zero()) {
        let inv = ring.elem(BigInt::one(), a.clone())?;
        let ac = MultiPoly::constant(ring, ring.from_int(a), 1);
        let factor = ac.sub(&t, ring)?.scale(&inv, ring);
        prod = prod.mul(&factor, ring)?;
    }
    let c = one.sub(&prod, ring)?;
    for (_, coeff) in c.terms() {
        ring.check(coeff)?;
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EgzReport {
    #[serde(flatten)]
    pub report: CountReport,
    pub k: u32,
    /// Whether `sum C_{A_i}(a_i) = 0 mod p^k` matched `p^k | #support` on every tuple.
    pub indicator_cross_check: bool,
}

/// Weight tuples with `sum a_i x_i = g` whose support size is divisible by `p^k`,
/// against `m(#A; sum #A - sum (p^{v_i} - 1) - (a_M - 1)(p^k - 1))`.
pub fn egz_report(x: &GSequence, weights: &WeightBox, k: u32, g: u64) -> Result<EgzReport> {
    let boxed = weights.inner();
    x.group.check(g)?;
    check_weights(x, boxed)?;
    if k == 0 {
        return Err(Error::OutOfRange {
            what: "k",
            detail: "must be positive".into(),
        });
    }
    let p = x.group.prime();
    let pk = (p as u128)
        .checked_pow(k)
        .filter(|&v| v <= u64::MAX as u128)
        .ok_or_else(|| guard("p^k", k, 64))? as u64;
    let pk_big = BigInt::from(pk);
    let ring = PLocalRing::new(p)?;
    let images = weighted_images(x, boxed);
    // Per coordinate: (weight index, C_{A_i}(a) mod p^k, a != 0).
    let mut marks: Vec<Vec<(u64, u64, bool)>> = Vec::with_capacity(x.len());
    for (i, set) in boxed.sets().iter().enumerate() {
        let c = indicator_poly(set, &ring)?;
        let mut row = Vec::with_capacity(set.len());
        for (j, a) in set.iter().enumerate() {
            let val = c.evaluate(&[ring.from_int(a)], &ring)?;
            let residue = ring.reduce_mod(&val, &pk_big)?.to_u64().expect("below p^k");
            row.push((images[i][j], residue, !a.is_zero()));
        }
        marks.push(row);
    }
    let idx_axes: Vec<Vec<usize>> = marks.iter().map(|row| (0..row.len()).collect()).collect();
    let group = &x.group;
    #[derive(Default)]
    struct Tally {
        count: u64,
        first: Option<Vec<usize>>,
        disagree: bool,
    }
    let tally = grid::sweep(
        &idx_axes,
        Tally::default,
        |acc, _, point| {
            let mut sum = 0u64;
            let mut support = 0u64;
            let mut cval = 0u64;
            for (row, &j) in marks.iter().zip(point) {
                let (img, c, nz) = row[j];
                sum = group.add(sum, img);
                support += nz as u64;
                cval = (cval + c) % pk;
            }
            let divisible = support.is_multiple_of(pk);
            if divisible != (cval == 0) {
                acc.disagree = true;
            }
            if divisible && sum == g {
                acc.count += 1;
                if acc.first.is_none() {
                    acc.first = Some(point.to_vec());
                }
            }
        },
        |a, b| Tally {
            count: a.count + b.count,
            first: a.first.or(b.first),
            disagree: a.disagree || b.disagree,
        },
    );
    let sizes = boxed.sizes();
    let budget =
        BigInt::from(group.rank_excess()) + BigInt::from(weights.max_size() - 1) * (pk - 1);
    let bound = grid_bound(&sizes, &budget)?;
    let mut report = CountReport::new(BigUint::from(tally.count), bound, budget);
    if let Some(pt) = tally.first {
        let a: Vec<BigInt> = pt
            .iter()
            .zip(boxed.sets())
            .map(|(&j, s)| s[j].clone())
            .collect();
        report = report.with_witness(integer_point_json(&a));
    }
    Ok(EgzReport {
        report,
        k,
        indicator_cross_check: !tally.disagree,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EgzClassicReport {
    pub m: u64,
    pub multisets_checked: u64,
    pub all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub first_failure: Option<Vec<u64>>,
    /// `(0^{m-1}, 1^{m-1})` has no zero-sum subsequence of length `m`.
    pub extremal_has_none: bool,
}

/// Whether some `m` entries of `xs` sum to 0 mod `m`.
fn has_zero_sum_of_length(xs: &[u64], m: u64) -> bool {
    let m_us = m as usize;
    // reach[len][s]
    let mut reach = vec![vec![false; m_us]; m_us + 1];
    reach[0][0] = true;
    for &x in xs {
        for len in (0..m_us).rev() {
            for s in 0..m_us {
                if reach[len][s] {
                    reach[len + 1][(s + x as usize) % m_us] = true;
                }
            }
        }
    }
    reach[m_us][0]
}

/// Every length `2m - 1` sequence in `Z/m` has `m` terms summing to 0; checked over all multisets.
pub fn egz_classic_verify(m: u64) -> Result<EgzClassicReport> {
    if m == 0 || m > EGZ_CLASSIC_LIMIT {
        return Err(Error::OutOfRange {
            what: "modulus m",
            detail: format!("{m}, allowed 1..={EGZ_CLASSIC_LIMIT}"),
        });
    }
    let mut checked = 0u64;
    let mut failure = None;
    for_each_multiset(m, (2 * m - 1) as usize, |xs| {
        checked += 1;
        if failure.is_none() && !has_zero_sum_of_length(xs, m) {
            failure = Some(xs.to_vec());
        }
    });
    let extremal: Vec<u64> = std::iter::repeat_n(0, m as usize - 1)
        .chain(std::iter::repeat_n(1 % m, m as usize - 1))
        .collect();
    Ok(EgzClassicReport {
        m,
        multisets_checked: checked,
        all_pass: failure.is_none(),
        first_failure: failure,
        extremal_has_none: m == 1 || !has_zero_sum_of_length(&extremal, m),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DagsReport {
    #[serde(flatten)]
    pub report: CountReport,
    pub hypothesis: bool,
    /// A zero-sum weight tuple other than the all-zero one exists.
    pub nonempty_exists: bool,
}

/// Equal weight sets `A` with `a = #A`, `k = v_r`, `g = 0`, under
/// `n >= exp G - 1 + D/(a - 1)`: the count is at least
/// `(R + 1) a^{n + 1 - exp G + floor((1 - D)/(a - 1))}` and at least 2.
pub fn dags_report(x: &GSequence, weights: &WeightBox) -> Result<DagsReport> {
    let boxed = weights.inner();
    let sets = boxed.sets();
    if sets.windows(2).any(|w| {
        let a: BTreeSet<&BigInt> = w[0].iter().collect();
        let b: BTreeSet<&BigInt> = w[1].iter().collect();
        a != b
    }) {
        return Err(Error::Invalid("weight sets must all be equal".into()));
    }
    let group = &x.group;
    let k = *group.exps().last().expect("nonempty");
    let egz = egz_report(x, weights, k, 0)?;
    let n = x.len() as i64;
    let a = weights.max_size() as i64;
    let dg = group.davenport_lower() as i64;
    let expg = group.exponent() as i64;
    let hypothesis = a >= 2 && (n - expg + 1) * (a - 1) >= dg;
    let count = egz.report.count.clone();
    let nonempty = count > BigUint::one();
    let mut report = egz.report;
    if hypothesis {
        let r = (-(dg - 1)).rem_euclid(a - 1);
        let e = n + 1 - expg + (1 - dg).div_euclid(a - 1);
        report.bound = BigUint::from((r + 1) as u64) * BigUint::from(a as u64).pow(e as u32);
        let balls = n * a - (dg - 1) - (a - 1) * (expg - 1);
        let profile = BinProfile::uniform(a as u64, x.len())?;
        report = report.with_specialization("m_form", min_product(&profile, balls));
        report.verdict = if nonempty {
            Verdict::judge(&count, &report.bound)
        } else {
            Verdict::Violated
        };
    } else {
        report.verdict = Verdict::NotApplicable;
    }
    Ok(DagsReport {
        report,
        hypothesis,
        nonempty_exists: nonempty,
    })
}

/// `F_1, ..., F_n`, finite sets of atoms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SetSystem {
    sets: Vec<BTreeSet<u64>>,
}

impl SetSystem {
    pub fn new(sets: Vec<BTreeSet<u64>>) -> Self {
        SetSystem { sets }
    }

    pub fn from_lists(lists: &[Vec<u64>]) -> Self {
        SetSystem::new(lists.iter().map(|l| l.iter().copied().collect()).collect())
    }

    pub fn sets(&self) -> &[BTreeSet<u64>] {
        &self.sets
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    /// The largest number of member sets sharing one atom.
    pub fn max_degree(&self) -> u64 {
        let mut hits: BTreeMap<u64, u64> = BTreeMap::new();
        for s in &self.sets {
            for &a in s {
                *hits.entry(a).or_default() += 1;
            }
        }
        hits.values().copied().max().unwrap_or(0)
    }

    /// `#(F_j : x_j = 1)` union.
    pub fn union_size(&self, chosen: &[bool]) -> usize {
        let mut u = BTreeSet::new();
        for (s, &c) in self.sets.iter().zip(chosen) {
            if c {
                u.extend(s.iter().copied());
            }
        }
        u.len()
    }
}

/// Inclusion-exclusion polynomial `h` with `h(x) = #(union of F_j over x_j = 1)` on `{0,1}^n`.
pub fn union_poly(system: &SetSystem) -> Result<MultiPoly<BigInt>> {
    let n = system.len();
    if n > UNION_POLY_LIMIT {
        return Err(guard("set system length", n, UNION_POLY_LIMIT));
    }
    let z = crate::ring::IntegerRing;
    let mut terms: Vec<(Vec<u32>, BigInt)> = Vec::new();
    // Depth-first over nonempty J, carrying the running intersection.
    fn walk(
        sets: &[BTreeSet<u64>],
        start: usize,
        exps: &mut Vec<u32>,
        inter: &BTreeSet<u64>,
        size: usize,
        terms: &mut Vec<(Vec<u32>, BigInt)>,
    ) {
        for j in start..sets.len() {
            let next: BTreeSet<u64> = if size == 0 {
                sets[j].clone()
            } else {
                inter.intersection(&sets[j]).copied().collect()
            };
            if next.is_empty() {
                continue;
            }
            exps[j] = 1;
            let sign = if size.is_multiple_of(2) { 1 } else { -1 };
            terms.push((exps.clone(), BigInt::from(sign * next.len() as i64)));
            walk(sets, j + 1, exps, &next, size + 1, terms);
            exps[j] = 0;
        }
    }
    walk(
        &system.sets,
        0,
        &mut vec![0; n],
        &BTreeSet::new(),
        0,
        &mut terms,
    );
    MultiPoly::from_terms(&z, n, terms)
}

/// Compares `h(x)` with the direct union size at every point of `{0,1}^n`.
pub fn union_poly_check(system: &SetSystem, h: &MultiPoly<BigInt>) -> bool {
    let n = system.len();
    let axes = vec![vec![BigInt::zero(), BigInt::one()]; n];
    let bad = grid::count_where(&axes, |x| {
        let chosen: Vec<bool> = x.iter().map(|b| b.is_one()).collect();
        h.evaluate(x, &crate::ring::IntegerRing).expect("arity")
            != BigInt::from(system.union_size(&chosen))
    });
    bad.count == 0
}

/// `m = p^v` with `p` prime, if it is one.
pub fn prime_power(m: u64) -> Option<(u64, u32)> {
    if m < 2 {
        return None;
    }
    let p = (2..=m).find(|d| m.is_multiple_of(*d))?;
    let (mut rest, mut v) = (m, 0);
    while rest % p == 0 {
        rest /= p;
        v += 1;
    }
    (rest == 1).then_some((p, v))
}

/// `N_F(m, g)`: subsets `J` (the empty one included) with `#(union F_J) = g mod m`.
pub fn setsystem_count(system: &SetSystem, m: u64, g: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::OutOfRange {
            what: "modulus m",
            detail: "must be positive".into(),
        });
    }
    let n = system.len();
    if n > SUBSET_LENGTH_LIMIT {
        return Err(guard("set system length", n, SUBSET_LENGTH_LIMIT));
    }
    let atoms: BTreeSet<u64> = system.sets.iter().flatten().copied().collect();
    let index: BTreeMap<u64, usize> = atoms.iter().enumerate().map(|(i, &a)| (a, i)).collect();
    let dense: Vec<Vec<usize>> = system
        .sets
        .iter()
        .map(|s| s.iter().map(|a| index[a]).collect())
        .collect();
    struct Walk<'a> {
        dense: &'a [Vec<usize>],
        mult: Vec<u32>,
        size: u64,
        m: u64,
        g: u64,
        count: u64,
    }
    impl Walk<'_> {
        fn go(&mut self, j: usize) {
            if j == self.dense.len() {
                if self.size % self.m == self.g % self.m {
                    self.count += 1;
                }
                return;
            }
            self.go(j + 1);
            for &a in &self.dense[j] {
                self.mult[a] += 1;
                if self.mult[a] == 1 {
                    self.size += 1;
                }
            }
            self.go(j + 1);
            for &a in &self.dense[j] {
                self.mult[a] -= 1;
                if self.mult[a] == 0 {
                    self.size -= 1;
                }
            }
        }
    }
    let mut w = Walk {
        dense: &dense,
        mult: vec![0; atoms.len()],
        size: 0,
        m,
        g,
        count: 0,
    };
    w.go(0);
    Ok(w.count)
}

/// `N_F(m, g)` with the bound `2^{n - d(p^v - 1)}` when `m = p^v`; otherwise
/// the verdict is NOT_APPLICABLE.
pub fn setsystem_report(system: &SetSystem, m: u64, g: u64) -> Result<CountReport> {
    let count = BigUint::from(setsystem_count(system, m, g)?);
    let d = system.max_degree();
    let n = system.len() as u64;
    match prime_power(m) {
        Some(_) => {
            let budget = d * (m - 1);
            let bound = if n >= budget {
                BigUint::one() << (n - budget)
            } else {
                BigUint::one()
            };
            Ok(CountReport::new(count, bound, BigInt::from(budget)))
        }
        None => {
            let mut r = CountReport::new(count, BigUint::one(), BigInt::zero());
            r.verdict = Verdict::NotApplicable;
            Ok(r)
        }
    }
}

/// `d(m - 1)` sets `A_ij + {v_i}` (`1 <= i < m`, `1 <= j <= d`) with disjoint
/// blocks `A_ij` of size `m`: every nonempty union has size `!= 0 mod m`.
pub fn extremal_setsystem(d: u64, m: u64) -> Result<SetSystem> {
    if d == 0 || m == 0 {
        return Err(Error::OutOfRange {
            what: "extremal parameters",
            detail: format!("d = {d}, m = {m}; both must be positive"),
        });
    }
    let n = d * (m - 1);
    if n > EXTREMAL_LENGTH_LIMIT {
        return Err(guard("d(m - 1)", n, EXTREMAL_LENGTH_LIMIT));
    }
    let markers_start = n * m;
    let mut sets = Vec::with_capacity(n as usize);
    let mut next = 0u64;
    for i in 0..m - 1 {
        for _ in 0..d {
            let mut s: BTreeSet<u64> = (next..next + m).collect();
            next += m;
            s.insert(markers_start + i);
            sets.push(s);
        }
    }
    Ok(SetSystem::new(sets))
}
