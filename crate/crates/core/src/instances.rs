//! Seeded random instances. Every generator takes a 64-bit seed and is fully
//! determined by it, so a reported seed reproduces the instance exactly.

use crate::error::Result;
use crate::multipoly::MultiPoly;
use crate::ring::{FqElem, FqField, IntegerRing};
use crate::schanuel_brink::RestrictedBox;
use crate::warning_verify::{CongruenceSystem, FqSystem};
use crate::zerosum::{GSequence, GroupSpec, SetSystem, WeightBox};
use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeSet;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn random_exponents<R: Rng>(rng: &mut R, nvars: usize, degree: u32) -> Vec<u32> {
    let mut e = vec![0u32; nvars];
    if nvars > 0 {
        for _ in 0..degree {
            e[rng.gen_range(0..nvars)] += 1;
        }
    }
    e
}

/// Up to `max_terms` terms of total degree at most `max_degree`, coefficients in `[-c, c]`.
pub fn random_integer_poly<R: Rng>(
    rng: &mut R,
    nvars: usize,
    max_degree: u32,
    max_terms: usize,
    c: i64,
) -> MultiPoly<BigInt> {
    let count = rng.gen_range(1..=max_terms.max(1));
    let terms: Vec<(Vec<u32>, BigInt)> = (0..count)
        .map(|_| {
            let d = rng.gen_range(0..=max_degree);
            (
                random_exponents(rng, nvars, d),
                BigInt::from(rng.gen_range(-c..=c)),
            )
        })
        .collect();
    MultiPoly::from_terms(&IntegerRing, nvars, terms).expect("arity matches")
}

/// Like [`random_integer_poly`] over a finite field.
pub fn random_fq_poly<R: Rng>(
    rng: &mut R,
    field: &FqField,
    nvars: usize,
    max_degree: u32,
    max_terms: usize,
) -> MultiPoly<FqElem> {
    let count = rng.gen_range(1..=max_terms.max(1));
    let terms: Vec<(Vec<u32>, FqElem)> = (0..count)
        .map(|_| {
            let d = rng.gen_range(0..=max_degree);
            let c = field
                .elem(rng.gen_range(0..field.order()))
                .expect("in range");
            (random_exponents(rng, nvars, d), c)
        })
        .collect();
    MultiPoly::from_terms(field, nvars, terms).expect("arity matches")
}

/// `n` sets of at most `max_size` pairwise incongruent integers, each a residue
/// plus `p k` for `|k| <= lift`. With `zero` set, every set contains 0.
pub fn random_box<R: Rng>(
    rng: &mut R,
    p: u64,
    n: usize,
    max_size: u64,
    lift: i64,
    zero: bool,
) -> Result<RestrictedBox> {
    let cap = max_size.clamp(1, p);
    let mut sets = Vec::with_capacity(n);
    for _ in 0..n {
        let size = rng.gen_range(1..=cap) as usize;
        let mut residues: Vec<u64> = if zero {
            (1..p).collect()
        } else {
            (0..p).collect()
        };
        residues.shuffle(rng);
        let mut set: Vec<BigInt> = Vec::with_capacity(size);
        if zero {
            set.push(BigInt::from(0));
        }
        for r in residues.into_iter().take(size - set.len()) {
            let k = rng.gen_range(-lift..=lift);
            set.push(BigInt::from(r as i64 + p as i64 * k));
        }
        set.shuffle(rng);
        sets.push(set);
    }
    RestrictedBox::new(p, sets)
}

#[derive(Debug, Clone)]
pub struct CongruenceParams {
    pub primes: Vec<u64>,
    pub max_nvars: usize,
    pub max_polys: usize,
    pub max_exp: u32,
    pub max_degree: u32,
    pub max_terms: usize,
    pub coeff: i64,
    pub lift: i64,
}

impl Default for CongruenceParams {
    fn default() -> Self {
        CongruenceParams {
            primes: vec![2, 3],
            max_nvars: 4,
            max_polys: 2,
            max_exp: 2,
            max_degree: 2,
            max_terms: 4,
            coeff: 6,
            lift: 2,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CongruenceInstance {
    pub seed: u64,
    pub system: CongruenceSystem,
    pub boxed: RestrictedBox,
}

pub fn congruence_instance(seed: u64, params: &CongruenceParams) -> Result<CongruenceInstance> {
    let mut rng = rng(seed);
    let p = *params.primes.choose(&mut rng).expect("nonempty prime list");
    let n = rng.gen_range(1..=params.max_nvars);
    let r = rng.gen_range(1..=params.max_polys);
    let polys = (0..r)
        .map(|_| {
            random_integer_poly(
                &mut rng,
                n,
                params.max_degree,
                params.max_terms,
                params.coeff,
            )
        })
        .collect();
    let exps = (0..r).map(|_| rng.gen_range(1..=params.max_exp)).collect();
    let system = CongruenceSystem::new(p, polys, exps)?;
    let boxed = random_box(&mut rng, p, n, p, params.lift, false)?;
    Ok(CongruenceInstance {
        seed,
        system,
        boxed,
    })
}

#[derive(Debug, Clone)]
pub struct FqInstance {
    pub seed: u64,
    pub system: FqSystem,
    pub axes: Vec<Vec<FqElem>>,
}

/// A system over `field` on a random grid (or the full grid).
pub fn fq_instance(
    seed: u64,
    field: &FqField,
    max_nvars: usize,
    max_polys: usize,
    max_degree: u32,
    max_terms: usize,
    full_grid: bool,
) -> Result<FqInstance> {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=max_nvars);
    let r = rng.gen_range(1..=max_polys);
    let polys = (0..r)
        .map(|_| random_fq_poly(&mut rng, field, n, max_degree, max_terms))
        .collect();
    let system = FqSystem::new(field.clone(), polys)?;
    let axes = if full_grid {
        system.full_grid()
    } else {
        (0..n)
            .map(|_| {
                let mut all: Vec<FqElem> = field.elements().collect();
                all.shuffle(&mut rng);
                let k = rng.gen_range(1..=all.len());
                all.truncate(k);
                all
            })
            .collect()
    };
    Ok(FqInstance { seed, system, axes })
}

/// A p-group of order at most `max_order` (which must be at least 2).
pub fn random_group<R: Rng>(rng: &mut R, primes: &[u64], max_order: u64) -> Result<GroupSpec> {
    let usable: Vec<u64> = primes.iter().copied().filter(|&p| p <= max_order).collect();
    let p = *usable.choose(rng).expect("some prime fits the order cap");
    let mut exps = Vec::new();
    let mut order = 1u64;
    loop {
        let room = (max_order / order).ilog(p);
        if room == 0 || (!exps.is_empty() && rng.gen_bool(0.4)) {
            break;
        }
        let v = rng.gen_range(1..=room);
        exps.push(v);
        order *= p.pow(v);
    }
    exps.sort_unstable();
    GroupSpec::new(p, exps)
}

#[derive(Debug, Clone)]
pub struct WeightedInstance {
    pub seed: u64,
    pub sequence: GSequence,
    pub weights: WeightBox,
    pub target: u64,
}

/// A sequence of length at most `max_len` with a weight box containing 0.
/// With `equal`, every coordinate gets the same weight set.
pub fn weighted_instance(
    seed: u64,
    max_order: u64,
    max_len: usize,
    max_box: u64,
    equal: bool,
) -> Result<WeightedInstance> {
    let mut rng = rng(seed);
    let group = random_group(&mut rng, &[2, 3, 5], max_order)?;
    let n = rng.gen_range(1..=max_len);
    let entries: Vec<u64> = (0..n).map(|_| rng.gen_range(0..group.order())).collect();
    let p = group.prime();
    let boxed = if equal {
        let one = random_box(&mut rng, p, 1, max_box, 1, true)?;
        RestrictedBox::new(p, vec![one.sets()[0].clone(); n])?
    } else {
        random_box(&mut rng, p, n, max_box, 1, true)?
    };
    let target = if rng.gen_bool(0.5) {
        0
    } else {
        rng.gen_range(0..group.order())
    };
    Ok(WeightedInstance {
        seed,
        sequence: GSequence::new(group, entries)?,
        weights: WeightBox::new(boxed)?,
        target,
    })
}

/// A set system of length at most `max_len` and maximal degree at most `max_degree`
/// over `atoms` atoms: each atom joins a random set of at most `max_degree` members.
pub fn set_system(seed: u64, max_len: usize, max_degree: usize, atoms: u64) -> SetSystem {
    let mut rng = rng(seed);
    let n = rng.gen_range(1..=max_len);
    let mut sets = vec![BTreeSet::new(); n];
    let members: Vec<usize> = (0..n).collect();
    for atom in 0..atoms {
        let k = rng.gen_range(0..=max_degree.min(n));
        for &j in members.choose_multiple(&mut rng, k) {
            sets[j].insert(atom);
        }
    }
    SetSystem::new(sets)
}
