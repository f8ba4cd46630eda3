//! The Schanuel-Brink operator over the integers localized at `p`.
//!
//! For a box `A = A_1 x ... x A_n` of integers, pairwise incongruent mod `p`
//! within each `A_i`, we build `tau_i` (degree `< p`) interpolating
//! `(a - a^p)/p` on `A_i` and `sigma_i(x) = x^p + p tau_i(x)`. Then
//!
//! ```text
//! Delta f = (f^p - f(sigma_1(t_1), ..., sigma_n(t_n))) / p
//! ```
//!
//! and on box points `f(a) = 0 mod p^v` iff `Delta^i f (a) = 0 mod p` for all `i < v`.

use crate::error::{guard, Error, Result};
use crate::grid;
use crate::multipoly::{lagrange_interpolate, Degree, ModEvaluator, MultiPoly};
use crate::ring::{mod_floor, IntegerRing, PLocalRational, PLocalRing, Ring, ZModRing};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

pub const MAX_DELTA_ITERATIONS: usize = 4;
pub const EQUIV_GRID_LIMIT: u128 = 1_000_000;

/// Per-variable value sets, pairwise incongruent modulo `p`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestrictedBox {
    p: u64,
    sets: Vec<Vec<BigInt>>,
}

impl RestrictedBox {
    pub fn new(p: u64, sets: Vec<Vec<BigInt>>) -> Result<Self> {
        if !crate::ring::is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        let pb = BigInt::from(p);
        for (i, set) in sets.iter().enumerate() {
            if set.is_empty() {
                return Err(Error::Invalid(format!("A_{} is empty", i + 1)));
            }
            let mut residues: Vec<BigInt> = set.iter().map(|a| mod_floor(a, &pb)).collect();
            residues.sort();
            if residues.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::IncongruenceViolated(format!(
                    "A_{} = {:?} has two elements congruent mod {p}",
                    i + 1,
                    set.iter().map(ToString::to_string).collect::<Vec<_>>()
                )));
            }
        }
        Ok(RestrictedBox { p, sets })
    }

    pub fn from_i64(p: u64, sets: &[Vec<i64>]) -> Result<Self> {
        Self::new(
            p,
            sets.iter()
                .map(|s| s.iter().map(|&a| BigInt::from(a)).collect())
                .collect(),
        )
    }

    /// The same set in every coordinate.
    pub fn uniform(p: u64, set: &[i64], n: usize) -> Result<Self> {
        Self::from_i64(p, &vec![set.to_vec(); n])
    }

    /// `{0, 1}^n`; requires no prime beyond `p >= 2`.
    pub fn boolean(p: u64, n: usize) -> Result<Self> {
        Self::uniform(p, &[0, 1], n)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn sets(&self) -> &[Vec<BigInt>] {
        &self.sets
    }

    pub fn nvars(&self) -> usize {
        self.sets.len()
    }

    pub fn sizes(&self) -> Vec<u64> {
        self.sets.iter().map(|s| s.len() as u64).collect()
    }

    pub fn grid_size(&self) -> u128 {
        grid::grid_size(&self.sets)
    }

    pub fn is_boolean(&self) -> bool {
        self.sets.iter().all(|s| {
            let mut v = s.clone();
            v.sort();
            v == [BigInt::zero(), BigInt::one()]
        })
    }
}

/// `tau_i`, `sigma_i` for one box, with every structural invariant checked.
#[derive(Debug, Clone)]
pub struct SBContext {
    boxed: RestrictedBox,
    ring: PLocalRing,
    taus: Vec<MultiPoly<PLocalRational>>,
    sigmas: Vec<MultiPoly<PLocalRational>>,
    /// `sigma_i` as a polynomial in slot `i` of `n` variables.
    sigma_subs: Vec<MultiPoly<PLocalRational>>,
}

impl SBContext {
    pub fn restricted_box(&self) -> &RestrictedBox {
        &self.boxed
    }

    pub fn ring(&self) -> &PLocalRing {
        &self.ring
    }

    pub fn prime(&self) -> u64 {
        self.boxed.p
    }

    pub fn nvars(&self) -> usize {
        self.boxed.nvars()
    }

    /// Univariate `tau_i`.
    pub fn taus(&self) -> &[MultiPoly<PLocalRational>] {
        &self.taus
    }

    /// Univariate `sigma_i`.
    pub fn sigmas(&self) -> &[MultiPoly<PLocalRational>] {
        &self.sigmas
    }
}

pub fn build_context(boxed: &RestrictedBox) -> Result<SBContext> {
    let p = boxed.p;
    let ring = PLocalRing::new(p)?;
    let pb = BigInt::from(p);
    let n = boxed.nvars();
    let mut taus = Vec::with_capacity(n);
    let mut sigmas = Vec::with_capacity(n);
    let mut sigma_subs = Vec::with_capacity(n);
    let x_to_p = MultiPoly::from_terms(&ring, 1, [(vec![p as u32], ring.one())])?;
    for (i, set) in boxed.sets.iter().enumerate() {
        let points: Vec<BigRational> = set
            .iter()
            .map(|a| BigRational::from_integer(a.clone()))
            .collect();
        let values: Vec<BigRational> = set
            .iter()
            .map(|a| {
                let diff = a - num_traits::pow(a.clone(), p as usize);
                BigRational::new(diff, pb.clone())
            })
            .collect();
        let tau_q = lagrange_interpolate(&points, &values)?;
        let tau = tau_q.map_coefficients(&ring, |c| {
            ring.from_rational(c).map_err(|_| {
                Error::IncongruenceViolated(format!(
                    "tau_{} coefficient {c} is not p-integral",
                    i + 1
                ))
            })
        })?;
        if tau.total_degree() >= Degree::Finite(p) {
            return Err(Error::IncongruenceViolated(format!(
                "deg tau_{} = {} is not below p",
                i + 1,
                tau.total_degree()
            )));
        }
        let sigma = x_to_p.add(&tau.scale(&ring.from_int(&pb), &ring), &ring)?;
        verify_sigma(&ring, &sigma, &x_to_p, set, i)?;
        sigma_subs.push(sigma.embed_univariate(i, n)?);
        taus.push(tau);
        sigmas.push(sigma);
    }
    Ok(SBContext {
        boxed: boxed.clone(),
        ring,
        taus,
        sigmas,
        sigma_subs,
    })
}

fn verify_sigma(
    ring: &PLocalRing,
    sigma: &MultiPoly<PLocalRational>,
    x_to_p: &MultiPoly<PLocalRational>,
    set: &[BigInt],
    i: usize,
) -> Result<()> {
    let p = ring.prime();
    let fail = |what: String| {
        Err(Error::IncongruenceViolated(format!(
            "sigma_{}: {what}",
            i + 1
        )))
    };
    if sigma.total_degree() != Degree::Finite(p) {
        return fail(format!("degree {} != {p}", sigma.total_degree()));
    }
    for a in set {
        let at = sigma.evaluate(&[ring.from_int(a)], ring)?;
        if at != ring.from_int(a) {
            return fail(format!("sigma({a}) = {at}"));
        }
    }
    let diff = sigma.sub(x_to_p, ring)?;
    let pb = BigInt::from(p);
    for (_, c) in diff.terms() {
        if !ring.reduce_mod(c, &pb)?.is_zero() {
            return fail(format!("coefficient {c} of sigma - x^p is nonzero mod p"));
        }
    }
    Ok(())
}

/// Lifts an integer polynomial into the p-local coefficient ring.
pub fn lift_integer_poly(f: &MultiPoly<BigInt>, ring: &PLocalRing) -> MultiPoly<PLocalRational> {
    f.map_coefficients(ring, |c| Ok(ring.from_int(c)))
        .expect("integers are p-local")
}

/// Reduces p-local coefficients modulo `m` (a power of `p`).
pub fn reduce_poly(
    f: &MultiPoly<PLocalRational>,
    ring: &PLocalRing,
    m: &BigInt,
) -> Result<MultiPoly<BigInt>> {
    f.map_coefficients(&IntegerRing, |c| ring.reduce_mod(c, m))
}

/// `Delta f = (f^p - f(sigma)) / p`.
pub fn delta(f: &MultiPoly<PLocalRational>, ctx: &SBContext) -> Result<MultiPoly<PLocalRational>> {
    if f.nvars() != ctx.nvars() {
        return Err(Error::LengthMismatch {
            expected: ctx.nvars(),
            got: f.nvars(),
        });
    }
    let ring = &ctx.ring;
    let p = ctx.prime();
    let numerator = f
        .pow(p, ring)
        .sub(&f.compose_per_variable(&ctx.sigma_subs, ring)?, ring)?;
    let mut terms = Vec::with_capacity(numerator.len());
    for (m, c) in numerator.terms() {
        terms.push((m.exponents().to_vec(), ring.div_by_p(c)?));
    }
    let out = MultiPoly::from_terms(ring, f.nvars(), terms)?;
    if let (Some(d), Some(df)) = (f.total_degree().finite(), out.total_degree().finite()) {
        if df > p * d {
            return Err(Error::Invalid(format!(
                "deg delta(f) = {df} exceeds p * deg f = {}",
                p * d
            )));
        }
    }
    Ok(out)
}

/// `Delta^i f`, for `i <= 4`.
pub fn delta_power(
    f: &MultiPoly<PLocalRational>,
    ctx: &SBContext,
    i: usize,
) -> Result<MultiPoly<PLocalRational>> {
    Ok(delta_iterates(f, ctx, i + 1)?
        .pop()
        .expect("at least f itself"))
}

/// `[f, Delta f, ..., Delta^{count-1} f]`.
pub fn delta_iterates(
    f: &MultiPoly<PLocalRational>,
    ctx: &SBContext,
    count: usize,
) -> Result<Vec<MultiPoly<PLocalRational>>> {
    if count > MAX_DELTA_ITERATIONS + 1 {
        return Err(guard("delta iterations", count - 1, MAX_DELTA_ITERATIONS));
    }
    let mut out = vec![f.clone()];
    while out.len() < count {
        let next = delta(out.last().unwrap(), ctx)?;
        out.push(next);
    }
    Ok(out)
}

/// `Delta` applied to a constant.
pub fn delta_constant(c: &PLocalRational, ring: &PLocalRing) -> Result<PLocalRational> {
    let numer = ring.sub(&ring.pow(c, ring.prime()), c);
    ring.div_by_p(&numer)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EquivReport {
    pub p: u64,
    pub v: u32,
    pub points: u64,
    /// Box points with `f(a) = 0 mod p^v`.
    pub solutions: u64,
    pub pass: bool,
    /// First box point (odometer order) where the two sides disagree.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub counterexample: Option<Vec<String>>,
}

/// Checks `f(a) = 0 mod p^v  <=>  Delta^i f (a) = 0 mod p for all i < v` on every box point.
pub fn congruence_equiv_check(
    f: &MultiPoly<PLocalRational>,
    ctx: &SBContext,
    v: u32,
) -> Result<EquivReport> {
    if v == 0 || v as usize > MAX_DELTA_ITERATIONS {
        return Err(Error::OutOfRange {
            what: "exponent v",
            detail: format!("{v}, allowed 1..={MAX_DELTA_ITERATIONS}"),
        });
    }
    let points = grid::check_grid(ctx.boxed.sets(), EQUIV_GRID_LIMIT)?;
    let ring = &ctx.ring;
    let p = BigInt::from(ctx.prime());
    let pv = num_traits::pow(p.clone(), v as usize);
    let iterates = delta_iterates(f, ctx, v as usize)?;
    let lhs_ring = ZModRing::new(pv.clone());
    let rhs_ring = ZModRing::new(p.clone());
    let lhs = ModEvaluator::new(&reduce_poly(f, ring, &pv)?, &lhs_ring);
    let rhs: Vec<ModEvaluator> = iterates
        .iter()
        .map(|g| Ok(ModEvaluator::new(&reduce_poly(g, ring, &p)?, &rhs_ring)))
        .collect::<Result<_>>()?;
    let tally = grid::sweep(
        ctx.boxed.sets(),
        || (0u64, None::<Vec<BigInt>>),
        |acc, _, a| {
            let left = lhs.eval(a).is_zero();
            let right = rhs.iter().all(|g| g.eval(a).is_zero());
            if left {
                acc.0 += 1;
            }
            if left != right && acc.1.is_none() {
                acc.1 = Some(a.to_vec());
            }
        },
        |a, b| (a.0 + b.0, a.1.or(b.1)),
    );
    Ok(EquivReport {
        p: ctx.prime(),
        v,
        points,
        solutions: tally.0,
        pass: tally.1.is_none(),
        counterexample: tally
            .1
            .map(|pt| pt.iter().map(ToString::to_string).collect()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::p_valuation;

    fn zpoly(nvars: usize, terms: &[(i64, &[u32])]) -> MultiPoly<BigInt> {
        MultiPoly::from_terms(
            &IntegerRing,
            nvars,
            terms.iter().map(|(c, e)| (e.to_vec(), BigInt::from(*c))),
        )
        .unwrap()
    }

    fn local_coeffs(f: &MultiPoly<PLocalRational>, ring: &PLocalRing) -> Vec<BigRational> {
        f.univariate_coeffs(ring)
            .unwrap()
            .iter()
            .map(PLocalRational::to_rational)
            .collect()
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter()
            .map(|&c| BigRational::from_integer(BigInt::from(c)))
            .collect()
    }

    #[test]
    fn context_examples() {
        let ctx = build_context(&RestrictedBox::uniform(2, &[0, 1], 1).unwrap()).unwrap();
        assert!(ctx.taus()[0].is_zero());
        assert_eq!(local_coeffs(&ctx.sigmas()[0], ctx.ring()), ints(&[0, 0, 1]));

        let ctx = build_context(&RestrictedBox::uniform(3, &[0, 1, 2], 1).unwrap()).unwrap();
        assert_eq!(local_coeffs(&ctx.taus()[0], ctx.ring()), ints(&[0, 1, -1]));
        assert_eq!(
            local_coeffs(&ctx.sigmas()[0], ctx.ring()),
            ints(&[0, 3, -3, 1])
        );

        let ctx = build_context(&RestrictedBox::uniform(3, &[0, 1], 1).unwrap()).unwrap();
        assert!(ctx.taus()[0].is_zero());
        assert_eq!(
            local_coeffs(&ctx.sigmas()[0], ctx.ring()),
            ints(&[0, 0, 0, 1])
        );
    }

    #[test]
    fn tau_interpolates_on_partial_box() {
        let ctx = build_context(&RestrictedBox::uniform(5, &[0, 1, 3], 1).unwrap()).unwrap();
        let tau = &ctx.taus()[0];
        for &a in &[0i64, 1, 3] {
            let a = BigInt::from(a);
            let expect = (&a - num_traits::pow(a.clone(), 5)) / BigInt::from(5);
            assert_eq!(
                tau.evaluate(&[ctx.ring().from_int(&a)], ctx.ring())
                    .unwrap(),
                ctx.ring().from_int(&expect)
            );
        }
    }

    #[test]
    fn box_validation() {
        assert!(matches!(
            RestrictedBox::from_i64(3, &[vec![0, 3]]),
            Err(Error::IncongruenceViolated(_))
        ));
        assert!(RestrictedBox::from_i64(3, &[vec![]]).is_err());
        assert!(matches!(
            RestrictedBox::from_i64(6, &[vec![0]]),
            Err(Error::NotPrime(_))
        ));
        assert!(RestrictedBox::from_i64(5, &[vec![-1, 0, 1, 7, 8]]).is_ok());
    }

    #[test]
    fn delta_examples() {
        let ctx = build_context(&RestrictedBox::boolean(2, 2).unwrap()).unwrap();
        let ring = ctx.ring().clone();
        let f = lift_integer_poly(&zpoly(2, &[(1, &[1, 0]), (1, &[0, 1])]), &ring);
        let df = delta(&f, &ctx).unwrap();
        assert_eq!(df, lift_integer_poly(&zpoly(2, &[(1, &[1, 1])]), &ring));
        assert_eq!(delta_power(&f, &ctx, 1).unwrap(), df);
        assert_eq!(delta_power(&f, &ctx, 0).unwrap(), f);
        assert!(delta(&MultiPoly::zero(2), &ctx).unwrap().is_zero());
        assert!(matches!(delta_power(&f, &ctx, 5), Err(Error::Guard { .. })));
    }

    #[test]
    fn delta_of_constants() {
        let ctx = build_context(&RestrictedBox::uniform(3, &[0, 1, 2], 2).unwrap()).unwrap();
        let ring = ctx.ring().clone();
        let three = MultiPoly::constant(&ring, ring.from_int(&BigInt::from(3)), 2);
        let d = delta(&three, &ctx).unwrap();
        assert_eq!(d.constant_term(), Some(&ring.from_int(&BigInt::from(8))));
        assert_eq!(
            delta_constant(&ring.from_int(&BigInt::from(3)), &ring).unwrap(),
            ring.from_int(&BigInt::from(8))
        );
    }

    #[test]
    fn constant_valuation_drops_by_one() {
        for p in [2u64, 3, 5] {
            let ring = PLocalRing::new(p).unwrap();
            let pb = BigInt::from(p);
            for c in [pb.clone(), &pb * &pb, BigInt::from(2) * &pb * &pb * &pb] {
                let mut x = ring.from_int(&c);
                let mut v = p_valuation(&x, p).unwrap();
                while v > 0 {
                    x = delta_constant(&x, &ring).unwrap();
                    let next = p_valuation(&x, p).unwrap();
                    assert_eq!(next, v - 1);
                    v = next;
                }
            }
        }
    }

    #[test]
    fn equivalence_examples() {
        let ctx = build_context(&RestrictedBox::boolean(2, 2).unwrap()).unwrap();
        let f = lift_integer_poly(&zpoly(2, &[(1, &[1, 0]), (1, &[0, 1])]), ctx.ring());
        let rep = congruence_equiv_check(&f, &ctx, 2).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.solutions, 1);
        assert_eq!(rep.points, 4);
        let rep = congruence_equiv_check(&f, &ctx, 1).unwrap();
        assert!(rep.pass);
        assert_eq!(rep.solutions, 2);
        assert!(congruence_equiv_check(&f, &ctx, 0).is_err());
        assert!(congruence_equiv_check(&f, &ctx, 5).is_err());
    }
}
