//! Exhaustive zero counting for polynomial systems on restricted grids, and
//! the lower-bound checks built on top of it.
//!
//! Two flavours of system are supported: integer polynomials read modulo
//! `p^{v_j}` on boxes of pairwise incongruent integers, and polynomials over
//! a finite field `F_q` on arbitrary product grids.

use crate::balls_bins::{min_product, BinProfile};
use crate::error::{guard, Error, Result};
use crate::grid::{self, GridCount};
use crate::multipoly::{CoeffCodec, ModEvaluator, MultiPoly};
use crate::report::{bigint_json, CountReport, Verdict};
use crate::ring::{FqElem, FqField, IntegerRing, Ring, ZModRing};
use crate::schanuel_brink::{
    delta_iterates, lift_integer_poly, reduce_poly, RestrictedBox, SBContext, MAX_DELTA_ITERATIONS,
};
use num_bigint::{BigInt, BigUint};
use num_integer::binomial;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use serde_json::Value;

pub const COUNT_GRID_LIMIT: u128 = 10_000_000;
/// Cap on `sum v_j` accepted by [`delta_reduce_system`].
pub const MAX_EXPONENT_SUM: u32 = 8;
/// Cap on `(q - 1) * sum deg P_j` accepted by [`chevalley_indicator`].
pub const INDICATOR_DEGREE_LIMIT: u64 = 64;
/// Cap on `sum b_i` accepted by [`schanuel_box_expand`].
pub const SPLIT_CAP_LIMIT: u64 = 20;

/// `P_j = 0 mod p^{v_j}` for integer polynomials `P_1..P_r` in a common set of variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CongruenceSystem {
    p: u64,
    polys: Vec<MultiPoly<BigInt>>,
    exps: Vec<u32>,
}

impl CongruenceSystem {
    pub fn new(p: u64, polys: Vec<MultiPoly<BigInt>>, exps: Vec<u32>) -> Result<Self> {
        if !crate::ring::is_prime(p) {
            return Err(Error::NotPrime(p.to_string()));
        }
        if polys.is_empty() {
            return Err(Error::Invalid(
                "a system needs at least one polynomial".into(),
            ));
        }
        if polys.len() != exps.len() {
            return Err(Error::LengthMismatch {
                expected: polys.len(),
                got: exps.len(),
            });
        }
        if let Some(&v) = exps.iter().find(|&&v| v == 0) {
            return Err(Error::OutOfRange {
                what: "congruence exponent",
                detail: format!("{v}, must be positive"),
            });
        }
        check_common_arity(polys.iter().map(|f| f.nvars()))?;
        Ok(CongruenceSystem { p, polys, exps })
    }

    /// A single congruence `f = 0 mod p^v`.
    pub fn single(p: u64, f: MultiPoly<BigInt>, v: u32) -> Result<Self> {
        Self::new(p, vec![f], vec![v])
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn polys(&self) -> &[MultiPoly<BigInt>] {
        &self.polys
    }

    pub fn exps(&self) -> &[u32] {
        &self.exps
    }

    pub fn nvars(&self) -> usize {
        self.polys[0].nvars()
    }

    pub fn moduli(&self) -> Vec<BigInt> {
        self.exps
            .iter()
            .map(|&v| num_traits::pow(BigInt::from(self.p), v as usize))
            .collect()
    }

    /// `sum_j (p^{v_j} - 1) deg P_j`, with the zero polynomial counted as degree 0.
    pub fn degree_budget(&self) -> BigInt {
        self.moduli()
            .iter()
            .zip(&self.polys)
            .map(|(m, f)| (m - 1u32) * f.total_degree().or_zero())
            .sum()
    }

    /// `sum_j (p^{v_j} - 1)/(p - 1) deg P_j`.
    pub fn weighted_degree(&self) -> BigInt {
        self.degree_budget() / (self.p - 1)
    }
}

/// `P_j = 0` over a finite field.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FqSystem {
    field: FqField,
    polys: Vec<MultiPoly<FqElem>>,
}

impl FqSystem {
    pub fn new(field: FqField, polys: Vec<MultiPoly<FqElem>>) -> Result<Self> {
        if polys.is_empty() {
            return Err(Error::Invalid(
                "a system needs at least one polynomial".into(),
            ));
        }
        check_common_arity(polys.iter().map(|f| f.nvars()))?;
        Ok(FqSystem { field, polys })
    }

    pub fn field(&self) -> &FqField {
        &self.field
    }

    pub fn polys(&self) -> &[MultiPoly<FqElem>] {
        &self.polys
    }

    pub fn nvars(&self) -> usize {
        self.polys[0].nvars()
    }

    pub fn degree_sum(&self) -> u64 {
        self.polys.iter().map(|f| f.total_degree().or_zero()).sum()
    }

    /// `(q - 1) sum_j deg P_j`.
    pub fn degree_budget(&self) -> BigInt {
        BigInt::from(self.field.order() - 1) * self.degree_sum()
    }

    /// The whole of `F_q^n` as a grid.
    pub fn full_grid(&self) -> Vec<Vec<FqElem>> {
        vec![self.field.elements().collect(); self.nvars()]
    }
}

fn check_common_arity(arities: impl IntoIterator<Item = usize>) -> Result<()> {
    let mut it = arities.into_iter();
    let n = it.next().unwrap_or(0);
    match it.find(|&k| k != n) {
        Some(got) => Err(Error::LengthMismatch { expected: n, got }),
        None => Ok(()),
    }
}

fn check_arity(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::LengthMismatch { expected, got });
    }
    Ok(())
}

/// Verifies that every axis is a nonempty set of distinct field elements.
pub fn check_fq_grid(field: &FqField, axes: &[Vec<FqElem>]) -> Result<()> {
    for (i, axis) in axes.iter().enumerate() {
        if axis.is_empty() {
            return Err(Error::Invalid(format!("grid axis {} is empty", i + 1)));
        }
        let mut codes: Vec<u64> = axis.iter().map(|a| a.code()).collect();
        if let Some(&c) = codes.iter().find(|&&c| c >= field.order()) {
            return Err(Error::OutOfRange {
                what: "field element code",
                detail: format!("{c} >= q = {}", field.order()),
            });
        }
        codes.sort_unstable();
        if codes.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::DuplicatePoint(format!(
                "repeated element on axis {}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// A field polynomial flattened for repeated evaluation.
struct FqEvaluator {
    terms: Vec<(FqElem, Vec<(usize, u64)>)>,
}

impl FqEvaluator {
    fn new(f: &MultiPoly<FqElem>) -> Self {
        let terms = f
            .terms()
            .map(|(m, &c)| {
                let vars = m
                    .exponents()
                    .iter()
                    .enumerate()
                    .filter(|(_, &e)| e > 0)
                    .map(|(i, &e)| (i, e as u64))
                    .collect();
                (c, vars)
            })
            .collect();
        FqEvaluator { terms }
    }

    fn eval(&self, field: &FqField, point: &[FqElem]) -> FqElem {
        let mut acc = field.zero();
        for (c, vars) in &self.terms {
            let mut t = *c;
            for &(i, e) in vars {
                t = field.mul(&t, &field.pow(&point[i], e));
            }
            acc = field.add(&acc, &t);
        }
        acc
    }
}

fn check_box_for(sys: &CongruenceSystem, boxed: &RestrictedBox) -> Result<()> {
    if boxed.prime() != sys.prime() {
        return Err(Error::PrimeMismatch(
            sys.prime().to_string(),
            boxed.prime().to_string(),
        ));
    }
    check_arity(sys.nvars(), boxed.nvars())
}

fn solve_box(sys: &CongruenceSystem, boxed: &RestrictedBox) -> Result<GridCount<BigInt>> {
    check_box_for(sys, boxed)?;
    grid::check_grid(boxed.sets(), COUNT_GRID_LIMIT)?;
    let evaluators: Vec<ModEvaluator> = sys
        .polys
        .iter()
        .zip(sys.moduli())
        .map(|(f, m)| ModEvaluator::new(f, &ZModRing::new(m)))
        .collect();
    Ok(grid::count_where(boxed.sets(), |x| {
        evaluators.iter().all(|e| e.eval(x).is_zero())
    }))
}

fn solve_fq(sys: &FqSystem, axes: &[Vec<FqElem>]) -> Result<GridCount<FqElem>> {
    check_arity(sys.nvars(), axes.len())?;
    check_fq_grid(&sys.field, axes)?;
    grid::check_grid(axes, COUNT_GRID_LIMIT)?;
    let evaluators: Vec<FqEvaluator> = sys.polys.iter().map(FqEvaluator::new).collect();
    let field = &sys.field;
    Ok(grid::count_where(axes, |x| {
        evaluators.iter().all(|e| e.eval(field, x).code() == 0)
    }))
}

/// Number of box points solving every congruence of the system.
pub fn count_zeros_box(sys: &CongruenceSystem, boxed: &RestrictedBox) -> Result<u64> {
    Ok(solve_box(sys, boxed)?.count)
}

/// Number of grid points where every polynomial of the system vanishes.
pub fn count_zeros_fq(sys: &FqSystem, axes: &[Vec<FqElem>]) -> Result<u64> {
    Ok(solve_fq(sys, axes)?.count)
}

pub fn integer_point_json(x: &[BigInt]) -> Value {
    Value::Array(x.iter().map(bigint_json).collect())
}

pub fn fq_point_json(field: &FqField, x: &[FqElem]) -> Value {
    Value::Array(x.iter().map(|a| field.encode(a)).collect())
}

/// `m(sizes; sum sizes - budget)`.
pub fn grid_bound(sizes: &[u64], budget: &BigInt) -> Result<BigUint> {
    let profile = BinProfile::new(sizes)?;
    let total: u64 = sizes.iter().sum();
    let balls = BigInt::from(total) - budget;
    // Outside [n, total] the minimum is constant, so clamp into i64 range.
    let balls = balls.to_i64().unwrap_or(if balls.is_negative() {
        -1
    } else {
        total as i64 + 1
    });
    Ok(min_product(&profile, balls))
}

fn power_if_nonnegative(base: u64, n: usize, minus: &BigInt) -> Option<BigUint> {
    let e = BigInt::from(n) - minus;
    let e = e.to_u32().filter(|_| !e.is_negative())?;
    Some(BigUint::from(base).pow(e))
}

/// Count, the bound `m(#A; sum #A - sum (p^{v_j} - 1) deg P_j)` and the verdict.
pub fn rvw2_report_box(sys: &CongruenceSystem, boxed: &RestrictedBox) -> Result<CountReport> {
    let solved = solve_box(sys, boxed)?;
    let sizes = boxed.sizes();
    let budget = sys.degree_budget();
    let bound = grid_bound(&sizes, &budget)?;
    let mut report = CountReport::new(BigUint::from(solved.count), bound, budget.clone());
    let n = boxed.nvars();
    if sizes.iter().all(|&s| s == sys.prime()) {
        if let Some(v) = power_if_nonnegative(sys.prime(), n, &sys.weighted_degree()) {
            report = report.with_specialization("full_grid", v);
        }
    }
    if boxed.is_boolean() {
        if let Some(v) = power_if_nonnegative(2, n, &budget) {
            report = report.with_specialization("boolean", v);
        }
    }
    if let Some(x) = solved.first {
        report = report.with_witness(integer_point_json(&x));
    }
    Ok(report)
}

fn is_boolean_grid(axes: &[Vec<FqElem>]) -> bool {
    axes.iter().all(|a| {
        let mut codes: Vec<u64> = a.iter().map(|x| x.code()).collect();
        codes.sort_unstable();
        codes == [0, 1]
    })
}

/// The field analogue of [`rvw2_report_box`], with budget `(q - 1) sum deg P_j`.
pub fn rvw2_report_fq(sys: &FqSystem, axes: &[Vec<FqElem>]) -> Result<CountReport> {
    let solved = solve_fq(sys, axes)?;
    let sizes: Vec<u64> = axes.iter().map(|a| a.len() as u64).collect();
    let budget = sys.degree_budget();
    let bound = grid_bound(&sizes, &budget)?;
    let mut report = CountReport::new(BigUint::from(solved.count), bound, budget.clone());
    let q = sys.field.order();
    let n = axes.len();
    if sizes.iter().all(|&s| s == q) {
        if let Some(v) = power_if_nonnegative(q, n, &BigInt::from(sys.degree_sum())) {
            report = report.with_specialization("full_grid", v);
        }
    }
    if is_boolean_grid(axes) {
        if let Some(v) = power_if_nonnegative(2, n, &budget) {
            report = report.with_specialization("boolean", v);
        }
    }
    if let Some(x) = solved.first {
        report = report.with_witness(fq_point_json(&sys.field, &x));
    }
    Ok(report)
}

/// A count report for a statement with a degree hypothesis.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HypothesisReport {
    #[serde(flatten)]
    pub report: CountReport,
    pub hypothesis: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p_divides_count: Option<bool>,
}

impl HypothesisReport {
    fn gated(mut report: CountReport, hypothesis: bool) -> Self {
        if !hypothesis {
            report.verdict = Verdict::NotApplicable;
        }
        HypothesisReport {
            report,
            hypothesis,
            p_divides_count: None,
        }
    }

    pub fn verdict(&self) -> Verdict {
        self.report.verdict
    }
}

/// On the full grid `F_q^n` with `d = sum deg P_j < n`: `z = 0` or `z >= q^{n-d}`, and `p | z`.
pub fn warning2_report(sys: &FqSystem) -> Result<HypothesisReport> {
    let axes = sys.full_grid();
    let solved = solve_fq(sys, &axes)?;
    let n = sys.nvars() as u64;
    let d = sys.degree_sum();
    let hypothesis = d < n;
    let q = sys.field.order();
    let bound = if hypothesis {
        BigUint::from(q).pow((n - d) as u32)
    } else {
        BigUint::one()
    };
    let count = BigUint::from(solved.count);
    let divides = solved.count % sys.field.characteristic() == 0;
    let mut report = CountReport::new(count, bound, sys.degree_budget());
    if let Some(x) = solved.first {
        report = report.with_witness(fq_point_json(&sys.field, &x));
    }
    let mut out = HypothesisReport::gated(report, hypothesis);
    if hypothesis && !divides {
        out.report.verdict = Verdict::Violated;
    }
    out.p_divides_count = Some(divides);
    Ok(out)
}

fn excess_capacity(sizes: &[u64]) -> BigInt {
    sizes.iter().map(|&s| BigInt::from(s - 1)).sum()
}

/// Restricted Chevalley: `(q - 1) sum deg P_j < sum (#A_i - 1)` forces `z != 1`.
pub fn restricted_chevalley_report(
    sys: &FqSystem,
    axes: &[Vec<FqElem>],
) -> Result<HypothesisReport> {
    let solved = solve_fq(sys, axes)?;
    let sizes: Vec<u64> = axes.iter().map(|a| a.len() as u64).collect();
    let budget = sys.degree_budget();
    let hypothesis = budget < excess_capacity(&sizes);
    let mut report = CountReport::new(BigUint::from(solved.count), BigUint::from(2u32), budget);
    if let Some(x) = solved.first {
        report = report.with_witness(fq_point_json(&sys.field, &x));
    }
    Ok(HypothesisReport::gated(report, hypothesis))
}

/// `sum (p^{v_j} - 1) deg P_j < sum (#A_i - 1)` forces `z != 1` on an integer box.
pub fn brink_report(sys: &CongruenceSystem, boxed: &RestrictedBox) -> Result<HypothesisReport> {
    let solved = solve_box(sys, boxed)?;
    let budget = sys.degree_budget();
    let hypothesis = budget < excess_capacity(&boxed.sizes());
    let mut report = CountReport::new(BigUint::from(solved.count), BigUint::from(2u32), budget);
    if let Some(x) = solved.first {
        report = report.with_witness(integer_point_json(&x));
    }
    Ok(HypothesisReport::gated(report, hypothesis))
}

/// Replaces each `P_j = 0 mod p^{v_j}` by `Delta^i P_j = 0 mod p` for `i < v_j`.
pub fn delta_reduce_system(sys: &CongruenceSystem, ctx: &SBContext) -> Result<CongruenceSystem> {
    if ctx.prime() != sys.prime() {
        return Err(Error::PrimeMismatch(
            sys.prime().to_string(),
            ctx.prime().to_string(),
        ));
    }
    check_arity(sys.nvars(), ctx.nvars())?;
    let total: u32 = sys.exps.iter().sum();
    if total > MAX_EXPONENT_SUM {
        return Err(guard("sum of exponents", total, MAX_EXPONENT_SUM));
    }
    if sys.exps.iter().all(|&v| v == 1) {
        return Ok(sys.clone());
    }
    if let Some(&v) = sys
        .exps
        .iter()
        .find(|&&v| v as usize > MAX_DELTA_ITERATIONS + 1)
    {
        return Err(guard("congruence exponent", v, MAX_DELTA_ITERATIONS + 1));
    }
    let ring = ctx.ring();
    let p = BigInt::from(sys.prime());
    let mut polys = Vec::with_capacity(total as usize);
    for (f, &v) in sys.polys.iter().zip(&sys.exps) {
        for g in delta_iterates(&lift_integer_poly(f, ring), ctx, v as usize)? {
            polys.push(reduce_poly(&g, ring, &p)?);
        }
    }
    let exps = vec![1; polys.len()];
    CongruenceSystem::new(sys.prime(), polys, exps)
}

/// Nonzero count `u` of `f` on the grid with bound `m(#A; sum #A - deg f)`.
pub fn alon_furedi_report(
    f: &MultiPoly<FqElem>,
    field: &FqField,
    axes: &[Vec<FqElem>],
) -> Result<CountReport> {
    check_arity(f.nvars(), axes.len())?;
    check_fq_grid(field, axes)?;
    grid::check_grid(axes, COUNT_GRID_LIMIT)?;
    let ev = FqEvaluator::new(f);
    let found = grid::count_where(axes, |x| ev.eval(field, x).code() != 0);
    let sizes: Vec<u64> = axes.iter().map(|a| a.len() as u64).collect();
    let degree = BigInt::from(f.total_degree().or_zero());
    let bound = grid_bound(&sizes, &degree)?;
    let mut report = CountReport::new(BigUint::from(found.count), bound, degree);
    if let Some(x) = found.first {
        report = report.with_witness(fq_point_json(field, &x));
    }
    Ok(report)
}

/// [`alon_furedi_report`] for an integer polynomial read over `F_p` on an integer box.
pub fn alon_furedi_report_mod_p(
    f: &MultiPoly<BigInt>,
    boxed: &RestrictedBox,
) -> Result<CountReport> {
    let field = FqField::new(boxed.prime(), 1)?;
    let to_field = |c: &BigInt| -> Result<FqElem> {
        let r = crate::ring::mod_floor(c, &BigInt::from(boxed.prime()));
        field.elem(r.to_u64().expect("residue below p"))
    };
    let reduced = f.map_coefficients(&field, to_field)?;
    let axes: Vec<Vec<FqElem>> = boxed
        .sets()
        .iter()
        .map(|s| s.iter().map(to_field).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    alon_furedi_report(&reduced, &field, &axes)
}

/// `prod_j (1 - P_j^{q-1})`, nonzero exactly on the common zeros.
pub fn chevalley_indicator(sys: &FqSystem) -> Result<MultiPoly<FqElem>> {
    let field = &sys.field;
    let q1 = field.order() - 1;
    let degree = q1.saturating_mul(sys.degree_sum());
    if degree > INDICATOR_DEGREE_LIMIT {
        return Err(guard("indicator degree", degree, INDICATOR_DEGREE_LIMIT));
    }
    let n = sys.nvars();
    let one = MultiPoly::constant(field, field.one(), n);
    let mut out = one.clone();
    for f in &sys.polys {
        let factor = one.sub(&f.pow(q1, field), field)?;
        out = out.mul(&factor, field)?;
    }
    Ok(out)
}

/// Outcome of one existence claim checked by enumeration.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExistenceCheck {
    pub hypothesis: bool,
    /// False when the search grid exceeded the guard and was skipped.
    pub searched: bool,
    pub verdict: Verdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Value>,
}

impl ExistenceCheck {
    fn new(hypothesis: bool, witness: Option<Vec<BigInt>>) -> Self {
        let verdict = match (hypothesis, &witness) {
            (false, _) => Verdict::NotApplicable,
            (true, Some(_)) => Verdict::Holds,
            (true, None) => Verdict::Violated,
        };
        ExistenceCheck {
            hypothesis,
            searched: true,
            verdict,
            witness: witness.map(|x| integer_point_json(&x)),
        }
    }

    fn skipped(hypothesis: bool) -> Self {
        ExistenceCheck {
            hypothesis,
            searched: false,
            verdict: Verdict::NotApplicable,
            witness: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitReport {
    pub p: u64,
    pub caps: Vec<u64>,
    #[serde(serialize_with = "crate::report::serialize_bigint")]
    pub degree_budget: BigInt,
    #[serde(serialize_with = "crate::report::serialize_bigint")]
    pub weighted_degree: BigInt,
    /// Solutions in `prod [0, b_i]`.
    pub box_solutions: u64,
    /// `sum over those solutions of prod C(b_i, x_i)`.
    #[serde(serialize_with = "crate::report::serialize_biguint")]
    pub weighted_box_count: BigUint,
    /// Solutions of the split system on `{0,1}^{sum b_i}`.
    #[serde(serialize_with = "crate::report::serialize_biguint")]
    pub split_boolean_count: BigUint,
    pub cross_check: bool,
    /// A solution outside `(pZ)^n`, searched modulo the largest `p^{v_j}`.
    pub primitive: ExistenceCheck,
    /// A nonzero solution in `{0,1}^n`.
    pub boolean: ExistenceCheck,
    /// A nonzero solution in `prod [0, b_i]`.
    pub capped: ExistenceCheck,
    /// First solution in `prod [0, b_i]` outside `(pZ)^n`, reported for information.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capped_outside_pz: Option<Value>,
}

impl SplitReport {
    pub fn violated(&self) -> bool {
        !self.cross_check
            || [&self.primitive, &self.boolean, &self.capped]
                .iter()
                .any(|c| c.verdict.is_violation())
    }
}

#[derive(Debug, Clone)]
pub struct SplitExpansion {
    /// The system after `t_i -> sum_k t_{i,k}^{p-1}`, in `sum b_i` variables.
    pub system: CongruenceSystem,
    pub report: SplitReport,
}

fn integer_axes(ranges: &[u64]) -> Vec<Vec<BigInt>> {
    ranges
        .iter()
        .map(|&b| (0..=b).map(BigInt::from).collect())
        .collect()
}

/// Splits each variable into `b_i` copies and checks the existence statements by enumeration.
pub fn schanuel_box_expand(sys: &CongruenceSystem, caps: &[u64]) -> Result<SplitExpansion> {
    let n = sys.nvars();
    check_arity(n, caps.len())?;
    if caps.contains(&0) {
        return Err(Error::OutOfRange {
            what: "cap",
            detail: "caps must be positive".into(),
        });
    }
    for (f, m) in sys.polys.iter().zip(sys.moduli()) {
        if let Some(c) = f.constant_term() {
            if !crate::ring::mod_floor(c, &m).is_zero() {
                return Err(Error::ConstantTerm);
            }
        }
    }
    let total: u64 = caps.iter().sum();
    if total > SPLIT_CAP_LIMIT {
        return Err(guard("sum of caps", total, SPLIT_CAP_LIMIT));
    }
    let p = sys.prime();
    let z = IntegerRing;
    let width = total as usize;
    let mut subs = Vec::with_capacity(n);
    let mut offset = 0usize;
    for &b in caps {
        let mut s = MultiPoly::zero(width);
        for k in 0..b as usize {
            let t = MultiPoly::var(&z, offset + k, width).pow(p - 1, &z);
            s = s.add(&t, &z)?;
        }
        subs.push(s);
        offset += b as usize;
    }
    let polys = sys
        .polys
        .iter()
        .map(|f| f.substitute(&subs, &z))
        .collect::<Result<Vec<_>>>()?;
    let split = CongruenceSystem::new(p, polys, sys.exps.clone())?;

    let evaluators: Vec<ModEvaluator> = sys
        .polys
        .iter()
        .zip(sys.moduli())
        .map(|(f, m)| ModEvaluator::new(f, &ZModRing::new(m)))
        .collect();
    let solves = |x: &[BigInt]| evaluators.iter().all(|e| e.eval(x).is_zero());
    let p_big = BigInt::from(p);
    let outside_pz = |x: &[BigInt]| x.iter().any(|c| !(c % &p_big).is_zero());

    #[derive(Default)]
    struct Tally {
        count: u64,
        weighted: BigUint,
        nonzero: Option<Vec<BigInt>>,
        primitive: Option<Vec<BigInt>>,
    }
    let capped_axes = integer_axes(caps);
    grid::check_grid(&capped_axes, COUNT_GRID_LIMIT)?;
    let tally = grid::sweep(
        &capped_axes,
        Tally::default,
        |acc, _, x| {
            if !solves(x) {
                return;
            }
            acc.count += 1;
            acc.weighted += x
                .iter()
                .zip(caps)
                .map(|(xi, &b)| binomial(BigUint::from(b), xi.to_biguint().expect("nonnegative")))
                .product::<BigUint>();
            if acc.nonzero.is_none() && x.iter().any(|c| !c.is_zero()) {
                acc.nonzero = Some(x.to_vec());
            }
            if acc.primitive.is_none() && outside_pz(x) {
                acc.primitive = Some(x.to_vec());
            }
        },
        |a, b| Tally {
            count: a.count + b.count,
            weighted: a.weighted + b.weighted,
            nonzero: a.nonzero.or(b.nonzero),
            primitive: a.primitive.or(b.primitive),
        },
    );

    let split_boolean = RestrictedBox::boolean(p, width)?;
    let split_count = count_zeros_box(&split, &split_boolean)?;

    let budget = sys.degree_budget();
    let weighted_degree = sys.weighted_degree();

    let boolean_axes = integer_axes(&vec![1; n]);
    let boolean_witness = grid::count_where(&boolean_axes, |x| {
        x.iter().any(|c| !c.is_zero()) && solves(x)
    })
    .first;

    let primitive_hyp = weighted_degree < BigInt::from(n);
    let vmax = *sys.exps.iter().max().expect("nonempty");
    let period = num_traits::pow(p_big.clone(), vmax as usize);
    let period_axes: Vec<Vec<BigInt>> = vec![num_iter(&period); n];
    let primitive = if grid::check_grid(&period_axes, COUNT_GRID_LIMIT).is_ok() {
        let w = grid::count_where(&period_axes, |x| outside_pz(x) && solves(x)).first;
        ExistenceCheck::new(primitive_hyp, w)
    } else {
        ExistenceCheck::skipped(primitive_hyp)
    };

    let report = SplitReport {
        p,
        caps: caps.to_vec(),
        degree_budget: budget.clone(),
        weighted_degree,
        box_solutions: tally.count,
        cross_check: tally.weighted == BigUint::from(split_count),
        weighted_box_count: tally.weighted,
        split_boolean_count: BigUint::from(split_count),
        primitive,
        boolean: ExistenceCheck::new(budget < BigInt::from(n), boolean_witness),
        capped: ExistenceCheck::new(budget < BigInt::from(total), tally.nonzero),
        capped_outside_pz: tally.primitive.map(|x| integer_point_json(&x)),
    };
    Ok(SplitExpansion {
        system: split,
        report,
    })
}

fn num_iter(period: &BigInt) -> Vec<BigInt> {
    let top = period
        .to_u64()
        .unwrap_or(u64::MAX)
        .min(COUNT_GRID_LIMIT as u64 + 1);
    (0..top).map(BigInt::from).collect()
}

/// Exponents of the two Boolean lower bounds for `p > 2`: ours `n - (p-1)d`,
/// and the earlier `ceil(n - log2(p) (p-1) d)`, computed exactly as
/// `n - floor(log2(p^{(p-1)d}))`.
pub fn boolean_exponents(p: u64, d: u64, n: u64) -> (i64, i64) {
    let k = (p - 1) * d;
    let ours = n as i64 - k as i64;
    let floor_log = BigUint::from(p).pow(k as u32).bits() as i64 - 1;
    (ours, n as i64 - floor_log)
}
