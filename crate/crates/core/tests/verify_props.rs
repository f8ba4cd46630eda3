use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};
use proptest::prelude::*;
use rvw_core::instances::{self, CongruenceParams};
use rvw_core::ring::{FqField, Ring};
use rvw_core::schanuel_brink::{build_context, congruence_equiv_check, delta, lift_integer_poly};
use rvw_core::warning_verify::{
    alon_furedi_report, chevalley_indicator, count_zeros_box, count_zeros_fq, delta_reduce_system,
    restricted_chevalley_report, rvw2_report_box, rvw2_report_fq, schanuel_box_expand,
    warning2_report, CongruenceSystem,
};
use rvw_core::{MultiPoly, Verdict};

fn small_params() -> CongruenceParams {
    CongruenceParams {
        primes: vec![2, 3, 5],
        max_nvars: 2,
        max_polys: 1,
        max_exp: 3,
        max_degree: 2,
        max_terms: 3,
        coeff: 9,
        lift: 2,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn delta_degree_and_equivalence(seed in any::<u64>()) {
        let inst = instances::congruence_instance(seed, &small_params()).unwrap();
        let ctx = build_context(&inst.boxed).unwrap();
        let f = lift_integer_poly(&inst.system.polys()[0], ctx.ring());
        let df = delta(&f, &ctx).unwrap();
        if let (Some(d), Some(e)) = (f.total_degree().finite(), df.total_degree().finite()) {
            prop_assert!(e <= ctx.prime() * d);
        }
        for c in df.terms().map(|(_, c)| c) {
            prop_assert!(ctx.ring().check(c).is_ok());
        }
        let v = inst.system.exps()[0];
        let rep = congruence_equiv_check(&f, &ctx, v).unwrap();
        prop_assert!(rep.pass, "seed {seed}: {:?}", rep.counterexample);
    }

    #[test]
    fn bound_never_violated_and_reduction_sound(seed in any::<u64>()) {
        let inst = instances::congruence_instance(seed, &CongruenceParams::default()).unwrap();
        let rep = rvw2_report_box(&inst.system, &inst.boxed).unwrap();
        prop_assert_ne!(rep.verdict, Verdict::Violated, "seed {}", seed);
        let ctx = build_context(&inst.boxed).unwrap();
        let reduced = delta_reduce_system(&inst.system, &ctx).unwrap();
        prop_assert!(reduced.exps().iter().all(|&v| v == 1));
        prop_assert_eq!(
            count_zeros_box(&inst.system, &inst.boxed).unwrap(),
            count_zeros_box(&reduced, &inst.boxed).unwrap()
        );
        let mod_p_degree: u64 = reduced.polys().iter().map(|f| f.total_degree().or_zero()).sum();
        prop_assert!(BigInt::from(mod_p_degree) <= inst.system.weighted_degree());
    }

    #[test]
    fn field_statements_hold(seed in any::<u64>(), which in 0usize..4) {
        let (p, ell) = [(2, 1), (3, 1), (2, 2), (5, 1)][which];
        let field = FqField::new(p, ell).unwrap();
        let inst = instances::fq_instance(seed, &field, 3, 2, 2, 3, false).unwrap();
        let rep = rvw2_report_fq(&inst.system, &inst.axes).unwrap();
        prop_assert_ne!(rep.verdict, Verdict::Violated);
        let chev = restricted_chevalley_report(&inst.system, &inst.axes).unwrap();
        prop_assert_ne!(chev.verdict(), Verdict::Violated);
        let full = warning2_report(&inst.system).unwrap();
        prop_assert_ne!(full.verdict(), Verdict::Violated);
        if full.hypothesis {
            prop_assert_eq!(full.p_divides_count, Some(true));
        }
    }

    #[test]
    fn indicator_support_is_solution_set(seed in any::<u64>(), which in 0usize..3) {
        let (p, ell) = [(2, 1), (3, 1), (2, 2)][which];
        let field = FqField::new(p, ell).unwrap();
        let inst = instances::fq_instance(seed, &field, 2, 2, 2, 3, false).unwrap();
        let Ok(ind) = chevalley_indicator(&inst.system) else { return Ok(()); };
        let af = alon_furedi_report(&ind, &field, &inst.axes).unwrap();
        prop_assert_eq!(
            af.count,
            BigUint::from(count_zeros_fq(&inst.system, &inst.axes).unwrap())
        );
        prop_assert_ne!(af.verdict, Verdict::Violated);
        for a in &inst.axes[0] {
            let rest: Vec<_> = inst.axes[1..].iter().map(|ax| ax[0]).collect();
            let mut x = vec![*a];
            x.extend(rest);
            let zero = inst.system.polys().iter().all(|f| field.is_zero(&f.evaluate(&x, &field).unwrap()));
            prop_assert_eq!(zero, !field.is_zero(&ind.evaluate(&x, &field).unwrap()));
        }
    }

    #[test]
    fn split_expansion_cross_checks(seed in any::<u64>()) {
        let params = CongruenceParams { primes: vec![2, 3], max_nvars: 2, max_polys: 1, max_exp: 2, max_degree: 2, max_terms: 3, coeff: 5, lift: 0 };
        let inst = instances::congruence_instance(seed, &params).unwrap();
        // Drop the constant term so the split applies.
        let f = &inst.system.polys()[0];
        let zero = vec![0u32; f.nvars()];
        let terms: Vec<(Vec<u32>, BigInt)> = f
            .terms()
            .filter(|(m, _)| m.exponents() != zero.as_slice())
            .map(|(m, c)| (m.exponents().to_vec(), c.clone()))
            .collect();
        let g = MultiPoly::from_terms(&rvw_core::ring::IntegerRing, f.nvars(), terms).unwrap();
        let sys = CongruenceSystem::single(inst.system.prime(), g, inst.system.exps()[0]).unwrap();
        let caps: Vec<u64> = (0..sys.nvars()).map(|i| 1 + (seed >> (3 * i)) % 3).collect();
        let out = schanuel_box_expand(&sys, &caps).unwrap();
        prop_assert!(out.report.cross_check);
        prop_assert!(!out.report.violated(), "seed {seed}");
    }
}

#[test]
fn sharp_parity_family() {
    for n in 1..=8 {
        let terms: Vec<(Vec<u32>, BigInt)> = (0..n)
            .map(|i| {
                let mut e = vec![0; n];
                e[i] = 1;
                (e, BigInt::one())
            })
            .collect();
        let f = MultiPoly::from_terms(&rvw_core::ring::IntegerRing, n, terms).unwrap();
        let sys = CongruenceSystem::single(2, f, 1).unwrap();
        let boxed = rvw_core::RestrictedBox::boolean(2, n).unwrap();
        let r = rvw2_report_box(&sys, &boxed).unwrap();
        assert_eq!(r.count, r.bound);
        assert!(!r.count.is_zero());
    }
}
