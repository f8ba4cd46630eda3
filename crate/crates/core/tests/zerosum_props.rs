use num_bigint::BigInt;
use proptest::prelude::*;
use rvw_core::instances;
use rvw_core::zerosum::{
    egz_report, generalized_count, generalized_nonunique_report, generalized_report, gsum_count,
    ng_bound_report, setsystem_report, union_poly, union_poly_check,
};
use rvw_core::{GSequence, RestrictedBox, Verdict, WeightBox};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn counts_invariant_under_permutation(seed in any::<u64>(), shift in 0usize..6) {
        let inst = instances::weighted_instance(seed, 27, 6, 3, false).unwrap();
        let x = &inst.sequence;
        let n = x.len();
        let order: Vec<usize> = (0..n).map(|i| (i + shift) % n).rev().collect();
        let entries: Vec<u64> = order.iter().map(|&i| x.entries()[i]).collect();
        let sets: Vec<Vec<BigInt>> = order
            .iter()
            .map(|&i| inst.weights.inner().sets()[i].clone())
            .collect();
        let y = GSequence::new(x.group().clone(), entries).unwrap();
        let b = RestrictedBox::new(x.group().prime(), sets).unwrap();
        prop_assert_eq!(gsum_count(x, inst.target).unwrap(), gsum_count(&y, inst.target).unwrap());
        prop_assert_eq!(
            generalized_count(x, inst.target, inst.weights.inner()).unwrap().count,
            generalized_count(&y, inst.target, &b).unwrap().count
        );
    }

    #[test]
    fn weighted_bounds_hold(seed in any::<u64>()) {
        let inst = instances::weighted_instance(seed, 27, 6, 3, false).unwrap();
        let x = &inst.sequence;
        let b = inst.weights.inner();
        prop_assert_ne!(ng_bound_report(x, inst.target).unwrap().verdict, Verdict::Violated);
        prop_assert_ne!(generalized_report(x, inst.target, b).unwrap().verdict, Verdict::Violated);
        prop_assert_ne!(generalized_nonunique_report(x, b).unwrap().verdict, Verdict::Violated);
        let vr = *x.group().exps().last().unwrap();
        for k in 1..=vr {
            let r = egz_report(x, &inst.weights, k, inst.target).unwrap();
            prop_assert!(r.indicator_cross_check);
            prop_assert_ne!(r.report.verdict, Verdict::Violated);
        }
    }

    #[test]
    fn union_polynomial_identity(seed in any::<u64>()) {
        let f = instances::set_system(seed, 8, 3, 10);
        let h = union_poly(&f).unwrap();
        prop_assert!(union_poly_check(&f, &h));
        prop_assert!(h.total_degree().or_zero() <= f.max_degree());
        prop_assert!(h.constant_term().is_none());
        for m in [2u64, 3, 4, 5, 6] {
            let r = setsystem_report(&f, m, seed % m).unwrap();
            prop_assert_ne!(r.verdict, Verdict::Violated);
        }
    }
}

#[test]
fn weight_box_requires_zero() {
    let b = RestrictedBox::from_i64(3, &[vec![1, 2]]).unwrap();
    assert!(WeightBox::new(b).is_err());
}
