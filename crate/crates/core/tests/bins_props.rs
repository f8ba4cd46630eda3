use num_bigint::BigUint;
use num_traits::One;
use proptest::prelude::*;
use rvw_core::balls_bins::{
    brute_force_min_product, closed_form_equal_caps, greedy_distribution, min_product, BinProfile,
};

fn caps() -> impl Strategy<Value = Vec<u64>> {
    prop::collection::vec(1u64..=6, 1..=5)
}

proptest! {
    #[test]
    fn greedy_matches_exhaustive_minimum(caps in caps(), slack in 0u64..40) {
        let profile = BinProfile::new(&caps).unwrap();
        let n = caps.len() as i64;
        let total: u64 = caps.iter().sum();
        let balls = n - 2 + (slack % (total - n as u64 + 5)) as i64;
        prop_assert_eq!(
            min_product(&profile, balls),
            brute_force_min_product(&profile, balls).unwrap()
        );
    }

    #[test]
    fn monotone_in_ball_count(caps in caps()) {
        let profile = BinProfile::new(&caps).unwrap();
        let total = caps.iter().sum::<u64>() as i64;
        let mut prev = BigUint::one();
        for balls in -1..=total + 2 {
            let m = min_product(&profile, balls);
            prop_assert!(m >= prev);
            prev = m;
        }
        prop_assert_eq!(prev, caps.iter().map(|&a| BigUint::from(a)).product::<BigUint>());
    }

    #[test]
    fn greedy_distribution_is_valid(caps in caps(), pick in 0u64..1000) {
        let profile = BinProfile::new(&caps).unwrap();
        let n = caps.len() as u64;
        let total: u64 = caps.iter().sum();
        let balls = n + pick % (total - n + 1);
        let d = greedy_distribution(&profile, balls as i64).unwrap();
        prop_assert_eq!(d.counts.iter().sum::<u64>(), balls);
        for (&y, &a) in d.counts.iter().zip(&caps) {
            prop_assert!(1 <= y && y <= a);
        }
        prop_assert_eq!(d.product(), min_product(&profile, balls as i64));
    }

    #[test]
    fn permutation_invariant(caps in caps(), balls in 0i64..30, rot in 0usize..5) {
        let mut rotated = caps.clone();
        let len = rotated.len();
        rotated.rotate_left(rot % len);
        rotated.reverse();
        prop_assert_eq!(
            min_product(&BinProfile::new(&caps).unwrap(), balls),
            min_product(&BinProfile::new(&rotated).unwrap(), balls)
        );
    }

    #[test]
    fn pigeonhole_lower_bound(caps in caps(), extra in 0u64..30) {
        // Any distribution of N balls has some bin with at least ceil(N / n) balls,
        // and every bin has at least one, so m >= min(max cap, ceil(N / n)).
        let profile = BinProfile::new(&caps).unwrap();
        let n = caps.len() as u64;
        let total: u64 = caps.iter().sum();
        let balls = n + extra % (total - n + 1);
        let floor = balls.div_ceil(n).min(*caps.iter().max().unwrap());
        prop_assert!(min_product(&profile, balls as i64) >= BigUint::from(floor));
    }

    #[test]
    fn closed_form_agrees_with_greedy(a in 2u64..=6, n in 1usize..=8, pick in 0u64..100) {
        let balls = n as u64 + pick % ((a - 1) * n as u64 + 1);
        let profile = BinProfile::uniform(a, n).unwrap();
        let greedy = greedy_distribution(&profile, balls as i64).unwrap().product();
        prop_assert_eq!(closed_form_equal_caps(a, n, balls as i64).unwrap(), greedy);
    }
}
