use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rvw_core::ring::{
    mod_floor, p_valuation, valuation_of_integer, FqField, PLocalRing, Ring, ZModRing,
};

fn prime() -> impl Strategy<Value = u64> {
    prop::sample::select(vec![2u64, 3, 5, 7, 11])
}

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-5000i64..=-1, 1i64..=5000]
}

/// A p-local element `num/den` with `p` not dividing `den`.
fn local(p: u64, num: i64, den: i64) -> Option<(BigInt, BigInt)> {
    if den % p as i64 == 0 {
        None
    } else {
        Some((BigInt::from(num), BigInt::from(den)))
    }
}

proptest! {
    #[test]
    fn valuation_is_additive(p in prime(), a in nonzero(), b in 1i64..500, c in nonzero(), d in 1i64..500) {
        let ring = PLocalRing::new(p).unwrap();
        let (Some(x), Some(y)) = (local(p, a, b), local(p, c, d)) else { return Ok(()); };
        let x = ring.elem(x.0, x.1).unwrap();
        let y = ring.elem(y.0, y.1).unwrap();
        let vx = ring.valuation(&x).unwrap();
        let vy = ring.valuation(&y).unwrap();
        prop_assert_eq!(ring.valuation(&ring.mul(&x, &y)).unwrap(), vx + vy);
        let s = ring.add(&x, &y);
        if !s.is_zero() {
            prop_assert!(p_valuation(&s, p).unwrap() >= vx.min(vy));
        }
    }

    #[test]
    fn integer_valuation_counts_factors(p in prime(), k in 0u32..6, m in nonzero()) {
        let m = if m % p as i64 == 0 { m + 1 } else { m };
        prop_assume!(m != 0 && m % p as i64 != 0);
        let n = BigInt::from(m) * num_traits::pow(BigInt::from(p), k as usize);
        prop_assert_eq!(valuation_of_integer(&n, p).unwrap(), k as u64);
    }

    #[test]
    fn local_reduction_is_a_ring_map(p in prime(), a in -300i64..300, b in 1i64..60, c in -300i64..300, d in 1i64..60, e in 1u32..4) {
        let ring = PLocalRing::new(p).unwrap();
        let (Some(x), Some(y)) = (local(p, a, b), local(p, c, d)) else { return Ok(()); };
        let x = ring.elem(x.0, x.1).unwrap();
        let y = ring.elem(y.0, y.1).unwrap();
        let m = num_traits::pow(BigInt::from(p), e as usize);
        let zm = ZModRing::new(m.clone());
        let rx = ring.reduce_mod(&x, &m).unwrap();
        let ry = ring.reduce_mod(&y, &m).unwrap();
        prop_assert_eq!(ring.reduce_mod(&ring.mul(&x, &y), &m).unwrap(), zm.mul(&rx, &ry));
        prop_assert_eq!(ring.reduce_mod(&ring.add(&x, &y), &m).unwrap(), zm.add(&rx, &ry));
        // b * (a/b) reduces to a.
        let bx = ring.mul(&x, &ring.from_int(&BigInt::from(b)));
        prop_assert_eq!(ring.reduce_mod(&bx, &m).unwrap(), mod_floor(&BigInt::from(a), &m));
    }

    #[test]
    fn residues_agree_with_floor_mod(m in 1i64..200, a in -100_000i64..100_000) {
        let zm = ZModRing::new(BigInt::from(m));
        let r = zm.from_int(&BigInt::from(a));
        prop_assert_eq!(r, BigInt::from(a.rem_euclid(m)));
    }
}

#[test]
fn field_axioms_exhaustive_up_to_nine() {
    for (p, ell) in [(2, 1), (3, 1), (2, 2), (5, 1), (7, 1), (2, 3), (3, 2)] {
        let f = FqField::new(p, ell).unwrap();
        let elems: Vec<_> = f.elements().collect();
        let (zero, one) = (f.zero(), f.one());
        for &a in &elems {
            assert_eq!(f.add(&a, &zero), a);
            assert_eq!(f.mul(&a, &one), a);
            assert!(f.is_zero(&f.add(&a, &f.neg(&a))));
            if !f.is_zero(&a) {
                let inv = f.inv(a).unwrap();
                assert!(f.is_one(&f.mul(&a, &inv)));
                assert!(f.is_one(&f.pow(&a, f.order() - 1)));
            }
            assert_eq!(f.pow(&a, f.order()), a);
            for &b in &elems {
                assert_eq!(f.add(&a, &b), f.add(&b, &a));
                assert_eq!(f.mul(&a, &b), f.mul(&b, &a));
                for &c in &elems {
                    assert_eq!(f.add(&f.add(&a, &b), &c), f.add(&a, &f.add(&b, &c)));
                    assert_eq!(f.mul(&f.mul(&a, &b), &c), f.mul(&a, &f.mul(&b, &c)));
                    assert_eq!(
                        f.mul(&a, &f.add(&b, &c)),
                        f.add(&f.mul(&a, &b), &f.mul(&a, &c))
                    );
                }
            }
        }
        // The multiplicative group is cyclic: some element has order q - 1.
        let q1 = f.order() - 1;
        let has_generator = elems
            .iter()
            .filter(|a| !f.is_zero(a))
            .any(|a| (1..q1).all(|k| !f.is_one(&f.pow(a, k))));
        assert!(has_generator, "F_{}", f.order());
    }
}

#[test]
fn integers_mod_one_collapse() {
    let z1 = ZModRing::new(BigInt::one());
    assert!(z1.from_int(&BigInt::from(17)).is_zero());
}
