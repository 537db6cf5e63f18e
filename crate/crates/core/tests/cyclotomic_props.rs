use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use tracelab_core::CycNum;

const ORDERS: [u64; 9] = [2, 3, 4, 5, 7, 8, 9, 25, 27];

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Coefficient vectors are allowed to be longer than φ(N) so reduction gets exercised.
fn cyc(order: u64) -> impl Strategy<Value = CycNum> {
    prop::collection::vec((-6i64..=6, 1i64..=4), 0..=order as usize + 3).prop_map(move |cs| {
        let coeffs = cs.into_iter().map(|(n, d)| rat(n, d)).collect();
        CycNum::from_coeffs(order, coeffs).unwrap()
    })
}

fn triple() -> impl Strategy<Value = (CycNum, CycNum, CycNum)> {
    prop::sample::select(&ORDERS[..]).prop_flat_map(|n| (cyc(n), cyc(n), cyc(n)))
}

/// `Φ_{p^k}(x) = Σ_{j<p} x^{j·p^{k−1}}`
fn cyclotomic_at_zeta(order: u64) -> CycNum {
    let p = tracelab_core::arith::prime_power(order).unwrap().0;
    let step = (order / p) as i64;
    let mut acc = CycNum::zero(order).unwrap();
    for j in 0..p as i64 {
        acc += &CycNum::root_of_unity(order, j * step).unwrap();
    }
    acc
}

#[test]
fn zeta_is_a_root_of_the_cyclotomic_polynomial() {
    for n in ORDERS {
        assert!(cyclotomic_at_zeta(n).is_zero(), "N = {n}");
        let z = CycNum::root_of_unity(n, 1).unwrap();
        assert!(z.pow(n as i64).unwrap().is_one());
        for k in 1..n as i64 {
            assert!(!z.pow(k).unwrap().is_one(), "ζ_{n}^{k} = 1");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn ring_axioms((a, b, c) in triple()) {
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &CycNum::one(a.order()).unwrap(), a.clone());
    }

    #[test]
    fn nonzero_elements_are_invertible((a, b, _) in triple()) {
        prop_assume!(!a.is_zero());
        let inv = a.inv().unwrap();
        prop_assert!((&a * &inv).is_one());
        prop_assert_eq!(&b.checked_div(&a).unwrap() * &a, b);
    }

    #[test]
    fn conj_is_an_involutive_ring_map((a, b, _) in triple()) {
        prop_assert_eq!(a.conj().conj(), a.clone());
        prop_assert_eq!((&a * &b).conj(), &a.conj() * &b.conj());
        prop_assert_eq!((&a + &b).conj(), &a.conj() + &b.conj());
    }

    #[test]
    fn representation_is_canonical((a, _, _) in triple()) {
        let deg = a.coeffs().len();
        let p = a.prime();
        prop_assert!(deg as u64 <= a.order() / p * (p - 1));
        prop_assert!(a.coeffs().last().is_none_or(|c| *c != rat(0, 1)));
        // the same element rebuilt from a padded vector has identical storage
        let mut padded = a.coeffs().to_vec();
        padded.resize(a.order() as usize, rat(0, 1));
        let rebuilt = CycNum::from_coeffs(a.order(), padded).unwrap();
        prop_assert_eq!(rebuilt.coeffs(), a.coeffs());
    }

    #[test]
    fn json_round_trip((a, _, _) in triple()) {
        let text = serde_json::to_string(&a).unwrap();
        let back: CycNum = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn lifting_respects_arithmetic((a, b, _) in prop::sample::select(vec![3u64, 5, 2]).prop_flat_map(|p| (cyc(p), cyc(p), cyc(p)))) {
        let big = a.order() * a.order();
        let (la, lb) = (a.lift(big).unwrap(), b.lift(big).unwrap());
        prop_assert_eq!(&la * &lb, (&a * &b).lift(big).unwrap());
        prop_assert_eq!(&la + &lb, (&a + &b).lift(big).unwrap());
    }
}
