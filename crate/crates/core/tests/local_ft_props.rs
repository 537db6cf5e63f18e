use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tracelab_core::local_ft::{LocalQuotient, Mode, QFun};
use tracelab_core::CycNum;

/// Groups with at most 256 elements, in both modes.
fn group() -> impl Strategy<Value = LocalQuotient> {
    let equal = (prop::sample::select(vec![2u64, 3, 4, 5, 7, 8, 9]), Just(Mode::EqualChar));
    let mixed = (prop::sample::select(vec![2u64, 3, 5, 7]), Just(Mode::MixedChar));
    (prop_oneof![equal, mixed], 0u32..=3, 0u32..=3)
        .prop_filter("small group", |((q, _), n, m)| q.pow(n + m) <= 256)
        .prop_map(|((q, mode), n, m)| LocalQuotient::new(q, n, m, mode).unwrap())
}

/// `Σ_x f(x)·ζ^{⟨x,y⟩}` straight from the pairing.
fn naive(g: &LocalQuotient, f: &QFun) -> Vec<CycNum> {
    let ord = g.char_order();
    g.elements()
        .map(|y| {
            g.elements().fold(CycNum::zero(ord).unwrap(), |acc, x| {
                let z = CycNum::root_of_unity(ord, g.pairing_exponent(x, y) as i64).unwrap();
                acc + &f.value(x).lift(ord).unwrap() * &z
            })
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn transform_matches_the_defining_sum(g in group(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = g.random_sparse(&mut rng, 3, 4);
        let fast = g.local_ft(&f).unwrap();
        prop_assert_eq!(fast.values(), &naive(&g, &f)[..]);
    }

    #[test]
    fn double_transform_is_reflection(g in group(), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = if g.size() <= 64 { g.random(&mut rng, 3) } else { g.random_sparse(&mut rng, 4, 3) };
        prop_assert!(g.double_transform_check(&f).unwrap());
        let ff = g.local_ft(&g.local_ft(&f).unwrap()).unwrap();
        let size = g.size() as i64;
        for z in g.elements() {
            prop_assert_eq!(ff.value(z), &f.value(g.neg(z)).lift(g.char_order()).unwrap().scale_int(size));
        }
        prop_assert!(g.plancherel_check(&f).unwrap());
    }

    #[test]
    fn pairing_is_biadditive_and_symmetric(g in group(), xs in [any::<u64>(), any::<u64>(), any::<u64>()]) {
        let [x, x2, y] = xs.map(|v| v % g.size());
        let ord = g.char_order();
        prop_assert_eq!(g.pairing_exponent(g.add(x, x2), y), (g.pairing_exponent(x, y) + g.pairing_exponent(x2, y)) % ord);
        prop_assert_eq!(g.pairing_exponent(x, y), g.pairing_exponent(y, x));
        prop_assert_eq!(g.add(x, g.neg(x)), 0);
        prop_assert_eq!(g.from_digits(&g.digits(x)), x);
    }

    #[test]
    fn pairing_is_nondegenerate(g in group()) {
        let r = g.duality_report();
        prop_assert!(r.passed, "{:?}", r);
        prop_assert_eq!(r.conductor_shift, r.window.0 as i64 - r.window.1 as i64);
    }
}

#[test]
fn delta_at_zero_goes_to_one() {
    for (q, n, m) in [(2, 1, 1), (3, 2, 0), (4, 0, 2), (5, 1, 1)] {
        let g = LocalQuotient::new(q, n, m, Mode::EqualChar).unwrap();
        let t = g.local_ft(&g.delta(0)).unwrap();
        assert!(t.values().iter().all(CycNum::is_one));
        let c = g.local_ft(&g.constant(1)).unwrap();
        assert_eq!(c.value(0), &CycNum::from_integer(g.char_order(), g.size() as i64).unwrap());
        assert!(c.values()[1..].iter().all(CycNum::is_zero));
    }
}
