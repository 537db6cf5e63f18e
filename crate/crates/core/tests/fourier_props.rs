use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tracelab_core::finite_field::{FFTower, FieldSpec};
use tracelab_core::fourier::FourierConfig;
use tracelab_core::trace_datum::{character_total, AdditiveCharacter, Flavor, PointMap, TraceDatum};
use tracelab_core::CycNum;

const FIELDS: [u64; 7] = [2, 3, 4, 5, 7, 8, 9];

fn towers() -> &'static [Arc<FFTower>] {
    static T: OnceLock<Vec<Arc<FFTower>>> = OnceLock::new();
    T.get_or_init(|| {
        FIELDS
            .iter()
            .map(|&q| Arc::new(FFTower::new(FieldSpec::from_order(q).unwrap(), 2).unwrap()))
            .collect()
    })
}

/// A field, a transform up to level 1 or 2 and a seed for random data.
fn setup() -> impl Strategy<Value = (Arc<FFTower>, FourierConfig, u64)> {
    (0..FIELDS.len(), 1usize..=2, any::<u64>()).prop_map(|(i, m, seed)| {
        let t = towers()[i].clone();
        let cfg = FourierConfig::standard(t.clone(), m).unwrap();
        (t, cfg, seed)
    })
}

fn scalar(p: u64, rng: &mut ChaCha8Rng) -> CycNum {
    use rand::Rng;
    let j = rng.gen_range(0..p as i64);
    CycNum::root_of_unity(p, j).unwrap().scale_int(rng.gen_range(-3..=3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn transform_is_linear((t, cfg, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = cfg.max_level();
        let f = TraceDatum::random(t.clone(), 1, m, &mut rng).unwrap();
        let g = TraceDatum::random(t.clone(), 1, m, &mut rng).unwrap();
        let c = scalar(t.p() as u64, &mut rng);
        let lhs = cfg.ft(&f.add(&g.scale(&c)).unwrap()).unwrap();
        let rhs = cfg.ft(&f).unwrap().add(&cfg.ft(&g).unwrap().scale(&c)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn inversion_and_pipeline_agree((t, cfg, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = TraceDatum::random(t, 1, cfg.max_level(), &mut rng).unwrap();
        prop_assert!(cfg.inversion_check(&f).unwrap().passed);
        prop_assert_eq!(cfg.ft_via_pipeline(&f).unwrap(), cfg.ft(&f).unwrap());
    }

    #[test]
    fn delta_goes_to_a_character((t, cfg, seed) in setup()) {
        let a = t.elem(1, seed % t.q()).unwrap();
        let ft = cfg.ft(&TraceDatum::delta(t.clone(), cfg.max_level(), &[a]).unwrap()).unwrap();
        for x in t.elements(1) {
            let want = -cfg.psi().eval(t.neg(t.mul(a, x)));
            prop_assert_eq!(ft.value(&[x]).unwrap(), &want);
        }
    }

    #[test]
    fn twists_shifts_and_tensors_commute((t, cfg, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = cfg.max_level();
        let f = TraceDatum::random(t.clone(), 1, m, &mut rng).unwrap();
        let g = TraceDatum::random(t, 1, m, &mut rng).unwrap();
        prop_assert_eq!(f.shift(1).tate_twist(2), f.tate_twist(2).shift(1));
        prop_assert_eq!(f.tensor(&g).unwrap().shift(1), f.shift(1).tensor(&g).unwrap());
        prop_assert_eq!(f.tensor(&g).unwrap().tate_twist(-1), f.tate_twist(-1).tensor(&g).unwrap());
        prop_assert_eq!(f.tate_twist(1).tate_twist(-1), f.clone());
    }

    #[test]
    fn pullback_then_pushforward_along_the_identity((t, cfg, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = TraceDatum::random(t.clone(), 1, cfg.max_level(), &mut rng).unwrap();
        let id = PointMap::identity(&t, 1);
        prop_assert_eq!(f.pullback(&id).unwrap().pushforward_c(&id).unwrap(), f.clone());
        // x ↦ x^p is a bijection, so pushing back along it undoes pulling back
        let frob = PointMap::power(&t, t.p());
        prop_assert_eq!(f.pullback(&frob).unwrap().pushforward_c(&frob).unwrap(), f);
    }

    #[test]
    fn json_round_trip((t, cfg, seed) in setup()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = TraceDatum::random(t.clone(), 1, cfg.max_level(), &mut rng).unwrap();
        let back = TraceDatum::from_json(t, &f.to_json().unwrap()).unwrap();
        prop_assert_eq!(back, f);
    }
}

#[test]
fn character_sums_vanish_unless_trivial() {
    for t in towers() {
        let q = t.q() as i64;
        for a in t.elements(1) {
            for flavor in [Flavor::Arithmetic, Flavor::Geometric] {
                let psi = AdditiveCharacter::standard(t.clone(), flavor).twisted(a).unwrap();
                for m in 1..=2 {
                    let want = if t.is_zero(a) { q.pow(m as u32) } else { 0 };
                    let got = character_total(&psi, m).unwrap();
                    assert_eq!(got, CycNum::from_integer(t.p() as u64, want).unwrap(), "q={q} m={m}");
                }
            }
        }
    }
}

#[test]
fn constants_transform_to_a_point_mass() {
    for t in towers() {
        let cfg = FourierConfig::standard(t.clone(), 2).unwrap();
        let one = CycNum::one(t.p() as u64).unwrap();
        let ft = cfg.ft(&TraceDatum::constant(t.clone(), 1, 2, &one).unwrap()).unwrap();
        for m in 1..=2 {
            let vals = ft.level(m).unwrap();
            assert_eq!(vals[0], CycNum::from_integer(t.p() as u64, -(t.size(m) as i64)).unwrap());
            assert!(vals[1..].iter().all(CycNum::is_zero));
        }
    }
}
