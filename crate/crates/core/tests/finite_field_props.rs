use std::sync::{Arc, OnceLock};

use proptest::prelude::*;
use tracelab_core::finite_field::{FFElem, FFTower, FieldSpec};

/// `(p, n, top level)`, each tower small enough to enumerate at every level.
const SPECS: [(u32, u32, usize); 6] = [(2, 1, 4), (2, 2, 3), (3, 1, 3), (5, 1, 2), (2, 3, 2), (3, 2, 2)];

fn towers() -> &'static [Arc<FFTower>] {
    static T: OnceLock<Vec<Arc<FFTower>>> = OnceLock::new();
    T.get_or_init(|| {
        SPECS
            .iter()
            .map(|&(p, n, m)| Arc::new(FFTower::new(FieldSpec::new(p, n).unwrap(), m).unwrap()))
            .collect()
    })
}

/// A tower, a level and three elements at that level.
fn setup() -> impl Strategy<Value = (Arc<FFTower>, usize, [FFElem; 3])> {
    (0..SPECS.len())
        .prop_flat_map(|i| {
            let t = towers()[i].clone();
            let top = t.max_level();
            (Just(t), 1..=top)
        })
        .prop_flat_map(|(t, m)| {
            let size = t.size(m);
            (Just(t), Just(m), [0..size, 0..size, 0..size])
        })
        .prop_map(|(t, m, idx)| {
            let e = idx.map(|i| t.elem(m, i).unwrap());
            (t, m, e)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn field_axioms((f, m, [a, b, c]) in setup()) {
        prop_assert_eq!(f.mul(f.mul(a, b), c), f.mul(a, f.mul(b, c)));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.add(a, f.neg(a)), f.zero(m));
        if !f.is_zero(a) {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), f.one(m));
        }
    }

    #[test]
    fn frobenius_orbits_divide_the_level((f, m, [a, b, _]) in setup()) {
        let n = f.spec().n as i64;
        let orbit = (1..=m).find(|&k| f.frobenius(a, n * k as i64) == a).unwrap();
        prop_assert_eq!(m % orbit, 0);
        // the absolute Frobenius is a ring map
        prop_assert_eq!(f.frobenius(f.mul(a, b), 1), f.mul(f.frobenius(a, 1), f.frobenius(b, 1)));
        prop_assert_eq!(f.frobenius(f.add(a, b), 1), f.add(f.frobenius(a, 1), f.frobenius(b, 1)));
        prop_assert_eq!(f.frobenius(f.frobenius(a, 3), -3), a);
    }

    #[test]
    fn relative_trace_is_linear_over_the_base((f, m, [a, b, c]) in setup()) {
        let c1 = f.rel_trace(c, 1).unwrap();
        let lhs = f.rel_trace(f.add(f.mul(f.embed(c1, m).unwrap(), a), b), 1).unwrap();
        let rhs = f.add(f.mul(c1, f.rel_trace(a, 1).unwrap()), f.rel_trace(b, 1).unwrap());
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn embeddings_round_trip((f, m, [a, b, _]) in setup()) {
        let top = f.max_level();
        prop_assume!(top % m == 0);
        let (ea, eb) = (f.embed(a, top).unwrap(), f.embed(b, top).unwrap());
        prop_assert_eq!(f.restrict(ea, m).unwrap(), a);
        prop_assert_eq!(f.mul(ea, eb), f.embed(f.mul(a, b), top).unwrap());
        prop_assert!(f.in_subfield(ea, m));
    }

    #[test]
    fn artin_schreier_fibers_have_size_zero_or_q((f, _m, [t, _, _]) in setup()) {
        let fiber = f.artin_schreier_fiber(t).unwrap();
        prop_assert!(fiber.is_empty() || fiber.len() as u64 == f.q());
        for y in fiber {
            prop_assert_eq!(f.artin_schreier(y), t);
        }
    }

    #[test]
    fn wire_round_trip((f, _m, [a, _, _]) in setup()) {
        prop_assert_eq!(f.from_wire(&f.to_wire(a)).unwrap(), a);
        prop_assert_eq!(f.from_coeffs(a.level(), &f.coeffs(a)).unwrap(), a);
    }
}

#[test]
fn relative_trace_is_onto_and_artin_schreier_hits_q_pow_m_minus_1_targets() {
    for f in towers() {
        for m in 1..=f.max_level() {
            let images: std::collections::HashSet<_> =
                f.elements(m).map(|x| f.rel_trace(x, 1).unwrap()).collect();
            assert_eq!(images.len() as u64, f.q(), "{} level {m}", f.spec());
            let targets: std::collections::HashSet<_> = f.elements(m).map(|y| f.artin_schreier(y)).collect();
            assert_eq!(targets.len() as u64, f.size(m) / f.q());
        }
        assert!(f.embeddings_compatible());
    }
}
