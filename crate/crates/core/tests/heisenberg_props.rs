use proptest::prelude::*;
use tracelab_core::finite_field::FFElem;
use tracelab_core::heisenberg::{HeisElem, HeisenbergGroup, Presentation};

/// A group and three of its elements.
fn setup() -> impl Strategy<Value = (HeisenbergGroup, [HeisElem; 3])> {
    let groups = prop_oneof![
        (prop::sample::select(vec![3u64, 5, 7, 9]), Just(Presentation::Symplectic)),
        (prop::sample::select(vec![2u64, 3, 4, 5, 8]), Just(Presentation::Matrix)),
    ];
    (groups, 1usize..=3)
        .prop_map(|((q, pres), g)| HeisenbergGroup::new(q, g, pres).unwrap())
        .prop_flat_map(|h| {
            let coords = 2 * h.genus() + 1;
            let elem = prop::collection::vec(0..h.q(), coords);
            (Just(h), [elem.clone(), elem.clone(), elem])
        })
        .prop_map(|(h, raw)| {
            let es = raw.map(|c| {
                let f = h.field();
                let v: Vec<FFElem> = c.iter().map(|&i| f.elem(1, i).unwrap()).collect();
                let g = h.genus();
                h.elem(v[..g].to_vec(), v[g..2 * g].to_vec(), v[2 * g]).unwrap()
            });
            (h, es)
        })
}

fn mat_mul(h: &HeisenbergGroup, a: &[Vec<FFElem>], b: &[Vec<FFElem>]) -> Vec<Vec<FFElem>> {
    let f = h.field();
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).fold(f.zero(1), |acc, k| f.add(acc, f.mul(a[i][k], b[k][j]))))
                .collect()
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn group_axioms((h, [x, y, z]) in setup()) {
        let c = |a: &HeisElem, b: &HeisElem| h.compose(a, b).unwrap();
        prop_assert_eq!(c(&c(&x, &y), &z), c(&x, &c(&y, &z)));
        prop_assert_eq!(c(&x, &h.identity()), x.clone());
        prop_assert_eq!(c(&h.identity(), &x), x.clone());
        prop_assert_eq!(c(&x, &h.inverse(&x)), h.identity());
        prop_assert_eq!(c(&h.inverse(&x), &x), h.identity());
    }

    #[test]
    fn commutators_are_central_and_given_by_the_form((h, [x, y, z]) in setup()) {
        let k = h.commutator(&x, &y);
        prop_assert!(k.p().iter().chain(k.q()).all(|&v| h.field().is_zero(v)));
        prop_assert_eq!(k.center_coord(), h.omega(&x, &y));
        prop_assert_eq!(h.compose(&k, &z).unwrap(), h.compose(&z, &k).unwrap());
    }

    #[test]
    fn change_of_presentation_is_a_homomorphism((h, [x, y, _]) in setup()) {
        prop_assume!(h.q() % 2 == 1);
        let (other, fx) = h.change_presentation(&x).unwrap();
        let (_, fy) = h.change_presentation(&y).unwrap();
        let (_, fxy) = h.change_presentation(&h.compose(&x, &y).unwrap()).unwrap();
        prop_assert_eq!(other.compose(&fx, &fy).unwrap(), fxy);
        let (_, back) = other.change_presentation(&fx).unwrap();
        prop_assert_eq!(back, x);
    }

    #[test]
    fn matrices_multiply_like_the_group((h, [x, y, _]) in setup()) {
        prop_assume!(h.presentation() == Presentation::Matrix);
        let (mx, my) = (h.to_matrix(&x).unwrap(), h.to_matrix(&y).unwrap());
        let prod = mat_mul(&h, &mx, &my);
        prop_assert_eq!(&prod, &h.to_matrix(&h.compose(&x, &y).unwrap()).unwrap());
        prop_assert_eq!(h.from_matrix(&mx).unwrap(), x);
    }
}

#[test]
fn class_equation_and_character_degrees() {
    for (q, g) in [(2u64, 1usize), (3, 1), (4, 1), (5, 1), (2, 2), (3, 2)] {
        let h = HeisenbergGroup::new(q, g, Presentation::Matrix).unwrap();
        let r = h.report(1 << 15).unwrap();
        let q2g = (q as u128).pow(2 * g as u32);
        // q^{2g} linear characters plus q − 1 of degree q^g
        assert_eq!(r.char_count as u128, q2g);
        assert_eq!(r.class_count as u128, q2g + q as u128 - 1);
        assert_eq!(q2g + (q as u128 - 1) * q2g, h.order());
        assert!(r.width_one && r.center_equals_commutator && r.passed);
    }
}
