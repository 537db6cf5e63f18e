use std::sync::OnceLock;

use num_rational::Ratio;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tracelab_core::ffcurve::{kappa, CurveField, Exp, LaurentApprox, RadiusPoint, DEFAULT_DENOM_BUDGET};
use tracelab_core::selftest::random_curve_target;

const QS: [u64; 4] = [2, 3, 4, 5];

fn fields() -> &'static [CurveField] {
    static F: OnceLock<Vec<CurveField>> = OnceLock::new();
    F.get_or_init(|| QS.iter().map(|&q| CurveField::new(q, DEFAULT_DENOM_BUDGET).unwrap()).collect())
}

/// Finite sums `Σ c t^{a/q^j} π^i` with small `i`.
fn series(cf: &'static CurveField) -> impl Strategy<Value = LaurentApprox> {
    let q = cf.q() as i128;
    let mono = (-2i64..=3, 0i128..=6, 0u32..=2, 1..cf.q());
    prop::collection::vec(mono, 0..5).prop_map(move |ms| {
        let f = cf.field();
        cf.exact(ms.into_iter().map(|(i, a, j, c)| (i, Exp::new(a, q.pow(j)), f.elem(1, c).unwrap())))
            .unwrap()
    })
}

fn pair() -> impl Strategy<Value = (&'static CurveField, LaurentApprox, LaurentApprox)> {
    (0..QS.len()).prop_flat_map(|k| {
        let cf = &fields()[k];
        (Just(cf), series(cf), series(cf))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn phi_is_a_ring_automorphism((cf, x, y) in pair()) {
        let phi = |z: &LaurentApprox| cf.phi(z, 1).unwrap();
        prop_assert_eq!(phi(&cf.mul(&x, &y).unwrap()), cf.mul(&phi(&x), &phi(&y)).unwrap());
        prop_assert_eq!(phi(&cf.add(&x, &y)), cf.add(&phi(&x), &phi(&y)));
        prop_assert_eq!(cf.phi(&phi(&x), -1).unwrap(), x);
    }

    #[test]
    fn solutions_invert_phi_minus_pi_n(k in 0..2usize, n in 1i64..=3, seed in any::<u64>()) {
        let cf = &fields()[k];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let target = random_curve_target(cf, &mut rng).unwrap();
        let (pi_prec, t_prec) = (6, Exp::from_integer(24));
        let sol = cf.solve_phi_pi(&target, n, pi_prec, t_prec).unwrap();
        prop_assert_eq!(sol.preimage.pi_prec(), Some(pi_prec));
        // apply φ − πⁿ by hand to the exact finite sum
        let x = cf.exact(sol.preimage.monomials()).unwrap();
        let image = cf.sub(&cf.phi(&x, 1).unwrap(), &cf.mul_pi_pow(&x, n));
        let diff = cf.sub(&image, &target);
        for (i, a, _) in diff.monomials() {
            prop_assert!(i >= pi_prec || a >= t_prec, "stray term π^{} t^{}", i, a);
        }
        prop_assert!(cf.check_solution(&sol.preimage, &target, n, pi_prec, t_prec).unwrap());
    }

    #[test]
    fn h0_sections_are_linear_in_the_seeds(k in 0..QS.len(), n in 1i64..=3, picks in prop::collection::vec((0..4usize, 0..4usize), 3)) {
        let cf = &fields()[k];
        let alpha = cf.nilpotent_alphabet();
        let (a, b): (Vec<_>, Vec<_>) = picks[..n as usize].iter().map(|&(i, j)| (alpha[i].clone(), alpha[j].clone())).unzip();
        let sum: Vec<_> = a.iter().zip(&b).map(|(x, y)| {
            let s = cf.add(&cf.exact(x.terms().map(|(&e, &c)| (0, e, c))).unwrap(), &cf.exact(y.terms().map(|(&e, &c)| (0, e, c))).unwrap());
            s.coeff(0)
        }).collect();
        let prec = 6;
        let (fa, fb, fs) = (cf.h0_basis(n, &a, prec).unwrap(), cf.h0_basis(n, &b, prec).unwrap(), cf.h0_basis(n, &sum, prec).unwrap());
        prop_assert_eq!(cf.add(&fa, &fb), fs);
        prop_assert!(cf.h0_relation_holds(&fa, n).unwrap());
        // the seeds are read back as the first n coefficients
        for (i, s) in a.iter().enumerate() {
            prop_assert_eq!(&fa.coeff(i as i64), s);
        }
    }

    #[test]
    fn kappa_scales_by_q(q in prop::sample::select(QS.to_vec()), a in 1i64..500, b in 1i64..500, c in 1i64..500, d in 1i64..500) {
        let x = RadiusPoint::new(Ratio::new(a, b), Ratio::new(c, d)).unwrap();
        prop_assert_eq!(kappa(&x.phi(q)), kappa(&x) * Ratio::from_integer(q as i64));
    }

    #[test]
    fn display_parses_back((cf, x, _) in pair(), prec in prop::option::of(1i64..6)) {
        let x = cf.truncate(&x, prec, None);
        prop_assert_eq!(cf.parse(&cf.display(&x).to_string()).unwrap(), x);
    }
}
