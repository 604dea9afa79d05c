use orlicz_core::envelope::*;
use orlicz_core::phi_core::*;
use proptest::prelude::*;

fn family() -> impl Strategy<Value = PhiFunction> {
    prop_oneof![
        (1.0..4.0f64).prop_map(|p| PhiFunction::power_norm(2, p).unwrap()),
        (0.2..5.0f64, 1.0..3.0f64).prop_map(|(w, p)| PhiFunction::coordinate_power(vec![1.0, w], p).unwrap()),
        (1.0..2.0f64, 0.0..2.0f64, 0.0..3.0f64)
            .prop_map(|(p, dq, a)| PhiFunction::double_phase(2, p, p + dq, a).unwrap()),
        Just(PhiFunction::min_of_coordinate_squares(2).unwrap()),
        (0.5..=1.0f64).prop_map(|r| PhiFunction::linfty_indicator(2, r).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn zero_times_infinity_is_zero(c in 0.0..10.0f64) {
        prop_assert_eq!(ExtReal::INFINITY.scale(0.0), ExtReal::ZERO);
        prop_assert_eq!(ExtReal::ZERO * ExtReal::INFINITY, ExtReal::ZERO);
        prop_assert!(ExtReal::finite(c) + ExtReal::INFINITY == ExtReal::INFINITY);
    }

    #[test]
    fn envelope_is_a_convex_minorant(phi in family(), a in 0.0..1.0f64, i in 0usize..81, j in 0usize..81) {
        let env = Envelope::build(&phi, &EnvelopeSpec::new(GridSpec::symmetric(2, 2.0, 9))).unwrap();
        for (e, v) in env.values.iter().zip(&env.input.values) {
            prop_assert!(e.le_tol(*v, 1e-9));
        }
        let (p, q) = (&env.input.points[i], &env.input.points[j]);
        let z: Vec<f64> = (0..2).map(|k| a * p[k] + (1.0 - a) * q[k]).collect();
        let rhs = env.values[i].scale(a) + env.values[j].scale(1.0 - a);
        prop_assert!(env.eval(&z).le_tol(rhs, 1e-9), "{:?} at {:?}", env.eval(&z), z);
    }

    #[test]
    fn convex_families_are_their_own_envelope(p in 1.0..4.0f64) {
        let phi = PhiFunction::power_norm(2, p).unwrap();
        let env = Envelope::build(&phi, &EnvelopeSpec::new(GridSpec::symmetric(2, 2.0, 9))).unwrap();
        for (e, v) in env.values.iter().zip(&env.input.values) {
            prop_assert!((e.get() - v.get()).abs() <= 1e-9 * v.get().max(1.0));
        }
    }

    #[test]
    fn gauge_is_positively_homogeneous(
        phi in family(), s in 1.0..16.0f64, x in -3.0..3.0f64, y in -3.0..3.0f64, l in 0.1..10.0f64
    ) {
        let set = GaugeSet::new(&phi, s, 1.0).unwrap();
        let g = minkowski_gauge(&set, &[x, y], DEFAULT_GAUGE_TOL);
        let gl = minkowski_gauge(&set, &[l * x, l * y], DEFAULT_GAUGE_TOL);
        if g.is_finite() {
            prop_assert!((gl.get() - l * g.get()).abs() <= 1e-7 * l * g.get().max(1e-300));
        } else {
            prop_assert!(gl.is_infinite());
        }
    }

    #[test]
    fn gauge_minorant_lies_below_phi(phi in family(), s in 1.0..16.0f64, x in -8.0..8.0f64, y in -8.0..8.0f64) {
        let ms = build_minorant_pair(&phi, s, 1.0).unwrap();
        prop_assert!(ms.value(&[x, y]) <= phi.value(&[x, y]));
    }

    #[test]
    fn luxemburg_norm_is_homogeneous(v0 in 0.01..5.0f64, v1 in -5.0..5.0f64, c in 0.1..10.0f64) {
        let phi = SpatialPhiFunction::uniform(Domain::cube(2, 1.0), PhiFunction::double_phase(2, 2.0, 3.0, 1.0).unwrap());
        let f = VectorField::constant(&phi, Vector::from([v0, v1]), 3).unwrap();
        let n = luxemburg_norm(&phi, &f, 1e-12).unwrap().get();
        let nc = luxemburg_norm(&phi, &f.scaled(c), 1e-12).unwrap().get();
        prop_assert!((nc - c * n).abs() <= 1e-8 * c * n);
        prop_assert!(modular(&phi, &f.scaled(1.0 / n)).unwrap().get() <= 1.0 + 1e-9);
    }
}
