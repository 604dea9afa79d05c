use orlicz_core::conditions::*;
use orlicz_core::phi_core::*;
use orlicz_core::Error;

fn uniform(phi: PhiFunction) -> SpatialPhiFunction {
    SpatialPhiFunction::uniform(Domain::cube(2, 1.0), phi)
}

fn balls() -> Vec<Ball> {
    vec![Ball::new([0.0, 0.0], 0.5).unwrap(), Ball::new([0.5, 0.5], 0.125).unwrap()]
}

#[test]
fn convex_functions_satisfy_inc1_and_w4_at_one() {
    let cfg = ConditionConfig::default();
    for phi in [
        PhiFunction::power_norm(2, 1.0).unwrap(),
        PhiFunction::double_phase(2, 1.5, 4.0, 3.0).unwrap(),
        PhiFunction::linfty_indicator(2, 1.0).unwrap(),
    ] {
        let inc = check_inc1(&phi, 1.0, &cfg.probe).unwrap();
        assert!(inc.passed(), "{}", inc.machine_line());
        let w4 = check_almost_convex(&phi, &cfg).unwrap();
        assert_eq!(w4.beta, Some(1.0));
        assert_eq!(w4.machine_line(), "PASS beta=1");
    }
}

#[test]
fn inc1_needs_phi_of_zero_to_vanish() {
    let table = Table::new(vec![vec![-1.0, 0.0, 1.0]], vec![ExtReal::finite(1.0); 3]).unwrap();
    let phi = PhiFunction::tabulated(table).unwrap();
    assert!(matches!(check_inc1(&phi, 1.0, &ProbeSpec::default()), Err(Error::Precondition(_))));
}

#[test]
fn quasinorm_indicator_passes_w4_only_after_contraction() {
    let cfg = ConditionConfig::default();
    let phi = PhiFunction::linfty_indicator(2, 0.5).unwrap();
    let cert = check_almost_convex(&phi, &cfg).unwrap();
    assert_eq!(cert.beta, Some(0.5));
    assert!(w4_witness_at(&phi, &cfg, 1.0).unwrap().lhs.is_infinite());
}

#[test]
fn x_independent_phi_passes_a0_a1_and_m_at_one() {
    let phi = uniform(PhiFunction::power_norm(2, 2.0).unwrap());
    let cfg = ConditionConfig::with_balls(balls());
    assert_eq!(check_a0(&phi, &cfg).unwrap().beta, Some(1.0));
    let a1 = check_a1(&phi, &cfg).unwrap();
    assert_eq!(a1.machine_line(), "PASS beta=1");
    let m = check_m(&phi, &cfg).unwrap();
    assert_eq!(m.machine_line(), "PASS beta=1");
}

#[test]
fn chain_constants_for_x_independent_phi() {
    let phi = uniform(PhiFunction::power_norm(2, 2.0).unwrap());
    let cfg = ConditionConfig::with_balls(balls());
    let a1 = check_a1(&phi, &cfg).unwrap();
    let chain = a1_implies_m_chain(&phi, &a1, &cfg).unwrap();
    assert!(chain.passed());
    assert_eq!(chain.get("i"), Some("2"));
    assert_eq!(chain.beta, Some(0.5 * 1.0 / 64.0));
}

#[test]
fn chain_refuses_distinct_psi() {
    let phi = uniform(PhiFunction::power_norm(2, 2.0).unwrap());
    let mut cfg = ConditionConfig::with_balls(balls());
    let a1 = check_a1(&phi, &cfg).unwrap();
    cfg.psi = Some(uniform(PhiFunction::power_norm(2, 3.0).unwrap()));
    assert!(matches!(a1_implies_m_chain(&phi, &a1, &cfg), Err(Error::OutOfScope(_))));
}

#[test]
fn balls_of_measure_above_one_are_rejected() {
    let phi = uniform(PhiFunction::power_norm(2, 2.0).unwrap());
    let cfg = ConditionConfig::with_balls(vec![Ball::new([0.0, 0.0], 1.0).unwrap()]);
    assert!(check_a1(&phi, &cfg).is_err());
    let cfg = ConditionConfig::with_balls(vec![Ball::new([5.0, 5.0], 0.5).unwrap()]);
    assert!(check_a1(&phi, &cfg).is_err());
}

#[test]
fn lemma_transforms() {
    assert_eq!(range_to_plus(0.5, 0.5), 0.125);
    assert_eq!(range_to_plus(0.01, 0.5), 0.01);
    assert_eq!(plus_to_range(0.5), 0.25);
    assert_eq!(doubling_exponent(1), 1);
    assert_eq!(doubling_exponent(2), 2);
    assert_eq!(doubling_exponent(3), 2);
}

#[test]
fn jensen_for_convex_phi_without_plus_one() {
    let phi = uniform(PhiFunction::power_norm(2, 2.0).unwrap());
    let ball = Ball::new([0.0, 0.0], 0.5).unwrap();
    let f = VectorField::constant(&phi, Vector::from([0.3, -0.2]), 4).unwrap();
    let cert = jensen_check(&phi, &f, &ball, 1.0, false, &SamplerSpec::default(), 1e-9).unwrap();
    assert!(cert.passed(), "{}", cert.report());
    let big = f.scaled(10.0);
    assert!(matches!(
        jensen_check(&phi, &big, &ball, 1.0, false, &SamplerSpec::default(), 1e-9),
        Err(Error::Precondition(_))
    ));
}

#[test]
fn failing_certificates_reproduce() {
    let phi = PhiFunction::min_of_coordinate_squares(2).unwrap();
    let cert = check_almost_convex(&phi, &ConditionConfig::default()).unwrap();
    let (lhs, rhs) = reproduce_pointwise(&phi, &cert).unwrap();
    let w = cert.witness.unwrap();
    assert_eq!((lhs, rhs), (w.lhs, w.rhs));
}
