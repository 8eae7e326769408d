use tsbounds::dynamics::{application_bound, solve_ivp, verify_application, DynamicsError, IvpSpec};
use tsbounds::timescale::ScaleSpec;

#[test]
fn constant_solution_has_margin_bound_minus_initial_value() {
    let spec = IvpSpec::new(ScaleSpec::Uniform { a: 0.0, b: 2.0, n: 30 }, "0", "u", -0.7);
    let r = verify_application(&spec, 1.0).unwrap();
    assert!(r.pass);
    for (p, m) in r.bound.points.iter().zip(&r.margins) {
        assert_eq!(m.unwrap(), p.bound.unwrap() - 0.7);
        assert!(m.unwrap() >= 0.0);
    }
}

#[test]
fn half_sum_instance_is_dominated_on_both_scales() {
    for scale in [ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 100 }, ScaleSpec::Integer { a: 0, b: 5 }] {
        let spec = IvpSpec::new(scale, "(u+v)/2", "u", 1.0);
        let r = verify_application(&spec, 1.0).unwrap();
        assert!(r.pass);
        assert_eq!(r.residual, 0.0);
        assert!(r.worst_margin().unwrap() >= 0.0);
    }
}

#[test]
fn extreme_envelope_instance_has_the_smallest_margins() {
    let scale = ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 60 };
    let extreme = verify_application(&IvpSpec::new(scale.clone(), "u+v", "u", 1.0), 1.0).unwrap();
    let half = verify_application(&IvpSpec::new(scale, "(u+v)/2", "u", 1.0), 1.0).unwrap();
    assert!(extreme.pass && half.pass);
    let last = extreme.margins.len() - 1;
    assert!(extreme.margins[last].unwrap() < half.margins[last].unwrap());
}

#[test]
fn negative_trajectories_use_absolute_values() {
    let spec = IvpSpec::new(ScaleSpec::Integer { a: 0, b: 6 }, "(u+v)/2", "u", -2.0);
    let u = solve_ivp(&spec).unwrap();
    assert!(u.values().iter().all(|&v| v < 0.0));
    let r = verify_application(&spec, 1.0).unwrap();
    assert!(r.pass);
}

#[test]
fn estimate_is_independent_of_the_base_point() {
    let spec = IvpSpec::new(ScaleSpec::Uniform { a: 0.0, b: 1.0, n: 40 }, "(u+v)/2", "u", 1.0);
    let a = application_bound(&spec, 1.0).unwrap();
    for x0 in [0.5, 2.0] {
        let b = application_bound(&spec, x0).unwrap();
        for (p, q) in a.points.iter().zip(&b.points) {
            let (p, q) = (p.bound.unwrap(), q.bound.unwrap());
            assert!((p - q).abs() <= 1e-9 * p);
        }
    }
}

#[test]
fn bad_expressions_are_reported() {
    let spec = IvpSpec::new(ScaleSpec::Integer { a: 0, b: 3 }, "u + s", "u", 1.0);
    assert!(matches!(solve_ivp(&spec), Err(DynamicsError::Parse { field: "F", .. })));
    let spec = IvpSpec::new(ScaleSpec::Integer { a: 0, b: 3 }, "u", "log(u - 5)", 1.0);
    assert!(matches!(solve_ivp(&spec), Err(DynamicsError::Eval { what: "K", .. })));
}
