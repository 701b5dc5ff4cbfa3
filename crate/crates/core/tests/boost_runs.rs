use nullforge::boost::{boost_step, boundary_grid_of, jordan_csv, jordan_iterate, BoostConfig, BoostSchedule, JordanConfig};
use nullforge::presets;
use nullforge::C64;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[test]
fn plane_push_gains_distance_within_the_pythagoras_bound() {
    let f = presets::plane(3, 1.0);
    let y = boundary_grid_of(&f, 1024).unwrap();
    let cfg = BoostConfig::default();
    let (delta, eta) = (0.01, 0.1);
    let (g, r) = boost_step(&f, &y, delta, eta, ZERO, 0.99 * r_dist(), &cfg).unwrap();
    assert!(r.pass_a() && r.pass_b(), "{r:?}");
    assert!(r.sup_dev < (delta * delta + eta * eta).sqrt() + 2.0 * cfg.rh_eps);
    assert!(r.gain >= 0.5 * eta);
    assert!(r.flux_delta < 1e-10);
    assert!(nullforge::weierstrass::hopf_residual(&g, 512) < 1e-8);
}

fn r_dist() -> f64 {
    std::f64::consts::FRAC_1_SQRT_2
}

#[test]
fn zero_push_is_the_identity_on_the_boundary() {
    let f = presets::plane(3, 1.0);
    let y = boundary_grid_of(&f, 1024).unwrap();
    let (_, r) = boost_step(&f, &y, 0.01, 0.0, ZERO, 0.5, &BoostConfig::default()).unwrap();
    assert!(r.sup_dev < 0.01 + 2.0 * BoostConfig::default().rh_eps, "{r:?}");
    assert_eq!(r.eta, 0.0);
}

#[test]
fn jordan_without_steps_when_already_far() {
    let f = presets::plane(3, 0.05);
    let run = jordan_iterate(&f, ZERO, 0.01, 0.2, &JordanConfig::default()).unwrap();
    assert!(run.trace.is_empty());
    assert!(run.initial_dist > 0.01);
}

#[test]
fn jordan_run_doubles_the_distance() {
    let f = presets::plane(3, 0.05);
    let eps = 0.2;
    let run = jordan_iterate(&f, ZERO, 0.1, eps, &JordanConfig::default()).unwrap();
    println!("{}", jordan_csv(&run.trace));
    let s: BoostSchedule = run.schedule;
    for j in 1..=4 {
        assert!((s.d(j) - s.d(j - 1) - s.c / j as f64).abs() < 1e-12);
        assert!((s.delta(j).powi(2) - s.delta(j - 1).powi(2) - (s.c / j as f64).powi(2)).abs() < 1e-12);
    }
    let last = run.trace.last().unwrap();
    assert!(last.measured_dist > 2.0 * run.initial_dist);
    assert!(last.drift < eps);
    for w in run.trace.windows(2) {
        assert!(w[1].measured_dist > w[0].measured_dist);
    }
}
