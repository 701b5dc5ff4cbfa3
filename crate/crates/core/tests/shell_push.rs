use nullforge::convexshell::{parallel_domain, proper_csv, proper_iterate, push_step, ConvexDomain, ProperConfig, PushConfig, ShellSchedule};
use nullforge::presets;
use nullforge::C64;

fn unit_ball() -> ConvexDomain {
    ConvexDomain::ball(vec![0.0; 3], 1.0).unwrap()
}

fn boundary_radii(f: &nullforge::weierstrass::ImmersionDisc, m: usize) -> (f64, f64) {
    let g = nullforge::weierstrass::NullDisc::from_real(f).unwrap();
    let r: Vec<f64> = g.real_circle(m, 1.0).iter().map(|p| p.iter().map(|x| x * x).sum::<f64>().sqrt()).collect();
    (r.iter().cloned().fold(f64::INFINITY, f64::min), r.iter().cloned().fold(0.0, f64::max))
}

#[test]
fn push_into_a_thin_shell() {
    let d = unit_ball();
    let l = ConvexDomain::ball(vec![0.0; 3], 0.5).unwrap();
    let f = presets::vertical_disc(0.75, 0.1);
    let (g, rep) = push_step(&f, &l, &d, 0.5, 0.2, 0.0, &PushConfig::default()).unwrap();
    assert!(!rep.skipped);
    assert!(rep.pass_a() && rep.pass_b() && rep.pass_c() && rep.pass_d(), "{rep:?}");
    assert!(rep.containment < 0.0);
    assert!(rep.rh.as_ref().unwrap().pass);
    let (lo, hi) = boundary_radii(&g, 4096);
    assert!(lo > 0.8 && hi < 1.0, "{lo} {hi}");
}

#[test]
fn boundary_already_in_the_shell_is_left_alone() {
    let d = unit_ball();
    let l = parallel_domain(&d, 0.5).unwrap();
    let f = presets::vertical_disc(0.9, 0.02);
    let (g, rep) = push_step(&f, &l, &d, 0.5, 0.2, 0.0, &PushConfig::default()).unwrap();
    assert!(rep.skipped && g == f);
    assert_eq!(rep.sup_dev, 0.0);
}

#[test]
fn ellipsoids_are_rejected_by_the_push() {
    let d = ConvexDomain::ellipsoid(vec![0.0; 3], vec![1.2, 1.0, 1.0]).unwrap();
    let l = parallel_domain(&d, 0.5).unwrap();
    let f = presets::vertical_disc(0.75, 0.1);
    assert!(push_step(&f, &l, &d, 0.5, 0.2, 0.0, &PushConfig::default()).is_err());
}

#[test]
fn properness_loop_reaches_the_last_shell() {
    let d = unit_ball();
    let s = ShellSchedule::geometric(0.2, 0.5, 4, 1.0, 2.0).unwrap();
    let f = presets::vertical_disc(0.95, 0.002);
    let cfg = ProperConfig { lookahead: 3, ..ProperConfig::default() };
    let run = proper_iterate(&f, &d, &s, C64::new(0.0, 0.0), &cfg).unwrap();
    println!("{}", proper_csv(&run.trace));
    assert_eq!(run.trace.len(), 4);
    let last = run.trace.last().unwrap();
    assert!(last.gap_min > 0.0 && last.gap_max < s.delta(4), "{last:?}");
    assert!(run.total_drift < s.series_sum());
    for r in &run.trace {
        assert!(r.drift < r.bound, "{r:?}");
    }
    for w in run.trace.windows(2) {
        assert!(w[1].dist >= w[0].dist && w[1].k_radius >= w[0].k_radius);
    }
    assert!(run.trace[0].dist >= run.initial_dist);
    let (lo, hi) = boundary_radii(&run.f, 1 << 15);
    assert!(lo > 1.0 - s.delta(4) && hi < 1.0, "{lo} {hi}");
}
