use proptest::prelude::*;

use nullforge::boost::BoostSchedule;
use nullforge::convexshell::{parallel_domain, ConvexDomain};
use nullforge::geometry::{chord_lower_bound, intrinsic_distance, path_metric_length, triangulate_disc};
use nullforge::nullquad::{spinor_pi, theta_unchecked, BranchTracker, FrameTriple, NullVector, PsiFrame};
use nullforge::presets;
use nullforge::rhsolver::lemma_estimate;
use nullforge::series::{rationalize_boundary_map, BoundaryGrid, LaurentPoly};
use nullforge::weierstrass::{conformal_factor, flux_loop, flux_loop_winding, ImmersionDisc};
use nullforge::C64;

fn c64() -> impl Strategy<Value = C64> {
    (-1.0f64..1.0, -1.0f64..1.0).prop_map(|(a, b)| C64::new(a, b))
}

fn laurent(lo: i64, hi: i64) -> impl Strategy<Value = LaurentPoly> {
    prop::collection::vec(c64(), (hi - lo + 1) as usize).prop_map(move |c| LaurentPoly::new(lo, c))
}

/// Five-point Gauss–Legendre on [a, b], bisected until two levels agree.
fn gauss_legendre(f: &dyn Fn(f64) -> C64, a: f64, b: f64, depth: u32) -> C64 {
    const X: [f64; 5] = [0.0, -0.538_469_310_105_683, 0.538_469_310_105_683, -0.906_179_845_938_664, 0.906_179_845_938_664];
    const W: [f64; 5] = [0.568_888_888_888_889, 0.478_628_670_499_366, 0.478_628_670_499_366, 0.236_926_885_056_189, 0.236_926_885_056_189];
    let rule = |a: f64, b: f64| -> C64 {
        let (m, h) = (0.5 * (a + b), 0.5 * (b - a));
        X.iter().zip(W).map(|(x, w)| f(m + h * x) * w * h).sum()
    };
    let whole = rule(a, b);
    let mid = 0.5 * (a + b);
    let halves = rule(a, mid) + rule(mid, b);
    if depth == 0 || (whole - halves).norm() <= 1e-14 * (1.0 + halves.norm()) {
        halves
    } else {
        gauss_legendre(f, a, mid, depth - 1) + gauss_legendre(f, mid, b, depth - 1)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn antiderivative_matches_radial_quadrature(p in laurent(0, 12), t in 0.0f64..std::f64::consts::TAU) {
        let z = C64::from_polar(1.0, t);
        let prim = p.antiderivative_from_zero().unwrap().require_base_point().unwrap();
        let exact = prim.eval(z).unwrap();
        let quad = z * gauss_legendre(&|s| p.eval(z * s).unwrap(), 0.0, 1.0, 12);
        prop_assert!((exact - quad).norm() <= 1e-10 * (1.0 + quad.norm()));
    }

    #[test]
    fn antiderivative_is_linear_in_coefficients(p in laurent(0, 8), q in laurent(-5, -2), a in c64(), b in c64()) {
        let lhs = (&p.scale(a) + &q.scale(b)).antiderivative_from_zero().unwrap();
        let pa = p.antiderivative_from_zero().unwrap();
        let qa = q.antiderivative_from_zero().unwrap();
        for j in -5..12 {
            let want = pa.value.coeff(j) * a + qa.value.coeff(j) * b;
            prop_assert!((lhs.value.coeff(j) - want).norm() <= 1e-15 * (1.0 + want.norm()));
        }
    }

    #[test]
    fn rationalized_map_error_on_a_finer_grid(a in c64(), k in 0.3f64..2.0) {
        // ζ ↦ exp(k·a·ζ) + conj-type negative tail; smooth with geometric decay
        let m = 128;
        let f = move |z: C64| (a * k * z).exp() + 0.3 / (C64::new(2.5, 0.0) - z.inv());
        let g = BoundaryGrid::from_fn(m, 1, |z| vec![f(z)]).unwrap();
        let r = rationalize_boundary_map(&g, 1e-6, 63).unwrap();
        let fine = 4 * m;
        let worst = (0..fine)
            .map(|s| {
                let z = C64::from_polar(1.0, std::f64::consts::TAU * s as f64 / fine as f64);
                (r.eval(z, C64::new(0.0, 0.0)).unwrap()[0] - f(z)).norm()
            })
            .fold(0.0, f64::max);
        prop_assert!(worst <= 2.0 * r.sup_err + 1e-13, "{} vs {}", worst, r.sup_err);
    }

    #[test]
    fn spinor_image_is_null_and_quadratic(u in c64(), v in c64(), s in 0.1f64..10.0, l in c64()) {
        let (u, v) = (u * s, v * s);
        let p = spinor_pi(u, v);
        prop_assert!(theta_unchecked(&p, &p).norm() < 1e-12 * (1.0 + s.powi(4)));
        let pl = spinor_pi(l * u, l * v);
        for k in 0..3 {
            prop_assert!((pl[k] - l * l * p[k]).norm() < 1e-12 * (1.0 + p[k].norm()));
        }
    }

    #[test]
    fn psi_is_normalized_on_random_frames(a in c64(), b in c64(), c in c64(), d in c64(), e in c64(), f in c64()) {
        let nv = |x: C64, y: C64| NullVector::new(spinor_pi(x, y).to_vec());
        let (Ok(u), Ok(v), Ok(w)) = (nv(a, b), nv(c, d), nv(e, f)) else { return Ok(()) };
        let Ok(t) = FrameTriple::new(&u, &v, &w) else { return Ok(()) };
        let Ok(psi) = PsiFrame::new(t, &mut BranchTracker::new()) else { return Ok(()) };
        let one = C64::new(1.0, 0.0);
        let zero = C64::new(0.0, 0.0);
        let dist = |x: &[C64], y: &[C64]| x.iter().zip(y).map(|(p, q)| (p - q).norm_sqr()).sum::<f64>().sqrt();
        let size = |x: &[C64]| x.iter().map(|p| p.norm_sqr()).sum::<f64>().sqrt();
        let err = dist(&psi.eval(one, zero), u.as_slice()) + dist(&psi.eval(zero, one), v.as_slice());
        prop_assert!(err < 1e-9 * (size(u.as_slice()) + size(v.as_slice())));
    }

    #[test]
    fn conformal_factor_matches_finite_differences(r in 0.0f64..0.85, t in 0.0f64..std::f64::consts::TAU, which in 0usize..4) {
        let imm: ImmersionDisc = match which {
            0 => presets::plane(3, 1.3),
            1 => presets::vertical_disc(0.5, 0.2),
            2 => presets::spinor_disc_problem(0.1, 0.05).unwrap().center.real_part(),
            _ => presets::catenoid(),
        };
        let z = if which == 3 { C64::from_polar(0.3 + 0.6 * r / 0.85, t) } else { C64::from_polar(r, t) };
        let lam = conformal_factor(&imm, z).unwrap();
        let h = 1e-5;
        let f0 = imm.eval(z).unwrap();
        for dir in [C64::new(1.0, 0.0), C64::new(0.0, 1.0)] {
            let f1 = imm.eval(z + dir * h).unwrap();
            let fd = f1.iter().zip(&f0).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt() / h;
            prop_assert!((fd - lam).abs() <= 1e-3 * lam, "{} vs {}", fd, lam);
        }
    }

    #[test]
    fn flux_is_additive_in_the_winding(r in 0.25f64..0.95) {
        let cat = presets::catenoid();
        let one = flux_loop(&cat, r, 256).unwrap().0;
        let two = flux_loop_winding(&cat, r, 256, 2).unwrap().0;
        for (a, b) in one.iter().zip(&two) {
            prop_assert!((b - 2.0 * a).abs() < 1e-10);
        }
    }

    #[test]
    fn lemma_estimate_decays(a in prop::collection::vec(laurent(-3, 3), 1..=5)) {
        let e: Vec<f64> = [20, 40, 80].iter().map(|&n| lemma_estimate(&a, n).unwrap()).collect();
        prop_assert!(e[2] < e[1] && e[1] < e[0], "{:?}", e);
        let shape = |n: f64| (2.0 * n + 1.0).sqrt() / (n - 4.0);
        let c = e[0] / shape(20.0);
        for (n, err) in [(40.0, e[1]), (80.0, e[2])] {
            prop_assert!(err <= c * shape(n));
        }
    }

    #[test]
    fn boost_schedule_identities(d0 in 0.01f64..2.0, frac in 0.05f64..0.95, eps in 0.01f64..1.0) {
        let s = BoostSchedule::new(d0, frac * eps, eps).unwrap();
        for j in 1..40 {
            let cj = s.c / j as f64;
            prop_assert!((s.d(j) - s.d(j - 1) - cj).abs() <= 1e-12 * (1.0 + s.d(j)));
            prop_assert!((s.delta(j).powi(2) - s.delta(j - 1).powi(2) - cj * cj).abs() <= 1e-14);
            prop_assert!(s.delta(j) < eps);
        }
    }

    #[test]
    fn offsets_shift_curvature_radii(r in 0.1f64..5.0, frac in -2.0f64..0.99, a in 0.5f64..3.0, b in 0.5f64..3.0) {
        let ball = ConvexDomain::ball(vec![0.3, -0.1, 0.2], r).unwrap();
        let t = frac * r;
        let off = parallel_domain(&ball, t).unwrap();
        prop_assert!((1.0 / off.kappa_min() - (1.0 / ball.kappa_min() - t)).abs() <= 1e-12 * r.max(1.0));
        let e = ConvexDomain::ellipsoid(vec![0.0; 3], vec![a, b, 1.0]).unwrap();
        let t = frac / e.kappa_max();
        let off = parallel_domain(&e, t).unwrap();
        prop_assert!((1.0 / off.kappa_max() - (1.0 / e.kappa_max() - t)).abs() <= 1e-10);
        prop_assert!((1.0 / off.kappa_min() - (1.0 / e.kappa_min() - t)).abs() <= 1e-10);
    }

    #[test]
    fn ellipsoid_distance_is_a_distance(x in -3.0f64..3.0, y in -3.0f64..3.0, z in -3.0f64..3.0, t in -0.3f64..0.3) {
        let e = ConvexDomain::ellipsoid(vec![0.0; 3], vec![2.0, 1.5, 1.0]).unwrap();
        let p = [x, y, z];
        let sd = e.signed_distance(&p);
        // 1-Lipschitz along the coordinate directions and consistent with containment
        let q = [x + t, y, z];
        prop_assert!((e.signed_distance(&q) - sd).abs() <= t.abs() + 1e-9);
        let inside = (x / 2.0).powi(2) + (y / 1.5).powi(2) + z * z < 1.0;
        prop_assert_eq!(inside, sd < 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn intrinsic_distance_dominates_the_chord(a in c64(), s in 0.2f64..2.0) {
        // φ = s(1 + aζ)·(1, −i, 0) is an immersion for |a| < 1
        let a = a * 0.9 / (1.0 + a.norm());
        let coef = LaurentPoly::new(0, vec![C64::new(s, 0.0), a * s]);
        let phi = nullforge::series::VectorLaurent::from_scalar(&coef, &[C64::new(1.0, 0.0), C64::new(0.0, -1.0), C64::new(0.0, 0.0)]);
        let imm = ImmersionDisc::new(phi, vec![0.0; 3], nullforge::weierstrass::Domain::Disc).unwrap();
        let mesh = triangulate_disc(16, 64).unwrap();
        let d = intrinsic_distance(&imm, &mesh, 0).unwrap();
        let chord = chord_lower_bound(&imm, C64::new(0.0, 0.0), 1024).unwrap();
        prop_assert!(d.distance >= chord - 1e-12);
        let w = path_metric_length(&imm.phi, &d.points).unwrap();
        prop_assert!((w - d.distance).abs() <= 1e-10 * (1.0 + d.distance));
    }
}
