use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64 as C;
use proptest::prelude::*;
use tronquee::borel::sum::sum_transseries;
use tronquee::ode::path::Chart;
use tronquee::ode::system::{energy, nonlinearity, nonlinearity_forcing_1, map_x_to_z};
use tronquee::ode::*;
use tronquee::pole_sector::two_scale::xi_of;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

#[test]
fn rhs_h_examples() {
    let (hp, hpp) = rhs_h(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    assert_eq!(hp, c(0.0, 0.0));
    assert!((hpp - 392.0 / 625.0).norm() < 1e-16);
    let (_, far) = rhs_h(c(1e8, 0.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!(far.norm() < 1e-30);
    assert_eq!(rhs_h(c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).unwrap_err().kind(), "XZero");
}

#[test]
fn transform_singularity_refused() {
    let e = h_to_y(c(0.0, 0.25), c(1.0, 0.0), c(0.0, 0.0)).unwrap_err();
    assert_eq!(e.kind(), "SingularTransform");
}

#[test]
fn forcing_part_of_nonlinearity() {
    let x = c(10.0, 0.0);
    let g = nonlinearity(x, [c(0.0, 0.0), c(0.0, 0.0)]).unwrap();
    assert!((g[0] - nonlinearity_forcing_1(x)).norm() < 1e-15 * g[0].norm().max(1e-300) + 1e-18);
}

#[test]
fn nonlinearity_orders() {
    // g = O(x^-4) + O(y x^-2) + O(|y|²)
    for x in [20.0, 40.0, 80.0] {
        let g0 = nonlinearity(c(x, 1.0), [c(0.0, 0.0); 2]).unwrap();
        assert!(g0[0].norm() * x.powi(4) < 20.0 && g0[1].norm() * x.powi(4) < 20.0);
    }
    let x = c(1000.0, 0.0);
    let g0 = nonlinearity(x, [c(0.0, 0.0); 2]).unwrap();
    for eps in [1e-3, 1e-5, 1e-7] {
        let g = nonlinearity(x, [c(eps, 0.0), c(0.0, eps)]).unwrap();
        let bound = 10.0 * (eps / (x.norm() * x.norm()) + eps * eps);
        assert!((g[0] - g0[0]).norm() < bound && (g[1] - g0[1]).norm() < bound);
    }
}

/// d/dx y(x) along an actual solution equals rhs_y.
#[test]
fn rhs_y_is_the_conjugated_system() {
    let x0 = C::from_polar(20.0, 0.6);
    let s = tritronquee_seed(x0).unwrap();
    let x1 = x0 - c(1.0, 0.5);
    let tr = integrate_path(s.h, s.hp, &Path::new().line(x0, x1), &IntegrateOptions::default()).unwrap();
    let len = (x1 - x0).norm();
    let dir = (x1 - x0) / len;
    let d = 1e-3;
    let (xm, hm, hpm) = tr.at(0.5 * len - d);
    let (xc, hc, hpc) = tr.at(0.5 * len);
    let (xp, hpl, hppl) = tr.at(0.5 * len + d);
    let ym = h_to_y(xm, hm, hpm).unwrap();
    let yp = h_to_y(xp, hpl, hppl).unwrap();
    let yc = h_to_y(xc, hc, hpc).unwrap();
    let rhs = rhs_y(xc, yc).unwrap();
    for i in 0..2 {
        let fd = (yp[i] - ym[i]) / (2.0 * d * dir);
        assert!((fd - rhs[i]).norm() < 1e-7 * rhs[i].norm().max(1e-8), "{i}: {fd} vs {}", rhs[i]);
    }
}

#[test]
fn z_map_examples() {
    let x = c(50.0, 0.0);
    let p = map_x_to_z(x, c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    assert!((p.z.arg() + PI / 5.0).abs() < 1e-14);
    let want = C::i() * (p.z / 6.0).sqrt() * (1.0 - 4.0 / (25.0 * 2500.0));
    assert!((p.y - want).norm() < 1e-14 * want.norm());
    for th in [-FRAC_PI_2, 0.0, FRAC_PI_2] {
        let z = map_x_to_z(C::from_polar(30.0, th), c(0.0, 0.0), c(0.0, 0.0)).unwrap().z;
        let want = 0.8 * th - PI / 5.0;
        assert!((z.arg() - want).abs() < 1e-12);
        assert!(z.arg() >= -3.0 * PI / 5.0 - 1e-12 && z.arg() <= PI / 5.0 + 1e-12);
    }
}

proptest! {
    #[test]
    fn y_round_trip(r in 1.0f64..100.0, th in -3.0f64..3.0, a in -5.0f64..5.0, b in -5.0f64..5.0, d in -5.0f64..5.0, e in -5.0f64..5.0) {
        let x = C::from_polar(r, th);
        let (h, hp) = (c(a, b), c(d, e));
        let y = h_to_y(x, h, hp).unwrap();
        let (h2, hp2) = y_to_h(x, y).unwrap();
        prop_assert!((h2 - h).norm() < 1e-12 * (1.0 + h.norm()) && (hp2 - hp).norm() < 1e-12 * (1.0 + hp.norm()));
    }

    #[test]
    fn z_round_trip(r in 2.0f64..100.0, th in -2.4f64..2.4, a in -1.0f64..1.0, b in -1.0f64..1.0, d in -1.0f64..1.0, e in -1.0f64..1.0) {
        let x = C::from_polar(r, th);
        let (h, hp) = (c(a, b), c(d, e));
        let p = map_x_to_z(x, h, hp).unwrap();
        let (x2, h2, hp2) = map_z_to_x(p).unwrap();
        prop_assert!((x2 - x).norm() < 1e-11 * r);
        prop_assert!((h2 - h).norm() < 1e-10 && (hp2 - hp).norm() < 1e-10);
    }
}

#[test]
fn z_branch_cut_reported() {
    let p = map_x_to_z(C::from_polar(10.0, 3.0), c(0.0, 0.0), c(0.0, 0.0)).unwrap();
    let mut q = p;
    q.z = C::from_polar(q.z.norm(), PI * 0.9);
    assert_eq!(map_z_to_x(q).unwrap_err().kind(), "BranchCut");
}

#[test]
fn tritronquee_trace_matches_borel_sum() {
    let (x30, x10) = (C::from_polar(30.0, FRAC_PI_4), C::from_polar(10.0, FRAC_PI_4));
    let s = tritronquee_seed(x30).unwrap();
    let tr = integrate_path(s.h, s.hp, &Path::new().line(x30, x10), &IntegrateOptions::default()).unwrap();
    let want = sum_transseries(c(0.0, 0.0), -FRAC_PI_4, x10, 8).unwrap().value;
    assert!((tr.last().h - want).norm() < 1e-8);
    assert!(detect_poles(&tr).unwrap().is_empty());
}

#[test]
fn zero_length_path() {
    let x = c(20.0, 5.0);
    let tr = integrate_path(c(0.1, 0.0), c(0.0, 0.0), &Path::new().line(x, x), &IntegrateOptions::default()).unwrap();
    assert_eq!(tr.samples.len(), 1);
}

/// Seeded near arg π/2 with C = 1, the ray at arg π/2 + 0.15 runs into the first pole array.
fn crossing_trace(opts: &IntegrateOptions) -> SolutionTrace {
    let one = c(1.0, 0.0);
    let x0 = C::from_polar(40.0, FRAC_PI_2 - 0.02);
    let s = far_field_init(one, x0, 30, 4, 1e-12).unwrap();
    let th1 = FRAC_PI_2 + 0.15;
    let path = Path::new().arc(c(0.0, 0.0), 40.0, FRAC_PI_2 - 0.02, th1).line_to(C::from_polar(20.0, th1));
    integrate_path(s.h, s.hp, &path, opts).unwrap()
}

#[test]
fn far_field_seed_crosses_pole_array() {
    let tr = crossing_trace(&IntegrateOptions::default());
    assert!(tr.samples.iter().any(|s| s.chart == Chart::G));
    let poles = detect_poles_with(&tr, true).unwrap();
    assert!(!poles.is_empty());
    for p in &poles {
        assert!(p.witness < 1e-10, "witness {}", p.witness);
        let a = p.laurent_a.unwrap();
        assert!((a - 12.0).norm() < 1e-6, "Laurent a = {a}");
    }
}

#[test]
fn chart_switch_is_transparent() {
    let base = IntegrateOptions::default();
    let with_g = crossing_trace(&base);
    let first_g = with_g.samples.iter().position(|s| s.chart == Chart::G).expect("g chart used");
    // Stop just before the first pole and compare against an h-only run.
    let s_stop = with_g.samples[first_g].s;
    let h_only = IntegrateOptions { enter_g: f64::INFINITY, ..base };
    let tr = crossing_trace(&IntegrateOptions { ..h_only });
    let (_, ha, _) = with_g.at(s_stop);
    let (_, hb, _) = tr.at(s_stop);
    assert!((ha - hb).norm() < 1e-10 * ha.norm(), "{ha} vs {hb}");
}

#[test]
fn pole_locations_approach_the_curve_xi_12() {
    use tronquee::pole_sector::sweep::compare_poles;
    let cmp = compare_poles(c(1.0, 0.0), 3..=12, &IntegrateOptions::default()).unwrap();
    let d: Vec<f64> = cmp.rows.iter().map(|r| (xi_of(r.detected, c(1.0, 0.0)) - 12.0).norm()).collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
    assert!(d[d.len() - 1] < 0.5);
}

#[test]
fn far_field_examples() {
    let s = far_field_init(c(0.0, 0.0), c(30.0, 1e-9), 40, 0, 1e-12).unwrap();
    let b = sum_transseries(c(0.0, 0.0), -0.3, c(30.0, 1e-9), 8).unwrap().value;
    assert!((s.h - b).norm() < 10.0 * s.err.max(1e-16));
    let x = C::from_polar(30.0, FRAC_PI_4);
    let s0 = far_field_init(c(0.0, 0.0), x, 30, 3, 1e-10).unwrap();
    let s1 = far_field_init(c(1.0, 0.0), x, 30, 3, 1e-10).unwrap();
    let lead = (-x).exp() / x.sqrt();
    assert!(((s1.h - s0.h) / lead - 1.0).norm() < 0.05);
    let bad = far_field_init(c(1.0, 0.0), C::from_polar(5.0, 0.3), 30, 3, 1e-12).unwrap();
    assert!(bad.warning.is_some());
    assert!(far_field_init(c(1.0, 0.0), c(-5.0, 0.0), 30, 3, 1e-12).is_err());
}

#[test]
fn single_valuedness_and_symmetry() {
    let cont = continue_around(20.0, &IntegrateOptions::default()).unwrap();
    assert!(cont.residual().norm() < 1e-4, "{}", cont.residual());
    assert_eq!(cont.g_chart_samples().1, 0);
    assert!(cont.counterclockwise.samples.iter().all(|s| s.h.norm() < 10.0));
    for th in [0.0, -0.3, -FRAC_PI_4, -FRAC_PI_2] {
        let a = cont.clockwise_at(th);
        let b = cont.counterclockwise_at(PI - th);
        assert!((a - b.conj()).norm() < 1e-6 * (1.0 + a.norm()), "theta {th}: {a} vs {b}");
    }
}

#[test]
fn energy_drift_is_order_one_over_x() {
    let (x30, x10) = (C::from_polar(30.0, 0.5), C::from_polar(10.0, 0.5));
    let s = tritronquee_seed(x30).unwrap();
    let tr = integrate_path(s.h, s.hp, &Path::new().line(x30, x10), &IntegrateOptions::default()).unwrap();
    let e0 = energy(tr.samples[0].h, tr.samples[0].hp);
    let max_hp = tr.samples.iter().map(|s| s.hp.norm()).fold(0.0, f64::max);
    let drift = tr.samples.iter().map(|s| (energy(s.h, s.hp) - e0).norm()).fold(0.0, f64::max);
    // ds/dx = 2h'(A/x⁴ − h'/x)
    let bound = 2.0 * max_hp * (1.0 / 10f64.powi(4) + max_hp / 10.0) * 20.0;
    assert!(drift <= bound, "{drift} > {bound}");
}

#[test]
fn tolerance_scaling() {
    let (x30, x10) = (C::from_polar(30.0, FRAC_PI_4), C::from_polar(10.0, FRAC_PI_4));
    let s = tritronquee_seed(x30).unwrap();
    let want = sum_transseries(c(0.0, 0.0), -FRAC_PI_4, x10, 8).unwrap().value;
    let err = |tol: f64| {
        let o = IntegrateOptions { tol, ..IntegrateOptions::default() };
        let tr = integrate_path(s.h, s.hp, &Path::new().line(x30, x10), &o).unwrap();
        (tr.last().h - want).norm()
    };
    let (e1, e2) = (err(1e-7), err(5e-8));
    assert!(e2 <= 0.5 * e1, "{e1:e} -> {e2:e}");
}
