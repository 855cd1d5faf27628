use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64 as C;
use proptest::prelude::*;
use tronquee::connection::mu_closed_form;
use tronquee::cycles::*;

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

fn j(s: C) -> C {
    cycle_j(s).unwrap().value
}

fn l(s: C) -> C {
    cycle_l(s).unwrap().value
}

#[test]
fn l_is_twice_dj() {
    let s = c(-0.5, 0.0);
    let h = 1e-4;
    let dj = (j(s + h) - j(s - h)) / (2.0 * h);
    assert!((l(s) - 2.0 * dj).norm() < 1e-8 * l(s).norm(), "{} vs {}", l(s), 2.0 * dj);
}

/// Central first and second differences, Richardson-extrapolated from h and h/2.
fn second_difference<F: Fn(C) -> C>(f: F, s: C, h: f64) -> (C, C) {
    let d = |h: f64| {
        let (fm, f0, fp) = (f(s - h), f(s), f(s + h));
        ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
    };
    let (a, b) = (d(h), d(0.5 * h));
    ((4.0 * b.0 - a.0) / 3.0, (4.0 * b.1 - a.1) / 3.0)
}

#[test]
fn j_and_l_equations_by_finite_differences() {
    for s in [c(-0.5, 0.0), c(-0.2, 0.1), c(-1.0, -0.2), c(0.3, 0.2)] {
        let (_, jpp) = second_difference(j, s, 1e-3);
        let rj = (jpp + 0.25 * rho(s) * j(s)).norm() / j(s).norm();
        assert!(rj < 1e-6, "J at {s}: {rj:e}");
        let (lp, lpp) = second_difference(l, s, 1e-3);
        let rl = (lpp - rho_log_derivative(s) * lp + 0.25 * rho(s) * l(s)).norm() / l(s).norm();
        assert!(rl < 1e-6, "L at {s}: {rl:e}");
    }
}

#[test]
fn residuals_on_a_grid() {
    for a in [-1.2, -0.9, -0.6, -0.3, -0.1, 0.1, 0.4] {
        for b in [-0.3, 0.0, 0.3] {
            let s = c(a, b);
            if s.norm() < 0.05 || (s + 4.0 / 3.0).norm() < 0.05 {
                continue;
            }
            let r = cycle_residuals(s).unwrap();
            assert!(r.j_equation < 1e-6 && r.l_equation < 1e-6 && r.l_vs_dj < 1e-8, "{r:?}");
        }
    }
}

#[test]
fn contour_deformation_invariance() {
    for s in [c(-0.1, 0.0), c(-0.5, 0.2), c(-1.0, 0.0)] {
        let cy = Cycle::start(s).unwrap();
        let (alt, _) = build_circle(&cy.roots, true).unwrap();
        assert!((alt.center - cy.circle.center).norm() > 1e-3);
        let a = cy.j().unwrap().value;
        let b = cy.with_circle(alt).j().unwrap().value;
        assert!((a - b).norm() < 1e-10 * a.norm(), "{a} vs {b}");
    }
}

#[test]
fn degenerate_points_refused() {
    for s in [c(0.0, 0.0), c(-4.0 / 3.0, 0.0), c(1e-4, 0.0)] {
        assert_eq!(cycle_j(s).unwrap_err().kind(), "DegenerateCycle");
    }
}

#[test]
fn wronskian_and_kappa0() {
    let pts: Vec<C> = (0..20).map(|i| c(-1.2 + 0.06 * i as f64 + 0.0, 0.05)).collect();
    let t = solve_j_ode(&pts).unwrap();
    assert!(t.wronskian_variation() < 1e-9, "{}", t.wronskian_variation());
    assert!((t.kappa0() + 4.8).norm() < 1e-9, "{}", t.kappa0());
}

#[test]
fn jhat_normalization_and_equation() {
    let z = jhat(c(0.0, 0.0)).unwrap();
    assert!(z[0].norm() < 1e-15 && (z[1] - 1.0).norm() < 1e-15);
    for s in [c(0.3, 0.0), c(-0.5, 0.1), c(-1.1, 0.0)] {
        let f = |s: C| jhat(s).unwrap()[0];
        let (d1, d2) = second_difference(f, s, 1e-3);
        assert!((d1 - jhat(s).unwrap()[1]).norm() < 1e-6);
        assert!((d2 + 0.25 * rho(s) * f(s)).norm() < 1e-5 * (1.0 + f(s).norm()));
    }
}

fn x_start(r: f64) -> C {
    C::from_polar(r, -1.05 * FRAC_PI_2)
}

#[test]
fn autonomous_step_keeps_s() {
    let cy = Cycle::start(c(-0.1, 0.0)).unwrap();
    let opts = CycleOptions { autonomous: true, ..Default::default() };
    let r = poincare_step(&cy, x_start(50.0), &opts).unwrap();
    assert_eq!(r.s, c(-0.1, 0.0));
}

#[test]
fn one_step_leading_behavior() {
    let s0 = c(-0.1, 0.0);
    let cy = Cycle::start(s0).unwrap();
    let (jv, lv) = (cy.j().unwrap().value, cy.l().unwrap().value);
    // Relative deviation from x₁ − x₀ = L, s₁ − s₀ = −2J/x₀ at |x₀| = r.
    let dev = |r: f64| {
        let x0 = x_start(r);
        let st = poincare_step(&cy, x0, &CycleOptions::default()).unwrap();
        assert!(st.x.re.is_finite() && st.s.re.is_finite());
        let ds = -2.0 * jv / x0;
        ((st.x - x0 - lv).norm() / lv.norm(), (st.s - s0 - ds).norm() / ds.norm())
    };
    let (a, b) = (dev(50.0), dev(100.0));
    assert!(a.0 < 0.2 && a.1 < 0.2, "{a:?}");
    // Corrections are O(1/x).
    assert!(b.0 < 0.6 * a.0 && b.1 < 0.6 * a.1, "{a:?} -> {b:?}");
}

#[test]
fn invariant_drift_shrinks_with_x0() {
    let s0 = c(-0.1, 0.0);
    let a = run_cycles(x_start(50.0), s0, 25, &CycleOptions::default()).unwrap();
    let b = run_cycles(x_start(100.0), s0, 50, &CycleOptions::default()).unwrap();
    assert!(a.q_drift() <= 0.1 && a.k_drift() <= 0.1, "{} {}", a.q_drift(), a.k_drift());
    assert!(b.q_drift() < a.q_drift() && b.k_drift() < a.k_drift());
    assert!((a.kappa0 + 4.8).norm() < 1e-9);
}

#[test]
fn stokes_equation() {
    let sol = solve_stok2(1).unwrap();
    assert!((sol.mu.norm() - (6.0 / (5.0 * PI)).sqrt()).abs() < 1e-12);
    assert!((sol.mu.arg() - FRAC_PI_2).abs() < 1e-12);
    assert!(sol.residual < 1e-12);
    assert!((sol.mu - mu_closed_form()).norm() < 1e-12);
    assert_eq!(solve_stok2(2).unwrap_err().kind(), "NoIntegerConsistency");
    assert_eq!(solve_stok2_auto(-5..=5).unwrap().n, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]
    /// Tracking in one go or through a midpoint gives the same labelled roots.
    #[test]
    fn root_tracking_is_continuous(a in -1.2f64..0.5, b in 0.1f64..0.6, da in -0.3f64..0.3, db in -0.05f64..0.05) {
        let s0 = c(a, b);
        let s1 = c(a + da, b + db);
        let r0 = classify_roots(s0);
        let direct = track_roots(r0, s0, s1).unwrap();
        let mid = 0.5 * (s0 + s1);
        let two = track_roots(track_roots(r0, s0, mid).unwrap(), mid, s1).unwrap();
        for i in 0..3 {
            prop_assert!(cubic(direct[i], s1).norm() < 1e-10);
            prop_assert!((direct[i] - two[i]).norm() < 1e-9);
        }
    }
}
