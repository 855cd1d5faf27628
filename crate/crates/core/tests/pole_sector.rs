use std::f64::consts::PI;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use tronquee::connection::power_series;
use tronquee::ode::IntegrateOptions;
use tronquee::pole_sector::ratfn::f0;
use tronquee::pole_sector::two_scale::{compose_g, g_equation_residual, integrable_c, tables};
use tronquee::pole_sector::*;
use tronquee::rat::{is_zero, q, qi, zero, Q};

fn poly(c: &[Q]) -> Poly {
    Poly::new(c.to_vec())
}

fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

/// −ξ(ξ³ − 180ξ² − 12600ξ − 12960)/60, the numerator shared by F1 and G1.
fn quartic() -> Poly {
    poly(&[zero(), qi(216), qi(210), qi(3), -q(1, 60)])
}

#[test]
fn f0_closed_form() {
    let f = compute_f(0).unwrap();
    assert_eq!(f[0], RatFn::new(poly(&[zero(), qi(144)]), [0, 2, 0]));
    assert_eq!(f[0].eval(&zero()).unwrap(), zero());
    let d = f[0].xi_d().div_xi();
    assert_eq!(d.eval(&zero()).unwrap(), qi(1));
}

#[test]
fn f1_closed_form_and_equation() {
    let f = compute_f(1).unwrap();
    assert_eq!(f[1], RatFn::new(quartic(), [0, 3, 0]));
    // ξ²F1'' + ξF1' − (1 + F0)F1 = −ξ²F0'', with ξ²F'' = (ξ∂)²F − ξ∂F.
    let th = |r: &RatFn| r.xi_d();
    let one = RatFn::poly(Poly::constant(qi(1)));
    let lhs = th(&th(&f[1])).sub(&one.add(&f[0]).mul(&f[1]));
    let rhs = th(&th(&f[0])).sub(&th(&f[0])).scale(&qi(-1));
    assert!(lhs.sub(&rhs).is_zero());
}

#[test]
fn g0_g1_closed_forms() {
    let g = compute_g(1).unwrap();
    assert_eq!(g[0], RatFn::new(poly(&[zero(), qi(144)]), [0, 0, 2]));
    let num = quartic().mul(&Poly::linear(&qi(12)));
    assert_eq!(g[1], RatFn::new(num, [0, 0, 4]));
}

#[test]
fn denominator_and_degree_structure() {
    let (f, g) = tables();
    for (n, fn_) in f.iter().enumerate() {
        let (deg, e) = fn_.shape();
        assert_eq!(e, [0, n as u32 + 2, 0], "F{n}");
        assert!(deg.unwrap() <= 2 * n + 2, "F{n} degree {deg:?}");
    }
    for (n, gn) in g.iter().enumerate() {
        let (_, e) = gn.shape();
        assert_eq!((e[0], e[1]), (0, 0), "G{n} has poles only at -12");
    }
}

#[test]
fn g_table_solves_the_g_equation() {
    let (_, g) = tables();
    assert!(g_equation_residual(g, &integrable_c()).iter().all(RatFn::is_zero));
    assert_eq!(compose_g(&compute_f(7).unwrap()), *g);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    /// 3h/(3+h) with h = F0 + F1 t agrees with G0 + G1 t to O(t²).
    #[test]
    fn composition_through_first_order(re in -30.0f64..30.0, im in -30.0f64..30.0) {
        let xi = c(re, im);
        prop_assume!((xi - 12.0).norm() > 3.0 && (xi + 12.0).norm() > 3.0);
        let (f, g) = tables();
        let mut r = Vec::new();
        for t in [1e-3, 5e-4] {
            let h = f[0].eval_c(xi) + f[1].eval_c(xi) * t;
            let comp = 3.0 * h / (3.0 + h);
            r.push(((comp - g[0].eval_c(xi) - g[1].eval_c(xi) * t) / (t * t)).norm());
        }
        // Both ratios estimate the same t² coefficient.
        prop_assert!((r[0] - r[1]).abs() < 0.1 * r[0].max(1.0), "{:?}", r);
    }
}

#[test]
fn zero_constant_gives_power_series() {
    let x = c(25.0, 10.0);
    let v = eval_two_scale(x, c(0.0, 0.0), 7, &Region::default()).unwrap();
    assert_eq!(v.xi, c(0.0, 0.0));
    assert!((v.h - power_series(x, 7)).norm() < 1e-16);
}

#[test]
fn chart_choice_and_region() {
    // |ξ| < 1/ε must admit ξ = ±12.
    let reg = Region { eps: 0.05, ..Region::default() };
    let cst = c(1.0, 0.0);
    let x = tronquee::pole_sector::sweep::fixed_xi_point(c(-12.0, 0.0), cst, 5).unwrap();
    let v = eval_two_scale(x, cst, 2, &reg).unwrap();
    assert_eq!(v.chart, TwoScaleChart::F);
    assert!((v.xi + 12.0).norm() < 1e-9);
    let x = tronquee::pole_sector::sweep::fixed_xi_point(c(12.0, 0.0), cst, 5).unwrap();
    assert_eq!(eval_two_scale(x, cst, 2, &reg).unwrap().chart, TwoScaleChart::G);
    assert_eq!(eval_two_scale(c(5.0, 0.0), cst, 2, &reg).unwrap_err().kind(), "OutsideRegion");
    let x = tronquee::pole_sector::sweep::fixed_xi_point(c(25.0, 0.0), cst, 5).unwrap();
    assert_eq!(eval_two_scale(x, cst, 2, &reg).unwrap_err().kind(), "OutsideRegion");
}

#[test]
fn two_scale_error_slopes() {
    let opts = IntegrateOptions::default();
    for m in [1usize, 2] {
        let u = two_scale_uniformity(c(1.0, 0.0), c(1.0, 0.0), m, 25.0, 80.0, &opts).unwrap();
        assert!(-u.slope >= m as f64 + 0.8, "m = {m}: slope {}", u.slope);
    }
}

#[test]
fn predictions() {
    assert!(predict_pole(0, c(1.0, 0.0)).is_err());
    assert!(predict_pole(3, c(0.0, 0.0)).is_err());
    let p = predict_pole(10, c(1.0, 0.0)).unwrap();
    let lead = c(0.0, 20.0 * PI) + p.l;
    assert!((p.partial[0] - lead).norm() < 1e-14);
    assert!((p.x - lead).norm() < 0.2);
    let want_l = (c(1.0, 0.0) / (12.0 * c(0.0, 20.0 * PI).sqrt())).ln();
    assert!((p.l - want_l).norm() < 1e-14);
    let d: Vec<f64> = [5, 10, 20, 40, 80]
        .iter()
        .map(|&n| (xi_of(predict_pole(n, c(1.0, 0.0)).unwrap().x, c(1.0, 0.0)) - 12.0).norm())
        .collect();
    assert!(d.windows(2).all(|w| w[1] < w[0]), "{d:?}");
}

#[test]
fn predictions_match_detected_poles() {
    let cmp = compare_poles(c(1.0, 0.0), 8..=10, &IntegrateOptions::default()).unwrap();
    for r in &cmp.rows {
        assert!(r.witness < 1e-10);
        // The gap is the first omitted order.
        assert!(r.next_term_ratio > 0.8 && r.next_term_ratio < 1.2, "n = {}: {}", r.n, r.next_term_ratio);
    }
}

#[test]
fn witness_values() {
    let c0 = integrable_c();
    assert!(is_zero(&integrability_witness(&c0).unwrap()));
    assert_eq!(integrability_witness(&(&c0 + q(1, 10))).unwrap(), q(384, 25));
    // Continuity: linear in the shift near the integrable value.
    for d in [q(1, 100), q(-1, 1000), q(1, 10000), q(4, 25)] {
        assert_eq!(integrability_witness(&(&c0 + &d)).unwrap(), q(768, 5) * &d);
    }
}

#[test]
fn root_product_of_f0() {
    let f = f0();
    for y in [c(3.0, 0.0), c(-1.0, 2.0), c(50.0, -7.0)] {
        // Newton from either side of the double pole.
        let root = |mut z: C| {
            for _ in 0..100 {
                let v = f.eval_c(z) - y;
                let d = f.xi_d().div_xi().eval_c(z);
                z -= v / d;
            }
            z
        };
        // Start 10% off the roots of yξ² − (24y + 144)ξ + 144y.
        let (b, d) = (24.0 * y + 144.0, (24.0 * y + 144.0).powi(2) - 576.0 * y * y);
        let (g1, g2) = ((b + d.sqrt()) / (2.0 * y), (b - d.sqrt()) / (2.0 * y));
        let (r1, r2) = (root(g1 * 1.1), root(g2 * 0.9));
        assert!((r1 - r2).norm() > 1e-3);
        assert!((r1 * r2 - 144.0).norm() < 1e-9, "{}", r1 * r2);
    }
}
