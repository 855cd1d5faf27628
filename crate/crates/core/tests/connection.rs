use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64 as C;
use tronquee::borel::germ::solve_h0_convolution;
use tronquee::borel::stokes::{estimate_s, jump_via_hankel};
use tronquee::connection::*;
use tronquee::error::Result;

const GRID: [f64; 13] = [8.0, 9.0, 10.0, 11.0, 12.0, 13.0, 14.0, 15.0, 16.0, 17.0, 18.0, 19.0, 20.0];

fn mu() -> C {
    mu_closed_form()
}

#[test]
fn closed_form_value() {
    assert!((mu() - C::new(0.0, 0.618039)).norm() < 1e-6);
}

#[test]
fn tritronquee_has_no_exponential_above() {
    let e = extract_constant(&BorelEvaluator::tritronquee(), -FRAC_PI_4, &SCHEDULE_UPPER, &ExtractOptions::default()).unwrap();
    assert!(e.value.norm() < 1e-6, "{}", e.value);
}

#[test]
fn unit_constant_is_recovered() {
    let ev = BorelEvaluator::new(C::new(1.0, 0.0), Direction::Fixed(-FRAC_PI_4));
    let e = extract_constant(&ev, -FRAC_PI_4, &SCHEDULE_UPPER, &ExtractOptions::default()).unwrap();
    assert!((e.value - 1.0).norm() < 1e-6, "{}", e.value);
}

#[test]
fn constants_across_the_stokes_line() {
    let d = tritronquee_connection(&GRID).unwrap();
    assert!((d.c_plus - d.c_minus + mu()).norm() < 1e-4, "{} {}", d.c_plus, d.c_minus);
    assert!((d.c_average - 0.5 * (d.c_plus + d.c_minus)).norm() < 1e-4);
    assert!((d.mu_measured - mu()).norm() < 1e-3);
}

#[test]
fn truncation_shift_invariance() {
    let ev = BorelEvaluator::tritronquee();
    let a = extract_constant(&ev, -FRAC_PI_4, &SCHEDULE_UPPER, &ExtractOptions::default()).unwrap();
    let b = extract_constant(&ev, -FRAC_PI_4, &SCHEDULE_UPPER, &ExtractOptions { shift: 1, ..Default::default() }).unwrap();
    assert!((a.value - b.value).norm() < 1e-6);
    let ev = BorelEvaluator::new(C::new(0.0, 0.0), Direction::Fixed(FRAC_PI_4));
    let a = extract_constant(&ev, FRAC_PI_4, &SCHEDULE_LOWER, &ExtractOptions::default()).unwrap();
    let b = extract_constant(&ev, FRAC_PI_4, &SCHEDULE_LOWER, &ExtractOptions { shift: 1, ..Default::default() }).unwrap();
    // Below the Stokes line the shorter schedule is only good to its own error bars.
    assert!((a.value - b.value).norm() <= a.err + b.err, "{} ({:e}) vs {} ({:e})", a.value, a.err, b.value, b.err);
}

#[test]
fn measured_multiplier() {
    let f = measure_mu_lateral(&GRID).unwrap();
    assert!((f.mu - mu()).norm() < 1e-3, "{}", f.mu);
}

struct HankelJump;

impl Evaluator for HankelJump {
    fn eval(&self, x: C) -> Result<C> {
        static G: std::sync::OnceLock<tronquee::borel::BorelGerm> = std::sync::OnceLock::new();
        let g = G.get_or_init(|| solve_h0_convolution(200).unwrap());
        Ok(jump_via_hankel(g, x.re)?.0)
    }
}

struct Zero;

impl Evaluator for Zero {
    fn eval(&self, _x: C) -> Result<C> {
        Ok(C::new(0.0, 0.0))
    }
}

#[test]
fn lateral_fit_agrees_with_hankel_fit() {
    let a = measure_mu_lateral(&GRID).unwrap();
    let b = measure_mu(&HankelJump, &Zero, &GRID).unwrap();
    assert!((a.mu - b.mu).norm() < 1e-8, "{} vs {}", a.mu, b.mu);
}

#[test]
fn three_routes_to_the_multiplier() {
    let fit = measure_mu_lateral(&GRID).unwrap();
    let s = estimate_s(&solve_h0_convolution(200).unwrap()).unwrap();
    let from_s = -2.0 * C::i() * PI.sqrt() * s.s;
    assert!((from_s - mu()).norm() < 1e-10);
    assert!((fit.mu - from_s).norm() < 1e-3);
}

#[test]
fn second_stokes_line() {
    let r = verify_second_stokes_lateral(&GRID).unwrap();
    assert!(r.residual.norm() < 1e-3, "{}", r.residual);
    assert!((r.expected + mu()).norm() < 1e-15);
}

#[test]
fn second_stokes_line_misuse() {
    let ev = BorelEvaluator::lateral(PI - 0.2);
    let e = verify_second_stokes_line(&ev, &ev, &GRID).unwrap_err();
    assert_eq!(e.kind(), "FitDegenerate");
}
