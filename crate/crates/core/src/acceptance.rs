//! The twelve acceptance criteria, each reported as PASS or FAIL with its measured numbers.

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64;
use serde::Serialize;

use crate::borel::germ::{h0_germ_from_series, solve_h0_convolution};
use crate::borel::stokes::estimate_s;
use crate::borel::sum::sum_transseries;
use crate::config::RunConfig;
use crate::connection::{
    extract_constant, measure_mu_lateral, mu_closed_form, BorelEvaluator, ExtractOptions, SCHEDULE_LOWER,
    SCHEDULE_STOKES, SCHEDULE_UPPER,
};
use crate::cycles::{cycle_residuals, run_cycles, solve_j_ode, solve_stok2_auto, CycleOptions};
use crate::error::Result;
use crate::ode::{borel_seed, continue_around, integrate_path, IntegrateOptions, Path};
use crate::pole_sector::sweep::{compare_poles, two_scale_uniformity};
use crate::pole_sector::two_scale::integrability_witness;
use crate::rat::{is_zero, q};
use crate::series::h0_coeffs;

type C = Complex64;

pub const CRITERIA: [(u8, &str); 12] = [
    (1, "exact series"),
    (2, "Borel-plane agreement"),
    (3, "singularity constant"),
    (4, "Stokes multiplier three ways"),
    (5, "Borel sum vs ODE"),
    (6, "tritronquee classification"),
    (7, "pole prediction"),
    (8, "two-scale uniformity"),
    (9, "integrability witness"),
    (10, "cycle ODEs"),
    (11, "adiabatic invariants"),
    (12, "single-valuedness"),
];

/// Criteria that fail on this build for documented reasons.
pub const KNOWN_FAILURES: [u8; 1] = [7];

#[derive(Clone, Debug, Serialize)]
pub struct CriterionReport {
    pub id: u8,
    pub title: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl CriterionReport {
    pub fn line(&self) -> String {
        format!(
            "criterion {:>2} {} [{:.2} s] {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.elapsed.as_secs_f64(),
            self.title,
            self.detail
        )
    }

    /// The line without timing, for deterministic output.
    pub fn line_untimed(&self) -> String {
        format!("criterion {:>2} {} {}: {}", self.id, if self.passed { "PASS" } else { "FAIL" }, self.title, self.detail)
    }
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { passed, detail })
}

fn ode_opts(cfg: &RunConfig) -> IntegrateOptions {
    IntegrateOptions { tol: cfg.ode_tol, ..IntegrateOptions::default() }
}

fn c1() -> Result<Outcome> {
    let t = Instant::now();
    let c = h0_coeffs(200);
    let c4 = c[4] == -q(392, 625);
    let odd = c.iter().skip(1).step_by(2).all(is_zero);
    let secs = t.elapsed().as_secs_f64();
    outcome(c4 && odd && secs < 5.0, format!("c4 = {}, odd coefficients vanish through 200: {odd}, under 5 s: {}", c[4], secs < 5.0))
}

fn c2() -> Result<Outcome> {
    let a = solve_h0_convolution(200)?;
    let b = h0_germ_from_series(200)?;
    let n = a.coeffs.len().min(b.coeffs.len());
    let same = n > 200 && a.alpha2 == b.alpha2 && a.coeffs[..=200] == b.coeffs[..=200];
    let odd = a.coeffs.iter().step_by(2).all(is_zero);
    let low = a.coeffs.iter().take(3).all(is_zero) && !is_zero(&a.coeffs[3]);
    outcome(same && odd && low, format!("identical through 200: {same}, odd: {odd}, first term p^3: {low}"))
}

fn s_target() -> C {
    // μ = −2i√π S under the principal branch of (1 − p)^{-1/2}.
    -mu_closed_form() / (C::new(0.0, 2.0) * PI.sqrt())
}

/// a+bi with a fixed number of decimals and an explicit sign on the imaginary part.
fn cx(z: C, p: usize) -> String {
    format!("{:.p$}{}{:.p$}i", z.re, if z.im.is_sign_negative() { '-' } else { '+' }, z.im.abs())
}

fn c3() -> Result<Outcome> {
    let t = Instant::now();
    let s = estimate_s(&solve_h0_convolution(200)?)?;
    let secs = t.elapsed().as_secs_f64();
    let target = s_target();
    let rel = (s.s - target).norm() / target.norm();
    outcome(
        rel < 1e-3 && secs < 10.0,
        format!("S = {} (target {}, |S| = {:.6}), rel err {rel:.2e}, under 10 s: {}", cx(s.s, 6), cx(target, 6), s.s.norm(), secs < 10.0),
    )
}

fn c4() -> Result<Outcome> {
    let xs: Vec<f64> = (0..=12).map(|i| 8.0 + i as f64).collect();
    let fit = measure_mu_lateral(&xs)?;
    let mu = mu_closed_form();
    let ea = (fit.mu - mu).norm();
    let s = estimate_s(&solve_h0_convolution(200)?)?;
    let mu_s = -C::new(0.0, 2.0) * PI.sqrt() * s.s;
    let eb = (mu_s - fit.mu).norm();
    let tol_b = 2.0 * PI.sqrt() * s.err + 1e-3;
    let st = solve_stok2_auto(-5..=5)?;
    let ec = (st.mu - mu).norm();
    let pass = ea < 1e-3 && eb < tol_b && ec < 1e-12 && st.residual < 1e-12;
    outcome(
        pass,
        format!(
            "(a) fit {} err {ea:.1e}; (b) from S {} vs fit {eb:.1e} (tol {tol_b:.1e}); (c) N = {} mu {} err {ec:.1e}",
            cx(fit.mu, 7),
            cx(mu_s, 7),
            st.n,
            cx(st.mu, 12)
        ),
    )
}

fn c5(cfg: &RunConfig) -> Result<Outcome> {
    let one = C::new(1.0, 0.0);
    let x30 = C::from_polar(30.0, FRAC_PI_4);
    let x15 = C::from_polar(15.0, FRAC_PI_4);
    let s = borel_seed(one, -FRAC_PI_4, x30)?;
    let tr = integrate_path(s.h, s.hp, &Path::new().line(x30, x15), &ode_opts(cfg))?;
    let b = sum_transseries(one, -FRAC_PI_4, x15, cfg.k_levels)?;
    let d = (tr.last().h - b.value).norm();
    outcome(d < 1e-6, format!("|h_ODE - h_Borel| at 15e^(i pi/4) = {d:.2e}"))
}

fn c6() -> Result<Outcome> {
    let ev = BorelEvaluator::tritronquee();
    let o = ExtractOptions::default();
    let up = extract_constant(&ev, -FRAC_PI_4, &SCHEDULE_UPPER, &o)?;
    let mid = extract_constant(&ev, 0.0, &SCHEDULE_STOKES, &o)?;
    let down = extract_constant(&ev, FRAC_PI_4, &SCHEDULE_LOWER, &o)?;
    let avg = 0.5 * (up.value + down.value);
    let e = (mid.value - avg).norm();
    outcome(
        up.value.norm() < 1e-6 && e < 1e-4,
        format!(
            "C+ = {:.2e} ({:.1e}); C- = {}; Stokes-line constant {} vs (C+ + C-)/2 {}, diff {e:.1e}",
            up.value.norm(),
            up.err,
            cx(down.value, 6),
            cx(mid.value, 6),
            cx(avg, 6)
        ),
    )
}

fn c7(cfg: &RunConfig) -> Result<Outcome> {
    let t = Instant::now();
    let cmp = compare_poles(C::new(1.0, 0.0), 5..=15, &ode_opts(cfg))?;
    let secs = t.elapsed().as_secs_f64();
    let ratio_lo = cmp.rows.iter().map(|r| r.next_term_ratio).fold(f64::INFINITY, f64::min);
    let ratio_hi = cmp.rows.iter().map(|r| r.next_term_ratio).fold(0.0, f64::max);
    let pass = cmp.slope <= -3.5 && cmp.max_rel_gap < 1e-2 && secs < 120.0;
    outcome(
        pass,
        format!(
            "slope {:.2} (needs <= -3.5); max rel gap {:.1e}; first omitted term / gap in [{ratio_lo:.2}, {ratio_hi:.2}], slope with it {:.2}; under 2 min: {}",
            cmp.slope, cmp.max_rel_gap, cmp.slope_with_next, secs < 120.0
        ),
    )
}

fn c8(cfg: &RunConfig) -> Result<Outcome> {
    let one = C::new(1.0, 0.0);
    let u = two_scale_uniformity(one, one, 1, 20.0, 80.0, &ode_opts(cfg))?;
    let (e0, e1) = (u.rows[0].err, u.rows[u.rows.len() - 1].err);
    outcome(
        -u.slope >= 1.8,
        format!("{} points, error {e0:.2e} -> {e1:.2e}, decay slope {:.3}", u.rows.len(), -u.slope),
    )
}

fn c9() -> Result<Outcome> {
    let base = -q(392, 625);
    let w0 = integrability_witness(&base)?;
    let w1 = integrability_witness(&(base + q(1, 10)));
    let (zero, shifted) = match &w1 {
        Ok(v) => (is_zero(&w0), !is_zero(v)),
        Err(e) => (is_zero(&w0), e.kind() == "ObstructionNonzero"),
    };
    let w1s = match w1 {
        Ok(v) => v.to_string(),
        Err(e) => e.to_string(),
    };
    outcome(zero && shifted, format!("obstruction {w0} at the integrable coefficient, {w1s} after +1/10"))
}

fn c10() -> Result<Outcome> {
    let pts: Vec<C> = (0..20).map(|i| C::new(-1.2 + 0.06 * i as f64, 0.3)).collect();
    let mut worst = (0.0f64, 0.0f64, 0.0f64);
    for &s in &pts {
        let r = cycle_residuals(s)?;
        worst = (worst.0.max(r.j_equation), worst.1.max(r.l_equation), worst.2.max(r.l_vs_dj));
    }
    let tb = solve_j_ode(&pts)?;
    let wv = tb.wronskian_variation();
    outcome(
        worst.0 < 1e-6 && worst.1 < 1e-6 && worst.2 < 1e-8 && wv < 1e-9,
        format!(
            "J eq {:.1e}, L eq {:.1e}, L - 2J' {:.1e}, kappa0 = {}, variation {wv:.1e}",
            worst.0,
            worst.1,
            worst.2,
            cx(tb.kappa0(), 6)
        ),
    )
}

fn c11() -> Result<Outcome> {
    let opts = CycleOptions::default();
    let mut d = Vec::new();
    for r in [50.0, 100.0] {
        let x0 = C::from_polar(r, -FRAC_PI_4 * 2.0 * 1.05);
        let run = run_cycles(x0, C::new(-0.1, 0.0), (r / 2.0) as usize, &opts)?;
        d.push((run.q_drift(), run.k_drift(), run.states.len()));
    }
    let pass = d.iter().all(|v| v.0 <= 0.1 && v.1 <= 0.1) && d[1].0 < d[0].0 && d[1].1 < d[0].1;
    outcome(
        pass,
        format!(
            "|x0| = 50: Q {:.4}, K {:.4} ({} turns); |x0| = 100: Q {:.4}, K {:.4} ({} turns)",
            d[0].0, d[0].1, d[0].2, d[1].0, d[1].1, d[1].2
        ),
    )
}

fn c12(cfg: &RunConfig) -> Result<Outcome> {
    let t = Instant::now();
    let cont = continue_around(20.0, &ode_opts(cfg))?;
    let res = cont.residual().norm();
    let secs = t.elapsed().as_secs_f64();
    let (cw, ccw) = cont.g_chart_samples();
    outcome(
        res < 1e-3 && secs < 300.0,
        format!("residual at |x| = 20: {res:.2e}; pole-chart samples {cw} / {ccw}; under 5 min: {}", secs < 300.0),
    )
}

/// Run one criterion. Module errors become FAIL with the error kind.
pub fn run_criterion(id: u8, cfg: &RunConfig) -> CriterionReport {
    let title = CRITERIA.iter().find(|c| c.0 == id).map(|c| c.1).unwrap_or("unknown").to_string();
    let t = Instant::now();
    let r = match id {
        1 => c1(),
        2 => c2(),
        3 => c3(),
        4 => c4(),
        5 => c5(cfg),
        6 => c6(),
        7 => c7(cfg),
        8 => c8(cfg),
        9 => c9(),
        10 => c10(),
        11 => c11(),
        12 => c12(cfg),
        _ => Ok(Outcome { passed: false, detail: format!("no criterion {id}") }),
    };
    let (passed, detail) = match r {
        Ok(o) => (o.passed, o.detail),
        Err(e) => (false, format!("error {}: {e}", e.kind())),
    };
    CriterionReport { id, title, passed, detail, elapsed: t.elapsed() }
}

pub fn run_all(cfg: &RunConfig) -> Vec<CriterionReport> {
    CRITERIA.iter().map(|c| run_criterion(c.0, cfg)).collect()
}
