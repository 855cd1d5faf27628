//! Initial data from the transseries and the two continuations of the tritronquée.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::borel::laplace::P1Borel;
use crate::borel::sum::{sum_transseries, sum_transseries_derivative};
use crate::error::{Error, Result};
use crate::ode::path::{integrate_path, IntegrateOptions, Path, SolutionTrace};
use crate::rat::to_f64;

type C = Complex64;

#[derive(Clone, Debug, Serialize)]
pub struct Seed {
    pub x: C,
    pub h: C,
    pub hp: C,
    pub err: f64,
    pub warning: Option<String>,
}

/// Optimally truncated Σ a_m x^{-m} and its x-derivative, with the first omitted term.
fn series_sum(a: &[f64], x: C, start_power: usize, max_terms: usize) -> (C, C, f64) {
    let ix = 1.0 / x;
    let mut v = C::new(0.0, 0.0);
    let mut d = C::new(0.0, 0.0);
    let mut prev = f64::INFINITY;
    let mut omitted = 0.0;
    let mut xp = ix.powi(start_power as i32);
    for (j, &c) in a.iter().enumerate().take(max_terms) {
        let m = (start_power + j) as f64;
        let t = c * xp;
        if c != 0.0 && t.norm() > prev {
            omitted = t.norm();
            break;
        }
        if c != 0.0 {
            prev = t.norm();
        }
        v += t;
        d += -m * t * ix;
        xp *= ix;
        omitted = 0.0;
    }
    if omitted == 0.0 && a.len() > max_terms {
        omitted = (a[max_terms] * xp).norm();
    }
    (v, d, omitted)
}

/// Truncated transseries with N terms per series and K levels, as an asymptotic seed.
pub fn far_field_init(c: C, x0: C, n: usize, k: usize, tol: f64) -> Result<Seed> {
    let ax = x0.arg().abs();
    if ax == 0.0 || ax > FRAC_PI_2 + 1e-12 {
        return Err(Error::InvalidInput(format!("far_field_init needs 0 < |arg x0| <= pi/2, got {}", x0.arg())));
    }
    let ts = &P1Borel::shared().ts;
    let c0: Vec<f64> = ts.h0.iter().skip(4).map(to_f64).collect();
    let (mut h, mut hp, mut err) = series_sum(&c0, x0, 4, n.saturating_sub(3));
    let kk = k.min(ts.max_level());
    let e = c * (-x0).exp();
    let mut ek = C::new(1.0, 0.0);
    for lvl in 1..=kk {
        ek *= e;
        let a: Vec<f64> = ts.level(lvl).iter().map(to_f64).collect();
        let (t, tp, om) = series_sum(&a, x0, 0, n + 1);
        let half = lvl as f64 / 2.0;
        let pre = ek * x0.powf(-half);
        h += pre * t;
        hp += pre * (tp - (lvl as f64 + half / x0) * t);
        err += pre.norm() * om;
    }
    if c != C::new(0.0, 0.0) {
        err += (ek * e).norm() * x0.norm().powf(-((kk + 1) as f64) / 2.0);
    }
    let warning = if err > tol { Some(format!("seed error estimate {err:e} exceeds tolerance {tol:e}")) } else { None };
    Ok(Seed { x: x0, h, hp, err, warning })
}

/// Laplace direction used for the tritronquée at x (φ ∈ (−π/2, 0) with |arg x + φ| < π/2).
pub fn tritronquee_direction(x: C) -> f64 {
    (-x.arg()).clamp(-FRAC_PI_2 + 0.1, -0.1)
}

/// (h, h') of the Borel summed transseries with constant C along φ at x.
pub fn borel_seed(c: C, phi: f64, x: C) -> Result<Seed> {
    let v = sum_transseries(c, phi, x, 8)?;
    let d = sum_transseries_derivative(c, phi, x, 8)?;
    Ok(Seed { x, h: v.value, hp: d.value, err: v.err + d.err, warning: None })
}

/// The tritronquée (C₊ = 0) at x with 0 ≤ arg x < π.
pub fn tritronquee_seed(x: C) -> Result<Seed> {
    borel_seed(C::new(0.0, 0.0), tritronquee_direction(x), x)
}

#[derive(Clone, Debug)]
pub struct Continuations {
    pub radius: f64,
    /// Clockwise arc from arg π/4 to −π (through the pole sector).
    pub clockwise: SolutionTrace,
    /// Counterclockwise arc from arg 3π/4 to 3π/2.
    pub counterclockwise: SolutionTrace,
    pub h_minus_pi: C,
    pub h_three_half_pi: C,
}

impl Continuations {
    /// h(|x|e^{3πi/2}) + h(|x|e^{−iπ}) + 2, zero by single-valuedness of the Painlevé I solution.
    pub fn residual(&self) -> C {
        self.h_three_half_pi + self.h_minus_pi + 2.0
    }

    /// Number of pole records on the clockwise arc (g-chart entries).
    pub fn g_chart_samples(&self) -> (usize, usize) {
        let count = |t: &SolutionTrace| t.samples.iter().filter(|s| s.chart == crate::ode::path::Chart::G).count();
        (count(&self.clockwise), count(&self.counterclockwise))
    }

    /// h on the clockwise trace at argument θ ∈ [−π, π/4].
    pub fn clockwise_at(&self, theta: f64) -> C {
        let s = self.radius * (FRAC_PI_4 - theta);
        self.clockwise.at(s).1
    }

    /// h on the counterclockwise trace at argument θ ∈ [3π/4, 3π/2].
    pub fn counterclockwise_at(&self, theta: f64) -> C {
        let s = self.radius * (theta - 3.0 * FRAC_PI_4);
        self.counterclockwise.at(s).1
    }
}

/// Continue the tritronquée along |x| = r clockwise to arg −π and counterclockwise to arg 3π/2.
///
/// The counterclockwise arc is seeded at arg 3π/4: from arg π/4 the growing e^{−x} mode would
/// amplify seed errors by e^{r(1+cos π/4)} before arg π.
pub fn continue_around(r: f64, opts: &IntegrateOptions) -> Result<Continuations> {
    let x_cw = C::from_polar(r, FRAC_PI_4);
    let s_cw = tritronquee_seed(x_cw)?;
    let p_cw = Path::new().arc(C::new(0.0, 0.0), r, FRAC_PI_4, -PI);
    let x_ccw = C::from_polar(r, 3.0 * FRAC_PI_4);
    let s_ccw = tritronquee_seed(x_ccw)?;
    let p_ccw = Path::new().arc(C::new(0.0, 0.0), r, 3.0 * FRAC_PI_4, 1.5 * PI);
    let (cw, ccw) = rayon::join(
        || integrate_path(s_cw.h, s_cw.hp, &p_cw, opts),
        || integrate_path(s_ccw.h, s_ccw.hp, &p_ccw, opts),
    );
    let (cw, ccw) = (cw?, ccw?);
    let h_minus_pi = cw.last().h;
    let h_three_half_pi = ccw.last().h;
    Ok(Continuations { radius: r, clockwise: cw, counterclockwise: ccw, h_minus_pi, h_three_half_pi })
}
