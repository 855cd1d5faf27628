//! Constants beyond all orders, the Stokes multiplier and the jump on the second Stokes line.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::borel::laplace::P1Borel;
use crate::borel::sum::{sum_transseries, sum_transseries_remainder};
use crate::error::{Error, Result};
use crate::ode::seed::tritronquee_direction;
use crate::quad::extrapolate_to_zero;
use crate::rat::to_f64;
use crate::series::h0_coeffs;

type C = Complex64;

/// Closed form i√(6/(5π)).
pub fn mu_closed_form() -> C {
    C::new(0.0, (6.0 / (5.0 * PI)).sqrt())
}

/// A solution that can be evaluated at complex x.
pub trait Evaluator: Sync {
    fn eval(&self, x: C) -> Result<C>;

    /// h(x) − Σ_{k≤n} c_k x^{-k}. The default subtracts in floating point.
    fn remainder(&self, x: C, n: usize) -> Result<C> {
        Ok(self.eval(x)? - power_series(x, n))
    }
}

fn float_h0() -> &'static [f64] {
    static CELL: OnceLock<Vec<f64>> = OnceLock::new();
    CELL.get_or_init(|| h0_coeffs(220).iter().map(to_f64).collect())
}

/// Σ_{k≤n} c_k x^{-k} of the power series solution.
pub fn power_series(x: C, n: usize) -> C {
    let c = float_h0();
    let inv = 1.0 / x;
    let mut acc = C::new(0.0, 0.0);
    for v in c[..=n.min(c.len() - 1)].iter().rev() {
        acc = acc * inv + v;
    }
    acc
}

/// Laplace direction rule for a Borel evaluator.
#[derive(Clone, Copy, Debug, Serialize)]
pub enum Direction {
    Fixed(f64),
    /// The rule used for the tritronquee: clamp(−arg x, −π/2 + 0.1, −0.1).
    Tritronquee,
}

impl Direction {
    pub fn at(&self, x: C) -> f64 {
        match *self {
            Direction::Fixed(p) => p,
            Direction::Tritronquee => tritronquee_direction(x),
        }
    }
}

/// Borel summed transseries with constant `c` along a direction rule.
#[derive(Clone, Copy, Debug)]
pub struct BorelEvaluator {
    pub c: C,
    pub phi: Direction,
    pub kmax: usize,
}

impl BorelEvaluator {
    pub fn new(c: C, phi: Direction) -> Self {
        BorelEvaluator { c, phi, kmax: 8 }
    }

    pub fn tritronquee() -> Self {
        Self::new(C::new(0.0, 0.0), Direction::Tritronquee)
    }

    /// L_φ H0 with a fixed direction.
    pub fn lateral(phi: f64) -> Self {
        Self::new(C::new(0.0, 0.0), Direction::Fixed(phi))
    }
}

impl Evaluator for BorelEvaluator {
    fn eval(&self, x: C) -> Result<C> {
        Ok(sum_transseries(self.c, self.phi.at(x), x, self.kmax)?.value)
    }

    fn remainder(&self, x: C, n: usize) -> Result<C> {
        let phi = self.phi.at(x);
        if self.c.norm() == 0.0 {
            return Ok(P1Borel::shared().laplace_h0_remainder(phi, x, n)?.0);
        }
        Ok(sum_transseries_remainder(self.c, phi, x, self.kmax, n)?.value)
    }
}

#[derive(Clone, Debug)]
pub struct ExtractOptions {
    /// Number of points per Richardson window.
    pub levels: usize,
    /// Richardson variable is |x|^{-power}; `None` picks 1/2 on the Stokes line and 1 elsewhere.
    pub power: Option<f64>,
    /// Truncate at k ≤ floor(|x|) − shift.
    pub shift: usize,
    /// Largest accepted difference between the last two window estimates.
    pub tol: f64,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        ExtractOptions { levels: 3, power: None, shift: 0, tol: 1e-4 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Extraction {
    pub value: C,
    pub err: f64,
    /// (|x|, e^x x^{1/2} remainder) along the schedule.
    pub raw: Vec<(f64, C)>,
    /// Richardson estimate of each window.
    pub windows: Vec<C>,
}

/// Schedules used by default: off the Stokes line, on it, and below it.
pub const SCHEDULE_UPPER: [f64; 4] = [60.0, 68.0, 76.0, 84.0];
pub const SCHEDULE_STOKES: [f64; 4] = [36.0, 52.0, 68.0, 84.0];
pub const SCHEDULE_LOWER: [f64; 4] = [28.0, 36.0, 44.0, 52.0];

/// Limit of e^x x^{1/2}(h(x) − Σ_{k≤|x|} c_k x^{-k}) along arg x = −φ.
/// On the Stokes line (φ = 0) the limit is the average of the two lateral constants.
pub fn extract_constant(ev: &dyn Evaluator, phi: f64, schedule: &[f64], opts: &ExtractOptions) -> Result<Extraction> {
    if opts.levels < 1 || schedule.len() < opts.levels {
        return Err(Error::InvalidInput(format!(
            "schedule of {} points is shorter than {} Richardson levels",
            schedule.len(),
            opts.levels
        )));
    }
    if schedule.windows(2).any(|w| w[1] <= w[0]) || schedule[0] <= 0.0 {
        return Err(Error::InvalidInput("schedule must be positive and increasing".into()));
    }
    let raw: Vec<(f64, C)> = schedule
        .par_iter()
        .map(|&r| {
            let x = C::from_polar(r, -phi);
            let n = (r.floor() as usize).saturating_sub(opts.shift);
            let rem = ev.remainder(x, n)?;
            Ok((r, x.exp() * x.sqrt() * rem))
        })
        .collect::<Result<_>>()?;
    let power = opts.power.unwrap_or(if phi.abs() < 1e-9 { 0.5 } else { 1.0 });
    let windows: Vec<C> = raw
        .windows(opts.levels)
        .map(|w| {
            let s: Vec<f64> = w.iter().map(|(r, _)| r.powf(-power)).collect();
            let v: Vec<C> = w.iter().map(|(_, e)| *e).collect();
            extrapolate_to_zero(&s, &v)
        })
        .collect();
    let value = *windows.last().expect("at least one window");
    // A single window is judged by how far the extrapolation moved the last raw value.
    let err = if windows.len() >= 2 {
        (value - windows[windows.len() - 2]).norm()
    } else if opts.levels >= 2 {
        let w = &raw[raw.len() - opts.levels..];
        let s: Vec<f64> = w[1..].iter().map(|(r, _)| r.powf(-power)).collect();
        let v: Vec<C> = w[1..].iter().map(|(_, e)| *e).collect();
        (value - extrapolate_to_zero(&s, &v)).norm()
    } else {
        f64::INFINITY
    };
    if !value.re.is_finite() || !value.im.is_finite() || err > opts.tol {
        return Err(Error::NoConvergence(format!(
            "constant estimates {:?} differ by {err:e} (tolerance {:e}); raw {:?}",
            windows, opts.tol, raw
        )));
    }
    Ok(Extraction { value, err, raw, windows })
}

#[derive(Clone, Debug, Serialize)]
pub struct MuFit {
    pub mu: C,
    /// Coefficient a₁ of the subleading term.
    pub a1: C,
    /// Largest relative misfit over the grid.
    pub residual: f64,
    pub xs: Vec<f64>,
}

/// Least-squares fit of d(x) = m e^{-x} x^{-1/2} (1 + a₁/x) over the grid.
fn fit_exponential(xs: &[f64], d: &[C]) -> Result<MuFit> {
    let lo = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if xs.len() < 2 || hi - lo < 10f64.ln() {
        return Err(Error::FitDegenerate(format!("grid [{lo}, {hi}] spans less than one decade of e^-x")));
    }
    // Scaled data q = d e^x x^{1/2} = m + (m a₁)/x: linear in the basis {1, 1/x}.
    let qv: Vec<C> = xs.iter().zip(d).map(|(&x, &v)| v * x.exp() * x.sqrt()).collect();
    let (mut s0, mut s1, mut s2) = (0.0, 0.0, 0.0);
    let (mut b0, mut b1) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for (&x, &q) in xs.iter().zip(&qv) {
        let u = 1.0 / x;
        s0 += 1.0;
        s1 += u;
        s2 += u * u;
        b0 += q;
        b1 += q * u;
    }
    let det = s0 * s2 - s1 * s1;
    if det.abs() < 1e-14 * s0 * s2 {
        return Err(Error::FitDegenerate("normal equations are singular".into()));
    }
    let m = (b0 * s2 - b1 * s1) / det;
    let ma = (b1 * s0 - b0 * s1) / det;
    if m.norm() == 0.0 || !m.re.is_finite() {
        return Err(Error::FitDegenerate("difference vanishes on the grid".into()));
    }
    let residual = xs
        .iter()
        .zip(&qv)
        .map(|(&x, &q)| (q - m - ma / x).norm() / m.norm())
        .fold(0.0, f64::max);
    if residual > 0.5 {
        return Err(Error::FitDegenerate(format!("difference does not follow e^-x x^-1/2 (misfit {residual:.2})")));
    }
    Ok(MuFit { mu: m, a1: ma / m, residual, xs: xs.to_vec() })
}

/// Fit h⁺ − h⁻ = μ e^{-x} x^{-1/2}(1 + a₁/x) on the positive real grid.
pub fn measure_mu(h_plus: &dyn Evaluator, h_minus: &dyn Evaluator, xs: &[f64]) -> Result<MuFit> {
    let d: Vec<C> = xs
        .par_iter()
        .map(|&x| {
            let z = C::new(x, 0.0);
            Ok(h_plus.eval(z)? - h_minus.eval(z)?)
        })
        .collect::<Result<_>>()?;
    fit_exponential(xs, &d)
}

/// The standard pair: h⁺ = L_φ H0 with φ < 0 and h⁻ with φ > 0.
pub fn measure_mu_lateral(xs: &[f64]) -> Result<MuFit> {
    measure_mu(&BorelEvaluator::lateral(-0.2), &BorelEvaluator::lateral(0.2), xs)
}

#[derive(Clone, Debug, Serialize)]
pub struct SecondStokes {
    pub fit: MuFit,
    /// Expected constant, −μ under the sign convention where h⁺ − h⁻ = +μ e^{-x} x^{-1/2}.
    pub expected: C,
    /// Fitted constant minus the expected one.
    pub residual: C,
}

/// Fit h⁺ − hσ on x = −r for the radii `rs`, against ∓μ e^{-|x|}|x|^{-1/2}.
pub fn verify_second_stokes_line(h_sigma: &dyn Evaluator, h_plus: &dyn Evaluator, rs: &[f64]) -> Result<SecondStokes> {
    let d: Vec<C> = rs
        .par_iter()
        .map(|&r| {
            let z = C::new(-r, 0.0);
            Ok(h_plus.eval(z)? - h_sigma.eval(z)?)
        })
        .collect::<Result<_>>()?;
    let fit = fit_exponential(rs, &d)?;
    let expected = -mu_closed_form();
    Ok(SecondStokes { residual: fit.mu - expected, expected, fit })
}

/// h⁺ continued to arg x = π (direction −π + ε) and hσ (direction π − ε).
pub fn verify_second_stokes_lateral(rs: &[f64]) -> Result<SecondStokes> {
    verify_second_stokes_line(&BorelEvaluator::lateral(PI - 0.2), &BorelEvaluator::lateral(-PI + 0.2), rs)
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectionData {
    pub c_plus: C,
    pub c_minus: C,
    /// Average ½(C₊ + C₋) read on the Stokes line.
    pub c_average: C,
    pub mu_measured: C,
    pub mu_closed_form: C,
    pub errors: ConnectionErrors,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConnectionErrors {
    pub c_plus: f64,
    pub c_minus: f64,
    pub c_average: f64,
    pub mu_fit_residual: f64,
}

/// Constants of the tritronquee on both sides of the Stokes line and the measured multiplier.
pub fn tritronquee_connection(mu_grid: &[f64]) -> Result<ConnectionData> {
    let ev = BorelEvaluator::tritronquee();
    let opts = ExtractOptions::default();
    let up = extract_constant(&ev, -PI / 4.0, &SCHEDULE_UPPER, &opts)?;
    let mid = extract_constant(&ev, 0.0, &SCHEDULE_STOKES, &opts)?;
    let down = extract_constant(&ev, PI / 4.0, &SCHEDULE_LOWER, &opts)?;
    let fit = measure_mu_lateral(mu_grid)?;
    Ok(ConnectionData {
        c_plus: up.value,
        c_minus: down.value,
        c_average: mid.value,
        mu_measured: fit.mu,
        mu_closed_form: mu_closed_form(),
        errors: ConnectionErrors { c_plus: up.err, c_minus: down.err, c_average: mid.err, mu_fit_residual: fit.residual },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Synthetic(C);

    impl Evaluator for Synthetic {
        fn eval(&self, x: C) -> Result<C> {
            Ok(self.0 * (-x).exp() / x.sqrt())
        }
    }

    struct Zero;

    impl Evaluator for Zero {
        fn eval(&self, _x: C) -> Result<C> {
            Ok(C::new(0.0, 0.0))
        }
    }

    #[test]
    fn synthetic_fit_recovers_constant() {
        let mu0 = C::new(0.3, -1.7);
        let xs: Vec<f64> = (0..13).map(|i| 8.0 + i as f64).collect();
        let f = measure_mu(&Synthetic(mu0), &Zero, &xs).unwrap();
        assert!((f.mu - mu0).norm() < 1e-13, "{:?}", f.mu);
        assert!(f.a1.norm() < 1e-11);
    }

    #[test]
    fn narrow_grid_is_degenerate() {
        let r = measure_mu(&Synthetic(C::new(1.0, 0.0)), &Zero, &[8.0, 9.0, 10.0]);
        assert!(matches!(r, Err(Error::FitDegenerate(_))));
    }

    #[test]
    fn identical_evaluators_are_degenerate() {
        let xs: Vec<f64> = (0..5).map(|i| 8.0 + 3.0 * i as f64).collect();
        let r = verify_second_stokes_line(&Synthetic(C::new(1.0, 0.0)), &Synthetic(C::new(1.0, 0.0)), &xs);
        assert!(matches!(r, Err(Error::FitDegenerate(_))));
    }

    #[test]
    fn schedule_validation() {
        let ev = BorelEvaluator::tritronquee();
        let r = extract_constant(&ev, -PI / 4.0, &[40.0, 50.0], &ExtractOptions::default());
        assert!(matches!(r, Err(Error::InvalidInput(_))));
        let r = extract_constant(&ev, -PI / 4.0, &[50.0, 40.0, 60.0], &ExtractOptions::default());
        assert!(matches!(r, Err(Error::InvalidInput(_))));
    }

    #[test]
    fn power_series_matches_exact_partial_sum() {
        let x = C::new(7.0, 2.0);
        let c = h0_coeffs(12);
        let direct: C = (4..=12).map(|k| to_f64(&c[k]) * x.powi(-(k as i32))).sum();
        assert!((power_series(x, 12) - direct).norm() < 1e-15);
    }
}
