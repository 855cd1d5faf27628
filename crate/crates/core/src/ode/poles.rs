//! Pole detection on traces: local refinement of g = 3 and Laurent data.

use num_complex::Complex64;

use crate::error::Result;
use crate::ode::path::{integrate_path, Chart, IntegrateOptions, Path, PoleRecord, SolutionTrace};
use crate::ode::system::{h_to_u, u_second};

type C = Complex64;

/// Radius of the circle used for the Laurent coefficients.
pub const LAURENT_RADIUS: f64 = 0.2;
const LAURENT_POINTS: usize = 64;

/// Integrate along a straight line and return (h, h') at its end.
fn shoot(x: C, h: C, hp: C, to: C, opts: &IntegrateOptions) -> Result<(C, C)> {
    let tr = integrate_path(h, hp, &Path::new().line(x, to), opts)?;
    let l = tr.last();
    Ok((l.h, l.hp))
}

/// Refine a pole near x from the local value (h, h'); None if the iteration leaves the neighborhood.
///
/// With u = 3 − g ≈ (3/4)(x − x0)² the step −2u/u' lands on x0 up to O(d²).
pub fn refine_pole(x: C, h: C, hp: C, opts: &IntegrateOptions) -> Result<Option<(C, f64)>> {
    let (mut xc, mut hc, mut hpc) = (x, h, hp);
    let mut travelled = 0.0;
    for _ in 0..60 {
        let (u, up) = h_to_u(hc, hpc);
        let step = -2.0 * u / up;
        if !step.re.is_finite() || !step.im.is_finite() {
            return Ok(None);
        }
        travelled += step.norm();
        if travelled > 2.0 {
            return Ok(None);
        }
        if step.norm() < 1e-6 {
            // Close enough: finish with the local Taylor polynomial of u instead of integrating into the pole.
            let upp = u_second(xc, u, up, opts.forcing);
            let x0 = xc + step;
            let u0 = u + up * step + 0.5 * upp * step * step;
            return Ok(Some((x0, u0.norm())));
        }
        let xn = xc + step;
        let (hn, hpn) = shoot(xc, hc, hpc, xn, opts)?;
        xc = xn;
        hc = hn;
        hpc = hpn;
    }
    let (u, _) = h_to_u(hc, hpc);
    Ok(Some((xc, u.norm())))
}

/// Laurent coefficients (a, b) of h = a/(x−x0)² + b/(x−x0) + … from a circle of `radius`,
/// starting from (h, h') known at `x_near`.
pub fn laurent_fit(x0: C, x_near: C, h: C, hp: C, radius: f64, opts: &IntegrateOptions) -> Result<(C, C)> {
    let start = x0 + radius;
    let (hs, hps) = shoot(x_near, h, hp, start, opts)?;
    let path = Path::new().arc(x0, radius, 0.0, 2.0 * std::f64::consts::PI);
    let tr = integrate_path(hs, hps, &path, opts)?;
    let len = path.length();
    let (mut a, mut b) = (C::new(0.0, 0.0), C::new(0.0, 0.0));
    for j in 0..LAURENT_POINTS {
        let s = len * j as f64 / LAURENT_POINTS as f64;
        let (x, hv, _) = tr.at(s);
        let d = x - x0;
        a += hv * d * d;
        b += hv * d;
    }
    Ok((a / LAURENT_POINTS as f64, b / LAURENT_POINTS as f64))
}

/// Poles near the local maxima of |h| in the g-chart parts of the trace.
pub fn detect_poles(trace: &SolutionTrace) -> Result<Vec<PoleRecord>> {
    detect_poles_with(trace, false)
}

/// As [`detect_poles`]; `laurent` also fits the Laurent coefficients at each pole.
pub fn detect_poles_with(trace: &SolutionTrace, laurent: bool) -> Result<Vec<PoleRecord>> {
    let opts = trace.opts;
    let sm = &trace.samples;
    let mut out: Vec<PoleRecord> = Vec::new();
    for i in 1..sm.len().saturating_sub(1) {
        let m = sm[i].h.norm();
        if sm[i].chart != Chart::G || m < opts.enter_g || m < sm[i - 1].h.norm() || m < sm[i + 1].h.norm() {
            continue;
        }
        let Some((x0, witness)) = refine_pole(sm[i].x, sm[i].h, sm[i].hp, &opts)? else {
            continue;
        };
        if out.iter().any(|p| (p.x - x0).norm() < 1e-6) {
            continue;
        }
        let (la, lb) = if laurent {
            let (a, b) = laurent_fit(x0, sm[i].x, sm[i].h, sm[i].hp, LAURENT_RADIUS, &opts)?;
            (Some(a), Some(b))
        } else {
            (None, None)
        };
        out.push(PoleRecord { x: x0, n: None, witness, laurent_a: la, laurent_b: lb });
    }
    Ok(out)
}
