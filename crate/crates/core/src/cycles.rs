//! Cycle integrals of R(u, s) = √(u³/3 + u² + s), the Poincaré map across the pole sector,
//! the two adiabatic invariants and the closed-form equation for the Stokes multiplier.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::dopri::{attempt, Controller, State};

type C = Complex64;

/// Base point of every cycle.
pub const U0: f64 = -4.0;
/// Distance from s = 0 and s = −4/3 below which cycles are treated as degenerate.
pub const DEGENERATE_GUARD: f64 = 1e-3;

const FORCING2: f64 = 784.0 / 625.0;

/// u³/3 + u² + s.
pub fn cubic(u: C, s: C) -> C {
    u * u * (u / 3.0 + 1.0) + s
}

/// ρ(s) = 5 / (3s(3s + 4)).
pub fn rho(s: C) -> C {
    5.0 / (3.0 * s * (3.0 * s + 4.0))
}

/// ρ'(s)/ρ(s) = −1/s − 3/(3s + 4).
pub fn rho_log_derivative(s: C) -> C {
    -1.0 / s - 3.0 / (3.0 * s + 4.0)
}

fn check_nondegenerate(s: C) -> Result<()> {
    if s.norm() < DEGENERATE_GUARD || (s + 4.0 / 3.0).norm() < DEGENERATE_GUARD {
        return Err(Error::DegenerateCycle { s });
    }
    Ok(())
}

/// Roots of u³/3 + u² + s by Durand–Kerner with Newton polishing.
pub fn cubic_roots(s: C) -> [C; 3] {
    let p = |u: C| u * u * u + 3.0 * u * u + 3.0 * s;
    let dp = |u: C| 3.0 * u * u + 6.0 * u;
    let seed = C::new(0.4, 0.9);
    let mut z = [seed, seed * seed - 1.0, seed * seed * seed - 2.0];
    for _ in 0..500 {
        let mut delta = 0.0f64;
        for i in 0..3 {
            let mut den = C::new(1.0, 0.0);
            for j in 0..3 {
                if i != j {
                    den *= z[i] - z[j];
                }
            }
            if den.norm() == 0.0 {
                z[i] += C::new(1e-8, 1e-8);
                continue;
            }
            let step = p(z[i]) / den;
            z[i] -= step;
            delta = delta.max(step.norm());
        }
        if delta < 1e-15 {
            break;
        }
    }
    for r in z.iter_mut() {
        for _ in 0..3 {
            let d = dp(*r);
            if d.norm() > 1e-12 {
                *r -= p(*r) / d;
            }
        }
    }
    z
}

/// Roots ordered as [far, inside, outside]: the one near −3 and the small pair,
/// with the small root nearer to u₀ placed inside the cycle.
pub fn classify_roots(s: C) -> [C; 3] {
    let mut r = cubic_roots(s);
    r.sort_by(|a, b| b.norm().partial_cmp(&a.norm()).unwrap());
    let far = r[0];
    let (a, b) = (r[1], r[2]);
    let u0 = C::new(U0, 0.0);
    if (a - u0).norm() <= (b - u0).norm() {
        [far, a, b]
    } else {
        [far, b, a]
    }
}

/// Continue an ordered root triple from s_from to s_to along the straight segment.
pub fn track_roots(prev: [C; 3], s_from: C, s_to: C) -> Result<[C; 3]> {
    let len = (s_to - s_from).norm();
    let m = ((len / 0.01).ceil() as usize).max(1);
    let mut cur = prev;
    for k in 1..=m {
        let s = s_from + (s_to - s_from) * (k as f64 / m as f64);
        let ds = len / m as f64;
        let new = cubic_roots(s);
        let best = permutations()
            .iter()
            .map(|p| {
                let cand = [new[p[0]], new[p[1]], new[p[2]]];
                let cost: f64 = (0..3).map(|i| (cand[i] - cur[i]).norm()).sum();
                (cost, cand)
            })
            .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .unwrap()
            .1;
        // dr/ds = −1/(r² + 2r): a jump larger than a few times that bound is a swap.
        for i in 0..3 {
            let lip = 1.0 / (cur[i] * cur[i] + 2.0 * cur[i]).norm().max(1e-12);
            let jump = (best[i] - cur[i]).norm();
            if jump > 4.0 * lip * ds + 1e-9 {
                return Err(Error::DegenerateCycle { s });
            }
        }
        cur = best;
    }
    Ok(cur)
}

fn permutations() -> [[usize; 3]; 6] {
    [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]]
}

/// Circle through u₀, traversed counterclockwise starting at u₀.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Circle {
    pub center: C,
    pub radius: f64,
}

impl Circle {
    pub fn through_u0(center: C) -> Self {
        Circle { center, radius: (C::new(U0, 0.0) - center).norm() }
    }

    fn theta0(&self) -> f64 {
        (C::new(U0, 0.0) - self.center).arg()
    }

    /// u(τ) and du/dτ for τ ∈ [0, 1].
    pub fn point(&self, tau: f64) -> (C, C) {
        let th = self.theta0() + 2.0 * PI * tau;
        let e = C::from_polar(self.radius, th);
        (self.center + e, C::new(0.0, 2.0 * PI) * e)
    }

    /// Smallest signed clearance: positive when `inside` roots are inside and `outside` roots outside.
    pub fn margin(&self, inside: &[C], outside: &[C]) -> f64 {
        let a = inside.iter().map(|r| self.radius - (r - self.center).norm());
        let b = outside.iter().map(|r| (r - self.center).norm() - self.radius);
        a.chain(b).fold(f64::INFINITY, f64::min)
    }
}

/// Circles through u₀ and a point between the two small roots, indexed by the offset t of the centre
/// along the perpendicular bisector.
fn circle_family(roots: &[C; 3]) -> impl Fn(f64) -> Circle {
    let m = 0.5 * (roots[1] + roots[2]);
    let u0 = C::new(U0, 0.0);
    let base = 0.5 * (u0 + m);
    let d = m - u0;
    let dir = C::new(0.0, 1.0) * d / d.norm();
    move |t| Circle::through_u0(base + dir * t)
}

/// Best-clearance circle of the family, or an alternative at a different offset with at least
/// half the best clearance (`alternative = true`).
pub fn build_circle(roots: &[C; 3], alternative: bool) -> Result<(Circle, f64)> {
    let fam = circle_family(roots);
    let score = |t: f64| fam(t).margin(&roots[..2], &roots[2..]);
    let grid: Vec<(f64, f64)> = (-400..=400).map(|i| i as f64 * 0.05).map(|t| (t, score(t))).collect();
    let (mut tb, mut sb) = grid.iter().cloned().fold((0.0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    // Golden-section refinement around the best grid point.
    let (mut lo, mut hi) = (tb - 0.05, tb + 0.05);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if score(a) > score(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    let tr = 0.5 * (lo + hi);
    if score(tr) > sb {
        tb = tr;
        sb = score(tr);
    }
    if sb <= 1e-6 {
        return Err(Error::DegenerateCycle { s: -(roots[0] * roots[0] * (roots[0] / 3.0 + 1.0)) });
    }
    if !alternative {
        return Ok((fam(tb), sb));
    }
    let alt = grid
        .iter()
        .filter(|(_, m)| *m >= 0.5 * sb)
        .max_by(|a, b| (a.0 - tb).abs().partial_cmp(&(b.0 - tb).abs()).unwrap())
        .cloned()
        .unwrap_or((tb, sb));
    Ok((fam(alt.0), alt.1))
}

/// Branch of √P nearest to a reference value.
fn sqrt_near(p: C, reference: C) -> C {
    let r = p.sqrt();
    if (r - reference).norm() <= (r + reference).norm() {
        r
    } else {
        -r
    }
}

/// Start rule for the branch of R at u₀: positive real part, ties broken by positive imaginary part.
pub fn default_branch(s: C) -> C {
    let r = cubic(C::new(U0, 0.0), s).sqrt();
    if r.re.abs() > 1e-9 * r.norm() {
        if r.re > 0.0 {
            r
        } else {
            -r
        }
    } else if r.im >= 0.0 {
        r
    } else {
        -r
    }
}

/// A cycle: ordered roots at s, a contour through u₀, and the branch of R at u₀.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Cycle {
    pub s: C,
    pub roots: [C; 3],
    pub circle: Circle,
    pub margin: f64,
    pub r0: C,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CycleValue {
    pub value: C,
    pub err: f64,
}

impl Cycle {
    /// Cycle at s with the start rules for roots and branch.
    pub fn start(s: C) -> Result<Self> {
        check_nondegenerate(s)?;
        let roots = classify_roots(s);
        let (circle, margin) = build_circle(&roots, false)?;
        Ok(Cycle { s, roots, circle, margin, r0: default_branch(s) })
    }

    /// The same cycle continued to a nearby s (roots tracked, branch at u₀ continued).
    pub fn follow(&self, s: C) -> Result<Self> {
        check_nondegenerate(s)?;
        let roots = track_roots(self.roots, self.s, s)?;
        let (circle, margin) = build_circle(&roots, false)?;
        let r0 = sqrt_near(cubic(C::new(U0, 0.0), s), self.r0);
        Ok(Cycle { s, roots, circle, margin, r0 })
    }

    /// Same roots and branch on a different homotopic circle.
    pub fn with_circle(&self, circle: Circle) -> Self {
        let margin = circle.margin(&self.roots[..2], &self.roots[2..]);
        Cycle { circle, margin, ..*self }
    }

    pub fn flip_branch(&self) -> Self {
        Cycle { r0: -self.r0, ..*self }
    }

    /// ∮ f(u, R) du at parameter σ (close to self.s) by the periodic trapezoid rule with `n` nodes.
    /// Also returns the largest |f du| seen, the scale of rounding in the sum.
    fn trapezoid<F: Fn(C, C) -> C>(&self, sigma: C, n: usize, f: &F) -> Result<(C, f64)> {
        let r0 = sqrt_near(cubic(C::new(U0, 0.0), sigma), self.r0);
        let mut r = r0;
        let mut acc = C::new(0.0, 0.0);
        let mut scale = 0.0f64;
        for k in 0..n {
            let (u, du) = self.circle.point(k as f64 / n as f64);
            r = sqrt_near(cubic(u, sigma), r);
            let term = f(u, r) * du;
            scale = scale.max(term.norm());
            acc += term;
        }
        let (u, _) = self.circle.point(1.0);
        let back = sqrt_near(cubic(u, sigma), r);
        if (back - r0).norm() > 1e-6 * r0.norm() {
            return Err(Error::DegenerateCycle { s: sigma });
        }
        Ok((acc / n as f64, scale))
    }

    /// Integral with node doubling until two successive values agree to rounding.
    pub fn integrate<F: Fn(C, C) -> C>(&self, sigma: C, f: F) -> Result<CycleValue> {
        let mut n = 128;
        let (mut prev, _) = self.trapezoid(sigma, n, &f)?;
        while n < 1 << 17 {
            n *= 2;
            let (v, scale) = self.trapezoid(sigma, n, &f)?;
            let err = (v - prev).norm();
            if err <= 1e-14 * v.norm().max(1.0) || err <= 1e-14 * scale {
                return Ok(CycleValue { value: v, err: err.max(1e-16 * scale) });
            }
            prev = v;
        }
        Err(Error::QuadratureFailure { estimate: f64::NAN })
    }

    pub fn j(&self) -> Result<CycleValue> {
        self.j_at(self.s)
    }

    pub fn l(&self) -> Result<CycleValue> {
        self.l_at(self.s)
    }

    pub fn j_at(&self, sigma: C) -> Result<CycleValue> {
        self.integrate(sigma, |_, r| r)
    }

    pub fn l_at(&self, sigma: C) -> Result<CycleValue> {
        self.integrate(sigma, |_, r| 1.0 / r)
    }
}

/// J(s) = ∮ R dv on the start-rule cycle.
pub fn cycle_j(s: C) -> Result<CycleValue> {
    Cycle::start(s)?.j()
}

/// L(s) = ∮ dv/R on the start-rule cycle.
pub fn cycle_l(s: C) -> Result<CycleValue> {
    Cycle::start(s)?.l()
}

/// Value, first and second derivative of an analytic f at s from a trapezoidal Cauchy integral on a
/// circle of radius `r` with `m` nodes.
pub fn cauchy_derivatives<F: Fn(C) -> Result<C>>(f: F, s: C, r: f64, m: usize) -> Result<[C; 3]> {
    let mut out = [C::new(0.0, 0.0); 3];
    for k in 0..m {
        let e = C::from_polar(1.0, 2.0 * PI * k as f64 / m as f64);
        let v = f(s + r * e)?;
        out[0] += v;
        out[1] += v / (r * e);
        out[2] += 2.0 * v / (r * e * r * e);
    }
    for o in out.iter_mut() {
        *o /= m as f64;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CycleResiduals {
    pub s: C,
    /// |J'' + ρJ/4|.
    pub j_equation: f64,
    /// |L'' − (ρ'/ρ)L' + ρL/4|.
    pub l_equation: f64,
    /// |L − 2J'|.
    pub l_vs_dj: f64,
}

/// ODE residuals of J and L at s, with derivatives taken from J and L values on a small circle.
pub fn cycle_residuals(s: C) -> Result<CycleResiduals> {
    let cyc = Cycle::start(s)?;
    let dist = s.norm().min((s + 4.0 / 3.0).norm());
    let r = (0.25 * dist).min(0.05);
    let m = 48;
    let jd = cauchy_derivatives(|z| Ok(cyc.j_at(z)?.value), s, r, m)?;
    let ld = cauchy_derivatives(|z| Ok(cyc.l_at(z)?.value), s, r, m)?;
    let rh = rho(s);
    Ok(CycleResiduals {
        s,
        j_equation: (jd[2] + 0.25 * rh * jd[0]).norm(),
        l_equation: (ld[2] - rho_log_derivative(s) * ld[1] + 0.25 * rh * ld[0]).norm(),
        l_vs_dj: (ld[0] - 2.0 * jd[1]).norm(),
    })
}

/// Frobenius coefficients of Ĵ = Σ a_k s^k with a_0 = 0, a_1 = 1, from (36s² + 48s)J'' + 5J = 0.
pub fn jhat_coefficients(n: usize) -> Vec<f64> {
    let mut a = vec![0.0; n.max(2)];
    a[1] = 1.0;
    for k in 1..a.len() - 1 {
        let kf = k as f64;
        a[k + 1] = -(36.0 * kf * (kf - 1.0) + 5.0) * a[k] / (48.0 * kf * (kf + 1.0));
    }
    a
}

/// Linear ODE y'' = −ρ(s) y / 4 continued from (s0, y, y') to s1 along a straight segment.
pub fn continue_linear(s0: C, y: [C; 2], s1: C, tol: f64) -> Result<[C; 2]> {
    let d = s1 - s0;
    // Closest approach of the segment to the singular points.
    for sing in [C::new(0.0, 0.0), C::new(-4.0 / 3.0, 0.0)] {
        let t = (((sing - s0) * d.conj()).re / d.norm_sqr()).clamp(0.0, 1.0);
        if (s0 + d * t - sing).norm() < DEGENERATE_GUARD {
            return Err(Error::DegenerateCycle { s: sing });
        }
    }
    let mut f = |t: f64, v: &State| {
        let s = s0 + d * t;
        [v[1] * d, -0.25 * rho(s) * v[0] * d]
    };
    let mut t = 0.0;
    let mut v: State = y;
    let mut h: f64 = 0.05;
    let mut ctl = Controller::default();
    let mut k1 = f(t, &v);
    let mut steps = 0;
    while t < 1.0 {
        h = h.min(1.0 - t);
        let a = attempt(&mut f, t, &v, &k1, h, tol, tol * 1e-3);
        let (ok, hn) = ctl.next(h, a.err);
        if ok {
            t += h;
            v = a.y1;
            k1 = a.k7;
        }
        h = hn;
        steps += 1;
        if steps > 200_000 || h < 1e-14 {
            return Err(Error::StepFailure { x: s0 + d * t });
        }
    }
    Ok(v)
}

const FROBENIUS_RADIUS: f64 = 0.8;

/// Ĵ(s) and Ĵ'(s): series inside |s| ≤ 0.8, ODE continuation beyond.
pub fn jhat(s: C) -> Result<[C; 2]> {
    static COEFFS: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    let a = COEFFS.get_or_init(|| jhat_coefficients(400));
    let eval = |z: C| {
        let mut v = C::new(0.0, 0.0);
        let mut dv = C::new(0.0, 0.0);
        for k in (1..a.len()).rev() {
            v = v * z + a[k];
            dv = dv * z + a[k] * k as f64;
        }
        // Horner above builds Σ a_k z^{k-1}; restore the powers.
        [v * z, dv]
    };
    if s.norm() <= FROBENIUS_RADIUS {
        return Ok(eval(s));
    }
    let s0 = s / s.norm() * (0.5 * FROBENIUS_RADIUS);
    continue_linear(s0, eval(s0), s, 1e-13)
}

/// J continued by the ODE from a quadrature value, Ĵ from the Frobenius data, and their Wronskian.
#[derive(Clone, Debug, Serialize)]
pub struct JTable {
    pub s: Vec<C>,
    pub j: Vec<C>,
    pub dj: Vec<C>,
    pub jhat: Vec<C>,
    pub djhat: Vec<C>,
    /// Ĵ'J − ĴJ' at every node.
    pub wronskian: Vec<C>,
    /// Largest |J_ode − J_quadrature| / |J|.
    pub match_error: f64,
}

impl JTable {
    pub fn kappa0(&self) -> C {
        self.wronskian[0]
    }

    pub fn wronskian_variation(&self) -> f64 {
        let w0 = self.wronskian[0];
        self.wronskian.iter().map(|w| (w - w0).norm()).fold(0.0, f64::max) / w0.norm()
    }
}

/// Continue J along the polyline through `points`, starting from the quadrature value at the first point.
pub fn solve_j_ode(points: &[C]) -> Result<JTable> {
    if points.is_empty() {
        return Err(Error::InvalidInput("solve_J_ode needs at least one point".into()));
    }
    let mut cyc = Cycle::start(points[0])?;
    let mut y = [cyc.j()?.value, 0.5 * cyc.l()?.value];
    let mut out = JTable {
        s: vec![],
        j: vec![],
        dj: vec![],
        jhat: vec![],
        djhat: vec![],
        wronskian: vec![],
        match_error: 0.0,
    };
    for (i, &s) in points.iter().enumerate() {
        if i > 0 {
            y = continue_linear(points[i - 1], y, s, 1e-13)?;
            cyc = cyc.follow(s)?;
        }
        let jq = cyc.j()?.value;
        let rel = (jq - y[0]).norm() / jq.norm();
        out.match_error = out.match_error.max(rel);
        if rel > 1e-8 {
            return Err(Error::MatchFailure(format!("J from the ODE and from quadrature differ by {rel:e} at s = {s}")));
        }
        let jh = jhat(s)?;
        out.s.push(s);
        out.j.push(y[0]);
        out.dj.push(y[1]);
        out.jhat.push(jh[0]);
        out.djhat.push(jh[1]);
        out.wronskian.push(jh[1] * y[0] - jh[0] * y[1]);
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug)]
pub struct CycleOptions {
    pub tol: f64,
    /// Drop the 1/x source terms in ds/du.
    pub autonomous: bool,
    /// Stop once arg x < −π + this margin.
    pub arg_margin: f64,
}

impl Default for CycleOptions {
    fn default() -> Self {
        CycleOptions { tol: 1e-11, autonomous: false, arg_margin: 0.1 }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct StepResult {
    pub x: C,
    pub s: C,
    /// R at u₀ after one turn, which seeds the branch for the next turn.
    pub r_end: C,
    pub rerouted: bool,
}

fn integrate_turn(cycle: &Cycle, x0: C, s0: C, opts: &CycleOptions) -> Result<StepResult> {
    let circle = cycle.circle;
    let mut r_ref = sqrt_near(cubic(C::new(U0, 0.0), s0), cycle.r0);
    let mut t = 0.0;
    let mut v: State = [s0, x0];
    let mut h: f64 = 1.0 / 256.0;
    let mut ctl = Controller::default();
    let mut steps = 0;
    let autonomous = opts.autonomous;
    loop {
        let rr = r_ref;
        let mut f = |tau: f64, y: &State| {
            let (u, du) = circle.point(tau);
            let r = sqrt_near(cubic(u, y[0]), rr);
            let x = y[1];
            let ds = if autonomous { C::new(0.0, 0.0) } else { -2.0 * r / x + FORCING2 / (x * x * x * x) };
            [ds * du, du / r]
        };
        let k1 = f(t, &v);
        h = h.min(1.0 - t).min(1.0 / 64.0);
        let a = attempt(&mut f, t, &v, &k1, h, opts.tol, opts.tol * 1e-3);
        let (ok, hn) = ctl.next(h, a.err);
        if ok {
            t += h;
            v = a.y1;
            let (u, _) = circle.point(t);
            let r = sqrt_near(cubic(u, v[0]), r_ref);
            if r.norm() < 1e-6 || (r - r_ref).norm() > 0.5 * r_ref.norm() {
                return Err(Error::CycleBreakdown(format!("R nearly vanishes at u = {u}")));
            }
            r_ref = r;
            if t >= 1.0 - 1e-15 {
                break;
            }
        }
        h = hn;
        steps += 1;
        if steps > 1_000_000 || h < 1e-14 {
            return Err(Error::CycleBreakdown(format!("step underflow at tau = {t}")));
        }
    }
    Ok(StepResult { x: v[1], s: v[0], r_end: r_ref, rerouted: false })
}

/// One turn of u around the cycle from u₀: (x_n, s_n) → (x_{n+1}, s_{n+1}).
/// On breakdown the turn is retried once on an alternative circle.
pub fn poincare_step(cycle: &Cycle, x: C, opts: &CycleOptions) -> Result<StepResult> {
    match integrate_turn(cycle, x, cycle.s, opts) {
        Ok(r) => Ok(r),
        Err(Error::CycleBreakdown(first)) => {
            let (alt, _) = build_circle(&cycle.roots, true)?;
            let mut r = integrate_turn(&cycle.with_circle(alt), x, cycle.s, opts)
                .map_err(|e| Error::CycleBreakdown(format!("{first}; after re-route: {e}")))?;
            r.rerouted = true;
            Ok(r)
        }
        Err(e) => Err(e),
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct CycleState {
    pub n: usize,
    pub x: C,
    pub s: C,
    pub j: C,
    /// Q = x J(s).
    pub q: C,
    /// K(s) = Ĵ(s)/J(s).
    pub k: C,
    /// K(s_n) + 2κ₀n/(x₀J(s₀)).
    pub k_shifted: C,
    /// K(s_n) + 2n/(κ₀x₀J(s₀)), the variant with κ₀ in the denominator.
    pub k_shifted_alt: C,
}

#[derive(Clone, Debug, Serialize)]
pub struct CycleRun {
    pub states: Vec<CycleState>,
    pub kappa0: C,
    /// R(u₀, s₀) chosen so that the first turn moves x clockwise.
    pub branch0: C,
    pub stopped_by_arg: bool,
    pub reroutes: usize,
}

impl CycleRun {
    /// max_n |Q_n − Q_0| / |Q_0|.
    pub fn q_drift(&self) -> f64 {
        let q0 = self.states[0].q;
        self.states.iter().map(|st| (st.q - q0).norm()).fold(0.0, f64::max) / q0.norm()
    }

    /// max_n |K̃_n − K̃_0| divided by the spread of K(s_n) over the run.
    pub fn k_drift(&self) -> f64 {
        self.drift_of(|st| st.k_shifted)
    }

    pub fn k_drift_alt(&self) -> f64 {
        self.drift_of(|st| st.k_shifted_alt)
    }

    fn drift_of<F: Fn(&CycleState) -> C>(&self, f: F) -> f64 {
        let k0 = f(&self.states[0]);
        let drift = self.states.iter().map(|st| (f(st) - k0).norm()).fold(0.0, f64::max);
        let kk0 = self.states[0].k;
        let spread = self.states.iter().map(|st| (st.k - kk0).norm()).fold(0.0, f64::max);
        drift / spread.max(1e-300)
    }
}

/// Iterate the Poincaré map from (x₀, s₀) for at most `n_max` turns.
pub fn run_cycles(x0: C, s0: C, n_max: usize, opts: &CycleOptions) -> Result<CycleRun> {
    let mut cycle = Cycle::start(s0)?;
    // Orientation: the first turn must advance x clockwise, i.e. Re(L / (−i x₀)) > 0.
    let l0 = cycle.l()?.value;
    if (l0 / (C::new(0.0, -1.0) * x0)).re < 0.0 {
        cycle = cycle.flip_branch();
    }
    let branch0 = cycle.r0;
    let j0 = cycle.j()?.value;
    let jh = jhat(s0)?;
    let kappa0 = jh[1] * j0 - jh[0] * 0.5 * cycle.l()?.value;
    let state = |n: usize, x: C, s: C, j: C| {
        let jh = jhat(s)?;
        let k = jh[0] / j;
        let nf = n as f64;
        Ok::<_, Error>(CycleState {
            n,
            x,
            s,
            j,
            q: x * j,
            k,
            k_shifted: k + 2.0 * kappa0 * nf / (x0 * j0),
            k_shifted_alt: k + 2.0 * nf / (kappa0 * x0 * j0),
        })
    };
    let mut states = vec![state(0, x0, s0, j0)?];
    let mut x = x0;
    let mut reroutes = 0;
    let mut stopped_by_arg = false;
    for n in 1..=n_max {
        let step = poincare_step(&cycle, x, opts)?;
        reroutes += step.rerouted as usize;
        x = step.x;
        let mut next = cycle.follow(step.s)?;
        next.r0 = step.r_end;
        cycle = next;
        let j = cycle.j()?.value;
        states.push(state(n, x, step.s, j)?);
        if x.arg() < -PI + opts.arg_margin && x.im < 0.0 {
            stopped_by_arg = true;
            break;
        }
    }
    Ok(CycleRun { states, kappa0, branch0, stopped_by_arg, reroutes })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct Stok2Solution {
    pub n: i64,
    pub mu: C,
    /// |left − right| of the equation at the returned μ.
    pub residual: f64,
}

fn stok2_sides(n: i64, mu: C) -> (C, C) {
    let s3 = 3f64.sqrt();
    let i = C::new(0.0, 1.0);
    let a = C::new(6.0, 6.0) * C::new(s3, 1.0);
    let lhs = -(4.0 * s3 - 24.0 * i) / (5.0 * PI);
    let bracket = 12.0 * (a / mu).ln() + i * PI - 4.0 * s3 * PI - 6.0 * (240.0 * PI).ln();
    let rhs = 24.0 * i * n as f64 / (5.0 * PI) + bracket / (5.0 * PI * PI);
    (lhs, rhs)
}

/// Solve the pole-sector consistency equation for μ with the principal logarithm.
/// The bracket fixes w = ln(A/μ); its imaginary part must lie in (−π, π], which singles out N.
pub fn solve_stok2(n: i64) -> Result<Stok2Solution> {
    let s3 = 3f64.sqrt();
    let i = C::new(0.0, 1.0);
    let a = C::new(6.0, 6.0) * C::new(s3, 1.0);
    let lhs = -(4.0 * s3 - 24.0 * i) / (5.0 * PI);
    let rest = i * PI - 4.0 * s3 * PI - 6.0 * (240.0 * PI).ln();
    let w = ((lhs - 24.0 * i * n as f64 / (5.0 * PI)) * 5.0 * PI * PI - rest) / 12.0;
    if !(w.im > -PI && w.im <= PI + 1e-12) {
        return Err(Error::NoIntegerConsistency);
    }
    let mu = a * (-w).exp();
    let (l, r) = stok2_sides(n, mu);
    Ok(Stok2Solution { n, mu, residual: (l - r).norm() })
}

/// Scan integers for the one that balances the imaginary part.
pub fn solve_stok2_auto(range: std::ops::RangeInclusive<i64>) -> Result<Stok2Solution> {
    range.into_iter().find_map(|n| solve_stok2(n).ok()).ok_or(Error::NoIntegerConsistency)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_solve_cubic() {
        for s in [C::new(-0.1, 0.0), C::new(0.3, 0.2), C::new(-1.0, -0.4)] {
            for r in cubic_roots(s) {
                assert!(cubic(r, s).norm() < 1e-13, "{s} {r}");
            }
        }
    }

    #[test]
    fn stok2_gives_closed_form() {
        let sol = solve_stok2(1).unwrap();
        assert!((sol.mu.norm() - (6.0 / (5.0 * PI)).sqrt()).abs() < 1e-14);
        assert!((sol.mu.arg() - PI / 2.0).abs() < 1e-14);
        assert!(sol.residual < 1e-13);
        assert!(matches!(solve_stok2(0), Err(Error::NoIntegerConsistency)));
        assert!(matches!(solve_stok2(2), Err(Error::NoIntegerConsistency)));
        assert_eq!(solve_stok2_auto(-10..=10).unwrap().n, 1);
    }

    #[test]
    fn degenerate_guard() {
        assert!(matches!(cycle_j(C::new(1e-4, 0.0)), Err(Error::DegenerateCycle { .. })));
        assert!(matches!(cycle_j(C::new(-4.0 / 3.0, 1e-4)), Err(Error::DegenerateCycle { .. })));
    }

    #[test]
    fn jhat_series_solves_ode() {
        let a = jhat_coefficients(50);
        assert_eq!(a[1], 1.0);
        // (36s² + 48s)J'' + 5J = 0 at s = 0.3 from the series.
        let s = 0.3f64;
        let v: f64 = (1..50).map(|k| a[k] * s.powi(k as i32)).sum();
        let d2: f64 = (2..50).map(|k| a[k] * (k * (k - 1)) as f64 * s.powi(k as i32 - 2)).sum();
        assert!(((36.0 * s * s + 48.0 * s) * d2 + 5.0 * v).abs() < 1e-14);
    }
}
