//! Directional Laplace transforms L_φ g(x) = ∫_0^{∞e^{iφ}} e^{-px} g(p) dp.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use num_traits::Zero;

use crate::borel::germ::{solve_h0_convolution, BorelGerm, GermSource};
use crate::borel::pade::Pade;
use crate::borel::ray::{RayOptions, RayTable};
use crate::error::{Error, Result};
use crate::quad::integrate_panels;
use crate::series::Transseries;

/// Exponent below which the tail of the Laplace integral is dropped (e^{-TAIL} ≈ 1e-20).
const TAIL: f64 = 46.0;
const MAX_T: f64 = 40.0;

#[derive(Clone, Copy, Debug)]
pub struct LaplaceOptions {
    pub rel_tol: f64,
    pub pade_tol: f64,
    pub min_abs_x: f64,
}

impl Default for LaplaceOptions {
    fn default() -> Self {
        LaplaceOptions { rel_tol: 1e-13, pade_tol: 1e-8, min_abs_x: 2.0 }
    }
}

/// Rejects the singular directions 0 and ±π.
pub fn check_direction(phi: f64) -> Result<()> {
    let r = phi.rem_euclid(std::f64::consts::PI);
    if r < 1e-9 || std::f64::consts::PI - r < 1e-9 {
        return Err(Error::StokesDirection { phi });
    }
    Ok(())
}

/// Germs of the normalized equation (H0 and the levels T_k) with one ray table per direction.
pub struct P1Borel {
    pub ts: Arc<Transseries>,
    pub h0: Vec<f64>,
    pub kmax: usize,
    pub ray: RayOptions,
    pub opts: LaplaceOptions,
    cache: Mutex<HashMap<(u64, usize), Arc<RayTable>>>,
}

impl P1Borel {
    pub fn new(kmax: usize, n_levels: usize, n_h0: usize) -> Result<Self> {
        let ts = Transseries::new(kmax.max(1), n_levels)?;
        let h0 = solve_h0_convolution(n_h0)?.float_coeffs();
        Ok(P1Borel {
            ts: Arc::new(ts),
            h0,
            kmax,
            ray: RayOptions::default(),
            opts: LaplaceOptions::default(),
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Process-wide instance with 8 levels.
    pub fn shared() -> &'static P1Borel {
        static CELL: OnceLock<P1Borel> = OnceLock::new();
        CELL.get_or_init(|| P1Borel::new(8, 60, 220).expect("default germs"))
    }

    /// Ray table along φ covering t ≤ t_needed for levels ≤ k.
    pub fn table(&self, phi: f64, k: usize, t_needed: f64) -> Result<Arc<RayTable>> {
        if k > self.kmax {
            return Err(Error::InvalidInput(format!("level {k} exceeds {}", self.kmax)));
        }
        if t_needed > MAX_T {
            return Err(Error::RadiusExceeded { achieved: t_needed });
        }
        let key = (phi.to_bits(), k);
        let mut cache = self.cache.lock().expect("cache lock");
        // Any cached table with enough levels and length will do.
        let hit = cache
            .iter()
            .filter(|((p, kk), t)| *p == key.0 && *kk >= k && t.t_max() >= t_needed)
            .map(|(_, t)| t.clone())
            .next();
        if let Some(t) = hit {
            return Ok(t);
        }
        let t_max = (t_needed * 1.25).max(self.ray.t_max).min(MAX_T);
        let opts = RayOptions { t_max, ..self.ray };
        let table = Arc::new(RayTable::build(&self.ts, &self.h0, phi, k, opts)?);
        cache.insert(key, table.clone());
        Ok(table)
    }

    fn decay(&self, phi: f64, x: Complex64) -> Result<f64> {
        check_direction(phi)?;
        if x.norm() < self.opts.min_abs_x {
            return Err(Error::InvalidInput(format!("|x| = {} below {}", x.norm(), self.opts.min_abs_x)));
        }
        let a = (Complex64::from_polar(1.0, phi) * x).re;
        if a <= 0.05 * x.norm() {
            return Err(Error::InvalidInput(format!("direction {phi} does not decay for x = {x}")));
        }
        Ok(a)
    }

    fn integrate_table<F: Fn(&RayTable, f64) -> Complex64>(
        &self,
        phi: f64,
        k: usize,
        x: Complex64,
        f: F,
    ) -> Result<(Complex64, f64)> {
        self.integrate_table_from(phi, k, x, 0, f)
    }

    /// As `integrate_table` for an integrand vanishing like t^n at 0, whose peak sits near t = n/a.
    fn integrate_table_from<F: Fn(&RayTable, f64) -> Complex64>(
        &self,
        phi: f64,
        k: usize,
        x: Complex64,
        n: usize,
        f: F,
    ) -> Result<(Complex64, f64)> {
        let a = self.decay(phi, x)?;
        let t_cut = tail_cut(a, n);
        let table = self.table(phi, k, t_cut)?;
        let w = table.omega;
        let wx = w * x;
        let mut g = |t: f64| (-wx * t).exp() * f(&table, t) * w;
        let mut breaks = vec![0.0];
        let ts = table.n_switch as f64 * table.dt;
        let width = (3.0 / a).min(0.5);
        if ts < t_cut {
            breaks.push(ts);
        }
        while *breaks.last().unwrap() + width < t_cut {
            let v = *breaks.last().unwrap() + width;
            breaks.push(v);
        }
        breaks.push(t_cut);
        let scale = breaks.iter().map(|&t| g(t).norm()).fold(0.0, f64::max) / a;
        // A remainder integral can be far below its own integrand; its natural size is the peak of e^{-at} t^n, and the ray table is good to about 1e-10 of that.
        let floor = if n > 0 {
            let nf = n as f64;
            let tp = nf / a;
            1e-10 * (-(a * tp - nf * tp.ln())).exp() / a
        } else {
            0.0
        };
        integrate_panels(&mut g, &breaks, (1e-17 * scale).max(floor), self.opts.rel_tol)
    }

    /// L_φ H0(x).
    pub fn laplace_h0(&self, phi: f64, x: Complex64) -> Result<(Complex64, f64)> {
        self.integrate_table(phi, 0, x, |tb, t| tb.eval(0, t))
    }

    /// L_φ[H0 − Σ_{j<n} b_j p^j](x) = h(x) − Σ_{k≤n} c_k x^{-k}.
    pub fn laplace_h0_remainder(&self, phi: f64, x: Complex64, n: usize) -> Result<(Complex64, f64)> {
        self.integrate_table_from(phi, 0, x, n, |tb, t| tb.eval_h0_remainder(t, n))
    }

    /// L_φ H_k(x) = x^{k/2} L_φ T_k(x) for k ≥ 1.
    pub fn laplace_level(&self, k: usize, phi: f64, x: Complex64) -> Result<(Complex64, f64)> {
        if k == 0 {
            return self.laplace_h0(phi, x);
        }
        let (v, e) = self.integrate_table(phi, k, x, |tb, t| tb.eval(k, t))?;
        let f = x.powf(k as f64 / 2.0);
        Ok((v * f, e * f.norm()))
    }

    /// d/dx of L_φ H_k(x), from the transform of −p T_k.
    pub fn laplace_level_derivative(&self, k: usize, phi: f64, x: Complex64) -> Result<(Complex64, f64)> {
        let (d, e) = self.integrate_table(phi, k, x, |tb, t| -tb.omega * t * tb.eval(k, t))?;
        if k == 0 {
            return Ok((d, e));
        }
        let (v, ve) = self.integrate_table(phi, k, x, |tb, t| tb.eval(k, t))?;
        let half = k as f64 / 2.0;
        let f = x.powf(half);
        Ok((f * (d + half * v / x), f.norm() * (e + half * ve / x.norm())))
    }
}

/// Cutoff where e^{-at} t^n has fallen by e^{-TAIL} below its peak (or below 1 for n = 0).
fn tail_cut(a: f64, n: usize) -> f64 {
    if n == 0 {
        return TAIL / a;
    }
    let nf = n as f64;
    let peak = nf / a;
    let expo = |t: f64| a * t - nf * t.ln() - (nf - nf * peak.ln());
    let mut t = peak;
    let dt = 0.25 * peak.max(1.0 / a);
    while expo(t) < TAIL {
        t += dt;
    }
    t
}

/// Laplace transform of a germ along the direction φ.
pub fn laplace_ray(g: &BorelGerm, phi: f64, x: Complex64) -> Result<Complex64> {
    laplace_ray_err(g, phi, x).map(|r| r.0)
}

/// As `laplace_ray`, also returning the error estimate.
pub fn laplace_ray_err(g: &BorelGerm, phi: f64, x: Complex64) -> Result<(Complex64, f64)> {
    check_direction(phi)?;
    if g.is_zero() {
        return Ok((Complex64::zero(), 0.0));
    }
    match &g.source {
        GermSource::P1Level(k) => {
            let b = P1Borel::shared();
            let (v, e) = b.laplace_level(*k, phi, x)?;
            Ok((v * g.scale, e * g.scale.norm()))
        }
        GermSource::Closed(form) => {
            let form = *form;
            let lead = g.leading_exponent();
            integrate_function(move |p| form.eval(p) * p.powf(lead), phi, x, g.alpha2 % 2 != 0)
        }
        GermSource::Generic => laplace_pade(g, phi, x),
    }
}

/// ∫ along the ray of e^{-px} f(p); `sqrt_sub` uses t = s² to absorb p^{-1/2} at the origin.
pub fn integrate_function<F: Fn(Complex64) -> Complex64>(
    f: F,
    phi: f64,
    x: Complex64,
    sqrt_sub: bool,
) -> Result<(Complex64, f64)> {
    check_direction(phi)?;
    let w = Complex64::from_polar(1.0, phi);
    let a = (w * x).re;
    if a <= 0.0 {
        return Err(Error::InvalidInput(format!("direction {phi} does not decay for x = {x}")));
    }
    let t_cut = TAIL / a;
    let mut breaks = vec![0.0];
    let width = (3.0 / a).min(0.5);
    while *breaks.last().unwrap() + width < t_cut {
        let v = *breaks.last().unwrap() + width;
        breaks.push(v);
    }
    breaks.push(t_cut);
    if sqrt_sub {
        let mut h = |s: f64| {
            let t = s * s;
            if s == 0.0 {
                return Complex64::zero();
            }
            (-w * x * t).exp() * f(w * t) * w * (2.0 * s)
        };
        let sb: Vec<f64> = breaks.iter().map(|t| t.sqrt()).collect();
        let scale = sb.iter().skip(1).map(|&s| h(s).norm()).fold(0.0, f64::max) * t_cut.sqrt();
        integrate_panels(&mut h, &sb, 1e-17 * scale.max(1e-300), 1e-13)
    } else {
        let mut h = |t: f64| (-w * x * t).exp() * f(w * t) * w;
        let scale = breaks.iter().map(|&t| h(t).norm()).fold(0.0, f64::max) / a;
        integrate_panels(&mut h, &breaks, 1e-17 * scale.max(1e-300), 1e-13)
    }
}

fn laplace_pade(g: &BorelGerm, phi: f64, x: Complex64) -> Result<(Complex64, f64)> {
    let c = g.complex_coeffs();
    let n = c.len().saturating_sub(1);
    if n < 4 {
        return Err(Error::InvalidInput("need at least 5 germ coefficients".into()));
    }
    let lead = g.leading_exponent();
    let sqrt_sub = g.alpha2 % 2 != 0;
    let r1 = Pade::new(&c, n / 2, n - n / 2, 1e-14);
    let r2 = Pade::new(&c, n / 2 - 2, n - n / 2 - 2, 1e-14);
    let f = |r: &Pade| {
        let r = r.clone();
        move |p: Complex64| {
            if lead == 0.0 {
                r.eval(p)
            } else {
                r.eval(p) * p.powf(lead)
            }
        }
    };
    let (v1, e1) = integrate_function(f(&r1), phi, x, sqrt_sub)?;
    let (v2, _) = integrate_function(f(&r2), phi, x, sqrt_sub)?;
    let achieved = (v1 - v2).norm() / v1.norm().max(1e-300);
    if achieved > LaplaceOptions::default().pade_tol {
        return Err(Error::RadiusExceeded { achieved });
    }
    Ok((v1, e1 + (v1 - v2).norm()))
}
