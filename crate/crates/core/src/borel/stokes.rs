//! Singularity data at p = 1: large-order estimate of S and the jump across the cut.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::borel::germ::{BorelGerm, GermSource};
use crate::borel::laplace::P1Borel;
use crate::borel::pade::Pade;
use crate::borel::ray::{RayOptions, RayTable};
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::rat::{factorials, is_zero, q, qi, to_f64, zero, Q};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SEstimate {
    pub s: Complex64,
    pub err: f64,
    /// Radius of convergence seen by the ratio test.
    pub radius: f64,
}

/// u_n = binom(2n, n) / 4^n, the coefficients of (1 - p)^{-1/2}.
fn central(n: usize) -> Vec<Q> {
    let mut u = Vec::with_capacity(n + 1);
    let mut v = qi(1);
    for k in 0..=n {
        u.push(v.clone());
        v *= q(2 * k as i64 + 1, 2 * k as i64 + 2);
    }
    u
}

/// Richardson extrapolation of order m on a_{j0}, ..., a_{j0+m} for a_j = S + Σ c_i j^{-i}.
fn richardson(a: &[Q], j0: usize, m: usize) -> Q {
    let f = factorials(m);
    let mut s = zero();
    for k in 0..=m {
        let j = qi((j0 + k) as i64);
        let mut jm = qi(1);
        for _ in 0..m {
            jm *= &j;
        }
        let term = &a[j0 + k] * jm / (&f[k] * &f[m - k]);
        if (k + m).is_multiple_of(2) {
            s += term;
        } else {
            s -= term;
        }
    }
    s
}

/// Estimate S in g(p) ≈ S (1 - p)^{-1/2} (odd germs: S[(1-p)^{-1/2} - (1+p)^{-1/2}]).
pub fn estimate_s(g: &BorelGerm) -> Result<SEstimate> {
    let n = g.coeffs.len();
    if n < 100 {
        return Err(Error::InvalidInput(format!("estimate_S needs at least 100 coefficients, got {n}")));
    }
    let odd = g.coeffs.iter().step_by(2).all(is_zero);
    let step = if odd { 2 } else { 1 };
    let offset = if odd { 1 } else { 0 };
    let last = n - 1 - ((n - 1 - offset) % step);
    let first = last / 2 - ((last / 2 + step - offset) % step);
    let (c1, c2) = (to_f64(&g.coeffs[first]), to_f64(&g.coeffs[last]));
    if c1 == 0.0 || c2 == 0.0 {
        return Err(Error::NoConvergence("vanishing coefficients in the ratio test".into()));
    }
    // u_n ~ n^{-1/2}; remove that factor before taking the ratio.
    let radius = ((c1 / c2).abs() * ((first as f64) / (last as f64)).sqrt()).powf(1.0 / (last - first) as f64);
    if (radius - 1.0).abs() > 0.05 {
        return Err(Error::NoConvergence(format!(
            "nearest singularity at distance {radius:.4}, model expects 1"
        )));
    }
    let u = central(n);
    let f = if odd { qi(2) } else { qi(1) };
    // a_j = g_{offset + step j} / (f u_n)
    let jmax = (last - offset) / step;
    let a: Vec<Q> = (0..=jmax)
        .map(|j| {
            let nn = offset + step * j;
            &g.coeffs[nn] / (&f * &u[nn])
        })
        .collect();
    let m = 16usize.min(jmax / 2);
    let r1 = to_f64(&richardson(&a, jmax - m, m));
    let r2 = to_f64(&richardson(&a, jmax - m + 4, m - 4));
    let norm = if g.inv_sqrt_pi { 1.0 / std::f64::consts::PI.sqrt() } else { 1.0 };
    let s = g.scale * (r1 * norm);
    let err = (r1 - r2).abs() * norm * g.scale.norm() + 1e-15 * s.norm();
    if !s.re.is_finite() || !s.im.is_finite() || err > 1e-2 * s.norm().max(1e-300) {
        return Err(Error::NoConvergence(format!("extrapolation unstable: {r1} vs {r2}")));
    }
    Ok(SEstimate { s, err, radius })
}

/// Contour around [1, ∞): T+iδ → (1-ρ)+iδ → (1-ρ)-iδ → T-iδ.
struct Contour {
    nodes: Vec<Complex64>,
    weights: Vec<Complex64>,
    coarse: Vec<Complex64>,
    coarse_weights: Vec<Complex64>,
}

/// ρ, δ and the first panel width shrink like 1/x_max so that e^{-px} varies by O(1) per panel.
fn contour(t_end: f64, x_max: f64) -> Contour {
    let rho = (4.0 / x_max).min(0.5);
    let delta = rho;
    let left = 1.0 - rho;
    let mut nodes = Vec::new();
    let mut weights = Vec::new();
    let mut coarse = Vec::new();
    let mut coarse_weights = Vec::new();
    let (x20, w20) = gauss_legendre(20);
    let (x10, w10) = gauss_legendre(10);
    let mut push = |a: Complex64, b: Complex64| {
        let h = (b - a) * 0.5;
        let c = (a + b) * 0.5;
        for (xi, wi) in x20.iter().zip(&w20) {
            nodes.push(c + h * *xi);
            weights.push(h * *wi);
        }
        for (xi, wi) in x10.iter().zip(&w10) {
            coarse.push(c + h * *xi);
            coarse_weights.push(h * *wi);
        }
    };
    // Geometrically growing panels.
    let mut width = (1.0 / x_max).min(0.5);
    let mut cuts = vec![left];
    while *cuts.last().unwrap() < t_end {
        let v = *cuts.last().unwrap() + width;
        cuts.push(v);
        width = (width * 1.5).min(1.0);
    }
    for w in cuts.windows(2).rev() {
        push(Complex64::new(w[1], delta), Complex64::new(w[0], delta));
    }
    push(Complex64::new(left, delta), Complex64::new(left, 0.0));
    push(Complex64::new(left, 0.0), Complex64::new(left, -delta));
    for w in cuts.windows(2) {
        push(Complex64::new(w[0], -delta), Complex64::new(w[1], -delta));
    }
    Contour { nodes, weights, coarse, coarse_weights }
}

/// Values of the germ at contour points (continued off the real axis).
fn germ_values(g: &BorelGerm, pts: &[Complex64]) -> Result<Vec<Complex64>> {
    match &g.source {
        GermSource::P1Level(0) => {
            let b = P1Borel::shared();
            let ray = b.ray;
            pts.par_iter()
                .map(|p| {
                    if p.im < 0.0 {
                        // Real Taylor data: values below the axis are conjugates.
                        return Ok(None);
                    }
                    let opts = RayOptions { t_max: p.norm() + 0.05, ..ray };
                    let t = RayTable::build(&b.ts, &b.h0, p.arg(), 0, opts)?;
                    Ok(Some(t.eval(0, p.norm()) * g.scale))
                })
                .collect::<Result<Vec<Option<Complex64>>>>()
                .map(|v| {
                    v.iter()
                        .zip(pts)
                        .map(|(val, p)| match val {
                            Some(z) => *z,
                            None => {
                                let mirror = pts.iter().position(|q| (*q - p.conj()).norm() < 1e-14);
                                match mirror.and_then(|i| v[i]) {
                                    Some(z) => (z / g.scale).conj() * g.scale,
                                    None => Complex64::new(f64::NAN, f64::NAN),
                                }
                            }
                        })
                        .collect()
                })
        }
        GermSource::P1Level(k) => Err(Error::InvalidInput(format!(
            "jump_via_hankel supports level 0 of the normalized equation, got level {k}"
        ))),
        GermSource::Closed(form) => {
            let lead = g.leading_exponent();
            Ok(pts.iter().map(|p| form.eval(*p) * if lead == 0.0 { Complex64::new(1.0, 0.0) } else { p.powf(lead) }).collect())
        }
        GermSource::Generic => {
            let c = g.complex_coeffs();
            let n = c.len() - 1;
            let r = Pade::new(&c, n / 2, n - n / 2, 1e-14);
            let lead = g.leading_exponent();
            Ok(pts.iter().map(|p| r.eval(*p) * if lead == 0.0 { Complex64::new(1.0, 0.0) } else { p.powf(lead) }).collect())
        }
    }
}

/// h⁺(x) − h⁻(x) as the loop integral around the cut [1, ∞), for each x in the grid.
pub fn jump_via_hankel_grid(g: &BorelGerm, xs: &[f64]) -> Result<Vec<(Complex64, f64)>> {
    if xs.is_empty() {
        return Ok(vec![]);
    }
    let xmin = xs.iter().cloned().fold(f64::INFINITY, f64::min);
    if xmin <= 0.0 {
        return Err(Error::InvalidInput("jump_via_hankel needs x > 0".into()));
    }
    if g.is_zero() {
        return Ok(xs.iter().map(|_| (Complex64::new(0.0, 0.0), 0.0)).collect());
    }
    let xmax = xs.iter().cloned().fold(0.0, f64::max);
    let c = contour(1.0 + 46.0 / xmin, xmax);
    let fine = germ_values(g, &c.nodes)?;
    let coarse = germ_values(g, &c.coarse)?;
    let mut out = Vec::with_capacity(xs.len());
    for &x in xs {
        let sum = |vals: &[Complex64], nodes: &[Complex64], w: &[Complex64]| -> Complex64 {
            vals.iter().zip(nodes).zip(w).map(|((v, p), w)| (-p * x).exp() * v * w).sum()
        };
        let i1 = sum(&fine, &c.nodes, &c.weights);
        let i2 = sum(&coarse, &c.coarse, &c.coarse_weights);
        let err = (i1 - i2).norm();
        if !i1.re.is_finite() || err > 1e-3 * i1.norm().max(1e-300) && err > 1e-300 {
            return Err(Error::QuadratureFailure { estimate: err });
        }
        out.push((i1, err));
    }
    Ok(out)
}

pub fn jump_via_hankel(g: &BorelGerm, x: f64) -> Result<(Complex64, f64)> {
    Ok(jump_via_hankel_grid(g, &[x])?[0])
}
