//! Quadrature: adaptive Gauss–Kronrod (7/15) for complex integrands, fixed
//! Gauss–Legendre rules, and polynomial extrapolation helpers.
#![allow(clippy::excessive_precision)]

use num_complex::Complex64;
use num_traits::Zero;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// One G7K15 panel: (Kronrod estimate, |K - G|).
pub fn gk15<F: FnMut(f64) -> Complex64>(f: &mut F, a: f64, b: f64) -> (Complex64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = f(c - dx);
        let f2 = f(c + dx);
        rk += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            rg += (f1 + f2) * WG[j / 2];
        }
    }
    (rk * h, ((rk - rg) * h).norm())
}

/// Adaptive bisection on [a, b] until the summed error is below max(abs_tol, rel_tol |I|).
pub fn integrate<F: FnMut(f64) -> Complex64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(Complex64, f64)> {
    integrate_panels(&mut f, &[a, b], abs_tol, rel_tol)
}

/// Adaptive integration starting from a given panel partition.
pub fn integrate_panels<F: FnMut(f64) -> Complex64>(
    f: &mut F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> Result<(Complex64, f64)> {
    let mut panels: Vec<(f64, f64, Complex64, f64)> = breaks
        .windows(2)
        .map(|w| {
            let (v, e) = gk15(f, w[0], w[1]);
            (w[0], w[1], v, e)
        })
        .collect();
    for _ in 0..2000 {
        let total: Complex64 = panels.iter().map(|p| p.2).sum();
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= abs_tol.max(rel_tol * total.norm()) {
            return Ok((total, err));
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .fold((0, -1.0), |acc, (i, p)| if p.3 > acc.1 { (i, p.3) } else { acc });
        let (a, b, _, _) = panels[idx];
        let m = 0.5 * (a + b);
        if (b - a).abs() < 1e-13 * (1.0 + a.abs()) {
            break;
        }
        let (v1, e1) = gk15(f, a, m);
        let (v2, e2) = gk15(f, m, b);
        panels[idx] = (a, m, v1, e1);
        panels.push((m, b, v2, e2));
    }
    let total: Complex64 = panels.iter().map(|p| p.2).sum();
    let err: f64 = panels.iter().map(|p| p.3).sum();
    if err <= 1e3 * abs_tol.max(rel_tol * total.norm()) {
        Ok((total, err))
    } else {
        Err(Error::QuadratureFailure { estimate: err })
    }
}

/// Gauss–Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut pp = 0.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                p1 = ((2 * j + 1) as f64 * z * p2 - j as f64 * p3) / (j + 1) as f64;
            }
            pp = n as f64 * (z * p1 - p2) / (z * z - 1.0);
            let dz = p1 / pp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Value at h = 0 of the interpolating polynomial through (h_i, v_i) (Neville).
pub fn extrapolate_to_zero(h: &[f64], v: &[Complex64]) -> Complex64 {
    let n = h.len();
    let mut p = v.to_vec();
    for m in 1..n {
        for i in 0..n - m {
            p[i] = (p[i] * h[i + m] - p[i + 1] * h[i]) / (h[i + m] - h[i]);
        }
    }
    if n == 0 {
        Complex64::zero()
    } else {
        p[0]
    }
}

/// Lagrange interpolation on an equispaced stencil starting at index `start`.
pub fn lagrange_equispaced(vals: &[Complex64], start: usize, npts: usize, s: f64) -> Complex64 {
    // s is the position in grid units relative to `start`.
    let mut acc = Complex64::zero();
    for j in 0..npts {
        let mut l = 1.0;
        for m in 0..npts {
            if m != j {
                l *= (s - m as f64) / (j as f64 - m as f64);
            }
        }
        acc += vals[start + j] * l;
    }
    acc
}
