//! Borel summed transseries L_φH0(x) + Σ_k C^k e^{-kx} L_φH_k(x).

use num_complex::Complex64;
use serde::Serialize;

use crate::borel::laplace::P1Borel;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, Serialize)]
pub struct SumValue {
    pub value: Complex64,
    pub err: f64,
    pub levels: usize,
}

const TERM_TOL: f64 = 1e-17;

fn levels(b: &P1Borel, c: Complex64, phi: f64, x: Complex64, kmax: usize, base: Complex64, base_err: f64) -> Result<SumValue> {
    let mut sum = base;
    let mut err = base_err;
    if c == Complex64::new(0.0, 0.0) {
        return Ok(SumValue { value: sum, err, levels: 0 });
    }
    let kmax = kmax.min(b.kmax);
    let e = c * (-x).exp();
    let mut ek = Complex64::new(1.0, 0.0);
    for k in 1..=kmax {
        ek *= e;
        let (v, ve) = b.laplace_level(k, phi, x)?;
        let term = ek * v;
        sum += term;
        err += ve * ek.norm();
        if term.norm() <= TERM_TOL * sum.norm().max(1e-300) || term.norm() < 1e-300 {
            return Ok(SumValue { value: sum, err: err + term.norm(), levels: k });
        }
    }
    Err(Error::NonConvergent { level: kmax })
}

/// Borel summed transseries with constant C along direction φ, using at most `kmax` levels.
pub fn sum_transseries(c: Complex64, phi: f64, x: Complex64, kmax: usize) -> Result<SumValue> {
    sum_transseries_with(P1Borel::shared(), c, phi, x, kmax)
}

pub fn sum_transseries_with(b: &P1Borel, c: Complex64, phi: f64, x: Complex64, kmax: usize) -> Result<SumValue> {
    let (h0, e0) = b.laplace_h0(phi, x)?;
    levels(b, c, phi, x, kmax, h0, e0)
}

/// The same sum minus the power series truncated after x^{-n}, computed without cancellation.
pub fn sum_transseries_remainder(c: Complex64, phi: f64, x: Complex64, kmax: usize, n: usize) -> Result<SumValue> {
    let b = P1Borel::shared();
    // L(b_j p^j) = c_{j+1} x^{-j-1}, so dropping p^j for j < n removes c_1..c_n.
    let (r, e) = b.laplace_h0_remainder(phi, x, n)?;
    levels(b, c, phi, x, kmax, r, e)
}

/// d/dx of the sum, from the transforms of −p H_k.
pub fn sum_transseries_derivative(c: Complex64, phi: f64, x: Complex64, kmax: usize) -> Result<SumValue> {
    let b = P1Borel::shared();
    let (d0, e0) = b.laplace_level_derivative(0, phi, x)?;
    let mut sum = d0;
    let mut err = e0;
    if c == Complex64::new(0.0, 0.0) {
        return Ok(SumValue { value: sum, err, levels: 0 });
    }
    let kmax = kmax.min(b.kmax);
    let e = c * (-x).exp();
    let mut ek = Complex64::new(1.0, 0.0);
    for k in 1..=kmax {
        ek *= e;
        let (v, ve) = b.laplace_level(k, phi, x)?;
        let (d, de) = b.laplace_level_derivative(k, phi, x)?;
        let term = ek * (d - k as f64 * v);
        sum += term;
        err += ek.norm() * (de + k as f64 * ve);
        if term.norm() <= TERM_TOL * sum.norm().max(1e-300) || term.norm() < 1e-300 {
            return Ok(SumValue { value: sum, err: err + term.norm(), levels: k });
        }
    }
    Err(Error::NonConvergent { level: kmax })
}
