//! Pole positions of the first array from the implicit equation g = 3.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

type C = Complex64;

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PolePrediction {
    pub n: i64,
    pub l: C,
    pub x: C,
    /// Partial sums through orders n^0, n^-1, n^-2, n^-3.
    pub partial: [C; 4],
    /// First omitted term, order n^-4. Diagnostic only; not included in `x`.
    pub next_term: C,
}

/// L = ln(C / (12 (2nπi)^{1/2})), principal branch with arg(2nπi) = π/2.
pub fn pole_log(n: i64, c: C) -> C {
    let w = C::from_polar((2.0 * PI * n as f64).sqrt(), PI / 4.0);
    (c / (12.0 * w)).ln()
}

/// x_n through order n^-3, with coefficients derived from G_0..G_3.
pub fn predict_pole(n: i64, c: C) -> Result<PolePrediction> {
    if n < 1 {
        return Err(Error::InvalidInput(format!("pole index must be positive, got {n}")));
    }
    if c.norm() == 0.0 {
        return Err(Error::InvalidInput("C = 0 has no first pole array".into()));
    }
    let l = pole_log(n, c);
    let y = 1.0 / C::new(0.0, 2.0 * PI * n as f64);
    let t0 = C::new(0.0, 2.0 * PI * n as f64) + l;
    let t1 = -(109.0 / 120.0 + 0.5 * l) * y;
    let t2 = (4699.0 / 2400.0 + 139.0 / 120.0 * l + 0.25 * l * l) * y * y;
    let t3 = -(41402111.0 / 6480000.0 + 899.0 / 200.0 * l + 77.0 / 60.0 * l * l + l * l * l / 6.0) * y * y * y;
    let t4 = (l.powi(4) / 8.0 + 41.0 / 30.0 * l.powi(3) + 8861.0 / 1200.0 * l * l + 46256711.0 / 2160000.0 * l
        + 1403316473.0 / 51840000.0)
        * y.powi(4);
    let partial = [t0, t0 + t1, t0 + t1 + t2, t0 + t1 + t2 + t3];
    Ok(PolePrediction { n, l, x: partial[3], partial, next_term: t4 })
}
