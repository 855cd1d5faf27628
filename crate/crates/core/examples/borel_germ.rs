//! Borel germ of the power series, its singularity constant and the Stokes multiplier it implies.

use std::f64::consts::PI;

use num_complex::Complex64;
use tronquee::borel::germ::{h0_germ_from_series, solve_h0_convolution};
use tronquee::borel::stokes::estimate_s;
use tronquee::connection::mu_closed_form;

fn main() -> tronquee::error::Result<()> {
    let g = solve_h0_convolution(200)?;
    let direct = h0_germ_from_series(200)?;
    println!("convolution equation and transformed series agree through order 200: {}", g.coeffs == direct.coeffs);
    println!("first coefficients: {} p^3, {} p^5", g.coeffs[3], g.coeffs[5]);
    let s = estimate_s(&g)?;
    let mu = -Complex64::new(0.0, 2.0) * PI.sqrt() * s.s;
    println!("S = {:.12} (imaginary part {:.1e}, error {:.1e})", s.s.re, s.s.im, s.err);
    println!("mu from S = {mu:.12}, closed form {:.12}", mu_closed_form());
    Ok(())
}
