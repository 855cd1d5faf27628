//! Integrate the tritronquee inward from a Borel seed and compare with the Borel sum.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use tronquee::borel::sum::sum_transseries;
use tronquee::ode::{detect_poles, integrate_path, tritronquee_seed, IntegrateOptions, Path};

fn main() -> tronquee::error::Result<()> {
    let (from, to) = (Complex64::from_polar(30.0, FRAC_PI_4), Complex64::from_polar(10.0, FRAC_PI_4));
    let seed = tritronquee_seed(from)?;
    let trace = integrate_path(seed.h, seed.hp, &Path::new().line(from, to), &IntegrateOptions::default())?;
    let borel = sum_transseries(Complex64::new(0.0, 0.0), -FRAC_PI_4, to, 8)?.value;
    println!("steps: {}", trace.steps.len());
    println!("h(10 e^(i pi/4)) ODE   = {:.15}", trace.last().h);
    println!("h(10 e^(i pi/4)) Borel = {borel:.15}");
    println!("difference {:.2e}, poles met: {}", (trace.last().h - borel).norm(), detect_poles(&trace)?.len());
    Ok(())
}
