//! Poles of the first array for C = 1: detected positions against the asymptotic prediction.

use num_complex::Complex64;
use tronquee::ode::IntegrateOptions;
use tronquee::pole_sector::compare_poles;

fn main() -> tronquee::error::Result<()> {
    let cmp = compare_poles(Complex64::new(1.0, 0.0), 5..=12, &IntegrateOptions::default())?;
    println!("{:>3} {:>30} {:>10} {:>12}", "n", "detected pole", "gap", "next/gap");
    for r in &cmp.rows {
        println!("{:>3} {:>30.10} {:>10.2e} {:>12.3}", r.n, r.detected, r.gap, r.next_term_ratio);
    }
    println!("log-log slope of the gap: {:.2}; with the next order included: {:.2}", cmp.slope, cmp.slope_with_next);
    Ok(())
}
