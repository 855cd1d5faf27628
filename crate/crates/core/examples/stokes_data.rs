//! Constants beyond all orders of the tritronquee, the Stokes multiplier and the second Stokes line.

use tronquee::connection::{tritronquee_connection, verify_second_stokes_lateral};

fn main() -> tronquee::error::Result<()> {
    let grid: Vec<f64> = (8..=20).map(f64::from).collect();
    let d = tritronquee_connection(&grid)?;
    println!("C+ = {:.3e}   (error {:.1e})", d.c_plus, d.errors.c_plus);
    println!("C- = {:.8}   (error {:.1e})", d.c_minus, d.errors.c_minus);
    println!("on the Stokes line {:.8}", d.c_average);
    println!("mu fitted {:.8}, closed form {:.8}", d.mu_measured, d.mu_closed_form);
    let s = verify_second_stokes_lateral(&grid)?;
    println!("second Stokes line: fitted {:.8}, expected {:.8}", s.fit.mu, s.expected);
    Ok(())
}
