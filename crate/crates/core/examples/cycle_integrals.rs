//! Cycle integrals J and L, their differential equations and the constant Wronskian.

use num_complex::Complex64;
use tronquee::cycles::{cycle_j, cycle_l, cycle_residuals, solve_j_ode};

fn main() -> tronquee::error::Result<()> {
    for s in [-1.0, -0.5, -0.1] {
        let s = Complex64::new(s, 0.05);
        let r = cycle_residuals(s)?;
        println!(
            "s = {s:.2}: J = {:.8}, L = {:.8}, residuals {:.1e} {:.1e} {:.1e}",
            cycle_j(s)?.value,
            cycle_l(s)?.value,
            r.j_equation,
            r.l_equation,
            r.l_vs_dj
        );
    }
    let pts: Vec<Complex64> = (0..12).map(|i| Complex64::new(-1.2 + 0.1 * i as f64, 0.05)).collect();
    let t = solve_j_ode(&pts)?;
    println!("Wronskian {:.12}, variation {:.1e}", t.kappa0(), t.wronskian_variation());
    Ok(())
}
