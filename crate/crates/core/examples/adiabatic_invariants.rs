//! Iterate the Poincare map through the pole sector and watch the two adiabatic invariants.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use tronquee::cycles::{run_cycles, solve_stok2_auto, CycleOptions};

fn main() -> tronquee::error::Result<()> {
    let x0 = Complex64::from_polar(50.0, -1.05 * FRAC_PI_2);
    let run = run_cycles(x0, Complex64::new(-0.1, 0.0), 25, &CycleOptions::default())?;
    for st in run.states.iter().step_by(5) {
        println!("n = {:>2}  x = {:>22.4}  s = {:>20.5}  Q = {:>20.5}  K~ = {:.5}", st.n, st.x, st.s, st.q, st.k_shifted);
    }
    println!("drift: Q {:.4}, K {:.4}", run.q_drift(), run.k_drift());
    let st = solve_stok2_auto(-5..=5)?;
    println!("pole-sector condition: N = {}, mu = {:.12}", st.n, st.mu);
    Ok(())
}
