//! Exact coefficients of the power series solution and of the first transseries levels.

use tronquee::series::{h0_series, transseries_level};

fn main() -> tronquee::error::Result<()> {
    let h0 = h0_series(16)?;
    println!("power series h0 = sum c_k x^-k:");
    for m in (4..=16).step_by(2) {
        println!("  c_{m:<2} = {}", h0.coeff_of_power(m));
    }
    for k in 1..=3 {
        let t = transseries_level(k, 4)?;
        let shown: Vec<String> = t.coeffs.iter().map(|c| c.to_string()).collect();
        println!("level {k} leading coefficients: {}, ...", shown.join(", "));
    }
    Ok(())
}
