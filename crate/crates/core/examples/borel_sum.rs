//! Borel sums of the transseries along a ray, for the tritronquee (C = 0) and for C = 1.

use std::f64::consts::FRAC_PI_4;

use num_complex::Complex64;
use tronquee::borel::sum::sum_transseries;

fn main() -> tronquee::error::Result<()> {
    let phi = -FRAC_PI_4;
    println!("{:>6} {:>28} {:>28}", "|x|", "C = 0", "C = 1");
    for r in [10.0, 15.0, 20.0, 30.0] {
        let x = Complex64::from_polar(r, -phi);
        let a = sum_transseries(Complex64::new(0.0, 0.0), phi, x, 8)?.value;
        let b = sum_transseries(Complex64::new(1.0, 0.0), phi, x, 8)?.value;
        println!("{r:>6} {a:>28.3e} {b:>28.3e}");
    }
    Ok(())
}
