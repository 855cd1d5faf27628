//! Two-scale expansion near the first pole array: the F and G tables and their accuracy.

use num_complex::Complex64;
use tronquee::ode::IntegrateOptions;
use tronquee::pole_sector::two_scale::tables;
use tronquee::pole_sector::two_scale_uniformity;

fn main() -> tronquee::error::Result<()> {
    let (f, g) = tables();
    for n in 0..3 {
        println!("F{n} = {}", f[n]);
        println!("G{n} = {}", g[n]);
    }
    let one = Complex64::new(1.0, 0.0);
    for m in [0, 1, 2] {
        let u = two_scale_uniformity(one, one, m, 25.0, 80.0, &IntegrateOptions::default())?;
        println!("order {m}: error decays like |x|^{:.2} along xi = 1", u.slope);
    }
    Ok(())
}
