//! The logarithmic obstruction in the two-scale expansion as the x^-4 coefficient varies.

use tronquee::pole_sector::integrability_witness;
use tronquee::pole_sector::two_scale::integrable_c;
use tronquee::rat::q;

fn main() -> tronquee::error::Result<()> {
    let c0 = integrable_c();
    for d in [q(0, 1), q(1, 1000), q(1, 10), q(-1, 5)] {
        let c = &c0 + &d;
        println!("coefficient {}: obstruction {}", c, integrability_witness(&c)?);
    }
    Ok(())
}
