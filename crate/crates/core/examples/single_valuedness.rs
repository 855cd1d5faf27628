//! Continue the tritronquee around |x| = 20 both ways and compare on the negative axis.

use tronquee::ode::{continue_around, IntegrateOptions};

fn main() -> tronquee::error::Result<()> {
    let c = continue_around(20.0, &IntegrateOptions::default())?;
    let (cw, ccw) = c.g_chart_samples();
    println!("mismatch at arg x = -pi vs pi: {:.2e}", c.residual().norm());
    println!("pole-chart samples: clockwise {cw}, counterclockwise {ccw}");
    Ok(())
}
