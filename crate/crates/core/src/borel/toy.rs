//! Calibration fixtures from the scalar model y' + y = x^-2 (+ y^4).

use num_complex::Complex64;

use crate::borel::germ::{BorelGerm, ClosedForm, GermSource};
use crate::rat::{factorials, is_zero, qi, zero, Q};

pub struct ToyFixtures {
    /// Y = p / (1 - p), Borel transform of sum (n-1)! x^-n.
    pub linear: BorelGerm,
    /// Solution of (1 - p) Y = p + Y∗Y∗Y∗Y analytic at 0.
    pub nonlinear: BorelGerm,
}

pub fn toy_fixtures() -> ToyFixtures {
    toy_fixtures_n(80)
}

pub fn toy_fixtures_n(n: usize) -> ToyFixtures {
    let mut lin = vec![zero()];
    lin.extend((1..=n).map(|_| qi(1)));
    let mut linear = BorelGerm::from_closed(ClosedForm::SimplePole, lin);
    linear.nearest_singularity = Some(Complex64::new(1.0, 0.0));
    let mut nonlinear = BorelGerm::from_closed(ClosedForm::SimplePole, toy_nonlinear_coeffs(n));
    nonlinear.source = GermSource::Generic;
    nonlinear.nearest_singularity = Some(Complex64::new(1.0, 0.0));
    ToyFixtures { linear, nonlinear }
}

/// d-form convolution: with d_n = y_n n!, (f∗g) has d_m = Σ_{a+b=m-1} d^f_a d^g_b.
fn conv_d(f: &[Q], g: &[Q], m: usize) -> Q {
    let mut s = zero();
    for a in 0..m {
        let b = m - 1 - a;
        if b < g.len() && a < f.len() && !is_zero(&f[a]) && !is_zero(&g[b]) {
            s += &f[a] * &g[b];
        }
    }
    s
}

/// Coefficients y_0..y_n of the nonlinear toy germ.
pub fn toy_nonlinear_coeffs(n: usize) -> Vec<Q> {
    let facts = factorials(n);
    let mut y: Vec<Q> = vec![zero(); n + 1];
    let mut d: Vec<Q> = vec![zero(); n + 1];
    let mut d2: Vec<Q> = vec![zero(); n + 1];
    for m in 1..=n {
        // Y∗Y up to order m-1 uses d up to m-2.
        d2[m - 1] = conv_d(&d, &d, m - 1);
        let d4 = conv_d(&d2, &d2, m);
        let mut v = y[m - 1].clone() + &d4 / &facts[m];
        if m == 1 {
            v += qi(1);
        }
        d[m] = &v * &facts[m];
        y[m] = v;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn first_quartic_contribution_is_p7_over_5040() {
        let y = toy_nonlinear_coeffs(12);
        for (n, v) in y.iter().enumerate().take(7) {
            assert_eq!(*v, if n == 0 { zero() } else { qi(1) });
        }
        assert_eq!(y[7], qi(1) + q(1, 5040));
    }
}
