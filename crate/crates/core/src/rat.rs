//! Exact rational helpers shared by the series and pole-sector code.

use malachite_base::num::arithmetic::traits::Pow;
use malachite_base::num::basic::traits::{One, Zero};
use malachite_base::num::conversion::traits::RoundingFrom;
use malachite_base::rounding_modes::RoundingMode;
use malachite_nz::natural::Natural;

pub type Q = malachite_q::Rational;

pub fn q(n: i64, d: i64) -> Q {
    Q::from_signeds(n, d)
}

pub fn qi(n: i64) -> Q {
    Q::from(n)
}

pub fn zero() -> Q {
    Q::ZERO
}

pub fn one() -> Q {
    Q::ONE
}

pub fn is_zero(x: &Q) -> bool {
    *x == Q::ZERO
}

pub fn to_f64(x: &Q) -> f64 {
    f64::rounding_from(x, RoundingMode::Nearest).0
}

pub fn from_f64_exact(x: f64) -> Q {
    Q::try_from(x).unwrap_or(Q::ZERO)
}

pub fn pow(x: &Q, n: u64) -> Q {
    x.clone().pow(n)
}

/// Table of k! for k = 0..=n.
pub fn factorials(n: usize) -> Vec<Q> {
    let mut out = Vec::with_capacity(n + 1);
    let mut f = Natural::ONE;
    out.push(Q::from(&f));
    for k in 1..=n {
        f *= Natural::from(k as u64);
        out.push(Q::from(&f));
    }
    out
}

pub fn factorial(n: usize) -> Q {
    factorials(n).pop().unwrap()
}

/// Gamma(m + 1/2) / sqrt(pi) = (2m)! / (4^m m!), exact.
pub fn gamma_half_over_sqrt_pi(m: usize) -> Q {
    let f = factorials(2 * m);
    &f[2 * m] / (&f[m] * Q::from(4u64).pow(m as u64))
}

/// Render as ["num", "den"] for the JSON export format.
pub fn to_pair(x: &Q) -> [String; 2] {
    let sign = if *x < Q::ZERO { "-" } else { "" };
    [format!("{sign}{}", x.numerator_ref()), x.denominator_ref().to_string()]
}

pub fn parse_pair(p: &[String; 2]) -> Option<Q> {
    let n: malachite_nz::integer::Integer = p[0].parse().ok()?;
    let d: malachite_nz::integer::Integer = p[1].parse().ok()?;
    if d == 0 {
        return None;
    }
    Some(Q::from_integers(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gamma_half() {
        assert_eq!(gamma_half_over_sqrt_pi(0), qi(1));
        assert_eq!(gamma_half_over_sqrt_pi(1), q(1, 2));
        assert_eq!(gamma_half_over_sqrt_pi(3), q(15, 8));
    }

    #[test]
    fn pair_roundtrip() {
        let x = q(-392, 625);
        assert_eq!(to_pair(&x), ["-392".to_string(), "625".to_string()]);
        assert_eq!(parse_pair(&to_pair(&x)).unwrap(), x);
        assert!((to_f64(&x) + 0.6272).abs() < 1e-16);
    }
}
