//! Exact formal series of the normalized equation
//!
//! ```text
//! h'' + h'/x - h - h^2/2 - (392/625) x^-4 = 0
//! ```
//!
//! The power series solution `h0 = sum c_k x^-k` and the exponential levels
//! `h_k = x^{-k/2} e^{-kx} t_k(x)` are generated with exact rationals.
//! Exponents are stored in half units so that `x^{-k/2}` needs no special case.

use num_traits::Zero;
use serde::Serialize;

use crate::borel::germ::{BorelGerm, BranchRule, GermSource};
use crate::error::{Error, Result};
use crate::rat::{factorials, gamma_half_over_sqrt_pi, is_zero, one, q, qi, to_f64, to_pair, zero, Q};
use num_complex::Complex64;

/// Coefficient of x^-4 in the normalized equation, with its sign as it
/// appears on the right of `h'' = h + h^2/2 + A/x^4 - h'/x`.
pub fn forcing() -> Q {
    q(392, 625)
}

/// Ratio between the leading coefficient of level 1 in the h normalization and
/// the one of the first component of the diagonal system: h = (1 - 1/(4x)) y1 / 2 + ...
pub const H_PER_Y_LEVEL1: f64 = 0.5;

/// Truncated series `x^{lead2/2} * sum_j coeffs[j] x^{-j}`.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalSeries {
    /// Twice the exponent of x carried by `coeffs[0]`.
    pub lead2: i64,
    pub coeffs: Vec<Q>,
}

impl FormalSeries {
    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of x^{-m} (m in whole units), zero when outside the stored range.
    pub fn coeff_of_power(&self, m: i64) -> Q {
        if self.lead2 % 2 != 0 {
            return zero();
        }
        let j = m + self.lead2 / 2;
        if j < 0 || j as usize >= self.coeffs.len() {
            zero()
        } else {
            self.coeffs[j as usize].clone()
        }
    }

    /// Evaluate the first `terms` coefficients at complex x (principal power).
    pub fn eval(&self, x: Complex64, terms: usize) -> Complex64 {
        let inv = 1.0 / x;
        let mut acc = Complex64::zero();
        for c in self.coeffs.iter().take(terms).rev() {
            acc = acc * inv + to_f64(c);
        }
        acc * x.powf(self.lead2 as f64 / 2.0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        #[derive(Serialize)]
        struct Out {
            leading_exponent: i64,
            coeffs: Vec<[String; 2]>,
        }
        serde_json::to_value(Out {
            leading_exponent: self.lead2,
            coeffs: self.coeffs.iter().map(to_pair).collect(),
        })
        .expect("series serializes")
    }
}

/// Coefficients c_0..=c_n of the power series solution (c_0..c_3 vanish).
pub fn h0_coeffs(n: usize) -> Vec<Q> {
    let mut c = vec![zero(); n + 1];
    for m in 4..=n {
        let mut v = qi(((m - 2) * (m - 2)) as i64) * &c[m - 2];
        let mut quad = zero();
        for i in 4..=m.saturating_sub(4) {
            let j = m - i;
            if j < 4 || j < i {
                continue;
            }
            if is_zero(&c[i]) || is_zero(&c[j]) {
                continue;
            }
            let prod = &c[i] * &c[j];
            if i == j {
                quad += prod;
            } else {
                quad += prod * qi(2);
            }
        }
        v -= quad * q(1, 2);
        if m == 4 {
            v -= forcing();
        }
        c[m] = v;
    }
    c
}

/// The power series solution truncated at x^-n.
pub fn h0_series(n: usize) -> Result<FormalSeries> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("h0_series needs N >= 4, got {n}")));
    }
    let c = h0_coeffs(n);
    Ok(FormalSeries { lead2: -8, coeffs: c[4..].to_vec() })
}

/// All exponential levels t_1..t_K to order N, sharing one h0 table.
#[derive(Clone, Debug)]
pub struct Transseries {
    pub h0: Vec<Q>,
    /// `levels[k-1][n]` is a_{k,n}, the coefficient of x^-n in t_k.
    pub levels: Vec<Vec<Q>>,
    /// +1 for e^{-kx} levels (the only rate used by this crate).
    pub rate: i8,
}

impl Transseries {
    pub fn new(kmax: usize, n: usize) -> Result<Self> {
        let h0 = h0_coeffs(n + 1);
        let mut levels: Vec<Vec<Q>> = Vec::with_capacity(kmax);
        for k in 1..=kmax {
            let a = solve_level(k, n, &h0, &levels)?;
            levels.push(a);
        }
        Ok(Transseries { h0, levels, rate: 1 })
    }

    pub fn level(&self, k: usize) -> &[Q] {
        &self.levels[k - 1]
    }

    pub fn max_level(&self) -> usize {
        self.levels.len()
    }
}

fn solve_level(k: usize, n: usize, c: &[Q], lower: &[Vec<Q>]) -> Result<Vec<Q>> {
    let mut a = vec![zero(); n + 1];
    let kk = k as i64;
    if k == 1 {
        a[0] = one();
        for m in 1..=n {
            // Order m+1 of the level-1 equation fixes a_m.
            let mut s = zero();
            for i in 4..=m + 1 {
                if !is_zero(&c[i]) {
                    s += &c[i] * &a[m + 1 - i];
                }
            }
            let half = q(2 * m as i64 - 1, 2);
            s -= &half * &half * &a[m - 1];
            a[m] = s / qi(2 * m as i64);
        }
        return Ok(a);
    }
    let diag = qi(kk * kk - 1);
    for m in 0..=n {
        let mut s = zero();
        if m >= 1 {
            s -= qi(kk * (kk + 2 * m as i64 - 3)) * &a[m - 1];
        }
        if m >= 2 {
            let b = q(kk + 2 * m as i64 - 4, 2);
            s -= &b * &b * &a[m - 2];
        }
        for i in 4..=m {
            if !is_zero(&c[i]) {
                s += &c[i] * &a[m - i];
            }
        }
        let mut quad = zero();
        for i in 1..k {
            let j = k - i;
            let (li, lj) = (&lower[i - 1], &lower[j - 1]);
            for p in 0..=m {
                let (x, y) = (&li[p], &lj[m - p]);
                if !is_zero(x) && !is_zero(y) {
                    quad += x * y;
                }
            }
        }
        s += quad * q(1, 2);
        if is_zero(&diag) {
            return Err(Error::SingularRecurrence { level: k, order: m });
        }
        a[m] = s / &diag;
    }
    Ok(a)
}

/// Level k series t_k to order n (t_1 normalized to leading coefficient 1).
pub fn transseries_level(k: usize, n: usize) -> Result<FormalSeries> {
    if k == 0 {
        return Err(Error::InvalidInput("level must be positive".into()));
    }
    let ts = Transseries::new(k, n)?;
    Ok(FormalSeries { lead2: 0, coeffs: ts.levels[k - 1].clone() })
}

/// Borel transform on the lattice x^{-(n + alpha)}: c_n -> c_n p^{n+alpha-1} / Gamma(n+alpha).
///
/// `alpha2` is 2*alpha. Every exponent of `s` must be of the form n + alpha with n >= 0.
pub fn borel_transform(s: &FormalSeries, alpha2: i64) -> Result<BorelGerm> {
    if alpha2 <= 0 {
        return Err(Error::InvalidInput(format!("alpha must be positive, got {}/2", alpha2)));
    }
    // s = x^{lead2/2} sum_j c_j x^{-j}; exponent of x^{-1} for term j is j - lead2/2.
    // Need j - lead2/2 = n + alpha, i.e. n = j - (lead2 + alpha2)/2.
    let off2 = -(s.lead2) - alpha2;
    if off2 % 2 != 0 {
        return Err(Error::InvalidInput("series exponents are off the alpha lattice".into()));
    }
    let off = off2 / 2;
    let mut coeffs: Vec<Q> = Vec::new();
    // Leading zeros of s are allowed before the lattice starts.
    for (j, c) in s.coeffs.iter().enumerate() {
        let n = j as i64 + off;
        if n < 0 {
            if !is_zero(c) {
                return Err(Error::InvalidInput(
                    "series has an exponent below alpha".into(),
                ));
            }
            continue;
        }
        let n = n as usize;
        if coeffs.len() < n {
            coeffs.resize(n, zero());
        }
        coeffs.push(c.clone());
    }
    let inv_sqrt_pi = alpha2 % 2 != 0;
    let facts = factorials(coeffs.len() + (alpha2 as usize) / 2 + 1);
    for (n, c) in coeffs.iter_mut().enumerate() {
        if is_zero(c) {
            continue;
        }
        let g = if alpha2 % 2 == 0 {
            facts[n + alpha2 as usize / 2 - 1].clone()
        } else {
            gamma_half_over_sqrt_pi(n + (alpha2 as usize - 1) / 2)
        };
        *c = &*c / g;
    }
    Ok(BorelGerm {
        alpha2,
        coeffs,
        inv_sqrt_pi,
        scale: Complex64::new(1.0, 0.0),
        nearest_singularity: None,
        branch_rule: BranchRule::Principal,
        source: GermSource::Generic,
    })
}

/// Pointwise residual of the ODE for a truncated h0 at complex x (floating check).
pub fn h0_residual(series: &FormalSeries, x: Complex64) -> Complex64 {
    // Differentiate termwise: h = sum c_j x^{e_j}.
    let mut h = Complex64::zero();
    let mut hp = Complex64::zero();
    let mut hpp = Complex64::zero();
    for (j, c) in series.coeffs.iter().enumerate() {
        let e = series.lead2 as f64 / 2.0 - j as f64;
        let cf = to_f64(c);
        let xe = x.powf(e);
        h += cf * xe;
        hp += cf * e * xe / x;
        hpp += cf * e * (e - 1.0) * xe / (x * x);
    }
    hpp + hp / x - h - h * h / 2.0 - to_f64(&forcing()) / x.powi(4)
}
