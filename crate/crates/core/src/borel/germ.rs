use num_complex::Complex64;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rat::{factorials, is_zero, q, qi, to_f64, to_pair, zero, Q};
use crate::series::{borel_transform, h0_coeffs, Transseries};

/// How a germ is continued past its radius of convergence.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum BranchRule {
    ContinueCounterclockwise,
    ContinueClockwise,
    Principal,
}

/// Closed forms used for calibration.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum ClosedForm {
    /// p / (1 - p)
    SimplePole,
    /// s (1 - p)^{-1/2}, usual branch
    InvSqrt { s: Complex64 },
    /// s (2 - p)^{-1/2}
    InvSqrtAtTwo { s: Complex64 },
}

impl ClosedForm {
    pub fn eval(&self, p: Complex64) -> Complex64 {
        match *self {
            ClosedForm::SimplePole => p / (1.0 - p),
            ClosedForm::InvSqrt { s } => s / (1.0 - p).sqrt(),
            ClosedForm::InvSqrtAtTwo { s } => s / (2.0 - p).sqrt(),
        }
    }
}

/// What the coefficients stand for; decides how rays are continued.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum GermSource {
    /// Only Taylor data: continued by rational approximants.
    Generic,
    /// Known closed form (fixtures).
    Closed(ClosedForm),
    /// Level k of the normalized equation (k = 0 is H0); continued by the ray Volterra solver.
    P1Level(usize),
}

/// Taylor data of a Borel transform at p = 0:
/// `g(p) = scale p^{alpha-1} sum_n coeffs[n] p^n`, times pi^{-1/2} when `inv_sqrt_pi`.
#[derive(Clone, Debug)]
pub struct BorelGerm {
    pub alpha2: i64,
    pub coeffs: Vec<Q>,
    pub inv_sqrt_pi: bool,
    pub scale: Complex64,
    pub nearest_singularity: Option<Complex64>,
    pub branch_rule: BranchRule,
    pub source: GermSource,
}

impl BorelGerm {
    pub fn zero() -> Self {
        BorelGerm {
            alpha2: 2,
            coeffs: vec![zero()],
            inv_sqrt_pi: false,
            scale: Complex64::new(1.0, 0.0),
            nearest_singularity: None,
            branch_rule: BranchRule::Principal,
            source: GermSource::Generic,
        }
    }

    pub fn from_closed(form: ClosedForm, coeffs: Vec<Q>) -> Self {
        BorelGerm {
            alpha2: 2,
            coeffs,
            inv_sqrt_pi: false,
            scale: Complex64::new(1.0, 0.0),
            nearest_singularity: None,
            branch_rule: BranchRule::Principal,
            source: GermSource::Closed(form),
        }
    }

    /// Exponent of p carried by coeffs[0], i.e. alpha - 1.
    pub fn leading_exponent(&self) -> f64 {
        self.alpha2 as f64 / 2.0 - 1.0
    }

    pub fn is_zero(&self) -> bool {
        self.scale == Complex64::zero() || self.coeffs.iter().all(is_zero)
    }

    /// Real coefficient without `scale`.
    pub fn coeff_f64(&self, n: usize) -> f64 {
        let c = self.coeffs.get(n).map(to_f64).unwrap_or(0.0);
        if self.inv_sqrt_pi {
            c / std::f64::consts::PI.sqrt()
        } else {
            c
        }
    }

    pub fn float_coeffs(&self) -> Vec<f64> {
        (0..self.coeffs.len()).map(|n| self.coeff_f64(n)).collect()
    }

    /// Coefficients of the analytic factor including `scale`.
    pub fn complex_coeffs(&self) -> Vec<Complex64> {
        (0..self.coeffs.len()).map(|n| self.scale * self.coeff_f64(n)).collect()
    }

    /// Truncated Taylor sum of the analytic factor.
    pub fn eval_regular(&self, p: Complex64) -> Complex64 {
        let mut acc = Complex64::zero();
        for n in (0..self.coeffs.len()).rev() {
            acc = acc * p + self.coeff_f64(n);
        }
        acc * self.scale
    }

    /// Truncated Taylor sum including p^{alpha-1}.
    pub fn eval_series(&self, p: Complex64) -> Complex64 {
        if self.alpha2 == 2 {
            self.eval_regular(p)
        } else {
            self.eval_regular(p) * p.powf(self.leading_exponent())
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "leading_exponent": self.alpha2 - 2,
            "inv_sqrt_pi": self.inv_sqrt_pi,
            "scale": [self.scale.re, self.scale.im],
            "coeffs": self.coeffs.iter().map(to_pair).collect::<Vec<_>>(),
        })
    }
}

/// Solve (p^2 - 1) H = (196/1875) p^3 + int_0^p s H(s) ds + H*H/2 order by order.
///
/// Coefficient recursion: b_n = b_{n-2} (1 - 1/n) - 1/2 sum_{a+b=n-1} b_a b_b a! b!/n! - (196/1875) [n = 3].
pub fn solve_h0_convolution(n: usize) -> Result<BorelGerm> {
    if n < 4 {
        return Err(Error::InvalidInput(format!("need N >= 4, got {n}")));
    }
    let facts = factorials(n + 1);
    let fq: Vec<Q> = facts;
    // Work with d_n = b_n n! to keep the convolution integral-free.
    let mut d: Vec<Q> = vec![zero(); n + 1];
    let inhom = q(196, 1875);
    for m in 1..=n {
        let mut v = zero();
        if m >= 2 {
            // b_{m-2}(1 - 1/m) m! = d_{m-2} (m-1) m (m-1)/m ... kept in b form below.
            let bm2 = &d[m - 2] / &fq[m - 2];
            v += bm2 * q(m as i64 - 1, m as i64);
        }
        let mut conv = zero();
        for a in 0..m {
            let b = m - 1 - a;
            if b < a {
                break;
            }
            if is_zero(&d[a]) || is_zero(&d[b]) {
                continue;
            }
            let t = &d[a] * &d[b];
            conv += if a == b { t } else { t * qi(2) };
        }
        v -= conv / &fq[m] * q(1, 2);
        if m == 3 {
            v -= &inhom;
        }
        d[m] = v * &fq[m];
    }
    let coeffs: Vec<Q> = d.iter().zip(fq.iter()).map(|(x, f)| x / f).collect();
    Ok(BorelGerm {
        alpha2: 2,
        coeffs,
        inv_sqrt_pi: false,
        scale: Complex64::new(1.0, 0.0),
        nearest_singularity: Some(Complex64::new(1.0, 0.0)),
        branch_rule: BranchRule::Principal,
        source: GermSource::P1Level(0),
    })
}

/// Borel transform of the power series with alpha = 1 (equals `solve_h0_convolution`).
pub fn h0_germ_from_series(n: usize) -> Result<BorelGerm> {
    let c = h0_coeffs(n + 1);
    let s = crate::series::FormalSeries { lead2: -8, coeffs: c[4..].to_vec() };
    let mut g = borel_transform(&s, 2)?;
    g.coeffs.truncate(n + 1);
    g.nearest_singularity = Some(Complex64::new(1.0, 0.0));
    g.source = GermSource::P1Level(0);
    Ok(g)
}

/// Germ of H_k = B(x^{-k/2} t_k), leading exponent k/2 - 1.
pub fn germ_hk(k: usize, n: usize) -> Result<BorelGerm> {
    if k == 0 {
        return Err(Error::InvalidInput("germ_hk needs k >= 1".into()));
    }
    let ts = Transseries::new(k, n)?;
    germ_hk_from(&ts, k)
}

pub fn germ_hk_from(ts: &Transseries, k: usize) -> Result<BorelGerm> {
    if k == 0 || k > ts.max_level() {
        return Err(Error::InvalidInput(format!("level {k} not available")));
    }
    let s = crate::series::FormalSeries { lead2: -(k as i64), coeffs: ts.level(k).to_vec() };
    let mut g = borel_transform(&s, k as i64)?;
    g.source = GermSource::P1Level(k);
    g.nearest_singularity = Some(Complex64::new(1.0, 0.0));
    Ok(g)
}

/// Taylor coefficients (in p) of T_k = B(x^{-k} t_k) = sum a_{k,n} p^{n+k-1}/(n+k-1)!, as f64.
pub fn tk_taylor(ts: &Transseries, k: usize) -> Vec<f64> {
    let a = ts.level(k);
    let facts = factorials(a.len() + k);
    let mut out = vec![0.0; a.len() + k - 1];
    for (n, an) in a.iter().enumerate() {
        let m = n + k - 1;
        out[m] = to_f64(&(an / facts[m].clone()));
    }
    out
}

/// s (1 - p)^{-1/2} to n + 1 coefficients.
pub fn model_inv_sqrt(s: Complex64, n: usize) -> BorelGerm {
    let mut c = Vec::with_capacity(n + 1);
    let mut u = qi(1);
    for k in 0..=n {
        c.push(u.clone());
        u *= q(2 * k as i64 + 1, 2 * k as i64 + 2);
    }
    let mut g = BorelGerm::from_closed(ClosedForm::InvSqrt { s }, c);
    g.scale = s;
    g.nearest_singularity = Some(Complex64::new(1.0, 0.0));
    g
}

/// s (2 - p)^{-1/2} to n + 1 coefficients.
pub fn model_inv_sqrt_at_two(s: Complex64, n: usize) -> BorelGerm {
    let mut c = Vec::with_capacity(n + 1);
    let mut u = qi(1);
    for k in 0..=n {
        c.push(u.clone());
        u *= q(2 * k as i64 + 1, 4 * k as i64 + 4);
    }
    let mut g = BorelGerm::from_closed(ClosedForm::InvSqrtAtTwo { s }, c);
    g.scale = s / std::f64::consts::SQRT_2;
    g.nearest_singularity = Some(Complex64::new(2.0, 0.0));
    g
}
