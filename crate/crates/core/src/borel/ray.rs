//! Continuation of the Borel transforms along a ray p = t·ω by marching the
//! convolution equations as Volterra equations in t.
//!
//! Level 0 (H0):
//!   (p² − 1) H = a p³ + ∫₀ᵖ s H(s) ds + ½ H∗H,  a = 196/1875
//! Level k ≥ 1 (T_k = B(x^{-k} t_k), so that L H_k = x^{k/2} L T_k):
//!   ((p+k)² − 1) T = (k+1)∫₀ᵖ sT + k(k+1)∫₀ᵖ T − (k²/4)∫₀ᵖ (p−s)T(s) ds + H0∗T + ½ Σ_{i+j=k} T_i∗T_j
//!
//! Near t = 0 the exact Taylor data is used; beyond `t_switch` the integrals are
//! discretized with endpoint-corrected trapezoid (Gregory) weights of order 8.

use num_complex::Complex64;
use num_traits::Zero;

use crate::borel::germ::tk_taylor;
use crate::error::{Error, Result};
use crate::quad::lagrange_equispaced;
use crate::rat::{q, zero, Q};
use crate::series::Transseries;

const GREGORY_ORDER: usize = 8;
const INTERP_POINTS: usize = 10;

/// Endpoint corrections γ_0..γ_{m−1} for the composite trapezoid rule.
#[derive(Clone, Debug)]
pub struct Gregory {
    pub gamma: Vec<f64>,
}

impl Gregory {
    pub fn new(m: usize) -> Self {
        // Solve sum_j (γ_j − 1) j^d = −½[d=0] + [d odd] B_{d+1}/(d+1), d < m.
        let bern = bernoulli_even(m + 2);
        let mut a: Vec<Vec<Q>> = vec![vec![zero(); m + 1]; m];
        for d in 0..m {
            for j in 0..m {
                a[d][j] = q((j as i64).pow(d as u32), 1);
            }
            let mut rhs = if d == 0 { q(-1, 2) } else { q(0, 1) };
            if d % 2 == 1 {
                rhs += &bern[d + 1] / q(d as i64 + 1, 1);
            }
            a[d][m] = rhs;
        }
        let sol = solve_exact(a);
        let gamma = sol.iter().map(|v| crate::rat::to_f64(v) + 1.0).collect();
        Gregory { gamma }
    }

    /// Weight of sample l in ∫ over [0, n] grid units (n ≥ 2m − 1).
    #[inline]
    pub fn weight(&self, l: usize, n: usize) -> f64 {
        let m = self.gamma.len();
        if l < m {
            self.gamma[l]
        } else if n - l < m {
            self.gamma[n - l]
        } else {
            1.0
        }
    }
}

fn bernoulli_even(n: usize) -> Vec<Q> {
    // B_0..B_n via the standard recurrence.
    let mut b: Vec<Q> = vec![q(0, 1); n + 1];
    b[0] = q(1, 1);
    for m in 1..=n {
        let mut s = q(0, 1);
        let mut binom = q(1, 1);
        for k in 0..m {
            s += &binom * &b[k];
            binom *= q((m + 1 - k) as i64, (k + 1) as i64);
        }
        b[m] = -s / q(m as i64 + 1, 1);
    }
    b
}

fn solve_exact(mut a: Vec<Vec<Q>>) -> Vec<Q> {
    let n = a.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| a[r][col] != q(0, 1)).expect("nonsingular");
        a.swap(col, piv);
        let p = a[col][col].clone();
        for c in col..=n {
            a[col][c] = &a[col][c] / &p;
        }
        for r in 0..n {
            if r != col && a[r][col] != q(0, 1) {
                let f = a[r][col].clone();
                for c in col..=n {
                    let v = &f * &a[col][c];
                    a[r][c] -= v;
                }
            }
        }
    }
    a.iter().map(|row| row[n].clone()).collect()
}

const REMAINDER_TAYLOR_T: f64 = 0.75;

/// Grid values of H0 and T_1..T_K along one ray.
#[derive(Clone, Debug)]
pub struct RayTable {
    pub omega: Complex64,
    pub dt: f64,
    pub n_switch: usize,
    pub levels: Vec<Vec<Complex64>>,
    /// Taylor coefficients in t for each level.
    pub taylor: Vec<Vec<Complex64>>,
}

#[derive(Clone, Copy, Debug)]
pub struct RayOptions {
    pub dt: f64,
    pub t_switch: f64,
    pub t_max: f64,
}

impl Default for RayOptions {
    fn default() -> Self {
        RayOptions { dt: 0.005, t_switch: 0.3, t_max: 4.0 }
    }
}

impl RayTable {
    /// March levels 0..=kmax along the ray of angle `phi`.
    pub fn build(ts: &Transseries, h0: &[f64], phi: f64, kmax: usize, opts: RayOptions) -> Result<Self> {
        if kmax > ts.max_level() {
            return Err(Error::InvalidInput(format!("only {} levels available", ts.max_level())));
        }
        let omega = Complex64::from_polar(1.0, phi);
        let dt = opts.dt;
        let m = (opts.t_max / dt).ceil() as usize;
        let n_switch = ((opts.t_switch / dt).floor() as usize).max(2 * GREGORY_ORDER);
        let greg = Gregory::new(GREGORY_ORDER);
        let mut taylor: Vec<Vec<Complex64>> = Vec::with_capacity(kmax + 1);
        let mut wp = Complex64::new(1.0, 0.0);
        let mut t0 = Vec::with_capacity(h0.len());
        for &b in h0 {
            t0.push(wp * b);
            wp *= omega;
        }
        taylor.push(t0);
        for k in 1..=kmax {
            let c = tk_taylor(ts, k);
            let mut wp = Complex64::new(1.0, 0.0);
            let mut v = Vec::with_capacity(c.len());
            for b in c {
                v.push(wp * b);
                wp *= omega;
            }
            taylor.push(v);
        }
        let mut levels: Vec<Vec<Complex64>> = Vec::with_capacity(kmax + 1);
        for k in 0..=kmax {
            let mut u = vec![Complex64::zero(); m + 1];
            for (j, uj) in u.iter_mut().enumerate().take(n_switch.min(m) + 1) {
                *uj = horner(&taylor[k], j as f64 * dt);
            }
            if k == 0 {
                march_h0(&mut u, omega, dt, n_switch, &greg);
            } else {
                march_level(&mut u, k, &levels, omega, dt, n_switch, &greg);
            }
            levels.push(u);
        }
        Ok(RayTable { omega, dt, n_switch, levels, taylor })
    }

    pub fn t_max(&self) -> f64 {
        (self.levels[0].len() - 1) as f64 * self.dt
    }

    pub fn kmax(&self) -> usize {
        self.levels.len() - 1
    }

    /// Value of level k at p = t·ω.
    pub fn eval(&self, k: usize, t: f64) -> Complex64 {
        let ts = self.n_switch as f64 * self.dt;
        if t <= ts {
            return horner(&self.taylor[k], t);
        }
        let u = &self.levels[k];
        let n = u.len();
        let s = t / self.dt;
        let i = s.floor() as usize;
        let start = i.saturating_sub(INTERP_POINTS / 2 - 1).min(n - INTERP_POINTS);
        lagrange_equispaced(u, start, INTERP_POINTS, s - start as f64)
    }

    /// H0(tω) minus its Taylor polynomial of degree < `nt`, without cancellation near 0.
    pub fn eval_h0_remainder(&self, t: f64, nt: usize) -> Complex64 {
        let c = &self.taylor[0];
        // The tail sum is exact to rounding well inside the unit disc (0.75^220 ≈ 3e-28).
        let ts = if c.len() >= 200 { REMAINDER_TAYLOR_T } else { self.n_switch as f64 * self.dt };
        if t <= ts {
            let mut acc = Complex64::zero();
            for n in (nt..c.len()).rev() {
                acc = acc * t + c[n];
            }
            return acc * t.powi(nt as i32);
        }
        self.eval(0, t) - horner(&c[..nt.min(c.len())], t)
    }
}

pub fn horner(c: &[Complex64], t: f64) -> Complex64 {
    let mut acc = Complex64::zero();
    for &v in c.iter().rev() {
        acc = acc * t + v;
    }
    acc
}

/// Σ_{l=0}^{j} w_l a[l] b[j−l] with the Gregory weights of ∫ over [0, j].
fn conv_sum(a: &[Complex64], b: &[Complex64], j: usize, g: &Gregory) -> Complex64 {
    let mut s = Complex64::zero();
    for l in 0..=j {
        s += a[l] * b[j - l];
    }
    for (l, gl) in g.gamma.iter().enumerate() {
        let c = gl - 1.0;
        s += (a[l] * b[j - l] + a[j - l] * b[l]) * c;
    }
    s
}

/// Running weighted sums Σ w_l u_l and Σ w_l l u_l over l ≤ j, excluding the unknown u_j.
struct Moments {
    s0: Complex64,
    s1: Complex64,
}

impl Moments {
    fn new() -> Self {
        Moments { s0: Complex64::zero(), s1: Complex64::zero() }
    }

    /// Plain sums must already include indices < j; returns weighted sums without index j.
    fn weighted(&self, u: &[Complex64], j: usize, g: &Gregory) -> (Complex64, Complex64) {
        let (mut s0, mut s1) = (self.s0, self.s1);
        for (l, gl) in g.gamma.iter().enumerate() {
            let c = gl - 1.0;
            s0 += u[l] * c;
            s1 += u[l] * (c * l as f64);
            if l > 0 {
                let r = j - l;
                s0 += u[r] * c;
                s1 += u[r] * (c * r as f64);
            }
        }
        (s0, s1)
    }

    fn push(&mut self, u: Complex64, l: usize) {
        self.s0 += u;
        self.s1 += u * l as f64;
    }
}

fn march_h0(u: &mut [Complex64], w: Complex64, dt: f64, n_switch: usize, g: &Gregory) {
    let a = 196.0 / 1875.0;
    let w2 = w * w;
    let w3 = w2 * w;
    let m = u.len() - 1;
    let mut mom = Moments::new();
    for (l, ul) in u.iter().enumerate().take(n_switch + 1) {
        mom.push(*ul, l);
    }
    for j in n_switch + 1..=m {
        let t = j as f64 * dt;
        let (_, s1) = mom.weighted(u, j, g);
        // u_j enters the moment with weight γ_0 and the convolution not at all (u_0 = 0).
        let conv = conv_sum(u, u, j, g);
        let rhs = w3 * (a * t * t * t) + w2 * s1 * (dt * dt) + w * conv * (0.5 * dt);
        let lhs = w2 * (t * t) - 1.0 - w2 * (g.gamma[0] * t * dt);
        u[j] = rhs / lhs;
        mom.push(u[j], j);
    }
}

fn march_level(
    u: &mut [Complex64],
    k: usize,
    lower: &[Vec<Complex64>],
    w: Complex64,
    dt: f64,
    n_switch: usize,
    g: &Gregory,
) {
    let kf = k as f64;
    let w2 = w * w;
    let h = &lower[0];
    let m = u.len() - 1;
    let mut mom = Moments::new();
    for (l, ul) in u.iter().enumerate().take(n_switch + 1) {
        mom.push(*ul, l);
    }
    for j in n_switch + 1..=m {
        let t = j as f64 * dt;
        let (s0, s1) = mom.weighted(u, j, g);
        let a1 = s1 * dt;
        let a2 = s0;
        let a3 = s0 * t - a1;
        // H0(0) = 0, so u_j does not enter H0∗T.
        let ch = conv_sum(h, u, j, g);
        let mut cp = Complex64::zero();
        for i in 1..k {
            let ii = k - i;
            if ii < i {
                break;
            }
            let c = conv_sum(&lower[i], &lower[ii], j, g);
            cp += if ii == i { c } else { c * 2.0 };
        }
        let rhs = w2 * a1 * ((kf + 1.0) * dt) + w * a2 * (kf * (kf + 1.0) * dt)
            - w2 * a3 * (kf * kf / 4.0 * dt)
            + w * ch * dt
            + w * cp * (0.5 * dt);
        let wj = g.gamma[0];
        let p = w * t;
        let lhs = (p + kf) * (p + kf) - 1.0 - w2 * ((kf + 1.0) * wj * t * dt) - w * (kf * (kf + 1.0) * wj * dt);
        u[j] = rhs / lhs;
        mom.push(u[j], j);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::borel::germ::solve_h0_convolution;

    fn setup(kmax: usize) -> (Transseries, Vec<f64>) {
        let ts = Transseries::new(kmax, 60).unwrap();
        let h0 = solve_h0_convolution(220).unwrap().float_coeffs();
        (ts, h0)
    }

    #[test]
    fn gregory_integrates_polynomials() {
        let g = Gregory::new(GREGORY_ORDER);
        let n = 40;
        for d in 0..8 {
            let s: f64 = (0..=n).map(|l| g.weight(l, n) * (l as f64).powi(d)).sum();
            let exact = (n as f64).powi(d + 1) / (d + 1) as f64;
            assert!((s - exact).abs() < 1e-9 * exact.max(1.0), "d={d} {s} {exact}");
        }
    }

    #[test]
    fn march_matches_taylor_inside_disc() {
        let (ts, h0) = setup(4);
        let phi = std::f64::consts::FRAC_PI_4;
        let table = RayTable::build(&ts, &h0, phi, 4, RayOptions { t_max: 0.65, ..Default::default() }).unwrap();
        for k in 0..=4 {
            for &t in &[0.4, 0.5, 0.6] {
                let a = table.eval(k, t);
                // Level Taylor data has 60 terms, so stay where 0.6^60 is negligible.
                let b = horner(&table.taylor[k], t);
                let scale = b.norm().max(1e-30);
                assert!((a - b).norm() < 1e-10 * scale.max(1e-6), "k={k} t={t} {a} {b}");
            }
        }
    }
}
