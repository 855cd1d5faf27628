//! Robust rational approximants from Taylor data (SVD based, with degree
//! reduction when the Toeplitz block is rank deficient).

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_traits::Zero;

#[derive(Clone, Debug)]
pub struct Pade {
    pub num: Vec<Complex64>,
    pub den: Vec<Complex64>,
}

impl Pade {
    /// Type [m/n] approximant of sum c_k p^k; `tol` is relative to the coefficient norm.
    pub fn new(c: &[Complex64], m: usize, n: usize, tol: f64) -> Self {
        let mut c: Vec<Complex64> = c.iter().take(m + n + 1).copied().collect();
        c.resize(m + n + 1, Complex64::zero());
        let norm = c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Pade { num: vec![Complex64::zero()], den: vec![Complex64::new(1.0, 0.0)] };
        }
        let (mut m, mut n) = (m, n);
        let at = |c: &[Complex64], k: isize| if k < 0 { Complex64::zero() } else { c[k as usize] };
        let mut b = vec![Complex64::new(1.0, 0.0)];
        while n > 0 {
            // Rows m+1..m+n, columns 0..n: Z[i][j] = c[m+1+i-j].
            let z = DMatrix::from_fn(n, n + 1, |i, j| at(&c, (m + 1 + i) as isize - j as isize));
            let svd = z.clone().svd(false, true);
            let rank = svd.singular_values.iter().filter(|s| **s > tol * norm).count();
            if rank < n {
                m -= n - rank;
                n = rank;
                continue;
            }
            // Null vector: last row of V^T, padded to a square problem.
            let zz = DMatrix::from_fn(n + 1, n + 1, |i, j| {
                if i < n {
                    z[(i, j)]
                } else {
                    Complex64::zero()
                }
            });
            let svd2 = zz.svd(false, true);
            let vt = svd2.v_t.expect("v_t requested");
            let (imin, _) = svd2
                .singular_values
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (i, s)| if *s < acc.1 { (i, *s) } else { acc });
            b = (0..=n).map(|j| vt[(imin, j)].conj()).collect();
            break;
        }
        let mut num = vec![Complex64::zero(); m + 1];
        for (i, nv) in num.iter_mut().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                *nv += at(&c, i as isize - j as isize) * bj;
            }
        }
        // Normalize b(0) = 1 when possible.
        let b0 = b[0];
        if b0.norm() > 1e-14 {
            for v in num.iter_mut() {
                *v /= b0;
            }
            for v in b.iter_mut() {
                *v /= b0;
            }
        }
        Pade { num, den: b }
    }

    pub fn eval(&self, p: Complex64) -> Complex64 {
        let horner = |c: &[Complex64]| c.iter().rev().fold(Complex64::zero(), |acc, v| acc * p + v);
        horner(&self.num) / horner(&self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_rational_input() {
        // p / (1 - p)
        let c: Vec<Complex64> = (0..30).map(|k| Complex64::new(if k == 0 { 0.0 } else { 1.0 }, 0.0)).collect();
        let r = Pade::new(&c, 14, 14, 1e-13);
        let p = Complex64::new(3.0, -2.0);
        assert!((r.eval(p) - p / (1.0 - p)).norm() < 1e-10);
    }

    #[test]
    fn approximates_branch_cut_off_axis() {
        let mut c = vec![Complex64::new(1.0, 0.0)];
        for k in 1..80 {
            let prev = c[k - 1];
            c.push(prev * ((2 * k - 1) as f64 / (2 * k) as f64));
        }
        let r = Pade::new(&c, 39, 40, 1e-15);
        let p = Complex64::from_polar(2.0, -0.8);
        let exact = 1.0 / (1.0 - p).sqrt();
        assert!((r.eval(p) - exact).norm() < 1e-6, "{} {}", r.eval(p), exact);
    }
}
