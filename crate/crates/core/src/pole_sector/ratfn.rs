//! Exact rational functions P(ξ) / (ξ^a (ξ−12)^b (ξ+12)^c).

use std::fmt;

use num_complex::Complex64;

use crate::rat::{is_zero, qi, to_f64, zero, Q};

/// Dense polynomial, coefficients in increasing degree, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Poly(pub Vec<Q>);

impl Poly {
    pub fn new(mut c: Vec<Q>) -> Self {
        while c.last().is_some_and(is_zero) {
            c.pop();
        }
        Poly(c)
    }

    pub fn constant(v: Q) -> Self {
        Poly::new(vec![v])
    }

    /// ξ − r.
    pub fn linear(r: &Q) -> Self {
        Poly::new(vec![-r.clone(), qi(1)])
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.len().checked_sub(1)
    }

    pub fn coeff(&self, i: usize) -> Q {
        self.0.get(i).cloned().unwrap_or_else(zero)
    }

    pub fn add(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }

    pub fn sub(&self, o: &Poly) -> Poly {
        let n = self.0.len().max(o.0.len());
        Poly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    pub fn mul(&self, o: &Poly) -> Poly {
        if self.is_zero() || o.is_zero() {
            return Poly::default();
        }
        let mut c = vec![zero(); self.0.len() + o.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            if is_zero(a) {
                continue;
            }
            for (j, b) in o.0.iter().enumerate() {
                c[i + j] += a * b;
            }
        }
        Poly::new(c)
    }

    pub fn scale(&self, s: &Q) -> Poly {
        Poly::new(self.0.iter().map(|a| a * s).collect())
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut out = Poly::constant(qi(1));
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    pub fn deriv(&self) -> Poly {
        Poly::new(self.0.iter().enumerate().skip(1).map(|(i, a)| a * qi(i as i64)).collect())
    }

    pub fn integral(&self) -> Poly {
        let mut c = vec![zero()];
        c.extend(self.0.iter().enumerate().map(|(i, a)| a / qi(i as i64 + 1)));
        Poly::new(c)
    }

    pub fn eval(&self, x: &Q) -> Q {
        let mut acc = zero();
        for a in self.0.iter().rev() {
            acc = acc * x + a;
        }
        acc
    }

    pub fn eval_c(&self, x: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for a in self.0.iter().rev() {
            acc = acc * x + to_f64(a);
        }
        acc
    }

    /// Quotient and remainder by a nonzero divisor.
    pub fn divrem(&self, d: &Poly) -> (Poly, Poly) {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.0[dd].clone();
        let mut r = self.0.clone();
        if r.len() <= dd {
            return (Poly::default(), self.clone());
        }
        let mut qv = vec![zero(); r.len() - dd];
        for i in (dd..r.len()).rev() {
            let f = &r[i] / &lead;
            if !is_zero(&f) {
                for j in 0..=dd {
                    let v = &f * &d.0[j];
                    r[i - dd + j] -= v;
                }
            }
            qv[i - dd] = f;
        }
        r.truncate(dd);
        (Poly::new(qv), Poly::new(r))
    }

    /// Coefficients in u = ξ − r.
    pub fn shift(&self, r: &Q) -> Poly {
        let mut out = Poly::default();
        let lin = Poly::new(vec![r.clone(), qi(1)]);
        for a in self.0.iter().rev() {
            out = out.mul(&lin).add(&Poly::constant(a.clone()));
        }
        out
    }
}

/// The three possible poles, in the order of the exponent array.
pub fn pole_points() -> [Q; 3] {
    [zero(), qi(12), qi(-12)]
}

/// P(ξ) / (ξ^e[0] (ξ−12)^e[1] (ξ+12)^e[2]), kept with no common factors.
#[derive(Clone, Debug, PartialEq)]
pub struct RatFn {
    pub num: Poly,
    pub exps: [u32; 3],
}

/// Coefficients of ln ξ, ln(ξ−12), ln(ξ+12) produced by an integration.
pub type Logs = [Q; 3];

impl RatFn {
    pub fn zero() -> Self {
        RatFn { num: Poly::default(), exps: [0; 3] }
    }

    pub fn poly(p: Poly) -> Self {
        RatFn { num: p, exps: [0; 3] }
    }

    pub fn new(num: Poly, exps: [u32; 3]) -> Self {
        let mut r = RatFn { num, exps };
        r.normalize();
        r
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    fn normalize(&mut self) {
        if self.num.is_zero() {
            self.exps = [0; 3];
            return;
        }
        for (i, r) in pole_points().iter().enumerate() {
            while self.exps[i] > 0 && is_zero(&self.num.eval(r)) {
                let (qv, _) = self.num.divrem(&Poly::linear(r));
                self.num = qv;
                self.exps[i] -= 1;
            }
        }
    }

    pub fn denominator(&self) -> Poly {
        let pts = pole_points();
        let mut d = Poly::constant(qi(1));
        for i in 0..3 {
            d = d.mul(&Poly::linear(&pts[i]).pow(self.exps[i]));
        }
        d
    }

    fn lift(&self, exps: [u32; 3]) -> Poly {
        let pts = pole_points();
        let mut p = self.num.clone();
        for i in 0..3 {
            p = p.mul(&Poly::linear(&pts[i]).pow(exps[i] - self.exps[i]));
        }
        p
    }

    pub fn add(&self, o: &RatFn) -> RatFn {
        if self.is_zero() {
            return o.clone();
        }
        if o.is_zero() {
            return self.clone();
        }
        let e = [0, 1, 2].map(|i| self.exps[i].max(o.exps[i]));
        RatFn::new(self.lift(e).add(&o.lift(e)), e)
    }

    pub fn sub(&self, o: &RatFn) -> RatFn {
        self.add(&o.scale(&qi(-1)))
    }

    pub fn mul(&self, o: &RatFn) -> RatFn {
        let e = [0, 1, 2].map(|i| self.exps[i] + o.exps[i]);
        RatFn::new(self.num.mul(&o.num), e)
    }

    pub fn scale(&self, s: &Q) -> RatFn {
        RatFn::new(self.num.scale(s), self.exps)
    }

    /// ξ d/dξ.
    pub fn xi_d(&self) -> RatFn {
        if self.is_zero() {
            return RatFn::zero();
        }
        let xi = Poly::new(vec![zero(), qi(1)]);
        let pts = pole_points();
        let lm = Poly::linear(&pts[1]);
        let lp = Poly::linear(&pts[2]);
        let p = &self.num;
        let [a, b, c] = self.exps;
        let mut n = xi.mul(&p.deriv()).mul(&lm).mul(&lp);
        n = n.sub(&p.mul(&lm).mul(&lp).scale(&qi(a as i64)));
        n = n.sub(&xi.mul(p).mul(&lp).scale(&qi(b as i64)));
        n = n.sub(&xi.mul(p).mul(&lm).scale(&qi(c as i64)));
        RatFn::new(n, [a, b + 1, c + 1])
    }

    /// Divide by ξ.
    pub fn div_xi(&self) -> RatFn {
        RatFn::new(self.num.clone(), [self.exps[0] + 1, self.exps[1], self.exps[2]])
    }

    /// Multiply by ξ.
    pub fn mul_xi(&self) -> RatFn {
        self.mul(&RatFn::poly(Poly::new(vec![zero(), qi(1)])))
    }

    pub fn eval(&self, x: &Q) -> Option<Q> {
        let d = self.denominator().eval(x);
        if is_zero(&d) {
            None
        } else {
            Some(self.num.eval(x) / d)
        }
    }

    pub fn eval_c(&self, x: Complex64) -> Complex64 {
        let pts = [0.0, 12.0, -12.0];
        let mut d = Complex64::new(1.0, 0.0);
        for i in 0..3 {
            d *= (x - pts[i]).powi(self.exps[i] as i32);
        }
        self.num.eval_c(x) / d
    }

    /// Principal part at pole i: coefficients of (ξ−r)^{-j}, j = 1..=exps[i].
    pub fn principal_part(&self, i: usize) -> Vec<Q> {
        let m = self.exps[i] as usize;
        if m == 0 {
            return Vec::new();
        }
        let r = &pole_points()[i];
        let mut other = self.clone();
        other.exps[i] = 0;
        let od = other.denominator().shift(r);
        let nu = self.num.shift(r);
        // Taylor coefficients of nu/od at u = 0 up to u^{m-1}.
        let mut t: Vec<Q> = Vec::with_capacity(m);
        let d0 = od.coeff(0);
        for k in 0..m {
            let mut s = nu.coeff(k);
            for j in 1..=k {
                s -= od.coeff(j) * &t[k - j];
            }
            t.push(s / &d0);
        }
        (1..=m).map(|j| t[m - j].clone()).collect()
    }

    /// Antiderivative (rational part, without constant) and the logarithm coefficients.
    pub fn integrate(&self) -> (RatFn, Logs) {
        let mut logs: Logs = [zero(), zero(), zero()];
        if self.is_zero() {
            return (RatFn::zero(), logs);
        }
        let (qp, _) = self.num.divrem(&self.denominator());
        let mut out = RatFn::poly(qp.integral());
        for i in 0..3 {
            let pp = self.principal_part(i);
            for (jm1, c) in pp.iter().enumerate() {
                let j = jm1 + 1;
                if is_zero(c) {
                    continue;
                }
                if j == 1 {
                    logs[i] += c;
                } else {
                    let mut e = [0; 3];
                    e[i] = (j - 1) as u32;
                    let coef = -c / qi(j as i64 - 1);
                    out = out.add(&RatFn::new(Poly::constant(coef), e));
                }
            }
        }
        (out, logs)
    }

    /// Polynomial degree of the numerator and the exponent of (ξ − 12).
    pub fn shape(&self) -> (Option<usize>, [u32; 3]) {
        (self.num.degree(), self.exps)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "numerator": self.num.0.iter().map(crate::rat::to_pair).collect::<Vec<_>>(),
            "den_exponents": {"xi": self.exps[0], "xi_minus_12": self.exps[1], "xi_plus_12": self.exps[2]},
        })
    }
}

impl fmt::Display for RatFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms: Vec<String> = self
            .num
            .0
            .iter()
            .enumerate()
            .filter(|(_, c)| !is_zero(c))
            .map(|(i, c)| format!("({c})ξ^{i}"))
            .collect();
        write!(f, "[{}] / (ξ^{} (ξ-12)^{} (ξ+12)^{})", terms.join(" + "), self.exps[0], self.exps[1], self.exps[2])
    }
}

/// 144ξ/(ξ−12)².
pub fn f0() -> RatFn {
    RatFn::new(Poly::new(vec![zero(), qi(144)]), [0, 2, 0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rat::q;

    #[test]
    fn integrate_inverts_derivative() {
        let f = RatFn::new(Poly::new(vec![qi(3), qi(-1), qi(2), qi(5)]), [2, 3, 1]);
        let d = f.xi_d().div_xi();
        let (g, logs) = d.integrate();
        assert!(logs.iter().all(is_zero));
        // f − g is constant.
        assert!(g.sub(&f).xi_d().is_zero());
    }

    #[test]
    fn logs_of_simple_poles() {
        let f = RatFn::new(Poly::constant(qi(1)), [1, 1, 0]);
        // 1/(ξ(ξ−12)) = (1/12)(1/(ξ−12) − 1/ξ).
        let (_, logs) = f.integrate();
        assert_eq!(logs[0], q(-1, 12));
        assert_eq!(logs[1], q(1, 12));
    }
}
