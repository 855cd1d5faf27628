//! Dormand–Prince 5(4) pair with PI step control and 5th-order dense output.

use num_complex::Complex64;

type C = Complex64;
pub type State = [C; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;
const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

fn lin(y: &State, terms: &[(f64, &State)], h: f64) -> State {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..2 {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Interpolant of one accepted step on [s0, s0 + h].
#[derive(Clone, Copy, Debug)]
pub struct DenseStep {
    pub s0: f64,
    pub h: f64,
    pub rcont: [State; 5],
}

impl DenseStep {
    pub fn eval(&self, s: f64) -> State {
        let th = (s - self.s0) / self.h;
        let th1 = 1.0 - th;
        let r = &self.rcont;
        let mut out = [C::new(0.0, 0.0); 2];
        for i in 0..2 {
            out[i] = r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])));
        }
        out
    }
}

pub struct Attempt {
    pub y1: State,
    pub err: f64,
    pub dense: DenseStep,
    /// Derivative at the end of the step (first-same-as-last).
    pub k7: State,
}

/// One trial step from (s, y) with derivative k1 = f(s, y); returns the scaled error norm.
pub fn attempt<F: FnMut(f64, &State) -> State>(
    f: &mut F,
    s: f64,
    y: &State,
    k1: &State,
    h: f64,
    rtol: f64,
    atol: f64,
) -> Attempt {
    let k2 = f(s + C2 * h, &lin(y, &[(A21, k1)], h));
    let k3 = f(s + C3 * h, &lin(y, &[(A31, k1), (A32, &k2)], h));
    let k4 = f(s + C4 * h, &lin(y, &[(A41, k1), (A42, &k2), (A43, &k3)], h));
    let k5 = f(s + C5 * h, &lin(y, &[(A51, k1), (A52, &k2), (A53, &k3), (A54, &k4)], h));
    let k6 = f(s + h, &lin(y, &[(A61, k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)], h));
    let y1 = lin(y, &[(A71, k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)], h);
    let k7 = f(s + h, &y1);
    let mut err = 0.0;
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sc = atol + rtol * y[i].norm().max(y1[i].norm());
        err += (e.norm() / sc).powi(2);
    }
    let err = (err / 2.0).sqrt();
    let mut rcont = [[C::new(0.0, 0.0); 2]; 5];
    for i in 0..2 {
        let ydiff = y1[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        rcont[0][i] = y[i];
        rcont[1][i] = ydiff;
        rcont[2][i] = bspl;
        rcont[3][i] = ydiff - h * k7[i] - bspl;
        rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Attempt { y1, err, dense: DenseStep { s0: s, h, rcont }, k7 }
}

/// PI controller state (Hairer's DOPRI5 constants).
#[derive(Clone, Copy, Debug)]
pub struct Controller {
    pub fac_old: f64,
}

const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const SAFE: f64 = 0.9;

impl Default for Controller {
    fn default() -> Self {
        Controller { fac_old: 1e-4 }
    }
}

impl Controller {
    /// New step size after an attempt with error `err`; `accepted` tells whether err ≤ 1.
    pub fn next(&mut self, h: f64, err: f64) -> (bool, f64) {
        let fac11 = err.max(1e-300).powf(EXPO1);
        if err <= 1.0 {
            let fac = (fac11 / self.fac_old.powf(BETA) / SAFE).clamp(0.2, 10.0);
            self.fac_old = err.max(1e-4);
            (true, h / fac)
        } else {
            let fac = (fac11 / SAFE).clamp(1.0, 10.0);
            (false, h / fac)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_to_tolerance() {
        // y' = i y, y(0) = 1 on [0, 10].
        let mut f = |_s: f64, y: &State| [C::i() * y[0], -y[1]];
        let mut s = 0.0;
        let mut y = [C::new(1.0, 0.0), C::new(1.0, 0.0)];
        let mut k1 = f(s, &y);
        let mut h: f64 = 0.1;
        let mut ctl = Controller::default();
        let mut mid = None;
        while s < 10.0 {
            h = h.min(10.0 - s);
            let a = attempt(&mut f, s, &y, &k1, h, 1e-12, 1e-14);
            let (ok, hn) = ctl.next(h, a.err);
            if ok {
                if s <= 5.0 && s + h > 5.0 {
                    mid = Some(a.dense.eval(5.0));
                }
                s += h;
                y = a.y1;
                k1 = a.k7;
            }
            h = hn;
        }
        assert!((y[0] - C::new(0.0, 10.0).exp()).norm() < 1e-10);
        assert!((y[1] - (-10f64).exp()).norm() < 1e-14);
        let m = mid.unwrap();
        assert!((m[0] - C::new(0.0, 5.0).exp()).norm() < 1e-9);
    }
}
