//! Two-scale expansions h ~ Σ F_n(ξ) x^{-n}, g ~ Σ G_n(ξ) x^{-n} with ξ = C x^{-1/2} e^{-x}.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::pole_sector::ratfn::{f0, Logs, Poly, RatFn};
use crate::rat::{is_zero, q, qi, to_f64, zero, Q};

type C = Complex64;

/// Coefficient of x^-4 in h'' + h'/x − h − h²/2 + c x^-4 = 0 for the integrable equation.
pub fn integrable_c() -> Q {
    q(-392, 625)
}

/// F_n and the data produced while computing them.
#[derive(Clone, Debug)]
pub struct FTable {
    pub c: Q,
    pub f: Vec<RatFn>,
    /// Coefficient of y1 = ξF0' fixed one order later, for each n ≥ 1.
    pub y1_constants: Vec<Q>,
    /// ln(ξ−12) coefficient of the first integration at each order m ≥ 1.
    pub obstructions: Vec<Q>,
}

/// y1 = ξ F0'(ξ) = −144ξ(ξ+12)/(ξ−12)³.
pub fn y1() -> RatFn {
    f0().xi_d()
}

/// x-derivative of Σ s_k t^k (t = 1/x, ξ' = −ξ(1 + t/2)).
fn dx(s: &[RatFn]) -> Vec<RatFn> {
    (0..s.len())
        .map(|k| {
            let mut v = s[k].xi_d().scale(&qi(-1));
            if k >= 1 {
                v = v.sub(&s[k - 1].xi_d().scale(&q(1, 2)));
                v = v.sub(&s[k - 1].scale(&qi(k as i64 - 1)));
            }
            v
        })
        .collect()
}

/// R_m with F_m = 0, so that ξ²F_m'' + ξF_m' − (1 + F0)F_m = R_m.
fn rhs(fs: &[RatFn], m: usize, c: &Q) -> RatFn {
    let mut h: Vec<RatFn> = fs[..m].to_vec();
    h.push(RatFn::zero());
    let hp = dx(&h);
    let hpp = dx(&hp);
    let mut e = hpp[m].add(&hp[m - 1]).sub(&h[m]);
    let mut sq = RatFn::zero();
    for i in 0..=m {
        sq = sq.add(&h[i].mul(&h[m - i]));
    }
    e = e.sub(&sq.scale(&q(1, 2)));
    if m == 4 {
        e = e.add(&RatFn::poly(Poly::constant(c.clone())));
    }
    e.scale(&qi(-1))
}

struct StepOut {
    f: RatFn,
    logs1: Logs,
    logs2: Logs,
}

/// Variation of parameters with the particular solution regular at ξ = 0.
fn step(fs: &[RatFn], m: usize, c: &Q) -> Result<StepOut> {
    let y = y1();
    let r = rhs(fs, m, c);
    let (mut i1, logs1) = y.mul(&r).div_xi().integrate();
    if i1.exps[0] != 0 {
        return Err(Error::InvalidInput(format!("first integral singular at 0 at order {m}")));
    }
    let i10 = i1.eval(&zero()).expect("regular at 0");
    i1 = i1.sub(&RatFn::poly(Poly::constant(i10)));
    let (v, logs2) = i1.mul(&inv_xi_y1_sq()).integrate();
    Ok(StepOut { f: y.mul(&v), logs1, logs2 })
}

/// 1/(ξ y1²) = (ξ−12)^6 / (144² ξ³ (ξ+12)²).
fn inv_xi_y1_sq() -> RatFn {
    let p = Poly::linear(&qi(12)).pow(6).scale(&(qi(1) / qi(144 * 144)));
    RatFn::new(p, [3, 0, 2])
}

/// F_0..=F_n for the equation with coefficient c (one extra order fixes the last constant).
pub fn compute_f_with(n: usize, c: &Q) -> Result<FTable> {
    let (t, obstruction) = run_orders(n, c)?;
    match obstruction {
        Some((m, v)) => Err(Error::ObstructionNonzero(format!("{v} at order {m}"))),
        None => Ok(t),
    }
}

/// Orders 1..=n+1, stopping at the first nonzero ln(ξ−12) coefficient.
fn run_orders(n: usize, c: &Q) -> Result<(FTable, Option<(usize, Q)>)> {
    let y = y1();
    let mut fs = vec![f0()];
    let mut consts = Vec::new();
    let mut obstructions = Vec::new();
    for m in 1..=n + 1 {
        let out = if m == 1 {
            step(&fs, m, c)?
        } else {
            // The y1 constant of F_{m−1} is the value removing ln ξ at order m; the log is affine in it.
            let base = fs[m - 1].clone();
            let mut trial = |a: &Q| -> Result<StepOut> {
                fs[m - 1] = base.add(&y.scale(a));
                step(&fs, m, c)
            };
            let l0 = trial(&zero())?.logs2[0].clone();
            let l1 = trial(&qi(1))?.logs2[0].clone();
            let l2 = trial(&qi(2))?.logs2[0].clone();
            if &l2 - &l1 != &l1 - &l0 {
                return Err(Error::InvalidInput(format!("ln xi condition not affine at order {m}")));
            }
            let slope = &l1 - &l0;
            if is_zero(&slope) {
                return Err(Error::InvalidInput(format!("y1 constant undetermined at order {m}")));
            }
            let a = -&l0 / slope;
            let out = trial(&a)?;
            consts.push(a);
            out
        };
        obstructions.push(out.logs1[1].clone());
        if !is_zero(&out.logs1[1]) {
            let v = out.logs1[1].clone();
            return Ok((FTable { c: c.clone(), f: fs, y1_constants: consts, obstructions }, Some((m, v))));
        }
        if !is_zero(&out.logs1[0]) || !is_zero(&out.logs1[2]) || !is_zero(&out.logs2[2]) {
            return Err(Error::InvalidInput(format!(
                "unexpected logarithm at order {m}: {:?} {:?}",
                out.logs1.iter().map(|v| v.to_string()).collect::<Vec<_>>(),
                out.logs2.iter().map(|v| v.to_string()).collect::<Vec<_>>()
            )));
        }
        if !is_zero(&out.logs2[1]) {
            return Err(Error::InvalidInput(format!("ln(xi-12) in the second integration at order {m}")));
        }
        if m <= n {
            fs.push(out.f);
        }
    }
    Ok((FTable { c: c.clone(), f: fs, y1_constants: consts, obstructions }, None))
}

/// F_0..=F_n for the integrable equation.
pub fn compute_f(n: usize) -> Result<Vec<RatFn>> {
    Ok(compute_f_with(n, &integrable_c())?.f)
}

/// Shared table of F_0..F_7 and G_0..G_7.
pub fn tables() -> &'static (Vec<RatFn>, Vec<RatFn>) {
    static CELL: OnceLock<(Vec<RatFn>, Vec<RatFn>)> = OnceLock::new();
    CELL.get_or_init(|| {
        let f = compute_f(7).expect("integrable F table");
        let g = compose_g(&f);
        (f, g)
    })
}

/// G_n from g = 3h/(3+h) expanded in 1/x.
pub fn compose_g(f: &[RatFn]) -> Vec<RatFn> {
    let three = RatFn::poly(Poly::constant(qi(3)));
    // 1/(3 + F0) = (ξ−12)² / (3(ξ+12)²).
    let inv = RatFn::new(Poly::linear(&qi(12)).pow(2).scale(&q(1, 3)), [0, 0, 2]);
    let mut g: Vec<RatFn> = Vec::with_capacity(f.len());
    for k in 0..f.len() {
        let mut s = f[k].mul(&three);
        for j in 0..k {
            s = s.sub(&g[j].mul(&f[k - j]));
        }
        g.push(s.mul(&inv));
    }
    g
}

/// G_0..=G_n.
pub fn compute_g(n: usize) -> Result<Vec<RatFn>> {
    let f = compute_f(n)?;
    Ok(compose_g(&f))
}

/// Coefficients of t^0..t^{M−1} of (3−g)(g'' + t g' − g(3−g)/3 − g²/2 − A(3−g)² t⁴/9) + 2g'².
pub fn g_equation_residual(g: &[RatFn], c: &Q) -> Vec<RatFn> {
    let m = g.len();
    let a = -c.clone();
    let gp = dx(g);
    let gpp = dx(&gp);
    let mul = |x: &[RatFn], y: &[RatFn]| -> Vec<RatFn> {
        (0..m)
            .map(|k| {
                let mut s = RatFn::zero();
                for i in 0..=k {
                    s = s.add(&x[i].mul(&y[k - i]));
                }
                s
            })
            .collect()
    };
    let mut w: Vec<RatFn> = g.iter().map(|v| v.scale(&qi(-1))).collect();
    w[0] = w[0].add(&RatFn::poly(Poly::constant(qi(3))));
    let gw = mul(g, &w);
    let gg = mul(g, g);
    let ww = mul(&w, &w);
    let mut inner: Vec<RatFn> = Vec::with_capacity(m);
    for k in 0..m {
        let mut v = gpp[k].sub(&gw[k].scale(&q(1, 3))).sub(&gg[k].scale(&q(1, 2)));
        if k >= 1 {
            v = v.add(&gp[k - 1]);
        }
        if k >= 4 {
            v = v.sub(&ww[k - 4].scale(&(&a / qi(9))));
        }
        inner.push(v);
    }
    let lhs = mul(&w, &inner);
    let gp2 = mul(&gp, &gp);
    (0..m).map(|k| lhs[k].add(&gp2[k].scale(&qi(2)))).collect()
}

/// ln(ξ−12) coefficient at order 6 for the equation with x^-4 coefficient c.
pub fn integrability_witness(c: &Q) -> Result<Q> {
    match run_orders(5, c)? {
        (_, None) => Ok(zero()),
        (_, Some((6, v))) => Ok(v),
        (_, Some((m, v))) => Err(Error::ObstructionNonzero(format!("{v} already at order {m}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum TwoScaleChart {
    F,
    G,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct TwoScaleValue {
    pub chart: TwoScaleChart,
    pub xi: C,
    /// Σ F_j/x^j (chart F) or Σ G_j/x^j (chart G).
    pub value: C,
    /// The corresponding h value.
    pub h: C,
}

/// Region parameters for the two expansions.
#[derive(Clone, Copy, Debug)]
pub struct Region {
    pub eps: f64,
    pub delta: f64,
    pub r: f64,
}

impl Default for Region {
    fn default() -> Self {
        Region { eps: 0.1, delta: 0.05, r: 20.0 }
    }
}

/// ξ = C x^{-1/2} e^{-x} (principal square root).
pub fn xi_of(x: C, c: C) -> C {
    c * x.powf(-0.5) * (-x).exp()
}

/// Truncated two-scale expansion through order m, in the chart farther from its excluded point.
pub fn eval_two_scale(x: C, c: C, m: usize, region: &Region) -> Result<TwoScaleValue> {
    let (f, g) = tables();
    if m >= f.len() {
        return Err(Error::InvalidInput(format!("order {m} exceeds the table ({})", f.len() - 1)));
    }
    let xi = xi_of(x, c);
    let big = xi.norm() >= 1.0 / region.eps;
    let in_f = !big && (xi - 12.0).norm() > region.eps;
    let in_g = !big && (xi + 12.0).norm() > region.eps;
    if (!in_f && !in_g) || x.norm() < region.r {
        return Err(Error::OutsideRegion { x });
    }
    let use_f = in_f && (!in_g || (xi - 12.0).norm() >= (xi + 12.0).norm());
    let table = if use_f { f } else { g };
    let ix = 1.0 / x;
    let mut v = C::new(0.0, 0.0);
    let mut p = C::new(1.0, 0.0);
    for t in table.iter().take(m + 1) {
        v += t.eval_c(xi) * p;
        p *= ix;
    }
    let (chart, h) = if use_f { (TwoScaleChart::F, v) } else { (TwoScaleChart::G, 3.0 * v / (3.0 - v)) };
    Ok(TwoScaleValue { chart, xi, value: v, h })
}

/// F_n(0) as a float, the x^-n coefficient of the power series.
pub fn f_at_zero(n: usize) -> f64 {
    tables().0.get(n).and_then(|f| f.eval(&zero())).map(|v| to_f64(&v)).unwrap_or(0.0)
}
