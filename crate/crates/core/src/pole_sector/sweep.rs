//! ODE pipelines checked against the pole-sector asymptotics: detected versus predicted poles,
//! and the two-scale error on a fixed-ξ family.

use std::f64::consts::{FRAC_PI_4, PI};
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ode::{borel_seed, detect_poles_with, integrate_path, IntegrateOptions, Path};
use crate::pole_sector::predict::predict_pole;
use crate::pole_sector::two_scale::{tables, xi_of};

type C = Complex64;

/// Real part of the ODE seed point.
const SEED_RE: f64 = 8.0;
/// Offset of the sweep path to the right of the pole array.
const SWEEP_OFFSET: f64 = 0.8;

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(pts: &[(f64, f64)]) -> Result<f64> {
    let pts: Vec<(f64, f64)> = pts.iter().filter(|p| p.0 > 0.0 && p.1 > 0.0).map(|p| (p.0.ln(), p.1.ln())).collect();
    if pts.len() < 2 {
        return Err(Error::FitDegenerate("fewer than two positive points".into()));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0, a.1 + p.1));
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let den = n * sxx - sx * sx;
    if den.abs() < 1e-300 {
        return Err(Error::FitDegenerate("all abscissae equal".into()));
    }
    Ok((n * sxy - sx * sy) / den)
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PoleRow {
    pub n: i64,
    pub predicted: C,
    pub detected: C,
    pub gap: f64,
    pub rel_gap: f64,
    /// |first omitted term| / gap.
    pub next_term_ratio: f64,
    /// Gap after adding the first omitted term.
    pub gap_with_next: f64,
    pub witness: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PoleComparison {
    pub c: C,
    pub rows: Vec<PoleRow>,
    pub slope: f64,
    pub slope_with_next: f64,
    pub max_rel_gap: f64,
}

/// Pole index of a detected pole: x_n ≈ 2nπi + ln C − π i/4 + O(ln n).
pub fn pole_index(x: C, c: C) -> i64 {
    ((x.im - c.arg() + FRAC_PI_4) / (2.0 * PI)).round() as i64
}

/// Integrate the C-tronquee just right of its first pole array, detect poles n ∈ `ns`
/// and compare with `predict_pole`.
pub fn compare_poles(c: C, ns: RangeInclusive<i64>, opts: &IntegrateOptions) -> Result<PoleComparison> {
    let (lo, hi) = (*ns.start(), *ns.end());
    if lo < 1 || hi < lo {
        return Err(Error::InvalidInput(format!("pole range {lo}..{hi} must satisfy 1 <= lo <= hi")));
    }
    if c.norm() == 0.0 || !c.norm().is_finite() {
        return Err(Error::InvalidInput("C must be finite and nonzero".into()));
    }
    let shift = c.norm().ln() - 12f64.ln() + SWEEP_OFFSET;
    let y0 = 2.0 * PI * lo as f64 + c.arg() - FRAC_PI_4 - PI;
    let y1 = 2.0 * PI * hi as f64 + c.arg() - FRAC_PI_4 + PI;
    if y0 < 2.0 {
        return Err(Error::InvalidInput(format!("pole range starts too low (Im x = {y0:.2})")));
    }
    let curve = |y: f64| C::new(shift - 0.5 * y.ln(), y);
    if curve(y0).re > SEED_RE - 1.0 {
        return Err(Error::InvalidInput(format!("|C| = {} puts the pole array too far right", c.norm())));
    }
    let start = C::new(SEED_RE, y0);
    let seed = borel_seed(c, -FRAC_PI_4, start)?;
    let mut path = Path::new().line(start, curve(y0));
    let mut y = y0;
    while y < y1 {
        y = (y + 1.0).min(y1);
        path = path.line_to(curve(y));
    }
    let trace = integrate_path(seed.h, seed.hp, &path, opts)?;
    let poles = detect_poles_with(&trace, false)?;
    let mut rows = Vec::new();
    for n in lo..=hi {
        let p = predict_pole(n, c)?;
        let best = poles
            .iter()
            .filter(|r| pole_index(r.x, c) == n)
            .min_by(|a, b| (a.x - p.x).norm().total_cmp(&(b.x - p.x).norm()))
            .ok_or_else(|| Error::NoConvergence(format!("pole n = {n} not detected")))?;
        let gap = (best.x - p.x).norm();
        rows.push(PoleRow {
            n,
            predicted: p.x,
            detected: best.x,
            gap,
            rel_gap: gap / p.x.norm(),
            next_term_ratio: p.next_term.norm() / gap.max(1e-300),
            gap_with_next: (best.x - p.x - p.next_term).norm(),
            witness: best.witness,
        });
    }
    let slope = loglog_slope(&rows.iter().map(|r| (r.n as f64, r.gap)).collect::<Vec<_>>())?;
    let slope_with_next = loglog_slope(&rows.iter().map(|r| (r.n as f64, r.gap_with_next)).collect::<Vec<_>>())?;
    let max_rel_gap = rows.iter().map(|r| r.rel_gap).fold(0.0, f64::max);
    Ok(PoleComparison { c, rows, slope, slope_with_next, max_rel_gap })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct UniformityRow {
    pub x: C,
    pub h_ode: C,
    pub h_two_scale: C,
    pub err: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct Uniformity {
    pub xi: C,
    pub rows: Vec<UniformityRow>,
    pub slope: f64,
}

/// Solve C x^{-1/2} e^{-x} = ξ near Im x = 2πj by fixed-point iteration.
pub fn fixed_xi_point(xi: C, c: C, j: i64) -> Result<C> {
    let base = C::new(0.0, 2.0 * PI * j as f64) - (xi / c).ln();
    let mut x = base;
    for _ in 0..200 {
        let next = base - 0.5 * x.ln();
        if (next - x).norm() < 1e-15 * next.norm() {
            return Ok(next);
        }
        x = next;
    }
    if (xi_of(x, c) - xi).norm() < 1e-12 * xi.norm() {
        Ok(x)
    } else {
        Err(Error::NoConvergence(format!("fixed-ξ point for j = {j}")))
    }
}

/// |h_ODE − Σ_{k≤m} F_k(ξ) x^{-k}| along the points with the given ξ and |x| ∈ [r_min, r_max].
pub fn two_scale_uniformity(xi: C, c: C, m: usize, r_min: f64, r_max: f64, opts: &IntegrateOptions) -> Result<Uniformity> {
    let (f, _) = tables();
    if m >= f.len() {
        return Err(Error::InvalidInput(format!("order {m} exceeds the table ({})", f.len() - 1)));
    }
    if xi.norm() == 0.0 || c.norm() == 0.0 {
        return Err(Error::InvalidInput("ξ and C must be nonzero".into()));
    }
    let j_lo = (r_min / (2.0 * PI)).floor().max(1.0) as i64;
    let j_hi = (r_max / (2.0 * PI)).ceil() as i64 + 1;
    let mut xs = Vec::new();
    for j in j_lo..=j_hi {
        let x = fixed_xi_point(xi, c, j)?;
        if x.norm() >= r_min && x.norm() <= r_max {
            xs.push(x);
        }
    }
    if xs.len() < 3 {
        return Err(Error::InvalidInput(format!("fewer than three fixed-ξ points in [{r_min}, {r_max}]")));
    }
    use rayon::prelude::*;
    let rows = xs
        .par_iter()
        .map(|&x| {
            let start = C::new(SEED_RE.max(x.re + 4.0), x.im);
            let seed = borel_seed(c, -FRAC_PI_4, start)?;
            let tr = integrate_path(seed.h, seed.hp, &Path::new().line(start, x), opts)?;
            let xi_x = xi_of(x, c);
            let mut v = C::new(0.0, 0.0);
            let mut p = C::new(1.0, 0.0);
            for t in f.iter().take(m + 1) {
                v += t.eval_c(xi_x) * p;
                p /= x;
            }
            let h = tr.last().h;
            Ok(UniformityRow { x, h_ode: h, h_two_scale: v, err: (h - v).norm() })
        })
        .collect::<Result<Vec<_>>>()?;
    let slope = loglog_slope(&rows.iter().map(|r| (r.x.norm(), r.err)).collect::<Vec<_>>())?;
    Ok(Uniformity { xi, rows, slope })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn slope_of_power_law() {
        let pts: Vec<(f64, f64)> = (1..10).map(|i| (i as f64, 3.0 * (i as f64).powi(-4))).collect();
        assert!((loglog_slope(&pts).unwrap() + 4.0).abs() < 1e-12);
        assert!(loglog_slope(&[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn fixed_point_hits_xi() {
        let c = C::new(1.0, 0.0);
        for j in [3, 7, 12] {
            let x = fixed_xi_point(C::new(1.0, 0.0), c, j).unwrap();
            assert!((xi_of(x, c) - 1.0).norm() < 1e-12);
            assert!((x.im - 2.0 * PI * j as f64).abs() < 1.0);
        }
    }

    #[test]
    fn index_of_prediction() {
        let c = C::new(0.5, 0.3);
        for n in 3..12 {
            assert_eq!(pole_index(predict_pole(n, c).unwrap().x, c), n);
        }
    }

    #[test]
    #[allow(clippy::reversed_empty_ranges)]
    fn bad_ranges_rejected() {
        let o = IntegrateOptions::default();
        assert_eq!(compare_poles(C::new(1.0, 0.0), 5..=3, &o).unwrap_err().kind(), "InvalidInput");
        assert_eq!(compare_poles(C::new(0.0, 0.0), 5..=6, &o).unwrap_err().kind(), "InvalidInput");
    }
}
