//! Right-hand sides, the diagonal first-order system and the coordinate maps.

use num_complex::Complex64;

use crate::error::{Error, Result};

type C = Complex64;

/// Coefficient of x^-4 in h'' = h + h²/2 + A/x⁴ − h'/x.
pub const FORCING: f64 = 392.0 / 625.0;

/// h'' for the normalized equation with forcing coefficient `a`.
pub fn h_second(x: C, h: C, hp: C, a: f64) -> C {
    let ix = 1.0 / x;
    let ix2 = ix * ix;
    h + 0.5 * h * h + a * ix2 * ix2 - hp * ix
}

/// (h', h'') for the normalized equation.
pub fn rhs_h(x: C, h: C, hp: C) -> Result<(C, C)> {
    if x.norm() == 0.0 {
        return Err(Error::XZero);
    }
    Ok((hp, h_second(x, h, hp, FORCING)))
}

/// g'' in the chart g = h(1 + h/3)^{-1}, regular at the poles of h.
pub fn g_second(x: C, g: C, gp: C, a: f64) -> C {
    let ix = 1.0 / x;
    let ix2 = ix * ix;
    let w = 3.0 - g;
    g * w / 3.0 + 0.5 * g * g + w * w * a * ix2 * ix2 / 9.0 - gp * ix - 2.0 * gp * gp / w
}

/// u'' for u = 3 − g, the form integrated near poles (u ≈ (3/4)(x − x0)² there).
pub fn u_second(x: C, u: C, up: C, a: f64) -> C {
    let ix = 1.0 / x;
    let ix2 = ix * ix;
    let g = 3.0 - u;
    -(g * u / 3.0 + 0.5 * g * g + u * u * a * ix2 * ix2 / 9.0 + up * ix - 2.0 * up * up / u)
}

/// (u, u') = (3 − g, −g') from (h, h'): u = 9/(3 + h).
pub fn h_to_u(h: C, hp: C) -> (C, C) {
    let d = 3.0 + h;
    (9.0 / d, -9.0 * hp / (d * d))
}

pub fn u_to_h(u: C, up: C) -> (C, C) {
    (3.0 * (3.0 - u) / u, -9.0 * up / (u * u))
}

pub fn h_to_g(h: C, hp: C) -> (C, C) {
    let d = 3.0 + h;
    (3.0 * h / d, 9.0 * hp / (d * d))
}

pub fn g_to_h(g: C, gp: C) -> (C, C) {
    let d = 3.0 - g;
    (3.0 * g / d, 9.0 * gp / (d * d))
}

/// Λ = diag(1, −1).
pub const LAMBDA: [f64; 2] = [1.0, -1.0];
/// B = diag(1/2, 1/2).
pub const BETA: [f64; 2] = [0.5, 0.5];

fn check_transform(x: C) -> Result<()> {
    if (16.0 * x * x + 1.0).norm() < 1e-12 {
        return Err(Error::SingularTransform(x));
    }
    if x.norm() == 0.0 {
        return Err(Error::XZero);
    }
    Ok(())
}

/// Matrix M(x) with (h, h') = M y.
fn m_matrix(x: C) -> [[C; 2]; 2] {
    let a = 0.25 / x;
    [[0.5 * (1.0 - a), 0.5 * (1.0 + a)], [-0.5 * (1.0 + a), 0.5 * (1.0 - a)]]
}

pub fn y_to_h(x: C, y: [C; 2]) -> Result<(C, C)> {
    check_transform(x)?;
    let m = m_matrix(x);
    Ok((m[0][0] * y[0] + m[0][1] * y[1], m[1][0] * y[0] + m[1][1] * y[1]))
}

pub fn h_to_y(x: C, h: C, hp: C) -> Result<[C; 2]> {
    check_transform(x)?;
    let m = m_matrix(x);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    Ok([(m[1][1] * h - m[0][1] * hp) / det, (-m[1][0] * h + m[0][0] * hp) / det])
}

/// y' of the diagonal system, obtained by conjugating the h-system.
pub fn rhs_y(x: C, y: [C; 2]) -> Result<[C; 2]> {
    let (h, hp) = y_to_h(x, y)?;
    let f = [hp, h_second(x, h, hp, FORCING)];
    // M' y, with M' = ½ a' [[-1, 1], [-1, -1]] and a = 1/(4x).
    let ap = -0.25 / (x * x);
    let mpy = [0.5 * ap * (-y[0] + y[1]), 0.5 * ap * (-y[0] - y[1])];
    h_to_y_linear(x, [f[0] - mpy[0], f[1] - mpy[1]])
}

fn h_to_y_linear(x: C, v: [C; 2]) -> Result<[C; 2]> {
    h_to_y(x, v[0], v[1])
}

/// Nonlinearity g(1/x, y) = y' + (Λ + B/x) y.
pub fn nonlinearity(x: C, y: [C; 2]) -> Result<[C; 2]> {
    let yp = rhs_y(x, y)?;
    Ok([
        yp[0] + (LAMBDA[0] + BETA[0] / x) * y[0],
        yp[1] + (LAMBDA[1] + BETA[1] / x) * y[1],
    ])
}

/// Leading forcing term of the first component of the nonlinearity at y = 0.
pub fn nonlinearity_forcing_1(x: C) -> C {
    -(1568.0 / 625.0) * (4.0 * x + 1.0) / ((16.0 * x * x + 1.0) * x * x * x)
}

/// Painlevé I variables (z, y, dy/dz).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ZPoint {
    pub z: C,
    pub y: C,
    pub yp: C,
}

fn z_scale() -> C {
    C::from_polar(30f64.powf(0.8) / 24.0, -std::f64::consts::PI / 5.0)
}

/// (x, h, h') ↦ (z, y, y'), principal branch of x^{4/5} (arg x ∈ (−π, π]).
pub fn map_x_to_z(x: C, h: C, hp: C) -> Result<ZPoint> {
    if x.norm() == 0.0 {
        return Err(Error::XZero);
    }
    let z = z_scale() * x.powf(0.8);
    let dzdx = 0.8 * z / x;
    let r = (z / 6.0).sqrt();
    let rp = dzdx / (12.0 * r);
    let i = C::i();
    let ix2 = 1.0 / (x * x);
    let f = 1.0 - 4.0 / 25.0 * ix2 + h;
    let fp = 8.0 / 25.0 * ix2 / x + hp;
    let y = i * r * f;
    let dydx = i * (rp * f + r * fp);
    Ok(ZPoint { z, y, yp: dydx / dzdx })
}

/// Inverse of [`map_x_to_z`]; z must come from the principal x-branch, arg z ∈ (−π, 3π/5].
pub fn map_z_to_x(p: ZPoint) -> Result<(C, C, C)> {
    let w = p.z / z_scale();
    let aw = w.arg();
    // arg w = (4/5) arg x must lie in (−4π/5, 4π/5].
    let lim = 0.8 * std::f64::consts::PI;
    let argz = p.z.arg();
    if aw <= -lim || aw > lim + 1e-15 || argz <= -std::f64::consts::PI + 1e-15 {
        return Err(Error::BranchCut(format!("arg z = {argz} is outside the principal x-branch")));
    }
    let x = C::from_polar(w.norm().powf(1.25), aw * 1.25);
    let z = p.z;
    let dzdx = 0.8 * z / x;
    let r = (z / 6.0).sqrt();
    let rp = dzdx / (12.0 * r);
    let i = C::i();
    let ix2 = 1.0 / (x * x);
    let f = p.y / (i * r);
    let h = f - 1.0 + 4.0 / 25.0 * ix2;
    let dydx = p.yp * dzdx;
    let fp = (dydx / i - rp * f) / r;
    let hp = fp - 8.0 / 25.0 * ix2 / x;
    Ok((x, h, hp))
}

/// s = h'² − h² − h³/3.
pub fn energy(h: C, hp: C) -> C {
    hp * hp - h * h - h * h * h / 3.0
}
