use num_complex::Complex64 as C;
use proptest::prelude::*;
use tronquee::rat::{is_zero, q, qi, to_f64, Q};
use tronquee::series::{borel_transform, h0_coeffs, h0_residual, h0_series, transseries_level, FormalSeries, Transseries};

#[test]
fn first_coefficients() {
    let s = h0_series(6).unwrap();
    assert_eq!(s.lead2, -8);
    assert_eq!(s.coeff_of_power(4), -q(392, 625));
    assert!(is_zero(&s.coeff_of_power(5)));
    assert_eq!(s.coeff_of_power(6), -q(6272, 625));
    assert_eq!(s.coeff_of_power(6), qi(16) * s.coeff_of_power(4));
}

#[test]
fn parity_through_200() {
    let c = h0_coeffs(200);
    assert!(c.iter().take(4).all(is_zero));
    assert!(c.iter().skip(1).step_by(2).all(is_zero));
    assert!(c.iter().skip(4).step_by(2).all(|v| !is_zero(v)));
}

#[test]
fn truncated_series_residual_is_small() {
    let s = h0_series(20).unwrap();
    // The first unmatched order is x^-22.
    let r10 = h0_residual(&s, C::new(10.0, 0.0)).norm();
    let r40 = h0_residual(&s, C::new(40.0, 0.0)).norm();
    let slope = (r10 / r40).ln() / 4f64.ln();
    assert!((slope - 22.0).abs() < 0.5, "slope {slope}");
}

#[test]
fn divergence_signature() {
    let c = h0_coeffs(200);
    for k in (100..=160).step_by(20) {
        let g = to_f64(&c[k]).abs().powf(1.0 / k as f64) / k as f64;
        assert!(g > 0.2 && g < 1.0, "k = {k}: {g}");
    }
    // ratio c_{k+2}/c_k ~ k² for a Borel singularity at distance 1
    let r = to_f64(&(&c[200] / &c[198])) / (198.0 * 199.0);
    assert!((r - 1.0).abs() < 0.02, "{r}");
}

#[test]
fn level_one_normalization_and_recurrence() {
    let t1 = transseries_level(1, 6).unwrap();
    assert_eq!(t1.coeffs[0], qi(1));
    // Substitute h0 + ε x^{-1/2} e^{-x} t1 and match O(ε) at order x^{-1} of the bracket:
    // 2 a_1 + (1/2)² a_0 ... fixes a_1 = -1/8.
    assert_eq!(t1.coeffs[1], -q(1, 8));
}

/// O(ε) check by direct floating substitution: v = x^{-1/2} e^{-x} t1 solves the linearized equation.
#[test]
fn level_one_solves_linearized_equation() {
    let ts = Transseries::new(1, 30).unwrap();
    let h0: Vec<f64> = ts.h0.iter().map(to_f64).collect();
    let a: Vec<f64> = ts.level(1).iter().map(to_f64).collect();
    let x = C::new(40.0, 5.0);
    let eval = |c: &[f64], shift: f64| -> (C, C, C) {
        let (mut v, mut d, mut dd) = (C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0));
        for (m, cm) in c.iter().enumerate() {
            let e = -(m as f64) - shift;
            let xe = x.powf(e);
            v += cm * xe;
            d += cm * e * xe / x;
            dd += cm * e * (e - 1.0) * xe / (x * x);
        }
        (v, d, dd)
    };
    let (h, _, _) = eval(&h0, 0.0);
    let (t, tp, tpp) = eval(&a[..12], 0.5);
    // v = e^{-x} T with T = x^{-1/2} t1: v'' + v'/x - v - h v = 0
    let e = (-x).exp();
    let v = e * t;
    let vp = e * (tp - t);
    let vpp = e * (tpp - 2.0 * tp + t);
    let res = (vpp + vp / x - v - h * v) / v;
    assert!(res.norm() < 1e-13, "{res}");
}

#[test]
fn level_two_leading_coefficient() {
    // k = 2: (k² − 1) a_0 = ½ t1(0)² → a_0 = 1/6.
    let t2 = transseries_level(2, 4).unwrap();
    assert_eq!(t2.coeffs[0], q(1, 6));
    assert!(transseries_level(0, 4).is_err());
}

#[test]
fn borel_transform_examples() {
    let one = FormalSeries { lead2: -2, coeffs: vec![qi(1)] };
    let g = borel_transform(&one, 2).unwrap();
    assert_eq!(g.coeffs[0], qi(1));
    // Σ (n-1)! x^{-n} → Σ p^{n-1}
    let fact: Vec<Q> = (0..10).map(tronquee::rat::factorial).collect();
    let s = FormalSeries { lead2: -2, coeffs: fact };
    let g = borel_transform(&s, 2).unwrap();
    assert!(g.coeffs.iter().all(|c| *c == qi(1)));
    // B(h0): first nonzero coefficient c4/Γ(4) at p³
    let h = h0_series(12).unwrap();
    let g = borel_transform(&h, 8).unwrap();
    assert_eq!(g.coeffs[0], -q(392, 625 * 6));
    assert!(borel_transform(&h, 0).is_err());
}

fn small_series() -> impl Strategy<Value = Vec<i64>> {
    prop::collection::vec(-50i64..50, 1..12)
}

proptest! {
    #[test]
    fn borel_is_linear(a in small_series(), b in small_series(), k in -5i64..5) {
        let n = a.len().max(b.len());
        let pad = |v: &[i64]| -> Vec<Q> { (0..n).map(|i| qi(*v.get(i).unwrap_or(&0))).collect() };
        let (pa, pb) = (pad(&a), pad(&b));
        let sum: Vec<Q> = pa.iter().zip(&pb).map(|(x, y)| x + qi(k) * y).collect();
        let ga = borel_transform(&FormalSeries { lead2: -2, coeffs: pa }, 2).unwrap();
        let gb = borel_transform(&FormalSeries { lead2: -2, coeffs: pb }, 2).unwrap();
        let gs = borel_transform(&FormalSeries { lead2: -2, coeffs: sum }, 2).unwrap();
        for i in 0..n {
            prop_assert_eq!(&gs.coeffs[i], &(&ga.coeffs[i] + qi(k) * &gb.coeffs[i]));
        }
    }
}
