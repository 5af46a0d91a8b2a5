use std::f64::consts::PI;

use proptest::prelude::*;
use spectral_surgery::special_fn::*;

/// `∫₀^∞ exp(-(a²t + b²/t)) t^(s-1) dt` by composite Simpson on `t = e^x`.
fn simpson_bessel(s: f64, a: f64, b: f64) -> f64 {
    let f = |x: f64| {
        let t = x.exp();
        (-(a * a * t + b * b / t) + s * x).exp()
    };
    let (lo, hi, n) = (-40.0, 40.0, 400_000);
    let h = (hi - lo) / n as f64;
    let mut acc = f(lo) + f(hi);
    for i in 1..n {
        acc += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * h / 3.0
}

#[test]
fn gamma_examples() {
    assert!((gamma(0.5).unwrap() - PI.sqrt()).abs() < 1e-14);
    assert!((gamma(1.0).unwrap() - 1.0).abs() < 1e-15);
    assert!((gamma(-0.5).unwrap() + 2.0 * PI.sqrt()).abs() < 1e-13);
    assert!(gamma(0.0).is_err());
    assert!(gamma(-2.0).is_err());
}

#[test]
fn riemann_zeta_examples() {
    assert!((riemann_zeta(0.0).unwrap() + 0.5).abs() < 1e-14);
    assert!((riemann_zeta(-1.0).unwrap() + 1.0 / 12.0).abs() < 1e-14);
    assert!((riemann_zeta_deriv(0.0).unwrap() + 0.5 * (2.0 * PI).ln()).abs() < 1e-12);
    assert!((riemann_zeta(2.0).unwrap() - PI * PI / 6.0).abs() < 1e-14);
    assert!((riemann_zeta_deriv(-1.0).unwrap() + 0.165_421_143_700_450_9).abs() < 1e-12);
    assert!(riemann_zeta(1.0).is_err());
}

#[test]
fn bessel_half_order_closed_forms() {
    let k = incomplete_bessel(-0.5, 1.0, 2.0).unwrap();
    let exact = PI.sqrt() / 2.0 * (-4.0f64).exp();
    assert!((k.value - exact).abs() <= k.abs_error_bound.max(1e-15 * exact));
    assert!((k.value - 0.016231).abs() < 1e-6);
    let k = incomplete_bessel_c(0.5, 1.0).unwrap();
    let exact = PI.sqrt() * (-2.0f64).exp();
    assert!((k.value - exact).abs() < 1e-14);
    assert!((k.value - 0.239_876_6).abs() < 2e-6);
}

#[test]
fn bessel_order_symmetry() {
    let p = incomplete_bessel_c(0.7, 1.3).unwrap();
    let m = incomplete_bessel_c(-0.7, 1.3).unwrap();
    assert!((p.value - m.value).abs() < 1e-11);
}

#[test]
fn bessel_matches_independent_quadrature() {
    for &(s, a, b) in &[(0.3, 0.5, 1.7), (-1.2, 2.0, 0.4), (1.5, 0.8, 0.8)] {
        let k = incomplete_bessel(s, a, b).unwrap();
        let o = simpson_bessel(s, a, b);
        assert!((k.value - o).abs() < 1e-10 * o, "s = {s}: {} vs {o}", k.value);
    }
}

#[test]
fn bessel_rejects_nonpositive_arguments() {
    assert!(incomplete_bessel(0.5, 0.0, 1.0).is_err());
    assert!(incomplete_bessel(0.5, 1.0, -1.0).is_err());
    assert!(incomplete_bessel_c(0.5, 0.0).is_err());
}

#[test]
fn bessel_decay_is_bounded() {
    for &s in &[-1.0, -0.3, 0.0, 0.5, 1.0] {
        let scaled: Vec<f64> = (1..=30)
            .map(|x| {
                let x = x as f64;
                incomplete_bessel_c(s, x).unwrap().value * (2.0 * x).exp()
            })
            .collect();
        let max = scaled.iter().cloned().fold(0.0, f64::max);
        assert!(max.is_finite());
        // e^{2x} K_s(x) ~ √(π/x) x^{...}: the tail must not exceed its start
        assert!(scaled[29] <= scaled[0], "s = {s}: {scaled:?}");
    }
}

proptest! {
    #[test]
    fn bessel_scaling(s in -2.0f64..2.0, a in 0.1f64..5.0, b in 0.1f64..5.0) {
        let lhs = incomplete_bessel(s, a, b).unwrap();
        let rhs = incomplete_bessel_c(s, a * b).unwrap();
        let scaled = (b / a).powf(s) * rhs.value;
        let bound = lhs.abs_error_bound + (b / a).powf(s) * rhs.abs_error_bound;
        prop_assert!(lhs.value > 0.0);
        prop_assert!((lhs.value - scaled).abs() <= bound.max(1e-14 * scaled), "{} vs {}", lhs.value, scaled);
    }

    #[test]
    fn gamma_recurrence(s in 0.5f64..10.0) {
        let lhs = gamma(s + 1.0).unwrap();
        let rhs = s * gamma(s).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs.abs());
    }
}
