use std::f64::consts::PI;

use proptest::prelude::*;
use spectral_surgery::oned_oracle::{gy_det_periodic, Potential};
use spectral_surgery::spectra::*;
use spectral_surgery::zeta_det::*;

/// `Σ mult·μ^(-s)` over positive eigenvalues, summed until the terms are negligible.
fn direct_sum(length: f64, torus: bool, z: f64, s: f64) -> f64 {
    let w = (2.0 * PI / length).powi(2);
    let n = 4000i64;
    let mut acc = 0.0;
    if torus {
        for i in -n / 10..=n / 10 {
            for j in -n / 10..=n / 10 {
                let mu = w * (i * i + j * j) as f64 + z;
                if mu > 0.0 {
                    acc += mu.powf(-s);
                }
            }
        }
    } else {
        for k in -n..=n {
            let mu = w * (k * k) as f64 + z;
            if mu > 0.0 {
                acc += mu.powf(-s);
            }
        }
    }
    acc
}

#[test]
fn circle_closed_form_values() {
    let c = circle_spectrum(1.0, 1e4).unwrap();
    assert!((zeta_at(&c, 0.0).unwrap().value + 1.0).abs() < 1e-10);
    assert!((zeta_at(&c, -0.5).unwrap().value + PI / 3.0).abs() < 1e-10);
    assert!((det_zeta(&c).unwrap().value - 1.0).abs() < 1e-10);
    assert!((xi_prime_zero(&c).unwrap().value - 2.0 * PI / 3.0).abs() < 1e-9);
}

#[test]
fn mellin_split_agrees_with_closed_form() {
    let c = circle_spectrum(1.0, 1e4).unwrap();
    let closed = ZetaFunction::new(c.clone(), ZetaMethod::ClosedForm).unwrap();
    let mellin = ZetaFunction::new(c, ZetaMethod::MellinSplit).unwrap();
    for &s in &[-1.5, -0.5, 0.25, 0.75, 2.0] {
        let a = closed.eval(s).unwrap().value;
        let b = mellin.eval(s).unwrap().value;
        assert!((a - b).abs() < 1e-8 * a.abs().max(1.0), "s = {s}: {a} vs {b}");
    }
    let d = mellin.derivative_at_zero().unwrap().value;
    assert!(d.abs() < 1e-8, "{d}");
}

#[test]
fn closed_form_is_rejected_where_unavailable() {
    let c = shift_spectrum(&circle_spectrum(1.0, 1e4).unwrap(), 1.0).unwrap();
    assert!(ZetaFunction::new(c, ZetaMethod::ClosedForm).is_err());
}

#[test]
fn single_eigenvalue() {
    let p = shift_spectrum(&point_spectrum(1).unwrap(), 4.0).unwrap();
    assert!((zeta_at(&p, 1.0).unwrap().value - 0.25).abs() < 1e-14);
    let p9 = shift_spectrum(&point_spectrum(1).unwrap(), 9.0).unwrap();
    assert!((xi_prime_zero(&p9).unwrap().value + 6.0).abs() < 1e-12);
    assert!((det_zeta(&p9).unwrap().value - 9.0).abs() < 1e-12);
}

#[test]
fn dirichlet_interval_det_is_twice_length() {
    for &l in &[0.5, 1.0, 3.0] {
        let s = dirichlet_interval_spectrum(l, 1e4).unwrap();
        let d = det_zeta(&s).unwrap().value;
        assert!((d - 2.0 * l).abs() < 1e-9 * l, "L = {l}: {d}");
    }
}

#[test]
fn shifted_circle_det_matches_periodic_problem() {
    for &m in &[0.5f64, 1.0, 2.0] {
        let s = shift_spectrum(&circle_spectrum(1.0, 1e4).unwrap(), m * m).unwrap();
        let d = det_zeta(&s).unwrap().value;
        let exact = 4.0 * (m / 2.0).sinh().powi(2);
        let gy = gy_det_periodic(&Potential::Constant { value: 0.0 }, m * m, 0.0, 1.0)
            .unwrap()
            .value;
        assert!((d - exact).abs() < 1e-8 * exact, "m = {m}: {d} vs {exact}");
        assert!((gy - exact).abs() < 1e-10 * exact);
    }
    let s = shift_spectrum(&circle_spectrum(1.0, 1e4).unwrap(), 1.0).unwrap();
    assert!((det_zeta(&s).unwrap().value - 1.0861).abs() < 1e-4);
}

#[test]
fn xi_prime_matches_numeric_derivative_on_shifted_circle() {
    let s = shift_spectrum(&circle_spectrum(1.0, 1e4).unwrap(), 1.0).unwrap();
    let xi = xi_prime_zero(&s).unwrap().value;
    // ζ_Y has a pole at -1/2 here; ξ'(0) = -2C + (4 ln 2 - 4)R from the Laurent data
    let l = zeta_laurent(&s, -0.5).unwrap();
    assert!((l.residue - 1.0 / (4.0 * PI)).abs() < 1e-10);
    let laurent = -2.0 * l.finite + (4.0 * 2f64.ln() - 4.0) * l.residue;
    assert!((xi - laurent).abs() < 1e-8);
    let h = 1e-4;
    let numeric = (xi_at(&s, h).unwrap().value - xi_at(&s, -h).unwrap().value) / (2.0 * h);
    assert!((xi - numeric).abs() < 1e-6, "{xi} vs {numeric}");
}

#[test]
fn xi_prime_matches_numeric_derivative_when_regular() {
    for spec in [circle_spectrum(1.0, 1e4).unwrap(), torus_spectrum(1.0, 2e4).unwrap()] {
        let xi = xi_prime_zero(&spec).unwrap().value;
        let minus_two_zeta = -2.0 * zeta_at(&spec, -0.5).unwrap().value;
        assert!((xi - minus_two_zeta).abs() < 1e-9);
        let h = 1e-4;
        let numeric = (xi_at(&spec, h).unwrap().value - xi_at(&spec, -h).unwrap().value) / (2.0 * h);
        assert!((xi - numeric).abs() < 1e-6, "{xi} vs {numeric}");
    }
}

#[test]
fn torus_zeta_at_zero_is_minus_kernel() {
    let t = torus_spectrum(1.0, 2e4).unwrap();
    assert!((zeta_at(&t, 0.0).unwrap().value + 1.0).abs() < 1e-8);
}

#[test]
fn pole_is_a_domain_error() {
    let c = circle_spectrum(1.0, 1e4).unwrap();
    assert!(zeta_at(&c, 0.5).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn matches_direct_sum_at_large_s(length in 0.5f64..2.0, z in 0.0f64..3.0, torus in any::<bool>(), s in 3usize..=5) {
        let s = s as f64;
        let base = if torus { torus_spectrum(length, 2e3).unwrap() } else { circle_spectrum(length, 2e3).unwrap() };
        let spec = if z > 0.0 { shift_spectrum(&base, z).unwrap() } else { base };
        let v = zeta_at(&spec, s).unwrap().value;
        let d = direct_sum(length, torus, z, s);
        prop_assert!((v - d).abs() <= 1e-10 * d, "{v} vs {d}");
    }

    #[test]
    fn log_det_increases_with_shift(z in 0.05f64..4.0, dz in 0.05f64..1.0) {
        let c = circle_spectrum(1.0, 1e4).unwrap();
        let a = log_det_zeta(&shift_spectrum(&c, z).unwrap()).unwrap().value;
        let b = log_det_zeta(&shift_spectrum(&c, z + dz).unwrap()).unwrap().value;
        prop_assert!(b > a);
    }
}
