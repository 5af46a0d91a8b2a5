use std::f64::consts::PI;

use proptest::prelude::*;
use spectral_surgery::spectra::*;

/// `(1/√(4πt)) Σ_k exp(-ℓ²k²/(4t))·ℓ`: the Jacobi dual of the circle theta series.
fn jacobi_dual(length: f64, t: f64) -> f64 {
    let mut acc = 1.0;
    for k in 1..10_000_000 {
        let term = (-(length * length) * (k * k) as f64 / (4.0 * t)).exp();
        acc += 2.0 * term;
        if term < 1e-20 {
            break;
        }
    }
    length / (4.0 * PI * t).sqrt() * acc
}

/// `Σ_k exp(-(2πk/ℓ)² t)` summed directly.
fn direct_theta(length: f64, t: f64) -> f64 {
    let w = (2.0 * PI / length).powi(2);
    let mut acc = 1.0;
    for k in 1..100_000 {
        let term = (-w * (k * k) as f64 * t).exp();
        acc += 2.0 * term;
        if term < 1e-20 {
            break;
        }
    }
    acc
}

#[test]
fn circle_unit_cutoff_100() {
    let s = circle_spectrum(1.0, 100.0).unwrap();
    assert_eq!(s.h_y(), 1);
    let pos = s.positive_modes_up_to(100.0);
    assert!((pos[0].0 - 4.0 * PI * PI).abs() < 1e-12);
    assert!((pos[0].0 - 39.478).abs() < 1e-3);
    assert_eq!(pos[0].1, 2);
    assert_eq!(s.min_positive(), Some(pos[0].0));
}

#[test]
fn circle_two_pi_cutoff_10() {
    let s = circle_spectrum(2.0 * PI, 10.0).unwrap();
    let pos = s.positive_modes_up_to(10.0);
    assert_eq!(pos.len(), 3);
    for (k, (mu, m)) in pos.iter().enumerate() {
        assert!((mu - ((k + 1) * (k + 1)) as f64).abs() < 1e-12);
        assert_eq!(*m, 2);
    }
}

#[test]
fn circle_cutoff_below_first_mode() {
    let s = circle_spectrum(1.0, 10.0).unwrap();
    assert!(s.positive_modes_up_to(10.0).is_empty());
    assert_eq!(s.h_y(), 1);
}

#[test]
fn shift_examples() {
    let c = circle_spectrum(1.0, 1e4).unwrap();
    assert_eq!(shift_spectrum(&c, 0.0).unwrap(), c);
    let s = shift_spectrum(&c, 1.0).unwrap();
    assert_eq!(s.h_y(), 0);
    assert_eq!(s.entries()[0], (1.0, 1));
    let p = shift_spectrum(&point_spectrum(1).unwrap(), 4.0).unwrap();
    assert_eq!(p.entries(), &[(4.0, 1)]);
    assert_eq!(p.h_y(), 0);
    assert!(shift_spectrum(&c, -1.0).is_err());
}

#[test]
fn heat_trace_examples() {
    let c = circle_spectrum(1.0, 1e4).unwrap();
    assert!((c.heat_trace(10.0).unwrap() - 1.0).abs() < 1e-12);
    let expected = 1.0 + 2.0 * (-4.0 * PI * PI * 0.1f64).exp() + 2.0 * (-16.0 * PI * PI * 0.1f64).exp();
    assert!((c.heat_trace(0.1).unwrap() - expected).abs() < 1e-12);
    assert!((c.heat_trace(0.1).unwrap() - 1.03861).abs() < 5e-5);
}

#[test]
fn torus_multiplicities_count_lattice_points() {
    let t = torus_spectrum(1.0, 5.0 * (2.0 * PI).powi(2) + 1.0).unwrap();
    let mults: Vec<u64> = t.entries().iter().map(|e| e.1).collect();
    // N = 0, 1, 2, 4, 5 (3 is not a sum of two squares)
    assert_eq!(mults, vec![1, 4, 4, 4, 8]);
    assert_eq!(t.dimension(), Some(2));
}

#[test]
fn dirichlet_interval_has_no_kernel() {
    let s = dirichlet_interval_spectrum(2.0, 100.0).unwrap();
    assert_eq!(s.h_y(), 0);
    assert!((s.entries()[0].0 - (PI / 2.0).powi(2)).abs() < 1e-14);
}

#[test]
fn explicit_list_is_sorted_and_merged() {
    let s = explicit_spectrum(vec![(3.0, 1), (0.0, 2), (1.0, 1), (3.0, 2)], false).unwrap();
    assert_eq!(s.entries(), &[(0.0, 2), (1.0, 1), (3.0, 3)]);
    assert_eq!(s.h_y(), 2);
    assert!(explicit_spectrum(vec![(-1.0, 1)], false).is_err());
}

#[test]
fn json_round_trip_with_shift() {
    let s = shift_spectrum(&torus_spectrum(0.7, 2e3).unwrap(), 0.3).unwrap();
    let back = CrossSectionSpectrum::from_json(&s.to_json()).unwrap();
    assert_eq!(back, s);
    let text = serde_json::to_string(&s).unwrap();
    let back: CrossSectionSpectrum = serde_json::from_str(&text).unwrap();
    assert_eq!(back, s);
}

#[test]
fn json_rejects_unknown_fields_and_bad_kernel() {
    let v = serde_json::json!({"generator": "circle", "params": {"length": 1.0}, "extra": 1});
    assert!(CrossSectionSpectrum::from_json(&v).is_err());
    let v = serde_json::json!({"generator": "circle", "params": {"length": 1.0}, "h_Y": 2});
    assert!(CrossSectionSpectrum::from_json(&v).is_err());
}

proptest! {
    #[test]
    fn entries_strictly_ascending_nonnegative(length in 0.2f64..5.0, cutoff in 10.0f64..2e3, torus in any::<bool>()) {
        let s = if torus { torus_spectrum(length, cutoff).unwrap() } else { circle_spectrum(length, cutoff).unwrap() };
        let e = s.entries();
        prop_assert!(e.iter().all(|(mu, m)| *mu >= 0.0 && *m > 0));
        prop_assert!(e.windows(2).all(|w| w[0].0 < w[1].0));
        let zero: u64 = e.iter().filter(|x| x.0 == 0.0).map(|x| x.1).sum();
        prop_assert_eq!(s.h_y(), zero);
    }

    #[test]
    fn circle_heat_trace_satisfies_poisson_duality(length in 0.3f64..4.0, log_t in -3.0f64..3.0) {
        let t = 10f64.powf(log_t);
        let s = circle_spectrum(length, 1e4).unwrap();
        let v = s.heat_trace(t).unwrap();
        prop_assert!((v - jacobi_dual(length, t)).abs() <= 1e-12 * v.max(1.0));
        prop_assert!((v - direct_theta(length, t)).abs() <= 1e-12 * v.max(1.0));
    }

    #[test]
    fn shifts_compose_exactly(z1 in 0.0f64..5.0, z2 in 0.0f64..5.0) {
        let c = circle_spectrum(1.3, 500.0).unwrap();
        let once = shift_spectrum(&c, z1 + z2).unwrap();
        let twice = shift_spectrum(&shift_spectrum(&c, z1).unwrap(), z2).unwrap();
        prop_assert_eq!(once.entries(), twice.entries());
        prop_assert_eq!(once.h_y(), twice.h_y());
    }

    #[test]
    fn heat_trace_decreases_to_kernel_dimension(length in 0.3f64..3.0, t in 1e-3f64..5.0, dt in 1e-3f64..1.0) {
        let s = circle_spectrum(length, 1e4).unwrap();
        let a = s.heat_trace(t).unwrap();
        let b = s.heat_trace(t + dt).unwrap();
        prop_assert!(b < a || (a - 1.0).abs() < 1e-14);
        let far = s.heat_trace(1e3 * length * length).unwrap();
        prop_assert!((far - s.h_y() as f64).abs() < 1e-12);
    }
}
