use std::f64::consts::{LN_2, PI};

use proptest::prelude::*;
use spectral_surgery::cylinder::BoundaryCondition;
use spectral_surgery::dtn::SMALL_LAMBDA_GRID;
use spectral_surgery::error::Error;
use spectral_surgery::oned_oracle::{bfk_1d_check, gy_det, Potential, SchrodingerProblem};
use spectral_surgery::relative_det::{relative_det, small_lambda_probe, PerModeRule, RelativePair};
use spectral_surgery::spectra::*;
use spectral_surgery::surgery::*;
use spectral_surgery::zeta_det::{xi_prime_zero, zeta_at};

use BoundaryCondition::{Dirichlet, Neumann};

const GRID: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

fn unit_circle() -> CrossSectionSpectrum {
    circle_spectrum(1.0, 1e4).unwrap()
}

fn two_caps(spec: CrossSectionSpectrum, b1: BoundaryCondition, b2: BoundaryCondition, r: f64, z: f64) -> SurgeryModel {
    SurgeryModel::new(spec, Cap::new(0.7, b1).unwrap(), Some(Cap::new(1.3, b2).unwrap()), r, z).unwrap()
}

fn one_cap(spec: CrossSectionSpectrum, a: f64, bc: BoundaryCondition, z: f64) -> SurgeryModel {
    SurgeryModel::new(spec, Cap::new(a, bc).unwrap(), None, 1.0, z).unwrap()
}

fn free_line(a: f64, b: f64, left: BoundaryCondition, right: BoundaryCondition, z: f64) -> SchrodingerProblem {
    SchrodingerProblem::new(Potential::Constant { value: 0.0 }, a, b, left, right, z).unwrap()
}

#[test]
fn gluing_identity_on_unit_circle() {
    let m = two_caps(unit_circle(), Dirichlet, Dirichlet, 1.0, 0.0);
    for &z in &[0.3, 1.0, 10.0] {
        let b = bfk_check(&m, z).unwrap();
        assert!((b.ratio - 1.0).abs() <= 1e-6, "z = {z}: {}", b.ratio);
        assert!(b.error < 1e-6);
        assert!((b.zeta0_plus - b.zeta0_minus).abs() < 1e-10);
    }
    assert!(bfk_check(&m, 0.0).is_err());
}

#[test]
fn gluing_identity_on_point_matches_one_dimensional_oracle() {
    let m = two_caps(point_spectrum(1).unwrap(), Dirichlet, Neumann, 1.0, 0.0);
    for &z in &[0.3, 2.0] {
        let b = bfk_check(&m, z).unwrap();
        assert!((b.ratio - 1.0).abs() <= 1e-6, "z = {z}: {}", b.ratio);
        let p = free_line(0.0, 0.7 + 2.0 + 1.3, Dirichlet, Neumann, z);
        let g = bfk_1d_check(&p, &[0.7, 2.7]).unwrap();
        assert!(
            (g.constant - 2f64.powf(-2.0 * b.zeta0_plus)).abs() < 1e-8,
            "{}",
            g.constant
        );
    }
}

#[test]
fn glued_det_matches_gelfand_yaglom_for_point_fibres() {
    for (b1, b2) in [(Dirichlet, Dirichlet), (Dirichlet, Neumann), (Neumann, Neumann)] {
        for &(r, z) in &[(0.5, 0.3), (1.0, 1.0), (3.0, 4.0)] {
            let m = two_caps(point_spectrum(1).unwrap(), b1, b2, r, z);
            let d = m.glued_det().unwrap().value;
            let g = gy_det(&free_line(0.0, 0.7 + 2.0 * r + 1.3, b1, b2, z)).unwrap().value;
            assert!((d - g).abs() <= 1e-6 * g, "{b1:?}/{b2:?}, r = {r}: {d} vs {g}");
            let neck = m.neck_det().unwrap().value;
            let k = z.sqrt();
            let exact = 2.0 * (2.0 * r * k).sinh() / k;
            assert!((neck - exact).abs() <= 1e-10 * exact);
        }
    }
}

#[test]
fn polynomial_examples() {
    let t = torus_spectrum(1.0, 2e4).unwrap();
    let p = polynomial_p(&t, 0.5).unwrap();
    assert_eq!(p.n, Some(3));
    assert!((p.value - LN_2 * 0.5 / (4.0 * PI)).abs() < 1e-12, "{}", p.value);
    assert!((p.value - 0.02758).abs() < 1e-5);

    let pt = polynomial_p(&point_spectrum(1).unwrap(), 0.7).unwrap();
    assert!((pt.value + LN_2).abs() < 1e-14);

    let c = polynomial_p(&unit_circle(), 0.4).unwrap();
    assert_eq!(c.n, Some(2));
    assert_eq!(c.value, 0.0);

    for spec in [t, point_spectrum(1).unwrap()] {
        let at0 = polynomial_p(&spec, 0.0).unwrap().from_heat;
        let z0 = zeta_at(&spec, 0.0).unwrap().value;
        assert!((at0 + LN_2 * (spec.h_y() as f64 + z0)).abs() < 1e-10);
    }
}

#[test]
fn dirichlet_cap_matches_translated_pair() {
    let z = 1.0;
    for &a in &[0.5, 1.0, 2.0] {
        let m = one_cap(unit_circle(), a, Dirichlet, z);
        let glued = relative_det_via_gluing(&m).unwrap();
        let y = m.cross_section().unwrap();
        let zeta = relative_det(&RelativePair::new(y.clone(), PerModeRule::Translate { a }).unwrap())
            .unwrap()
            .value;
        let xi = (-0.5 * a * xi_prime_zero(&y).unwrap().value).exp();
        assert!(
            (glued.value - zeta).abs() <= 1e-6 * zeta,
            "a = {a}: {} vs {zeta}",
            glued.value
        );
        assert!((glued.value - xi).abs() <= 1e-6 * xi);
        assert_eq!(glued.h_y, 0);
        assert_eq!(glued.det_a, 1.0);
    }
}

#[test]
fn neumann_cap_matches_small_lambda_extrapolation() {
    let m = one_cap(unit_circle(), 1.0, Neumann, 0.0);
    let glued = relative_det_via_gluing(&m).unwrap();
    assert_eq!(glued.h_y, 1);
    assert_eq!(glued.det_a, 1.0);
    let p = RelativePair::new(unit_circle(), PerModeRule::NeumannCap { a: 1.0 }).unwrap();
    let fit = small_lambda_probe(&p, &SMALL_LAMBDA_GRID).unwrap();
    assert!((fit.slope - 0.5).abs() < 0.02);
    assert!(
        (glued.log_value - fit.constant).abs() < 1e-3,
        "{} vs {}",
        glued.log_value,
        fit.constant
    );
    let zeta = relative_det(&p).unwrap().value;
    assert!((glued.value - zeta).abs() <= 1e-5 * zeta);
    assert!((glued.value_without_h - 2.0 * glued.value).abs() < 1e-12 * glued.value);
}

#[test]
fn degenerate_cap_tends_to_identity() {
    let values: Vec<f64> = [0.5, 0.25, 0.125]
        .iter()
        .map(|&a| {
            relative_det_via_gluing(&one_cap(unit_circle(), a, Dirichlet, 0.0))
                .unwrap()
                .value
        })
        .collect();
    let gaps: Vec<f64> = values.iter().map(|v| (v - 1.0).abs()).collect();
    assert!(gaps.windows(2).all(|w| w[1] < w[0]), "{values:?}");
    // each halving of a takes the square root: det = exp(-(a/2) ξ')
    for w in values.windows(2) {
        assert!((w[1] - w[0].sqrt()).abs() < 1e-8);
    }
}

#[test]
fn kernel_free_laws_converge() {
    let m = two_caps(unit_circle(), Dirichlet, Dirichlet, 1.0, 1.0);
    for law in [Law::GluedLimit, Law::SplitRatio, Law::CappedLimit, Law::CappedRatio] {
        let rep = adiabatic_experiment(law, &m, &GRID).unwrap();
        assert!(rep.pass, "{law:?}: {} vs {}", rep.limit_estimate, rep.predicted);
        assert!(rep.monotone, "{law:?}: {:?}", rep.deviations);
        assert_eq!(rep.rate_model, RateModel::Exponential);
        assert_eq!(rep.to_csv().lines().count(), GRID.len() + 1);
    }
    let split = adiabatic_experiment(Law::SplitRatio, &m, &GRID).unwrap();
    let det_y = (spectral_surgery::zeta_det::log_det_zeta(&m.cross_section().unwrap())
        .unwrap()
        .value)
        .exp();
    assert!((split.predicted - det_y.sqrt()).abs() < 1e-12 * split.predicted);
    assert!((split.values[3] - split.predicted).abs() <= 1e-6 * split.predicted);
}

#[test]
fn kernel_laws_converge() {
    let c = unit_circle();
    for (b1, b2) in [(Neumann, Neumann), (Neumann, Dirichlet), (Dirichlet, Dirichlet)] {
        let m = two_caps(c.clone(), b1, b2, 1.0, 0.0);
        for law in [
            Law::GluedLimitKernel,
            Law::SplitRatioKernel,
            Law::CappedLimitKernel,
            Law::CappedRatio,
        ] {
            let rep = adiabatic_experiment(law, &m, &GRID).unwrap();
            assert_eq!(rep.rate_model, RateModel::InversePower);
            assert!(
                rep.pass,
                "{law:?} {b1:?}/{b2:?}: {} vs {}",
                rep.limit_estimate, rep.predicted
            );
        }
    }
}

#[test]
fn invertible_without_kernel() {
    for spec in [shift_spectrum(&unit_circle(), 0.5).unwrap(), point_spectrum(1).unwrap()] {
        let z = if spec.h_y() == 0 { 0.0 } else { 0.2 };
        let m = two_caps(spec, Dirichlet, Dirichlet, 1.0, z);
        assert_eq!(m.cross_section().unwrap().h_y(), 0);
        for &r in &GRID {
            let d = m.with_r(r).unwrap().glued_det().unwrap();
            assert!(d.value > 0.0 && d.value.is_finite());
        }
    }
}

#[test]
fn constituent_counts() {
    let grid = [2.0, 4.0, 8.0, 16.0];
    let cases = [
        (Neumann, Neumann, 0, 1),
        (Neumann, Dirichlet, 1, 0),
        (Dirichlet, Dirichlet, 0, 0),
    ];
    for (b1, b2, h, h12) in cases {
        let m = two_caps(unit_circle(), b1, b2, 1.0, 0.0);
        let t = kernel_constituents(&m, &grid).unwrap();
        assert_eq!((t.h, t.h12), (h, h12), "{b1:?}/{b2:?}");
        assert_eq!(t.h_y, 1);
        assert!((t.det_s - 1.0).abs() < 1e-14);
        let s = &t.scaled_det_r;
        assert!(s.decreasing, "{b1:?}/{b2:?}: {:?}", s.errors);
        assert!((s.limit_estimate - s.predicted).abs() <= 1e-4 * s.predicted);
        assert_eq!(t.gram.is_some(), h12 > 0);
        if let Some(d) = t.kernel_diagonal_deviation {
            assert!(d < 1e-10);
        }
    }
}

#[test]
fn surface_constant_over_unit_circle() {
    let c = unit_circle();
    let m = two_caps(c.clone(), Neumann, Neumann, 1.0, 0.0);
    let s = surface_constant(&c, &m.involutions().unwrap()).unwrap();
    assert_eq!((s.h_y, s.h, s.h12, s.power), (1, 0, 1, 1));
    assert!((s.zeta0 + 1.0).abs() < 1e-12);
    assert!((s.det_y - 1.0).abs() < 1e-10);
    assert!((s.xi_prime - 2.0 * PI / 3.0).abs() < 1e-8);
    assert_eq!(s.det_half_id_minus_c12, 1.0);
    assert!((s.coefficient - 2.0).abs() < 1e-10);
    assert!((s.exponent_rate - UNIT_CIRCLE_RATE).abs() < 1e-8);
    let wrong = two_caps(torus_spectrum(1.0, 1e3).unwrap(), Neumann, Neumann, 1.0, 0.0)
        .involutions()
        .unwrap();
    let shifted = shift_spectrum(&c, 1.0).unwrap();
    assert!(surface_constant(&shifted, &wrong).is_err());
}

#[test]
fn unsupported_models() {
    let single = one_cap(unit_circle(), 1.0, Dirichlet, 1.0);
    for law in [
        Law::GluedLimit,
        Law::SplitRatio,
        Law::GluedLimitKernel,
        Law::SplitRatioKernel,
    ] {
        assert!(matches!(
            adiabatic_experiment(law, &single, &GRID),
            Err(Error::UnsupportedModel(_))
        ));
    }
    let kernel = two_caps(unit_circle(), Dirichlet, Dirichlet, 1.0, 0.0);
    for law in [Law::GluedLimit, Law::SplitRatio, Law::CappedLimit] {
        assert!(matches!(
            adiabatic_experiment(law, &kernel, &GRID),
            Err(Error::UnsupportedModel(_))
        ));
    }
    let shifted = kernel.with_z(1.0).unwrap();
    assert!(matches!(
        kernel_constituents(&shifted, &GRID),
        Err(Error::UnsupportedModel(_))
    ));
    assert!(adiabatic_experiment(Law::SplitRatio, &shifted, &[1.0, 2.0, 4.0]).is_err());
    assert!(adiabatic_experiment(Law::SplitRatio, &shifted, &[1.0, 4.0, 2.0, 8.0]).is_err());
    assert!(Cap::new(0.0, Dirichlet).is_err());
    assert!(SurgeryModel::new(unit_circle(), Cap::new(1.0, Dirichlet).unwrap(), None, 1.0, -1.0).is_err());
}

#[test]
fn law_names_round_trip() {
    assert_eq!(serde_json::to_string(&Law::SplitRatio).unwrap(), "\"split-ratio\"");
    for law in Law::ALL {
        let s = serde_json::to_string(&law).unwrap();
        assert_eq!(serde_json::from_str::<Law>(&s).unwrap(), law);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn gluing_identity_at_random_shift(z in 0.05f64..20.0, r in 0.3f64..3.0, neumann in any::<bool>()) {
        let b2 = if neumann { Neumann } else { Dirichlet };
        let m = two_caps(unit_circle(), Dirichlet, b2, r, 0.0);
        let b = bfk_check(&m, z).unwrap();
        prop_assert!((b.ratio - 1.0).abs() <= 1e-6, "{}", b.ratio);
    }

    #[test]
    fn three_routes_agree_for_point_fibres(z in 0.05f64..10.0, r in 0.2f64..3.0, neumann in any::<bool>()) {
        let b2 = if neumann { Neumann } else { Dirichlet };
        let m = two_caps(point_spectrum(1).unwrap(), Dirichlet, b2, r, z);
        let closed = m.glued_det().unwrap().value;
        let g = gy_det(&free_line(0.0, 0.7 + 2.0 * r + 1.3, Dirichlet, b2, z)).unwrap().value;
        prop_assert!((closed - g).abs() <= 1e-6 * g, "{closed} vs {g}");
        let b = bfk_check(&m, z).unwrap();
        let assembled = b.rhs * m.neck_det().unwrap().value * m.cap_det(1).unwrap().value * m.cap_det(2).unwrap().value;
        prop_assert!((assembled - g).abs() <= 1e-6 * g, "{assembled} vs {g}");
    }
}
