use proptest::prelude::*;
use spectral_surgery::cylinder::BoundaryCondition;
use spectral_surgery::dtn::*;
use spectral_surgery::oned_oracle::{dtn_1d, fundamental_matrix, Potential, SchrodingerProblem};
use spectral_surgery::spectra::*;
use spectral_surgery::zeta_det::{log_det_zeta, zeta_at};

use BoundaryCondition::{Dirichlet, Neumann};

fn unit_circle() -> CrossSectionSpectrum {
    circle_spectrum(1.0, 1e4).unwrap()
}

fn shifted_circle() -> CrossSectionSpectrum {
    shift_spectrum(&unit_circle(), 1.0).unwrap()
}

fn neck(
    spec: &CrossSectionSpectrum,
    a1: f64,
    b1: BoundaryCondition,
    a2: f64,
    b2: BoundaryCondition,
    r: f64,
) -> BlockModeOperator {
    let c1 = cap_dtn(a1, b1, spec).unwrap();
    let c2 = cap_dtn(a2, b2, spec).unwrap();
    assemble_r_r(&assemble_r_infinity(&c1, &c2).unwrap(), r).unwrap()
}

/// Dirichlet-to-Neumann matrix of `-d²/du² + μ` on `[-r, r]` from the fundamental solutions.
fn interval_dtn(mu: f64, r: f64) -> [[f64; 2]; 2] {
    let f = fundamental_matrix(&Potential::Constant { value: 0.0 }, mu, -r, r, 1e-14).unwrap();
    let (y1, y2, y2p) = (f[0][0], f[0][1], f[1][1]);
    [[y1 / y2, -1.0 / y2], [-1.0 / y2, y2p / y2]]
}

#[test]
fn cap_zero_modes() {
    let c = unit_circle();
    assert_eq!(cap_dtn(0.5, Dirichlet, &c).unwrap().zero_mode_value(), 2.0);
    assert_eq!(cap_dtn(0.5, Neumann, &c).unwrap().zero_mode_value(), 0.0);
    assert!(cap_dtn(0.0, Dirichlet, &c).is_err());
    assert!(cap_dtn(-1.0, Neumann, &c).is_err());
}

#[test]
fn long_caps_approach_half_cylinder() {
    let c = unit_circle();
    for bc in [Dirichlet, Neumann] {
        let v = cap_dtn(40.0, bc, &c).unwrap().symbol(1.0);
        assert!((v - 1.0).abs() < 1e-14, "{bc:?}: {v}");
    }
}

#[test]
fn cap_symbols_match_ode_oracle() {
    // one-segment DtN at the inner end of [0, a] with the given outer condition
    let (a, mu) = (0.7f64, 2.3f64);
    for bc in [Dirichlet, Neumann] {
        let f = fundamental_matrix(&Potential::Constant { value: 0.0 }, mu, -a, 0.0, 1e-14).unwrap();
        // solution from the outer end: Dirichlet uses y2, Neumann uses y1
        let (u, up) = match bc {
            Dirichlet => (f[0][1], f[1][1]),
            Neumann => (f[0][0], f[1][0]),
        };
        let oracle = up / u;
        let v = cap_dtn(a, bc, &unit_circle()).unwrap().symbol(mu);
        assert!((v - oracle).abs() < 1e-10 * v, "{bc:?}: {v} vs {oracle}");
    }
}

#[test]
fn coupling_block_examples() {
    let op = neck(&unit_circle(), 0.7, Neumann, 1.3, Neumann, 1.0);
    let k = op.coupling_block(1.0);
    assert!((k[(0, 1)] + 1.0 / 2f64.sinh()).abs() < 1e-15);
    assert!((k[(0, 1)] + 0.27573).abs() < 1e-5);
    let z = neck(&unit_circle(), 0.7, Neumann, 1.3, Neumann, 0.5).coupling_block(0.0);
    assert_eq!(z, nalgebra::Matrix2::new(1.0, -1.0, -1.0, 1.0));
}

#[test]
fn coupling_matches_three_segment_transmission() {
    for &(mu, r) in &[(1.0, 1.0), (0.2, 0.4), (9.0, 0.3)] {
        let op = neck(&unit_circle(), 0.7, Dirichlet, 1.3, Dirichlet, r);
        let k = op.coupling_block(mu);
        let n = interval_dtn(mu, r);
        let sq = f64::sqrt(mu);
        assert!((k[(0, 0)] - (n[0][0] - sq)).abs() < 1e-9 * n[0][0], "{mu}, {r}");
        assert!((k[(1, 1)] - (n[1][1] - sq)).abs() < 1e-9 * n[1][1]);
        assert!((k[(0, 1)] - n[0][1]).abs() < 1e-9 * n[0][1].abs());
    }
}

#[test]
fn neck_correction_examples() {
    let l = assemble_l_r(&unit_circle(), 1.0).unwrap();
    assert_eq!(l.zero_mode_value(), 1.0);
    let v = l.symbol(1.0);
    assert!((v - (-1.0f64).exp() / 1f64.sinh()).abs() < 1e-15);
    assert!((v - 0.3130).abs() < 1e-4);
    let far = assemble_l_r(&unit_circle(), 40.0).unwrap();
    assert!(far.symbol(1.0) < 1e-30);
    assert!(far.zero_mode_value() <= 1.0 / 40.0);
}

#[test]
fn trace_norm_decreases() {
    let spec = shifted_circle();
    let n2 = neck(&spec, 0.7, Dirichlet, 1.3, Dirichlet, 2.0).coupling_trace_norm();
    let n4 = neck(&spec, 0.7, Dirichlet, 1.3, Dirichlet, 4.0).coupling_trace_norm();
    let n32 = neck(&spec, 0.7, Dirichlet, 1.3, Dirichlet, 32.0).coupling_trace_norm();
    assert!(n4 < n2 && n32 < n4);
    assert!(n32 < 1e-20);
}

#[test]
fn factorization_of_doubled_half_cylinder() {
    let spec = shifted_circle();
    let h = half_cylinder_dtn(&spec).unwrap();
    let two = h.plus(&h).unwrap();
    let d = det_zeta_mode(&two).unwrap();
    let z0 = zeta_at(&spec, 0.0).unwrap().value;
    let expected = z0 * 2f64.ln() + 0.5 * log_det_zeta(&spec).unwrap().value;
    assert!((d.log_value - expected).abs() < 1e-8, "{} vs {expected}", d.log_value);
}

#[test]
fn point_cross_section_reproduces_one_dimensional_transmission() {
    let (m, a1, a2, r) = (0.8f64, 0.6, 1.1, 0.45);
    let spec = shift_spectrum(&point_spectrum(1).unwrap(), m * m).unwrap();
    for (b1, b2) in [(Dirichlet, Dirichlet), (Neumann, Dirichlet), (Neumann, Neumann)] {
        let op = neck(&spec, a1, b1, a2, b2, r);
        let d = det_zeta_block(&op).unwrap().value;
        let p = SchrodingerProblem::new(
            Potential::Constant { value: 0.0 },
            0.0,
            a1 + 2.0 * r + a2,
            b1,
            b2,
            m * m,
        )
        .unwrap();
        let oracle = dtn_1d(&p, &[a1, a1 + 2.0 * r]).unwrap().determinant();
        assert!((d - oracle).abs() < 1e-10 * oracle, "{b1:?}/{b2:?}: {d} vs {oracle}");
    }
}

#[test]
fn neck_determinant_converges_to_product_of_caps() {
    let spec = shifted_circle();
    let c1 = cap_dtn(0.7, Neumann, &spec).unwrap();
    let c2 = cap_dtn(1.3, Dirichlet, &spec).unwrap();
    let limit = det_zeta_mode(&r_infinity(&c1).unwrap()).unwrap().log_value
        + det_zeta_mode(&r_infinity(&c2).unwrap()).unwrap().log_value;
    let inf = assemble_r_infinity(&c1, &c2).unwrap();
    assert!((det_zeta_block(&inf).unwrap().log_value - limit).abs() < 1e-10);
    let mut prev = f64::INFINITY;
    for &r in &[1.0, 2.0, 4.0, 8.0] {
        let d = det_zeta_block(&assemble_r_r(&inf, r).unwrap()).unwrap().log_value;
        let dev = (d - limit).abs();
        assert!(dev < prev, "r = {r}: {dev}");
        prev = dev;
    }
    assert!(prev < 1e-5);
}

#[test]
fn kernel_split_both_neumann() {
    let r = 0.8;
    let op = neck(&unit_circle(), 0.7, Neumann, 1.3, Neumann, r);
    let s = kernel_split(&op).unwrap();
    let q = 0.5 / r;
    assert_eq!(s.zero_block, [[q, -q], [-q, q]]);
    assert!(s.eigenvalues[0].abs() < 1e-15);
    assert!((s.eigenvalues[1] - 1.0 / r).abs() < 1e-14);
    assert_eq!(s.block_kernel, 1);
    assert_eq!(s.kernel_dim, 1);
    let v = [s.eigenvectors[0][0], s.eigenvectors[1][0]];
    assert!((v[0] - v[1]).abs() < 1e-14);
    assert!((s.log_det_restricted + r.ln()).abs() < 1e-14);
}

#[test]
fn kernel_split_mixed_and_dirichlet() {
    let (r, a2) = (0.8, 1.3);
    let s = kernel_split(&neck(&unit_circle(), 0.7, Neumann, a2, Dirichlet, r)).unwrap();
    assert_eq!(s.block_kernel, 0);
    assert!((s.log_det_restricted - (1.0 / (2.0 * r * a2)).ln()).abs() < 1e-13);
    let s = kernel_split(&neck(&unit_circle(), 0.7, Dirichlet, a2, Dirichlet, r)).unwrap();
    assert_eq!(s.block_kernel, 0);
    assert!(s.eigenvalues[0] > 0.0);
}

#[test]
fn small_lambda_exponents_of_caps() {
    let c = unit_circle();
    let n = cap_dtn(0.7, Neumann, &c).unwrap();
    let fit = detr_small_lambda_probe(&n, &SMALL_LAMBDA_GRID).unwrap();
    assert!((fit.slope - 0.5).abs() < 0.02, "{}", fit.slope);
    assert_eq!(fit.exponent, 0.5);
    let positive_part = det_zeta_mode(&r_infinity(&n).unwrap()).unwrap();
    assert_eq!(positive_part.kernel_dim, 1);
    assert!(
        (fit.constant - positive_part.log_value).abs() < 1e-3,
        "{} vs {}",
        fit.constant,
        positive_part.log_value
    );
    let d = cap_dtn(0.7, Dirichlet, &c).unwrap();
    let fit = detr_small_lambda_probe(&d, &SMALL_LAMBDA_GRID).unwrap();
    assert!(fit.slope.abs() < 0.02, "{}", fit.slope);
}

#[test]
fn fit_rejects_bad_grids() {
    assert!(fit_small_lambda(&[1e-3, 1e-4, 1e-5], &[0.0; 3]).is_err());
    assert!(fit_small_lambda(&[1e-3, 1e-4, 1e-5, 1e-5], &[0.0; 4]).is_err());
    assert!(fit_small_lambda(&[1e-3, 1e-4, 1e-6, 1e-7], &[0.0; 4]).is_err());
}

fn bc(neumann: bool) -> BoundaryCondition {
    if neumann {
        Neumann
    } else {
        Dirichlet
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn blocks_are_symmetric_and_swap_covariant(mu in 0.0f64..500.0, r in 0.1f64..4.0, a in 0.1f64..3.0, n1 in any::<bool>(), n2 in any::<bool>()) {
        let spec = unit_circle();
        let op = neck(&spec, a, bc(n1), a * 1.7, bc(n2), r);
        let b = op.block(mu);
        prop_assert_eq!(b[(0, 1)], b[(1, 0)]);
        let swapped = neck(&spec, a * 1.7, bc(n2), a, bc(n1), r).block(mu);
        prop_assert_eq!(b[(0, 0)], swapped[(1, 1)]);
        prop_assert_eq!(b[(0, 1)], swapped[(1, 0)]);
    }

    #[test]
    fn symbols_are_positive_with_square_root_asymptote(mu in 1e-6f64..1e3, a in 0.05f64..3.0, neumann in any::<bool>()) {
        let spec = unit_circle();
        let r = r_infinity(&cap_dtn(a, bc(neumann), &spec).unwrap()).unwrap();
        prop_assert!(r.symbol(mu) > 0.0);
        let big = 1e8;
        prop_assert!((r.symbol(big) / (2.0 * big.sqrt()) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn trace_norm_monotone(r in 0.2f64..6.0, dr in 0.05f64..3.0) {
        let spec = shifted_circle();
        let a = neck(&spec, 0.7, Dirichlet, 1.3, Neumann, r).coupling_trace_norm();
        let b = neck(&spec, 0.7, Dirichlet, 1.3, Neumann, r + dr).coupling_trace_norm();
        prop_assert!(b < a);
    }

    #[test]
    fn determinant_invariant_under_refactoring(split in 0usize..12, r in 0.3f64..3.0, n1 in any::<bool>(), n2 in any::<bool>()) {
        let op = neck(&shifted_circle(), 0.7, bc(n1), 1.3, bc(n2), r);
        let full = det_zeta_block(&op).unwrap().log_value;
        let moved = det_zeta_block_refactored(&op, split).unwrap().log_value;
        prop_assert!((full - moved).abs() <= 1e-8 * full.abs().max(1.0), "{full} vs {moved}");
    }
}
