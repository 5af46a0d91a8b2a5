//! Gluing identities and adiabatic limits on product models
//! `M_r = [0, a₁] × Y ∪ [-r, r] × Y ∪ [0, a₂] × Y`, where every constituent
//! determinant has a closed form and every Dirichlet-to-Neumann operator is
//! diagonal in the eigenbasis of `Δ_Y`.
//!
//! Scattering matrices at zero energy of the caps are `+Id` (Neumann outer end) and
//! `-Id` (Dirichlet outer end) on `ker Δ_Y`.

use std::f64::consts::{LN_2, PI};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::cylinder::{cylinder_det_bc, BoundaryCondition, DetValue};
use crate::dtn::{
    assemble_r_infinity, assemble_r_r, cap_dtn, det_zeta_block, det_zeta_mode, kernel_split, r_infinity, DtnDet,
    KernelSplit,
};
use crate::error::{invalid, Error, Result};
use crate::extrapolate::{linear_fit, loglog_slope, rational_extrapolate_to_zero};
use crate::scattering::{gram_a, gram_b_r, gram_det, product_model_g0, InvolutionPair};
use crate::spectra::{shift_spectrum, CrossSectionSpectrum};
use crate::zeta_det::{log_det_zeta, xi_prime_zero, zeta_at, zeta_zero_from_heat};

use BoundaryCondition::{Dirichlet, Neumann};

/// A cap `[0, length] × Y` with the given condition at its outer end.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cap {
    pub length: f64,
    pub outer_bc: BoundaryCondition,
}

impl Cap {
    pub fn new(length: f64, outer_bc: BoundaryCondition) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(invalid(format!("cap length must be positive, got {length}")));
        }
        Ok(Self { length, outer_bc })
    }

    /// Sign of the zero-energy scattering matrix on `ker Δ_Y`.
    pub fn scattering_sign(&self) -> f64 {
        match self.outer_bc {
            Dirichlet => -1.0,
            Neumann => 1.0,
        }
    }
}

/// Product model: one or two caps glued to the neck `[-r, r] × Y`, with spectral shift `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgeryModel {
    pub spectrum: CrossSectionSpectrum,
    pub cap1: Cap,
    #[serde(default)]
    pub cap2: Option<Cap>,
    pub r: f64,
    #[serde(default)]
    pub z: f64,
}

impl SurgeryModel {
    pub fn new(spectrum: CrossSectionSpectrum, cap1: Cap, cap2: Option<Cap>, r: f64, z: f64) -> Result<Self> {
        let m = Self {
            spectrum,
            cap1,
            cap2,
            r,
            z,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        Cap::new(self.cap1.length, self.cap1.outer_bc)?;
        if let Some(c) = self.cap2 {
            Cap::new(c.length, c.outer_bc)?;
        }
        if !(self.r > 0.0) || !self.r.is_finite() {
            return Err(invalid(format!("neck half-length must be positive, got {}", self.r)));
        }
        if !(self.z >= 0.0) || !self.z.is_finite() {
            return Err(invalid(format!("shift must be nonnegative, got {}", self.z)));
        }
        Ok(())
    }

    pub fn with_r(&self, r: f64) -> Result<Self> {
        Self::new(self.spectrum.clone(), self.cap1, self.cap2, r, self.z)
    }

    pub fn with_z(&self, z: f64) -> Result<Self> {
        Self::new(self.spectrum.clone(), self.cap1, self.cap2, self.r, z)
    }

    /// `Δ_Y + z`.
    pub fn cross_section(&self) -> Result<CrossSectionSpectrum> {
        shift_spectrum(&self.spectrum, self.z)
    }

    fn caps(&self) -> Result<(Cap, Cap)> {
        self.cap2
            .map(|c2| (self.cap1, c2))
            .ok_or_else(|| Error::UnsupportedModel("law needs a model with two caps".into()))
    }

    /// `det(Δ_{M_r} + z)` on `[0, a₁ + 2r + a₂] × Y`; `det'` when a kernel is present.
    pub fn glued_det(&self) -> Result<DetValue> {
        let (c1, c2) = self.caps()?;
        let y = self.cross_section()?;
        cylinder_det_bc(&y, c1.length + 2.0 * self.r + c2.length, c1.outer_bc, c2.outer_bc)
    }

    /// `det(Δ_{N_r,D} + z)` on the neck `[-r, r] × Y`.
    pub fn neck_det(&self) -> Result<DetValue> {
        cylinder_det_bc(&self.cross_section()?, 2.0 * self.r, Dirichlet, Dirichlet)
    }

    /// `det(Δ_{M_i,D} + z)`: cap `i` with Dirichlet condition on the glued end.
    pub fn cap_det(&self, i: usize) -> Result<DetValue> {
        let c = self.cap(i)?;
        cylinder_det_bc(&self.cross_section()?, c.length, c.outer_bc, Dirichlet)
    }

    /// `det(Δ_{M_{i,r},D} + z)`: cap `i` extended by `[0, r] × Y`, Dirichlet at the end.
    pub fn extended_cap_det(&self, i: usize) -> Result<DetValue> {
        let c = self.cap(i)?;
        cylinder_det_bc(&self.cross_section()?, c.length + self.r, c.outer_bc, Dirichlet)
    }

    /// `det(Δ_{Z_r,D} + z)` on `[0, r] × Y`.
    pub fn segment_det(&self) -> Result<DetValue> {
        cylinder_det_bc(&self.cross_section()?, self.r, Dirichlet, Dirichlet)
    }

    fn cap(&self, i: usize) -> Result<Cap> {
        match i {
            1 => Ok(self.cap1),
            2 => self
                .cap2
                .ok_or_else(|| Error::UnsupportedModel("model has a single cap".into())),
            _ => Err(invalid(format!("cap index must be 1 or 2, got {i}"))),
        }
    }

    /// `R_r(z) = R_∞(z) + K_r(z)` on `Y_{-r} ⊔ Y_r`.
    pub fn r_r(&self) -> Result<crate::dtn::BlockModeOperator> {
        let (c1, c2) = self.caps()?;
        let y = self.cross_section()?;
        let inf = assemble_r_infinity(
            &cap_dtn(c1.length, c1.outer_bc, &y)?,
            &cap_dtn(c2.length, c2.outer_bc, &y)?,
        )?;
        assemble_r_r(&inf, self.r)
    }

    /// `R_{i,∞}(z) = cap_i + √(Δ_Y + z)`.
    pub fn r_infinity(&self, i: usize) -> Result<crate::dtn::ModeOperator> {
        let c = self.cap(i)?;
        r_infinity(&cap_dtn(c.length, c.outer_bc, &self.cross_section()?)?)
    }

    /// Zero-energy scattering matrices of the two caps on `ker(Δ_Y + z)`.
    pub fn involutions(&self) -> Result<InvolutionPair> {
        let (c1, c2) = self.caps()?;
        let n = self.cross_section()?.h_y() as usize;
        let id = DMatrix::<f64>::identity(n, n);
        InvolutionPair::new(&id * c1.scattering_sign(), &id * c2.scattering_sign())
    }

    /// `h⁺ = dim V⁺` of cap `i`.
    pub fn h_plus(&self, i: usize) -> Result<u64> {
        let c = self.cap(i)?;
        let h = self.cross_section()?.h_y();
        Ok(if c.outer_bc == Neumann { h } else { 0 })
    }
}

/// `P(z)` of the gluing identity for a single hypersurface: `0` when `n = dim Y + 1`
/// is even, otherwise `-log 2` times the `t^0` heat coefficient of `Δ_Y + z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolynomialP {
    /// Dimension of the glued manifold, when the spectrum knows it.
    pub n: Option<usize>,
    pub z: f64,
    pub value: f64,
    /// `-log 2 · a_{t^0}(Δ_Y + z)`, whatever the parity.
    pub from_heat: f64,
}

pub fn polynomial_p(spec: &CrossSectionSpectrum, z: f64) -> Result<PolynomialP> {
    let n = spec.dimension().map(|d| d + 1);
    let from_heat = -LN_2 * spec.heat_t0_coefficient(z)?;
    let value = match n {
        Some(n) if n % 2 == 0 => 0.0,
        _ => from_heat,
    };
    Ok(PolynomialP { n, z, value, from_heat })
}

/// Both sides of the two-hypersurface gluing identity at shift `z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BfkCheck {
    pub z: f64,
    /// `det(Δ_{M_r}+z) / [det(Δ_{N_r,D}+z) det(Δ_{M_1,D}+z) det(Δ_{M_2,D}+z)]`.
    pub lhs: f64,
    /// `2^(-2ζ_Y(0,z)) det R_r(z)`.
    pub rhs: f64,
    pub ratio: f64,
    /// Relative error bound of `ratio` from the constituent bounds.
    pub error: f64,
    /// `ζ_Y(0, z)` of `Δ_Y + z`.
    pub zeta0_plus: f64,
    /// `ζ_Y(0, -z)` from the heat coefficients.
    pub zeta0_minus: f64,
    /// `lhs / (2^(-2ζ_Y(0,-z)) det R_r(z))`.
    pub ratio_minus: f64,
    pub det_r: f64,
}

/// Gluing identity on `M_r` at shift `z > 0`; the model's own shift is replaced by `z`.
pub fn bfk_check(m: &SurgeryModel, z: f64) -> Result<BfkCheck> {
    if !(z > 0.0) {
        return Err(invalid(format!("gluing check needs z > 0, got {z}")));
    }
    let m = m.with_z(z)?;
    let total = m.glued_det()?;
    let neck = m.neck_det()?;
    let d1 = m.cap_det(1)?;
    let d2 = m.cap_det(2)?;
    let log_lhs = total.log_value - neck.log_value - d1.log_value - d2.log_value;
    let r = det_zeta_block(&m.r_r()?)?;
    let y = m.cross_section()?;
    let zp = zeta_at(&y, 0.0)?;
    let zm = zeta_zero_from_heat(&m.spectrum, -z)?;
    let log_rhs = -2.0 * zp.value * LN_2 + r.log_value;
    let log_rhs_minus = -2.0 * zm * LN_2 + r.log_value;
    let error = total.rel_error + neck.rel_error + d1.rel_error + d2.rel_error + r.error + 2.0 * LN_2 * zp.error;
    Ok(BfkCheck {
        z,
        lhs: log_lhs.exp(),
        rhs: log_rhs.exp(),
        ratio: (log_lhs - log_rhs).exp(),
        error,
        zeta0_plus: zp.value,
        zeta0_minus: zm,
        ratio_minus: (log_lhs - log_rhs_minus).exp(),
        det_r: r.value,
    })
}

/// Relative determinant of a capped half-cylinder against the Dirichlet half-cylinder,
/// assembled from the gluing formula.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GluedRelativeDet {
    /// `2^(-ζ_Y(0)-h_Y) det'R / det A · det Δ_{M,D}`.
    pub value: f64,
    pub log_value: f64,
    pub error: f64,
    /// Same with the constant `2^(-ζ_Y(0))`.
    pub value_without_h: f64,
    pub zeta0: f64,
    pub h_y: u64,
    pub det_r: DtnDet,
    pub det_a: f64,
    pub det_cap: DetValue,
}

/// Gluing assembly of the relative determinant of the single cap `m.cap1` at the model's shift.
pub fn relative_det_via_gluing(m: &SurgeryModel) -> Result<GluedRelativeDet> {
    let y = m.cross_section()?;
    let r = det_zeta_mode(&m.r_infinity(1)?)?;
    // the extended solutions in ker R are the constant sections, with orthonormal traces
    let traces: Vec<DVector<f64>> = (0..r.kernel_dim as usize)
        .map(|i| DVector::from_fn(y.h_y() as usize, |j, _| if i == j { 1.0 } else { 0.0 }))
        .collect();
    let det_a = gram_det(&gram_a(&traces)?);
    let det_cap = m.cap_det(1)?;
    let zeta0 = zeta_at(&y, 0.0)?;
    let h = y.h_y();
    let base = r.log_value - det_a.ln() + det_cap.log_value;
    let log = -(zeta0.value + h as f64) * LN_2 + base;
    let error = r.error + det_cap.rel_error + LN_2 * zeta0.error;
    Ok(GluedRelativeDet {
        value: log.exp(),
        log_value: log,
        error,
        value_without_h: (-zeta0.value * LN_2 + base).exp(),
        zeta0: zeta0.value,
        h_y: h,
        det_r: r,
        det_a,
        det_cap,
    })
}

/// Adiabatic laws checked on product models.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    /// `e^(rξ') det Δ_{M_r} → (det Δ_Y)^(-1/2) Π det(Δ_{i,∞}, Δ₀)`, no kernel.
    GluedLimit,
    /// `det Δ_{M_r} / (det Δ_{M_{1,r},D} det Δ_{M_{2,r},D}) → (det Δ_Y)^(1/2)`, no kernel.
    SplitRatio,
    /// `e^(rξ'/2) det Δ_{X_r,D} → (det Δ_Y)^(-1/2) det(Δ_∞, Δ₀)`, no kernel.
    CappedLimit,
    /// `r^(h⁺-h_Y) e^(rξ'/2) det Δ_{X_r,D} → 2^h_Y (det Δ_Y)^(-1/2) det(Δ_∞, Δ₀)`.
    CappedLimitKernel,
    /// `r^h⁺ det Δ_{X_r,D} / det Δ_{Z_r,D} → det(Δ_∞, Δ₀)`.
    CappedRatio,
    /// `r^(h-h_Y) e^(rξ') det Δ_{M_r} → 2^(2h_Y-h) (det Δ_Y)^(-1/2) det((Id-C₁₂)/2) Π det(Δ_{i,∞}, Δ₀)`.
    GluedLimitKernel,
    /// `r^(h_Y-2h₁₂) det Δ_{M_r} / (det Δ_{M_{1,r},D} det Δ_{M_{2,r},D}) → 2^(-h) (det Δ_Y)^(1/2) det((Id-C₁₂)/2)`.
    SplitRatioKernel,
}

impl Law {
    pub const ALL: [Law; 7] = [
        Law::GluedLimit,
        Law::SplitRatio,
        Law::CappedLimit,
        Law::CappedLimitKernel,
        Law::CappedRatio,
        Law::GluedLimitKernel,
        Law::SplitRatioKernel,
    ];

    fn needs_two_caps(self) -> bool {
        matches!(
            self,
            Law::GluedLimit | Law::SplitRatio | Law::GluedLimitKernel | Law::SplitRatioKernel
        )
    }

    fn kernel_free_only(self) -> bool {
        matches!(self, Law::GluedLimit | Law::SplitRatio | Law::CappedLimit)
    }
}

/// Convergence model of a scaled quantity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateModel {
    /// `O(e^(-cr))`: the last grid value is the estimate.
    Exponential,
    /// Rational in `1/r`: Bulirsch–Stoer extrapolation to `1/r = 0`.
    InversePower,
}

/// Result of one adiabatic experiment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticReport {
    pub law: Law,
    pub model: SurgeryModel,
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub limit_estimate: f64,
    pub limit_error: f64,
    pub predicted: f64,
    pub rate_model: RateModel,
    /// Fitted decay of `|value - predicted|`: per unit `r` (exponential) or in `log r` (power).
    pub rate: Option<f64>,
    /// `|value - predicted| / |predicted|` along the grid.
    pub deviations: Vec<f64>,
    /// Deviations never increase beyond the rounding floor.
    pub monotone: bool,
    pub tolerance: f64,
    pub pass: bool,
}

impl AdiabaticReport {
    /// `r,value` rows with a header.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("r,value\n");
        for (r, v) in self.grid.iter().zip(&self.values) {
            s.push_str(&format!("{r},{v:.17e}\n"));
        }
        s
    }
}

/// Relative rounding floor for deviation monotonicity.
pub const DEVIATION_FLOOR: f64 = 1e-13;

/// Scaled quantity of `law` at the model's `r`, in logarithmic form.
pub fn law_log_value(law: Law, m: &SurgeryModel) -> Result<f64> {
    let y = m.cross_section()?;
    let h_y = y.h_y() as f64;
    let r = m.r;
    let xi = xi_prime_zero(&y)?.value;
    Ok(match law {
        Law::GluedLimit => r * xi + m.glued_det()?.log_value,
        Law::SplitRatio => {
            m.glued_det()?.log_value - m.extended_cap_det(1)?.log_value - m.extended_cap_det(2)?.log_value
        }
        Law::CappedLimit => 0.5 * r * xi + m.extended_cap_det(1)?.log_value,
        Law::CappedLimitKernel => {
            let hp = m.h_plus(1)? as f64;
            (hp - h_y) * r.ln() + 0.5 * r * xi + m.extended_cap_det(1)?.log_value
        }
        Law::CappedRatio => {
            let hp = m.h_plus(1)? as f64;
            hp * r.ln() + m.extended_cap_det(1)?.log_value - m.segment_det()?.log_value
        }
        Law::GluedLimitKernel => {
            let h = m.involutions()?.h() as f64;
            (h - h_y) * r.ln() + r * xi + m.glued_det()?.log_value
        }
        Law::SplitRatioKernel => {
            let h12 = m.involutions()?.h12() as f64;
            (h_y - 2.0 * h12) * r.ln() + m.glued_det()?.log_value
                - m.extended_cap_det(1)?.log_value
                - m.extended_cap_det(2)?.log_value
        }
    })
}

/// Right-hand side of `law` from the cross-section data, the scattering data and the
/// relative determinants of [`relative_det_via_gluing`].
pub fn law_predicted_log(law: Law, m: &SurgeryModel) -> Result<f64> {
    let y = m.cross_section()?;
    let h_y = y.h_y() as f64;
    let ld = log_det_zeta(&y)?.value;
    let rel = |i: usize| -> Result<f64> {
        let c = m.cap(i)?;
        let single = SurgeryModel::new(m.spectrum.clone(), c, None, m.r, m.z)?;
        Ok(relative_det_via_gluing(&single)?.log_value)
    };
    let pair = |m: &SurgeryModel| -> Result<(f64, f64)> {
        let p = m.involutions()?;
        Ok((p.h() as f64, p.det_half_id_minus_c12()))
    };
    Ok(match law {
        Law::GluedLimit => -0.5 * ld + rel(1)? + rel(2)?,
        Law::SplitRatio => 0.5 * ld,
        Law::CappedLimit => -0.5 * ld + rel(1)?,
        Law::CappedLimitKernel => h_y * LN_2 - 0.5 * ld + rel(1)?,
        Law::CappedRatio => rel(1)?,
        Law::GluedLimitKernel => {
            let (h, d) = pair(m)?;
            (2.0 * h_y - h) * LN_2 - 0.5 * ld + d.ln() + rel(1)? + rel(2)?
        }
        Law::SplitRatioKernel => {
            let (h, d) = pair(m)?;
            -h * LN_2 + 0.5 * ld + d.ln()
        }
    })
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.len() < 4 {
        return Err(invalid("r grid needs at least four points"));
    }
    if grid.iter().any(|r| !(*r > 0.0) || !r.is_finite()) || grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("r grid must be positive and strictly increasing"));
    }
    Ok(())
}

/// Evaluates the scaled quantity of `law` along `r_grid`, extrapolates and compares
/// with the predicted limit. Tolerance: `1e-6` relative for exponential convergence,
/// `1e-5` for extrapolation in `1/r`.
pub fn adiabatic_experiment(law: Law, m: &SurgeryModel, r_grid: &[f64]) -> Result<AdiabaticReport> {
    check_grid(r_grid)?;
    if law.needs_two_caps() && m.cap2.is_none() {
        return Err(Error::UnsupportedModel(format!("{law:?} needs a model with two caps")));
    }
    let h_y = m.cross_section()?.h_y();
    if law.kernel_free_only() && h_y > 0 {
        return Err(Error::UnsupportedModel(format!(
            "{law:?} needs ker Δ_Y = 0; use the kernel variant of the law"
        )));
    }
    let values: Vec<f64> = r_grid
        .iter()
        .map(|&r| Ok(law_log_value(law, &m.with_r(r)?)?.exp()))
        .collect::<Result<_>>()?;
    let predicted = law_predicted_log(law, m)?.exp();
    let rate_model = if h_y == 0 {
        RateModel::Exponential
    } else {
        RateModel::InversePower
    };
    let n = values.len();
    let (limit_estimate, limit_error) = match rate_model {
        RateModel::Exponential => (values[n - 1], (values[n - 1] - values[n - 2]).abs()),
        RateModel::InversePower => {
            let x: Vec<f64> = r_grid.iter().map(|r| 1.0 / r).collect();
            rational_extrapolate_to_zero(&x, &values)?
        }
    };
    let deviations: Vec<f64> = values.iter().map(|v| (v - predicted).abs() / predicted.abs()).collect();
    let monotone = deviations.windows(2).all(|w| w[1] <= w[0].max(DEVIATION_FLOOR));
    let usable: Vec<(f64, f64)> = r_grid
        .iter()
        .zip(&deviations)
        .filter(|(_, d)| **d > DEVIATION_FLOOR)
        .map(|(r, d)| (*r, *d))
        .collect();
    let rate = if usable.len() >= 2 {
        let (rs, ds): (Vec<f64>, Vec<f64>) = usable.into_iter().unzip();
        match rate_model {
            RateModel::Exponential => {
                let ld: Vec<f64> = ds.iter().map(|d| d.ln()).collect();
                Some(-linear_fit(&rs, &ld)?.0)
            }
            RateModel::InversePower => Some(-loglog_slope(&rs, &ds)?),
        }
    } else {
        None
    };
    let tolerance = match rate_model {
        RateModel::Exponential => 1e-6,
        RateModel::InversePower => 1e-5,
    };
    let pass = (limit_estimate - predicted).abs() <= tolerance * predicted.abs();
    Ok(AdiabaticReport {
        law,
        model: m.clone(),
        grid: r_grid.to_vec(),
        values,
        limit_estimate,
        limit_error,
        predicted,
        rate_model,
        rate,
        deviations,
        monotone,
        tolerance,
        pass,
    })
}

/// Scaled `det R_r` along a grid against its predicted limit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledDetR {
    pub grid: Vec<f64>,
    /// `r^(h+h₁₂) det' R_r`.
    pub values: Vec<f64>,
    /// `2^(-h) det S det' R_{1,∞} det' R_{2,∞}`.
    pub predicted: f64,
    /// Rational extrapolation of `values` to `1/r = 0`.
    pub limit_estimate: f64,
    pub limit_error: f64,
    pub errors: Vec<f64>,
    pub decreasing: bool,
}

/// Grid of the synthetic Gram-matrix fit, far enough out for the leading `1/r` term
/// to dominate.
pub const GRAM_GRID: [f64; 4] = [1e1, 1e2, 1e3, 1e4];

/// Synthetic `r^q det B_r - 1` decay.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GramDecay {
    pub q: usize,
    pub grid: Vec<f64>,
    pub deviations: Vec<f64>,
    /// Log-log slope of the deviations; `-1` expected.
    pub slope: f64,
}

/// Constituents of the kernel-case gluing limit on a two-cap model at `z = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KernelConstituents {
    pub h_y: u64,
    pub h: usize,
    pub h12: usize,
    pub det_s: f64,
    pub det_half_id_minus_c12: f64,
    pub scaled_det_r: ScaledDetR,
    /// Kernel split of `R_r` at the last grid point.
    pub kernel: Option<KernelSplit>,
    /// Distance of the kernel eigenvector of the zero block from `(1, 1)/√2`, if the
    /// block has a kernel.
    pub kernel_diagonal_deviation: Option<f64>,
    pub gram: Option<GramDecay>,
}

/// `r^(h+h₁₂) det' R_r → 2^(-h) det S det' R_{1,∞} det' R_{2,∞}`, the diagonal kernel of
/// the zero block, and the synthetic Gram-matrix decay with `q = h₁₂` on [`GRAM_GRID`].
pub fn kernel_constituents(m: &SurgeryModel, r_grid: &[f64]) -> Result<KernelConstituents> {
    check_grid(r_grid)?;
    if m.z != 0.0 {
        return Err(Error::UnsupportedModel(
            "kernel constituents are defined at z = 0".into(),
        ));
    }
    let (c1, c2) = m.caps()?;
    let pair = m.involutions()?;
    let (h, h12) = (pair.h(), pair.h12());
    let det_s = pair.det_s_block();
    let det_half = pair.det_half_id_minus_c12();
    let r1 = det_zeta_mode(&m.r_infinity(1)?)?;
    let r2 = det_zeta_mode(&m.r_infinity(2)?)?;
    let predicted = (-(h as f64) * LN_2 + det_s.ln() + r1.log_value + r2.log_value).exp();
    let mut values = Vec::with_capacity(r_grid.len());
    let mut kernel = None;
    for &r in r_grid {
        let op = m.with_r(r)?.r_r()?;
        let d = det_zeta_block(&op)?;
        values.push(((h + h12) as f64 * r.ln() + d.log_value).exp());
        if m.spectrum.h_y() > 0 {
            kernel = Some(kernel_split(&op)?);
        }
    }
    let x: Vec<f64> = r_grid.iter().map(|r| 1.0 / r).collect();
    let (limit_estimate, limit_error) = rational_extrapolate_to_zero(&x, &values)?;
    let errors: Vec<f64> = values.iter().map(|v| (v - predicted).abs() / predicted).collect();
    let decreasing = errors.windows(2).all(|w| w[1] <= w[0].max(DEVIATION_FLOOR));
    let kernel_diagonal_deviation = kernel.as_ref().and_then(|k| {
        (k.block_kernel == 1).then(|| {
            let v = [k.eigenvectors[0][0], k.eigenvectors[1][0]];
            let s = 1.0 / 2f64.sqrt();
            let sign = if v[0] + v[1] >= 0.0 { 1.0 } else { -1.0 };
            ((sign * v[0] - s).powi(2) + (sign * v[1] - s).powi(2)).sqrt()
        })
    });
    let gram = if h12 > 0 {
        let g0 = product_model_g0(h12, c1.length, c2.length);
        let deviations: Vec<f64> = GRAM_GRID
            .iter()
            .map(|&r| Ok((r.powi(h12 as i32) * gram_b_r(&g0, r)?.determinant() - 1.0).abs()))
            .collect::<Result<_>>()?;
        let slope = loglog_slope(&GRAM_GRID, &deviations)?;
        Some(GramDecay {
            q: h12,
            grid: GRAM_GRID.to_vec(),
            deviations,
            slope,
        })
    } else {
        None
    };
    Ok(KernelConstituents {
        h_y: m.spectrum.h_y(),
        h,
        h12,
        det_s,
        det_half_id_minus_c12: det_half,
        scaled_det_r: ScaledDetR {
            grid: r_grid.to_vec(),
            values,
            predicted,
            limit_estimate,
            limit_error,
            errors,
            decreasing,
        },
        kernel,
        kernel_diagonal_deviation,
        gram,
    })
}

/// Constant structure of the closed-surface limit `det Δ_{M_L} ~ c L^p e^(-κL) Π det(Δ_{i,∞}, Δ₀)`
/// with neck length `L = 2r`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SurfaceConstant {
    pub h_y: u64,
    pub h: usize,
    pub h12: usize,
    pub zeta0: f64,
    pub det_y: f64,
    pub xi_prime: f64,
    pub det_half_id_minus_c12: f64,
    /// `p = h_Y - h`.
    pub power: i64,
    /// `κ = ξ_Y'(0)/2`.
    pub exponent_rate: f64,
    /// `c = 2^(-(h_Y-h)) 2^(2h_Y-h) (det Δ_Y)^(-1/2) det((Id-C₁₂)/2)`.
    pub coefficient: f64,
}

/// Assembles the constant for a two-cap model whose caps have the given zero-energy
/// scattering data, from numerically computed cross-section invariants.
pub fn surface_constant(spec: &CrossSectionSpectrum, pair: &InvolutionPair) -> Result<SurfaceConstant> {
    if pair.dim() as u64 != spec.h_y() {
        return Err(invalid("involutions must act on ker Δ_Y"));
    }
    let zeta0 = zeta_at(spec, 0.0)?.value;
    let det_y = log_det_zeta(spec)?.value.exp();
    let xi_prime = xi_prime_zero(spec)?.value;
    let (h, h12) = (pair.h(), pair.h12());
    let d = pair.det_half_id_minus_c12();
    let h_y = spec.h_y();
    let p = h_y as i64 - h as i64;
    let coefficient = 2f64.powi(-(p as i32)) * 2f64.powi(2 * h_y as i32 - h as i32) * det_y.powf(-0.5) * d;
    Ok(SurfaceConstant {
        h_y,
        h,
        h12,
        zeta0,
        det_y,
        xi_prime,
        det_half_id_minus_c12: d,
        power: p,
        exponent_rate: 0.5 * xi_prime,
        coefficient,
    })
}

/// `κ` for the unit circle: `ξ_Y'(0)/2 = π/3`.
pub const UNIT_CIRCLE_RATE: f64 = PI / 3.0;
