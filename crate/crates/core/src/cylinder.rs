//! Determinants of the Dirichlet Laplacian `-∂²_u + Δ_Y` on finite cylinders
//! `[0, r] × Y`: the closed form
//! `(2r)^h_Y · exp(-r ξ_Y'(0)/2) · (det Δ_Y)^(-1/2) · Π_{μ>0} (1 - exp(-2r√μ))`
//! and an independent direct evaluation of `ζ'(0)` from the Poisson-summed
//! product spectrum `μ + (πk/r)²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::special_fn::{gamma, incomplete_bessel, riemann_zeta_with_deriv};
use crate::spectra::CrossSectionSpectrum;
use crate::zeta_det::{log_det_zeta, xi_prime_zero, zeta_at, zeta_prime_zero, ZetaValue};

/// Dirichlet cylinder `[0, length] × Y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylinderModel {
    pub spectrum: CrossSectionSpectrum,
    pub length: f64,
}

impl CylinderModel {
    pub fn new(spectrum: CrossSectionSpectrum, length: f64) -> Result<Self> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(invalid(format!("cylinder length must be positive, got {length}")));
        }
        Ok(Self { spectrum, length })
    }
}

/// Boundary condition at one end of an interval or cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryCondition {
    Dirichlet,
    Neumann,
}

/// Exponent convention for the `ξ_Y'(0)` factor.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum XiConvention {
    /// `exp(-r ξ_Y'(0)/2)`.
    Half,
    /// `exp(-r ξ_Y'(0))`.
    Full,
}

/// A determinant together with its logarithm and a relative error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetValue {
    pub value: f64,
    pub log_value: f64,
    pub rel_error: f64,
}

impl DetValue {
    pub fn from_log(log_value: f64, abs_log_error: f64) -> Self {
        Self {
            value: log_value.exp(),
            log_value,
            rel_error: abs_log_error,
        }
    }
}

fn mode_window(length: f64, decay: f64) -> f64 {
    (decay / (2.0 * length)).powi(2)
}

/// `Σ_{μ>0} mult·ln(1 + sign·exp(-2L√μ))` with a tail estimate from a wider window.
pub fn log_mode_product(spec: &CrossSectionSpectrum, length: f64, sign: f64) -> Result<ZetaValue> {
    if !(length > 0.0) {
        return Err(invalid(format!("length must be positive, got {length}")));
    }
    let sum = |max: f64| -> f64 {
        spec.positive_modes_up_to(max)
            .iter()
            .map(|(mu, m)| *m as f64 * (sign * (-2.0 * length * mu.sqrt()).exp()).ln_1p())
            .sum()
    };
    let inner = sum(mode_window(length, 48.0));
    let outer = sum(mode_window(length, 80.0));
    Ok(ZetaValue {
        value: outer,
        error: (outer - inner).abs() + 1e-16 * outer.abs(),
    })
}

/// `T(0) = -Σ_{μ>0} mult·ln(1 - exp(-2r√μ))`.
pub fn t0_log_product(spec: &CrossSectionSpectrum, r: f64) -> Result<ZetaValue> {
    let p = log_mode_product(spec, r, -1.0)?;
    Ok(ZetaValue {
        value: -p.value,
        error: p.error,
    })
}

/// `T(0) = (r/√π) Σ_{μ>0} Σ_{k≥1} mult·K_{-1/2}(√μ, rk)` with each `K` by quadrature.
pub fn t0_bessel_series(spec: &CrossSectionSpectrum, r: f64) -> Result<ZetaValue> {
    if !(r > 0.0) {
        return Err(invalid(format!("length must be positive, got {r}")));
    }
    let pre = r / PI.sqrt();
    let mut value = 0.0;
    let mut error = 0.0;
    for (mu, m) in spec.positive_modes_up_to(mode_window(r, 48.0)) {
        let a = mu.sqrt();
        let mut k = 1.0;
        loop {
            let b = r * k;
            // K_{-1/2}(a,b) ≤ √π/b · exp(-2ab) bounds the remaining terms geometrically
            if (-2.0 * a * b).exp() < 1e-22 {
                let q = (-2.0 * a * r).exp();
                error += pre * m as f64 * PI.sqrt() / b * (-2.0 * a * b).exp() / (1.0 - q);
                break;
            }
            let kv = incomplete_bessel(-0.5, a, b)?;
            value += pre * m as f64 * kv.value;
            error += pre * m as f64 * kv.abs_error_bound;
            k += 1.0;
        }
    }
    Ok(ZetaValue { value, error })
}

/// Closed-form Dirichlet cylinder determinant with the `ξ_Y'(0)/2` exponent.
pub fn cylinder_det_closed(m: &CylinderModel) -> Result<DetValue> {
    cylinder_det_closed_with(m, XiConvention::Half)
}

/// Closed-form Dirichlet cylinder determinant with an explicit exponent convention.
pub fn cylinder_det_closed_with(m: &CylinderModel, conv: XiConvention) -> Result<DetValue> {
    let r = m.length;
    let h = m.spectrum.h_y() as f64;
    let xi = xi_prime_zero(&m.spectrum)?;
    let ld = log_det_zeta(&m.spectrum)?;
    let prod = log_mode_product(&m.spectrum, r, -1.0)?;
    let factor = match conv {
        XiConvention::Half => 0.5,
        XiConvention::Full => 1.0,
    };
    let log = h * (2.0 * r).ln() - factor * r * xi.value - 0.5 * ld.value + prod.value;
    let err = factor * r * xi.error + 0.5 * ld.error + prod.error + 1e-15 * log.abs();
    Ok(DetValue::from_log(log, err))
}

/// Pieces of the direct evaluation of `ζ'(0)` for the Dirichlet cylinder.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DirectBreakdown {
    /// `d/ds [h_Y (π/r)^(-2s) ζ(2s)]` at 0.
    pub zero_mode: f64,
    /// `T(0)` from the `K_{-1/2}` series.
    pub t0: f64,
    /// Derivative at 0 of `(r/(2√π)) Γ(s-1/2) ζ_Y(s-1/2) / Γ(s)`, by central differences.
    pub middle: f64,
    /// `-ζ_Y'(0)/2`.
    pub half_zeta_y: f64,
    /// `ζ'(0)` of the cylinder.
    pub zeta_prime: f64,
    pub det: DetValue,
}

/// Direct evaluation of the Dirichlet cylinder determinant from the product spectrum.
pub fn cylinder_det_direct(m: &CylinderModel) -> Result<DirectBreakdown> {
    let r = m.length;
    let spec = &m.spectrum;
    let h = spec.h_y() as f64;
    let (z0, dz0) = riemann_zeta_with_deriv(0.0)?;
    let zero_mode = h * (-2.0 * (PI / r).ln() * z0 + 2.0 * dz0);
    let t0 = t0_bessel_series(spec, r)?;
    let pre = r / (2.0 * PI.sqrt());
    let g = |s: f64| -> Result<f64> {
        let z = zeta_at(spec, s - 0.5)?;
        Ok(pre * gamma(s - 0.5)? * z.value / gamma(s)?)
    };
    let step = 1e-3;
    let d1 = (g(step)? - g(-step)?) / (2.0 * step);
    let d2 = (g(2.0 * step)? - g(-2.0 * step)?) / (4.0 * step);
    let middle = (4.0 * d1 - d2) / 3.0;
    let zy = zeta_prime_zero(spec)?;
    let half_zeta_y = -0.5 * zy.value;
    let zeta_prime = zero_mode + t0.value + middle + half_zeta_y;
    let err = t0.error + (d1 - d2).abs() * 1e-3 + 0.5 * zy.error + 1e-13 * (1.0 + middle.abs());
    Ok(DirectBreakdown {
        zero_mode,
        t0: t0.value,
        middle,
        half_zeta_y,
        zeta_prime,
        det: DetValue::from_log(-zeta_prime, err),
    })
}

/// Determinant of `-∂²_u + Δ_Y` on `[0, length] × Y` with the given end conditions.
/// With Neumann at both ends and `h_Y > 0` this is the determinant with the kernel
/// (constants along `u` times `ker Δ_Y`) removed.
///
/// * DD: `(2L)^h · exp(-Lξ'/2) · D^(-1/2) · Π(1 - q)`
/// * DN, ND: `2^h · exp(-Lξ'/2) · Π(1 + q)`
/// * NN: `(2L)^h · exp(-Lξ'/2) · D^(1/2) · Π(1 - q)`
///
/// with `D = det Δ_Y`, `q = exp(-2L√μ)`.
pub fn cylinder_det_bc(
    spec: &CrossSectionSpectrum,
    length: f64,
    left: BoundaryCondition,
    right: BoundaryCondition,
) -> Result<DetValue> {
    use BoundaryCondition::*;
    if !(length > 0.0) || !length.is_finite() {
        return Err(invalid(format!("cylinder length must be positive, got {length}")));
    }
    let h = spec.h_y() as f64;
    let xi = xi_prime_zero(spec)?;
    let ld = log_det_zeta(spec)?;
    let (pre, d_power, sign) = match (left, right) {
        (Dirichlet, Dirichlet) => (h * (2.0 * length).ln(), -0.5, -1.0),
        (Neumann, Neumann) => (h * (2.0 * length).ln(), 0.5, -1.0),
        _ => (h * 2f64.ln(), 0.0, 1.0),
    };
    let prod = log_mode_product(spec, length, sign)?;
    let log = pre - 0.5 * length * xi.value + d_power * ld.value + prod.value;
    let err = 0.5 * length * xi.error + d_power.abs() * ld.error + prod.error + 1e-15 * log.abs();
    Ok(DetValue::from_log(log, err))
}
