//! Spectral zeta functions of cross-section spectra, zeta-regularized
//! determinants and the function `ξ_Y(s) = Γ(s-1/2)/(√π Γ(s)) · ζ_Y(s-1/2)`.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::Mutex;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mellin::{mellin_laurent, Laurent, MellinTerm};
use crate::special_fn::{digamma, gamma, riemann_zeta_with_deriv};
use crate::spectra::{CrossSectionSpectrum, Generator};

/// A value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaValue {
    pub value: f64,
    pub error: f64,
}

/// Laurent data of `ζ_Y` at a point: `ζ(s0 + ε) = residue/ε + finite + O(ε)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ZetaLaurent {
    pub residue: f64,
    pub finite: f64,
    pub error: f64,
}

/// How a zeta function is evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ZetaMethod {
    /// Closed forms in terms of the Riemann zeta function (unshifted circle and
    /// interval, point spectra, finite lists).
    ClosedForm,
    /// Mellin split of the heat trace with analytic continuation.
    MellinSplit,
}

/// `ζ(s) = Σ_{μ>0} mult·μ^(-s)` with its continuation; zero modes excluded.
#[derive(Debug)]
pub struct ZetaFunction {
    spectrum: CrossSectionSpectrum,
    method: ZetaMethod,
    cache: Mutex<HashMap<u64, ZetaValue>>,
}

impl ZetaFunction {
    /// Builds a zeta function; the closed-form method is only available for the
    /// generators listed in [`ZetaMethod::ClosedForm`].
    pub fn new(spectrum: CrossSectionSpectrum, method: ZetaMethod) -> Result<Self> {
        if method == ZetaMethod::ClosedForm && !closed_form_available(&spectrum) {
            return Err(Error::InvalidArgument(
                "no closed form for this spectrum; use the Mellin split".into(),
            ));
        }
        Ok(Self {
            spectrum,
            method,
            cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn spectrum(&self) -> &CrossSectionSpectrum {
        &self.spectrum
    }

    pub fn method(&self) -> ZetaMethod {
        self.method
    }

    /// `ζ(s)`; a pole at `s` is a domain error.
    pub fn eval(&self, s: f64) -> Result<ZetaValue> {
        if let Some(v) = self.cache.lock().ok().and_then(|c| c.get(&s.to_bits()).copied()) {
            return Ok(v);
        }
        let v = match self.method {
            ZetaMethod::ClosedForm => closed_form(&self.spectrum, s)?.0,
            ZetaMethod::MellinSplit => zeta_at(&self.spectrum, s)?,
        };
        if let Ok(mut c) = self.cache.lock() {
            c.insert(s.to_bits(), v);
        }
        Ok(v)
    }

    /// `ζ'(0)`.
    pub fn derivative_at_zero(&self) -> Result<ZetaValue> {
        match self.method {
            ZetaMethod::ClosedForm => closed_form(&self.spectrum, 0.0).map(|(_, d)| d),
            ZetaMethod::MellinSplit => zeta_prime_zero(&self.spectrum),
        }
    }
}

fn closed_form_available(s: &CrossSectionSpectrum) -> bool {
    match s.generator() {
        Generator::Circle { .. } | Generator::DirichletInterval { .. } => s.shift() == 0.0,
        Generator::Point { .. } => true,
        Generator::ExplicitList { truncated, .. } => !truncated,
        Generator::Torus { .. } => false,
    }
}

/// Closed-form `(ζ(s), ζ'(s))`.
fn closed_form(spec: &CrossSectionSpectrum, s: f64) -> Result<(ZetaValue, ZetaValue)> {
    let tiny = |v: f64| ZetaValue {
        value: v,
        error: 1e-14 * v.abs().max(1e-300),
    };
    match spec.generator() {
        Generator::Circle { length } if spec.shift() == 0.0 => {
            // 2 (ℓ/2π)^(2s) ζ(2s)
            let (z, dz) = riemann_zeta_with_deriv(2.0 * s)
                .map_err(|_| Error::Domain(format!("zeta of the circle has a pole at s = {s}")))?;
            let l = (length / (2.0 * PI)).ln();
            let p = (2.0 * s * l).exp();
            Ok((tiny(2.0 * p * z), tiny(2.0 * p * (2.0 * l * z + 2.0 * dz))))
        }
        Generator::DirichletInterval { length } if spec.shift() == 0.0 => {
            let (z, dz) = riemann_zeta_with_deriv(2.0 * s)
                .map_err(|_| Error::Domain(format!("zeta of the interval has a pole at s = {s}")))?;
            let l = (length / PI).ln();
            let p = (2.0 * s * l).exp();
            Ok((tiny(p * z), tiny(p * (2.0 * l * z + 2.0 * dz))))
        }
        Generator::Point { .. } | Generator::ExplicitList { truncated: false, .. } => {
            let modes = spec.positive_modes_up_to(f64::INFINITY);
            let v: f64 = modes.iter().map(|(mu, m)| *m as f64 * mu.powf(-s)).sum();
            let d: f64 = modes.iter().map(|(mu, m)| -(*m as f64) * mu.powf(-s) * mu.ln()).sum();
            Ok((tiny(v), tiny(d)))
        }
        _ => Err(Error::InvalidArgument("no closed form for this spectrum".into())),
    }
}

/// Closed-form `ζ(s)` where available.
pub fn zeta_closed_form(spec: &CrossSectionSpectrum, s: f64) -> Result<ZetaValue> {
    Ok(closed_form(spec, s)?.0)
}

/// Closed-form `ζ'(0)` where available.
pub fn zeta_prime_zero_closed_form(spec: &CrossSectionSpectrum) -> Result<ZetaValue> {
    Ok(closed_form(spec, 0.0)?.1)
}

fn nonpositive_integer(s: f64) -> Option<u32> {
    if s <= 0.0 && (s - s.round()).abs() < 1e-12 {
        Some((-s.round()) as u32)
    } else {
        None
    }
}

fn factorial(m: u32) -> f64 {
    (1..=m).map(|k| k as f64).product()
}

fn mellin(spec: &CrossSectionSpectrum, s0: f64) -> Result<Laurent> {
    mellin_laurent(spec, &[MellinTerm::new(1.0, 0.0)], s0)
}

/// `ζ_Y(s)` through the Mellin split; a pole at `s` is a domain error.
pub fn zeta_at(spec: &CrossSectionSpectrum, s: f64) -> Result<ZetaValue> {
    let f = mellin(spec, s)?;
    if let Some(m) = nonpositive_integer(s) {
        let c = if m % 2 == 0 { 1.0 } else { -1.0 } * factorial(m);
        return Ok(ZetaValue {
            value: c * f.residue,
            error: c.abs() * f.error,
        });
    }
    if f.has_pole && f.residue != 0.0 {
        return Err(Error::Domain(format!(
            "zeta has a pole at s = {s} (residue {:.6e})",
            f.residue / gamma(s)?
        )));
    }
    let g = gamma(s)?;
    Ok(ZetaValue {
        value: f.finite / g,
        error: f.error / g.abs(),
    })
}

/// Laurent data of `ζ_Y` at a point where `Γ` is regular.
pub fn zeta_laurent(spec: &CrossSectionSpectrum, s0: f64) -> Result<ZetaLaurent> {
    if let Some(_) = nonpositive_integer(s0) {
        let v = zeta_at(spec, s0)?;
        return Ok(ZetaLaurent {
            residue: 0.0,
            finite: v.value,
            error: v.error,
        });
    }
    let f = mellin(spec, s0)?;
    let g = gamma(s0)?;
    let psi = digamma(s0)?;
    Ok(ZetaLaurent {
        residue: f.residue / g,
        finite: (f.finite - psi * f.residue) / g,
        error: (f.error * (1.0 + psi.abs())) / g.abs(),
    })
}

/// `ζ_Y'(0)` through the Mellin split.
pub fn zeta_prime_zero(spec: &CrossSectionSpectrum) -> Result<ZetaValue> {
    let f = mellin(spec, 0.0)?;
    Ok(ZetaValue {
        value: f.finite + crate::special_fn::EULER_GAMMA * f.residue,
        error: f.error,
    })
}

/// `ζ_Y(0)` computed from the `t^0` heat coefficient of `exp(-(z + extra)t)·θ_base`,
/// valid for either sign of `extra`; subtracts zero eigenvalues of the shifted operator.
pub fn zeta_zero_from_heat(spec: &CrossSectionSpectrum, extra_shift: f64) -> Result<f64> {
    if spec.is_finite() {
        let shift = spec.shift() + extra_shift;
        let modes = spec.modes_up_to(f64::INFINITY);
        let count: u64 = modes
            .iter()
            .filter(|(mu, _)| mu - spec.shift() + shift != 0.0)
            .map(|m| m.1)
            .sum();
        return Ok(count as f64);
    }
    let a0 = spec.heat_t0_coefficient(extra_shift)?;
    let zero = if spec.shift() + extra_shift == 0.0 {
        spec.modes_up_to(spec.shift())
            .iter()
            .filter(|(mu, _)| *mu == spec.shift())
            .map(|m| m.1)
            .sum::<u64>()
    } else {
        0
    };
    Ok(a0 - zero as f64)
}

/// `log det Δ_Y = -ζ_Y'(0)` (zero modes excluded).
pub fn log_det_zeta(spec: &CrossSectionSpectrum) -> Result<ZetaValue> {
    let d = zeta_prime_zero(spec)?;
    Ok(ZetaValue {
        value: -d.value,
        error: d.error,
    })
}

/// `det Δ_Y = exp(-ζ_Y'(0))`, with relative error estimate.
pub fn det_zeta(spec: &CrossSectionSpectrum) -> Result<ZetaValue> {
    let l = log_det_zeta(spec)?;
    let v = l.value.exp();
    Ok(ZetaValue {
        value: v,
        error: v * l.error,
    })
}

/// `ξ_Y(s)` for `s` near (but not at) 0.
pub fn xi_at(spec: &CrossSectionSpectrum, s: f64) -> Result<ZetaValue> {
    let z = zeta_at(spec, s - 0.5)?;
    let pre = gamma(s - 0.5)? / (PI.sqrt() * gamma(s)?);
    Ok(ZetaValue {
        value: pre * z.value,
        error: pre.abs() * z.error,
    })
}

/// `ξ_Y'(0)`. With `ζ_Y(s-1/2) = R/s + C + O(s)` near 0 and
/// `Γ(s-1/2)/(√π Γ(s)) = -2s + (4 ln 2 - 4)s² + O(s³)`, `ξ_Y'(0) = -2C + (4 ln 2 - 4)R`;
/// when `ζ_Y` is regular at `-1/2` this is `-2 ζ_Y(-1/2)`.
pub fn xi_prime_zero(spec: &CrossSectionSpectrum) -> Result<ZetaValue> {
    let l = zeta_laurent(spec, -0.5)?;
    let k = 4.0 * 2f64.ln() - 4.0;
    Ok(ZetaValue {
        value: -2.0 * l.finite + k * l.residue,
        error: 2.0 * l.error + k.abs() * l.error,
    })
}

/// `ξ_Y(0) = -2R`, nonzero only when `ζ_Y` has a pole at `-1/2`.
pub fn xi_at_zero(spec: &CrossSectionSpectrum) -> Result<f64> {
    Ok(-2.0 * zeta_laurent(spec, -0.5)?.residue)
}
