//! Mellin transforms of heat-type traces `τ(t) = Σ_i w_i t^β_i θ(t)` continued
//! meromorphically in `s`.
//!
//! `F(s) = ∫₀^∞ t^(s-1) τ(t) dt` is split at `T = min(1, 1/|z|)`. On `[0, T]` the
//! singular part of the heat trace is integrated in closed form (after expanding
//! `exp(-zt)`), the exponentially small remainder by quadrature. On `[T, ∞)` each
//! mode contributes `ν^(-s-β) Γ(s+β, νT)`. Zero modes contribute nothing: the
//! continued Mellin transform of a constant vanishes.

use crate::error::{Error, Result};
use crate::quad::tanh_sinh;
use crate::special_fn::{digamma, gamma, upper_incomplete_gamma};
use crate::spectra::{CrossSectionSpectrum, Generator};

/// One summand `weight · t^beta · θ(t)` of a trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MellinTerm {
    pub weight: f64,
    pub beta: f64,
}

impl MellinTerm {
    pub fn new(weight: f64, beta: f64) -> Self {
        Self { weight, beta }
    }
}

/// Laurent data `F(s0 + ε) = residue/ε + finite + O(ε)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Laurent {
    pub residue: f64,
    pub finite: f64,
    pub has_pole: bool,
    pub error: f64,
}

const POLE_EPS: f64 = 1e-12;
const LARGE_T_WINDOW: f64 = 55.0;

struct Acc {
    residue: f64,
    finite: f64,
    has_pole: bool,
    error: f64,
    magnitude: f64,
}

impl Acc {
    /// Adds `coef · T^e / e` continued in `s`.
    fn power(&mut self, coef: f64, e: f64, t_split: f64) {
        if coef == 0.0 {
            return;
        }
        if e.abs() < POLE_EPS {
            self.residue += coef;
            self.finite += coef * t_split.ln();
            self.has_pole = true;
            self.magnitude += coef.abs();
        } else {
            let v = coef * t_split.powf(e) / e;
            self.finite += v;
            self.magnitude += v.abs();
        }
    }
}

/// Laurent data at `s0` of the continued Mellin transform of `Σ w_i t^β_i θ(t)`.
pub fn mellin_laurent(spec: &CrossSectionSpectrum, terms: &[MellinTerm], s0: f64) -> Result<Laurent> {
    if spec.is_truncated() {
        return Err(Error::Accuracy(
            "continuation over a truncated explicit list cannot be certified".into(),
        ));
    }
    if let Generator::ExplicitList { .. } = spec.generator() {
        return finite_list_laurent(spec, terms, s0);
    }
    let z = spec.shift();
    let t_split = if z.abs() > 1.0 { 1.0 / z.abs() } else { 1.0 };
    let singular = spec.heat_singular_terms()?;
    let h = spec.h_y() as f64;
    let has_remainder = !matches!(spec.generator(), Generator::Point { .. });
    let modes = spec.positive_modes_up_to(LARGE_T_WINDOW / t_split);
    let mut acc = Acc {
        residue: 0.0,
        finite: 0.0,
        has_pole: false,
        error: 0.0,
        magnitude: 0.0,
    };
    for term in terms {
        let (w, beta) = (term.weight, term.beta);
        let e0 = s0 + beta;
        for &(c, alpha) in &singular {
            let mut coef = w * c;
            let mut ratio = 1.0;
            let mut n = 0u32;
            loop {
                acc.power(coef, e0 + alpha + n as f64, t_split);
                if z == 0.0 {
                    break;
                }
                n += 1;
                coef *= -z / n as f64;
                ratio *= z.abs() * t_split / n as f64;
                if ratio < 1e-19 || n > 80 {
                    break;
                }
            }
        }
        if h > 0.0 {
            acc.power(-w * h, e0, t_split);
        }
        if has_remainder {
            let rem = |t: f64| -> f64 {
                let r = spec.heat_remainder_base(t);
                if r == 0.0 {
                    0.0
                } else {
                    t.powf(e0 - 1.0) * (-z * t).exp() * r
                }
            };
            let q = tanh_sinh(rem, 0.0, t_split, 1e-14)?;
            acc.finite += w * q.value;
            acc.error += w.abs() * q.error;
            acc.magnitude += (w * q.value).abs();
        }
        for &(nu, mult) in &modes {
            let g = upper_incomplete_gamma(e0, nu * t_split)?;
            let v = w * mult as f64 * nu.powf(-e0) * g;
            acc.finite += v;
            acc.magnitude += v.abs();
        }
    }
    acc.error += 1e-15 * acc.magnitude;
    Ok(Laurent {
        residue: acc.residue,
        finite: acc.finite,
        has_pole: acc.has_pole,
        error: acc.error,
    })
}

/// Finite lists: `F(s) = Σ w·mult·μ^(-s-β) Γ(s+β)` exactly.
fn finite_list_laurent(spec: &CrossSectionSpectrum, terms: &[MellinTerm], s0: f64) -> Result<Laurent> {
    let modes = spec.positive_modes_up_to(f64::INFINITY);
    let mut out = Laurent {
        residue: 0.0,
        finite: 0.0,
        has_pole: false,
        error: 0.0,
    };
    for term in terms {
        let e = s0 + term.beta;
        let g: f64 = modes.iter().map(|(mu, m)| *m as f64 * mu.powf(-e)).sum();
        let m = -e;
        if m >= -POLE_EPS && (m - m.round()).abs() < POLE_EPS {
            let m = m.round() as u32;
            let mut fact = 1.0;
            for k in 1..=m {
                fact *= k as f64;
            }
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            let c = sign / fact;
            let dg: f64 = modes.iter().map(|(mu, mm)| -(*mm as f64) * mu.powf(-e) * mu.ln()).sum();
            let psi = digamma(m as f64 + 1.0)?;
            out.residue += term.weight * c * g;
            out.finite += term.weight * c * (psi * g + dg);
            out.has_pole |= g != 0.0;
        } else {
            out.finite += term.weight * gamma(e)? * g;
        }
    }
    out.error = 1e-15 * (out.finite.abs() + out.residue.abs());
    Ok(out)
}
