//! Relative zeta functions and determinants of pairs `(H, H₀)` on half-cylinders
//! `R⁺ × Y`, given by per-mode closed forms of the relative heat trace
//! `Tr(e^(-tH) - e^(-tH₀)) = Σ_μ mult·(a/√(4πt) + N/2)·e^(-tμ)` (zero modes included).
//!
//! `ζ(s) = ζ₁(s) + ζ₂(s)` with
//! `ζ₁(s) = Γ(s)⁻¹ ∫₀¹ t^(s-1) Tr dt` continued through the small-time expansion and
//! `ζ₂(s) = Γ(s)⁻¹ ∫₁^∞ t^(s-1) (Tr - b₀) dt - b₀/Γ(s+1)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::extrapolate::richardson;
use crate::quad::{exp_sinh, tanh_sinh};
use crate::special_fn::{gamma, EULER_GAMMA};
use crate::spectra::{shift_spectrum, CrossSectionSpectrum};

/// Per-mode rule for the relative heat trace.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PerModeRule {
    /// `H = H₀`.
    Identical,
    /// Neumann against Dirichlet at `u = 0`: `1/2` per mode.
    NeumannVsDirichlet,
    /// Dirichlet at `u = -a` against Dirichlet at `0`: `a/√(4πt)` per mode.
    Translate { a: f64 },
    /// Neumann at `u = -a` against Dirichlet at `0`: `a/√(4πt) + 1/2` per mode.
    NeumannCap { a: f64 },
}

impl PerModeRule {
    /// `(a, N)` with per-mode trace `a/√(4πt) + N/2`.
    pub fn coefficients(&self) -> (f64, f64) {
        match *self {
            PerModeRule::Identical => (0.0, 0.0),
            PerModeRule::NeumannVsDirichlet => (0.0, 1.0),
            PerModeRule::Translate { a } => (a, 0.0),
            PerModeRule::NeumannCap { a } => (a, 1.0),
        }
    }

    fn validate(&self) -> Result<()> {
        let (a, _) = self.coefficients();
        if !(a >= 0.0) || !a.is_finite() {
            return Err(invalid(format!("translation length must be nonnegative, got {a}")));
        }
        Ok(())
    }
}

/// Decay model of `Tr - b₀` as `t → ∞`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Decay {
    /// `O(t^(-rho))`.
    Power { rho: f64 },
    /// `O(e^(-rate·t))`.
    Exponential { rate: f64 },
    /// Identically `b₀`.
    Exact,
}

/// A pair `(H, H₀)` described by a per-mode rule over a cross-section spectrum.
#[derive(Clone, Debug, PartialEq)]
pub struct RelativePair {
    spectrum: CrossSectionSpectrum,
    rule: PerModeRule,
}

impl RelativePair {
    pub fn new(spectrum: CrossSectionSpectrum, rule: PerModeRule) -> Result<Self> {
        rule.validate()?;
        if spectrum.is_truncated() {
            return Err(Error::Accuracy(
                "relative traces over truncated lists cannot be certified".into(),
            ));
        }
        Ok(Self { spectrum, rule })
    }

    pub fn spectrum(&self) -> &CrossSectionSpectrum {
        &self.spectrum
    }

    pub fn rule(&self) -> PerModeRule {
        self.rule
    }

    /// Same rule over the spectrum shifted by `lambda`.
    pub fn shifted(&self, lambda: f64) -> Result<Self> {
        Self::new(shift_spectrum(&self.spectrum, lambda)?, self.rule)
    }

    fn factor(&self, t: f64) -> f64 {
        let (a, n) = self.rule.coefficients();
        a / (4.0 * PI * t).sqrt() + 0.5 * n
    }

    /// `Tr(e^(-tH) - e^(-tH₀))`.
    pub fn rel_heat_trace(&self, t: f64) -> Result<f64> {
        let f = self.factor(t);
        if f == 0.0 {
            return Ok(0.0);
        }
        Ok(f * self.spectrum.heat_trace(t)?)
    }

    /// Large-time constant `b₀ = (N/2)·h_Y`.
    pub fn b0(&self) -> f64 {
        0.5 * self.rule.coefficients().1 * self.spectrum.h_y() as f64
    }

    pub fn decay(&self) -> Decay {
        let (a, n) = self.rule.coefficients();
        let h = self.spectrum.h_y();
        if a == 0.0 && n == 0.0 {
            return Decay::Exact;
        }
        if a != 0.0 && h > 0 {
            return Decay::Power { rho: 0.5 };
        }
        match self.spectrum.min_positive() {
            Some(m) => Decay::Exponential { rate: m },
            None => Decay::Exact,
        }
    }

    /// Small-time expansion `Tr ~ Σ c_j t^(α_j)` with all exponents `α_j ≤ max_exponent`.
    pub fn small_t_coeffs(&self, max_exponent: f64) -> Result<Vec<(f64, f64)>> {
        let (a, n) = self.rule.coefficients();
        if a == 0.0 && n == 0.0 {
            return Ok(vec![]);
        }
        let z = self.spectrum.shift();
        let mut out: Vec<(f64, f64)> = Vec::new();
        let mut push = |c: f64, e: f64| {
            if c == 0.0 || e > max_exponent + 1e-12 {
                return;
            }
            if let Some(p) = out.iter_mut().find(|p| (p.1 - e).abs() < 1e-12) {
                p.0 += c;
            } else {
                out.push((c, e));
            }
        };
        let pre = [(a / (4.0 * PI).sqrt(), -0.5), (0.5 * n, 0.0)];
        for &(c, alpha) in &self.spectrum.heat_singular_terms()? {
            for &(p, beta) in &pre {
                let mut coef = c * p;
                let mut k = 0u32;
                loop {
                    let e = alpha + beta + k as f64;
                    if e > max_exponent + 1e-12 {
                        break;
                    }
                    push(coef, e);
                    if z == 0.0 {
                        break;
                    }
                    k += 1;
                    coef *= -z / k as f64;
                }
            }
        }
        out.sort_by(|x, y| x.1.total_cmp(&y.1));
        Ok(out)
    }

    /// `Tr - Σ_{α ≤ max} c t^α` on `(0, 1]`, assembled term by term so that no
    /// cancellation between singular terms occurs as `t → 0`.
    fn small_t_remainder(&self, t: f64, max_exponent: f64) -> Result<f64> {
        let (a, n) = self.rule.coefficients();
        let z = self.spectrum.shift();
        let pre = [(a / (4.0 * PI).sqrt(), -0.5), (0.5 * n, 0.0)];
        let mut acc = 0.0;
        for &(c, alpha) in &self.spectrum.heat_singular_terms()? {
            for &(p, beta) in &pre {
                if p == 0.0 {
                    continue;
                }
                let e = alpha + beta;
                let kept = (max_exponent - e + 1e-12).floor();
                if kept < 0.0 {
                    acc += c * p * t.powf(e) * (-z * t).exp();
                } else {
                    acc += c * p * t.powf(e) * exp_tail(-z * t, kept as u32);
                }
            }
        }
        Ok(acc + self.factor(t) * (-z * t).exp() * self.spectrum.heat_remainder_base(t))
    }
}

/// `e^x - Σ_{k≤K} x^k/k!`.
fn exp_tail(x: f64, kmax: u32) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    if x.abs() > 0.5 {
        let mut partial = 0.0;
        let mut term = 1.0;
        for k in 0..=kmax {
            if k > 0 {
                term *= x / k as f64;
            }
            partial += term;
        }
        return x.exp() - partial;
    }
    let mut term = 1.0;
    for k in 1..=kmax {
        term *= x / k as f64;
    }
    let mut acc = 0.0;
    let mut k = kmax + 1;
    loop {
        term *= x / k as f64;
        acc += term;
        if term.abs() <= 1e-18 * acc.abs() || k > kmax + 60 {
            break;
        }
        k += 1;
    }
    acc
}

/// A value with an absolute error estimate.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelValue {
    pub value: f64,
    pub error: f64,
}

/// Expansion order used for `ζ₁`: exponents up to 2 leave a remainder `O(t^(5/2))`.
const MAX_EXPONENT: f64 = 2.0;

/// Below this `t` the `ζ₁` remainder integrand is dropped; its contribution is `O(1e-150)`.
const REMAINDER_CUT: f64 = 1e-100;

/// `ζ₁'(0)`: the pole terms `c/(s+α)` in closed form plus the quadrature of the
/// remainder.
fn zeta1_prime_zero(p: &RelativePair) -> Result<RelValue> {
    let coeffs = p.small_t_coeffs(MAX_EXPONENT)?;
    let mut g0 = 0.0;
    let mut c0 = 0.0;
    for &(c, e) in &coeffs {
        if e.abs() < 1e-12 {
            c0 += c;
        } else {
            g0 += c / e;
        }
    }
    let failure = std::cell::RefCell::new(None);
    let q = tanh_sinh(
        // the integrand is O(t^(3/2)); below the cut the power terms overflow
        |t| {
            if t < REMAINDER_CUT {
                0.0
            } else {
                match p.small_t_remainder(t, MAX_EXPONENT) {
                    Ok(v) => v / t,
                    Err(e) => {
                        failure.borrow_mut().get_or_insert(e);
                        0.0
                    }
                }
            }
        },
        0.0,
        1.0,
        1e-14,
    )?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(RelValue {
        value: g0 + q.value + EULER_GAMMA * c0,
        error: q.error + 1e-15 * g0.abs(),
    })
}

/// `∫₁^∞ t^(s-1) (Tr - b₀) dt`.
fn zeta2_integral(p: &RelativePair, s: f64) -> Result<RelValue> {
    let b0 = p.b0();
    if matches!(p.decay(), Decay::Exact) {
        return Ok(RelValue { value: 0.0, error: 0.0 });
    }
    let q = exp_sinh(
        |u| {
            let t = 1.0 + u;
            let v = p.rel_heat_trace(t).unwrap_or(f64::NAN) - b0;
            t.powf(s - 1.0) * v
        },
        0.0,
        1e-14,
    )?;
    if !q.value.is_finite() {
        return Err(Error::Numeric("relative heat trace could not be evaluated".into()));
    }
    Ok(RelValue {
        value: q.value,
        error: q.error,
    })
}

/// `ζ₂(s)` in the continued form `Γ(s)⁻¹ ∫₁^∞ t^(s-1)(Tr - b₀) dt - b₀/Γ(s+1)`, `s ∉ -N`.
pub fn zeta2_continued(p: &RelativePair, s: f64) -> Result<RelValue> {
    let i = zeta2_integral(p, s)?;
    let g = gamma(s)?;
    let g1 = gamma(s + 1.0)?;
    Ok(RelValue {
        value: i.value / g - p.b0() / g1,
        error: i.error / g.abs(),
    })
}

/// `ζ₂(s)` from the raw integral `Γ(s)⁻¹ ∫₁^∞ t^(s-1) Tr dt`, convergent for `s < 0`
/// (and `s < ρ` when `b₀ = 0`); evaluated in `x = log t`.
pub fn zeta2_raw(p: &RelativePair, s: f64) -> Result<RelValue> {
    if !(s < 0.0) {
        return Err(Error::Domain(format!("the raw ζ₂ integral needs s < 0, got {s}")));
    }
    let q = exp_sinh(
        |x| (s * x).exp() * p.rel_heat_trace(x.exp()).unwrap_or(f64::NAN),
        0.0,
        1e-14,
    )?;
    if !q.value.is_finite() {
        return Err(Error::Numeric("relative heat trace could not be evaluated".into()));
    }
    let g = gamma(s)?;
    Ok(RelValue {
        value: q.value / g,
        error: q.error / g.abs(),
    })
}

/// `ζ'(0)` of the relative zeta function, `ζ₁'(0) + ζ₂'(0)`.
pub fn relative_zeta_prime_zero(p: &RelativePair) -> Result<RelValue> {
    if matches!(p.rule, PerModeRule::Identical) {
        return Ok(RelValue { value: 0.0, error: 0.0 });
    }
    let z1 = zeta1_prime_zero(p)?;
    let i = zeta2_integral(p, 0.0)?;
    // d/ds [Γ(s)⁻¹ I(s)] at 0 is I(0); d/ds [-b₀/Γ(s+1)] at 0 is -γ b₀
    let z2 = i.value - EULER_GAMMA * p.b0();
    Ok(RelValue {
        value: z1.value + z2,
        error: z1.error + i.error,
    })
}

/// Relative determinant `det(H, H₀) = exp(-ζ'(0))` with relative error estimate.
pub fn relative_det(p: &RelativePair) -> Result<RelValue> {
    let d = relative_zeta_prime_zero(p)?;
    let v = (-d.value).exp();
    Ok(RelValue {
        value: v,
        error: v * d.error,
    })
}

/// `b₀ = k + (Tr S(0) + h_Y)/4` from the scattering data.
pub fn b0_from_scattering(k: u64, trace_s0: i64, h_y: u64) -> Result<f64> {
    let h = h_y as i64;
    if trace_s0.abs() > h {
        return Err(invalid(format!("|Tr S(0)| = {} exceeds h_Y = {h}", trace_s0.abs())));
    }
    if (h + trace_s0) % 2 != 0 {
        return Err(invalid("Tr S(0) + h_Y must be even for an involution"));
    }
    Ok(k as f64 + (trace_s0 + h) as f64 / 4.0)
}

/// Fitted small-`λ` behaviour of `log det(H + λ, H₀ + λ)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeFit {
    pub grid: Vec<f64>,
    pub log_values: Vec<f64>,
    pub errors: Vec<f64>,
    pub slope: f64,
    pub constant: f64,
    pub constant_error: f64,
    /// Grid points dropped by the error criterion.
    pub dropped: usize,
}

/// Evaluates `log det(H + λ, H₀ + λ)` on a decreasing geometric grid and fits the
/// slope against `log λ`; the constant is extrapolated in `√λ` after removing the
/// slope rounded to a half-integer. The smallest grid point is dropped if its error
/// exceeds 10% of the increment to its neighbour.
pub fn small_lambda_probe(p: &RelativePair, grid: &[f64]) -> Result<ProbeFit> {
    if grid.len() < 4 {
        return Err(invalid("small-λ probes need at least four grid points"));
    }
    if grid.iter().any(|l| !(*l > 0.0)) || grid.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(invalid("small-λ grid must be positive and strictly decreasing"));
    }
    let ratio = grid[0] / grid[1];
    if grid.windows(2).any(|w| ((w[0] / w[1]) / ratio - 1.0).abs() > 1e-9) {
        return Err(invalid("small-λ grid must be geometric"));
    }
    let mut vals = Vec::with_capacity(grid.len());
    let mut errs = Vec::with_capacity(grid.len());
    for &l in grid {
        let d = relative_zeta_prime_zero(&p.shifted(l)?)?;
        vals.push(-d.value);
        errs.push(d.error);
    }
    let mut n = grid.len();
    let mut dropped = 0;
    if errs[n - 1] > 0.1 * (vals[n - 1] - vals[n - 2]).abs() && n > 4 {
        n -= 1;
        dropped = 1;
    }
    let lx: Vec<f64> = grid[..n].iter().map(|l| l.ln()).collect();
    let (slope, _) = crate::extrapolate::linear_fit(&lx, &vals[..n])?;
    let exponent = (2.0 * slope).round() / 2.0;
    let rest: Vec<f64> = lx.iter().zip(&vals[..n]).map(|(x, y)| y - exponent * x).collect();
    let (constant, constant_error) = richardson(&rest, ratio.sqrt(), 1.0)?;
    Ok(ProbeFit {
        grid: grid.to_vec(),
        log_values: vals,
        errors: errs,
        slope,
        constant,
        constant_error,
        dropped,
    })
}
