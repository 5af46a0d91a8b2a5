//! Cross-section spectra: closed-form model spectra, explicit lists, spectral shifts
//! and heat traces split into a small-time singular part and an exponentially small
//! remainder.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{invalid, Error, Result};

/// Generator of an unshifted spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "generator", content = "params", rename_all = "kebab-case")]
pub enum Generator {
    /// Laplacian on the circle of length `length`: `(2πk/ℓ)²`, `k ∈ ℤ`.
    Circle { length: f64 },
    /// Dirichlet Laplacian on `[0, length]`: `(πk/L)²`, `k ≥ 1`.
    DirichletInterval { length: f64 },
    /// Laplacian on the square flat torus `ℝ²/(ℓℤ)²`.
    Torus { length: f64 },
    /// `n` zero modes: the cross-section of a one-dimensional manifold.
    Point { n: u64 },
    /// User-supplied eigenvalues; `truncated` marks lists with a missing tail.
    ExplicitList { values: Vec<(f64, u64)>, truncated: bool },
}

/// Eigenvalue data of `Δ_Y` together with a generator for sums beyond the cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct CrossSectionSpectrum {
    generator: Generator,
    shift: f64,
    cutoff: f64,
    entries: Vec<(f64, u64)>,
    h_y: u64,
}

const DEFAULT_CUTOFF: f64 = 1.0e4;

fn check_positive(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(invalid(format!("{name} must be positive and finite, got {v}")));
    }
    Ok(())
}

/// Number of representations `N = m² + n²` with `m, n ∈ ℤ`.
fn sum_of_two_squares_count(n: u64) -> u64 {
    if n == 0 {
        return 1;
    }
    let mut count = 0;
    let mut m: u64 = 0;
    while m * m <= n {
        let rest = n - m * m;
        let k = (rest as f64).sqrt().round() as u64;
        if k * k == rest {
            let mm = if m == 0 { 1 } else { 2 };
            let kk = if k == 0 { 1 } else { 2 };
            count += mm * kk;
        }
        m += 1;
    }
    count
}

/// `Σ_{k∈ℤ} exp(-ωk²t)` for the circle of length `ℓ` (`ω = (2π/ℓ)²`).
fn circle_theta(length: f64, t: f64) -> f64 {
    let omega = (2.0 * PI / length).powi(2);
    if omega * t >= 1.0 {
        let mut acc = 1.0;
        let mut k = 1.0;
        loop {
            let term = (-omega * k * k * t).exp();
            acc += 2.0 * term;
            if term < 1e-18 * acc {
                break;
            }
            k += 1.0;
        }
        acc
    } else {
        let a = length / (4.0 * PI * t).sqrt();
        a + circle_remainder(length, t)
    }
}

/// `θ_circle(t) - ℓ/√(4πt)` computed from the Poisson dual when it converges quickly.
fn circle_remainder(length: f64, t: f64) -> f64 {
    let a = length / (4.0 * PI * t).sqrt();
    let q = length * length / (4.0 * t);
    if q >= 1.0 {
        let mut acc = 0.0;
        let mut k = 1.0;
        loop {
            let term = (-q * k * k).exp();
            acc += term;
            if term < 1e-18 * acc.max(1e-300) || term == 0.0 {
                break;
            }
            k += 1.0;
        }
        2.0 * a * acc
    } else {
        circle_theta(length, t) - a
    }
}

impl Generator {
    fn validate(&self) -> Result<()> {
        match self {
            Generator::Circle { length } | Generator::DirichletInterval { length } | Generator::Torus { length } => {
                check_positive("length", *length)
            }
            Generator::Point { n } => {
                if *n == 0 {
                    Err(invalid("point spectrum needs n ≥ 1"))
                } else {
                    Ok(())
                }
            }
            Generator::ExplicitList { values, .. } => {
                for (mu, m) in values {
                    if !(*mu >= 0.0) || !mu.is_finite() {
                        return Err(invalid(format!("explicit eigenvalue must be ≥ 0, got {mu}")));
                    }
                    if *m == 0 {
                        return Err(invalid("explicit multiplicity must be positive"));
                    }
                }
                Ok(())
            }
        }
    }

    pub fn tag(&self) -> &'static str {
        match self {
            Generator::Circle { .. } => "circle",
            Generator::DirichletInterval { .. } => "dirichlet-interval",
            Generator::Torus { .. } => "torus",
            Generator::Point { .. } => "point",
            Generator::ExplicitList { .. } => "explicit-list",
        }
    }

    /// Unshifted eigenvalues `≤ max`, merged by exact generator index.
    fn modes_up_to(&self, max: f64) -> Vec<(f64, u64)> {
        let mut out = Vec::new();
        match self {
            Generator::Circle { length } => {
                out.push((0.0, 1));
                let omega = (2.0 * PI / length).powi(2);
                let mut k = 1u64;
                while omega * (k * k) as f64 <= max {
                    out.push((omega * (k * k) as f64, 2));
                    k += 1;
                }
            }
            Generator::DirichletInterval { length } => {
                let omega = (PI / length).powi(2);
                let mut k = 1u64;
                while omega * (k * k) as f64 <= max {
                    out.push((omega * (k * k) as f64, 1));
                    k += 1;
                }
            }
            Generator::Torus { length } => {
                let omega = (2.0 * PI / length).powi(2);
                let n_max = if max < 0.0 { 0 } else { (max / omega).floor() as u64 };
                for n in 0..=n_max {
                    let c = sum_of_two_squares_count(n);
                    if c > 0 {
                        out.push((omega * n as f64, c));
                    }
                }
            }
            Generator::Point { n } => out.push((0.0, *n)),
            Generator::ExplicitList { values, .. } => {
                let mut v: Vec<(f64, u64)> = values.iter().copied().filter(|(mu, _)| *mu <= max).collect();
                v.sort_by(|a, b| a.0.total_cmp(&b.0));
                for (mu, m) in v {
                    match out.last_mut() {
                        Some((last, lm)) if *last == mu => *lm += m,
                        _ => out.push((mu, m)),
                    }
                }
            }
        }
        out
    }

    fn zero_multiplicity(&self) -> u64 {
        self.modes_up_to(0.0)
            .iter()
            .filter(|(mu, _)| *mu == 0.0)
            .map(|(_, m)| m)
            .sum()
    }

    fn min_eigenvalue(&self) -> Option<f64> {
        match self {
            Generator::Circle { .. } | Generator::Torus { .. } | Generator::Point { .. } => Some(0.0),
            Generator::DirichletInterval { length } => Some((PI / length).powi(2)),
            Generator::ExplicitList { values, .. } => values.iter().map(|v| v.0).min_by(f64::total_cmp),
        }
    }
}

impl CrossSectionSpectrum {
    fn build(generator: Generator, shift: f64, cutoff: f64) -> Result<Self> {
        generator.validate()?;
        check_positive("cutoff", cutoff)?;
        let entries: Vec<(f64, u64)> = generator
            .modes_up_to(cutoff - shift)
            .into_iter()
            .map(|(mu, m)| (mu + shift, m))
            .collect();
        let h_y = if shift == 0.0 { generator.zero_multiplicity() } else { 0 };
        Ok(Self {
            generator,
            shift,
            cutoff,
            entries,
            h_y,
        })
    }

    /// The generator of the unshifted spectrum.
    pub fn generator(&self) -> &Generator {
        &self.generator
    }

    /// Total spectral shift `z` applied to the generator.
    pub fn shift(&self) -> f64 {
        self.shift
    }

    /// Enumeration cutoff.
    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    /// Enumerated `(eigenvalue, multiplicity)` pairs, strictly ascending.
    pub fn entries(&self) -> &[(f64, u64)] {
        &self.entries
    }

    /// Multiplicity of the eigenvalue 0.
    pub fn h_y(&self) -> u64 {
        self.h_y
    }

    /// Dimension of the cross-section manifold, when the generator defines one.
    pub fn dimension(&self) -> Option<usize> {
        match self.generator {
            Generator::Circle { .. } | Generator::DirichletInterval { .. } => Some(1),
            Generator::Torus { .. } => Some(2),
            Generator::Point { .. } => Some(0),
            Generator::ExplicitList { .. } => None,
        }
    }

    /// True when the spectrum is a finite list with no tail.
    pub fn is_finite(&self) -> bool {
        matches!(
            self.generator,
            Generator::Point { .. } | Generator::ExplicitList { truncated: false, .. }
        )
    }

    /// True when sums beyond the cutoff cannot be certified.
    pub fn is_truncated(&self) -> bool {
        matches!(self.generator, Generator::ExplicitList { truncated: true, .. })
    }

    /// All eigenvalues `≤ max` with multiplicities, including zero modes.
    pub fn modes_up_to(&self, max: f64) -> Vec<(f64, u64)> {
        self.generator
            .modes_up_to(max - self.shift)
            .into_iter()
            .map(|(mu, m)| (mu + self.shift, m))
            .collect()
    }

    /// Positive eigenvalues `≤ max` with multiplicities.
    pub fn positive_modes_up_to(&self, max: f64) -> Vec<(f64, u64)> {
        self.modes_up_to(max).into_iter().filter(|(mu, _)| *mu > 0.0).collect()
    }

    /// Smallest positive eigenvalue, if any.
    pub fn min_positive(&self) -> Option<f64> {
        match &self.generator {
            Generator::ExplicitList { values, .. } => values
                .iter()
                .map(|v| v.0 + self.shift)
                .filter(|v| *v > 0.0)
                .min_by(f64::total_cmp),
            g => {
                let mut max = 1.0;
                loop {
                    if let Some(m) = self.positive_modes_up_to(max).first() {
                        return Some(m.0);
                    }
                    if matches!(g, Generator::Point { .. }) {
                        return None;
                    }
                    max *= 4.0;
                }
            }
        }
    }

    /// Heat trace `θ(t) = Σ mult·exp(-μt)` including zero modes.
    pub fn heat_trace(&self, t: f64) -> Result<f64> {
        check_positive("t", t)?;
        let damp = (-self.shift * t).exp();
        let base = match &self.generator {
            Generator::Circle { length } => circle_theta(*length, t),
            Generator::DirichletInterval { length } => 0.5 * (circle_theta(2.0 * length, t) - 1.0),
            Generator::Torus { length } => circle_theta(*length, t).powi(2),
            Generator::Point { n } => *n as f64,
            Generator::ExplicitList { values, truncated } => {
                if *truncated {
                    return Err(Error::Accuracy(
                        "heat trace of a truncated explicit list cannot be certified".into(),
                    ));
                }
                values.iter().map(|(mu, m)| *m as f64 * (-mu * t).exp()).sum()
            }
        };
        Ok(damp * base)
    }

    /// Small-time singular terms `(c_j, α_j)` of the unshifted heat trace, so that
    /// `θ_base(t) = Σ c_j t^α_j + remainder(t)` with an exponentially small remainder.
    pub fn heat_singular_terms(&self) -> Result<Vec<(f64, f64)>> {
        match &self.generator {
            Generator::Circle { length } => Ok(vec![(length / (4.0 * PI).sqrt(), -0.5)]),
            Generator::DirichletInterval { length } => Ok(vec![(length / (4.0 * PI).sqrt(), -0.5), (-0.5, 0.0)]),
            Generator::Torus { length } => Ok(vec![(length * length / (4.0 * PI), -1.0)]),
            Generator::Point { n } => Ok(vec![(*n as f64, 0.0)]),
            Generator::ExplicitList { .. } => Err(Error::Accuracy(
                "explicit-list spectra carry no small-time expansion".into(),
            )),
        }
    }

    /// Remainder `θ_base(t) - Σ c_j t^α_j` of the unshifted heat trace.
    pub fn heat_remainder_base(&self, t: f64) -> f64 {
        match &self.generator {
            Generator::Circle { length } => circle_remainder(*length, t),
            Generator::DirichletInterval { length } => 0.5 * circle_remainder(2.0 * length, t),
            Generator::Torus { length } => {
                let a = length / (4.0 * PI * t).sqrt();
                let r = circle_remainder(*length, t);
                2.0 * a * r + r * r
            }
            Generator::Point { .. } | Generator::ExplicitList { .. } => 0.0,
        }
    }

    /// Coefficient of `t^0` in the small-time expansion of `exp(-(z + extra)t)·θ_base(t)`.
    pub fn heat_t0_coefficient(&self, extra_shift: f64) -> Result<f64> {
        let z = self.shift + extra_shift;
        let mut acc = 0.0;
        for (c, alpha) in self.heat_singular_terms()? {
            let n = -alpha;
            if n >= 0.0 && n == n.round() {
                let n = n as i32;
                let mut fact = 1.0;
                for k in 1..=n {
                    fact *= k as f64;
                }
                acc += c * (-z).powi(n) / fact;
            }
        }
        Ok(acc)
    }

    /// JSON form `{"generator", "params", "h_Y", "entries", "cutoff"}`.
    pub fn to_json(&self) -> Value {
        let base = serde_json::to_value(&self.generator).unwrap_or(Value::Null);
        let (generator, params) = if self.shift != 0.0 {
            (Value::from("shifted"), json!({ "base": base, "z": self.shift }))
        } else {
            (base["generator"].clone(), base["params"].clone())
        };
        json!({
            "generator": generator,
            "params": params,
            "h_Y": self.h_y,
            "entries": self.entries.iter().map(|(mu, m)| json!([mu, m])).collect::<Vec<_>>(),
            "cutoff": self.cutoff,
        })
    }

    /// Inverse of [`CrossSectionSpectrum::to_json`]; `entries` and `h_Y` are optional
    /// on input and checked when present.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| invalid("spectrum must be a JSON object"))?;
        for key in obj.keys() {
            if !["generator", "params", "h_Y", "entries", "cutoff"].contains(&key.as_str()) {
                return Err(invalid(format!("unknown spectrum field `{key}`")));
            }
        }
        let tag = obj
            .get("generator")
            .and_then(Value::as_str)
            .ok_or_else(|| invalid("spectrum needs a string `generator`"))?;
        let params = obj.get("params").cloned().unwrap_or_else(|| json!({}));
        let (generator, shift) = if tag == "shifted" {
            let base = params
                .get("base")
                .ok_or_else(|| invalid("shifted spectrum needs `base`"))?;
            let z = params
                .get("z")
                .and_then(Value::as_f64)
                .ok_or_else(|| invalid("shifted spectrum needs numeric `z`"))?;
            let g: Generator =
                serde_json::from_value(base.clone()).map_err(|e| invalid(format!("bad base generator: {e}")))?;
            (g, z)
        } else {
            let g: Generator = serde_json::from_value(json!({ "generator": tag, "params": params }))
                .map_err(|e| invalid(format!("bad generator: {e}")))?;
            (g, 0.0)
        };
        let cutoff = match obj.get("cutoff") {
            Some(c) => c.as_f64().ok_or_else(|| invalid("`cutoff` must be a number"))?,
            None => default_cutoff(&generator),
        };
        let s = build_shifted(generator, shift, cutoff.max(f64::MIN_POSITIVE))?;
        if let Some(h) = obj.get("h_Y") {
            if h.as_u64() != Some(s.h_y) {
                return Err(invalid(format!("`h_Y` = {h} does not match the generator ({})", s.h_y)));
            }
        }
        if let Some(e) = obj.get("entries") {
            let given: Vec<(f64, u64)> =
                serde_json::from_value(e.clone()).map_err(|e| invalid(format!("bad `entries`: {e}")))?;
            if given != s.entries {
                return Err(invalid("`entries` do not match the generator"));
            }
        }
        Ok(s)
    }
}

fn default_cutoff(g: &Generator) -> f64 {
    match g {
        Generator::Point { .. } => 1.0,
        Generator::ExplicitList { values, .. } => values.iter().map(|v| v.0).fold(1.0, f64::max),
        _ => DEFAULT_CUTOFF,
    }
}

impl Serialize for CrossSectionSpectrum {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CrossSectionSpectrum {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(deserializer)?;
        Self::from_json(&v).map_err(serde::de::Error::custom)
    }
}

/// Circle of length `ℓ`: eigenvalue 0 (mult 1) and `(2πk/ℓ)²` (mult 2), `k ≥ 1`.
pub fn circle_spectrum(length: f64, cutoff: f64) -> Result<CrossSectionSpectrum> {
    check_positive("circumference", length)?;
    CrossSectionSpectrum::build(Generator::Circle { length }, 0.0, cutoff)
}

/// Dirichlet interval `[0, L]`: `(πk/L)²`, `k ≥ 1`, simple.
pub fn dirichlet_interval_spectrum(length: f64, cutoff: f64) -> Result<CrossSectionSpectrum> {
    check_positive("length", length)?;
    CrossSectionSpectrum::build(Generator::DirichletInterval { length }, 0.0, cutoff)
}

/// Square flat torus `ℝ²/(ℓℤ)²`: `(2π/ℓ)²(m² + n²)`.
pub fn torus_spectrum(length: f64, cutoff: f64) -> Result<CrossSectionSpectrum> {
    check_positive("length", length)?;
    CrossSectionSpectrum::build(Generator::Torus { length }, 0.0, cutoff)
}

/// `n` zero modes.
pub fn point_spectrum(n: u64) -> Result<CrossSectionSpectrum> {
    CrossSectionSpectrum::build(Generator::Point { n }, 0.0, 1.0)
}

/// User-supplied eigenvalue list; equal values are merged.
pub fn explicit_spectrum(values: Vec<(f64, u64)>, truncated: bool) -> Result<CrossSectionSpectrum> {
    let g = Generator::ExplicitList { values, truncated };
    let cutoff = default_cutoff(&g);
    CrossSectionSpectrum::build(g, 0.0, cutoff)
}

/// Shift every eigenvalue by `z`. Shifts compose additively on the generator, so
/// repeated shifts are exact on entries.
pub fn shift_spectrum(s: &CrossSectionSpectrum, z: f64) -> Result<CrossSectionSpectrum> {
    if !z.is_finite() {
        return Err(invalid(format!("shift must be finite, got {z}")));
    }
    if z == 0.0 {
        return Ok(s.clone());
    }
    let cutoff = if s.cutoff + z > 0.0 { s.cutoff + z } else { s.cutoff };
    build_shifted(s.generator.clone(), s.shift + z, cutoff)
}

/// Spectrum of `generator` shifted by `total`, explicit up to `cutoff`.
fn build_shifted(generator: Generator, total: f64, cutoff: f64) -> Result<CrossSectionSpectrum> {
    if total != 0.0 {
        if let Some(min) = generator.min_eigenvalue() {
            if !(min + total > 0.0) {
                return Err(invalid(format!(
                    "shift {total} produces a non-positive eigenvalue {}",
                    min + total
                )));
            }
        }
    }
    CrossSectionSpectrum::build(generator, total, cutoff)
}
