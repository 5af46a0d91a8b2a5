//! Machine-readable check results shared by the acceptance suite and the CLI.

use serde::{Deserialize, Serialize};
use serde_json::Value;

/// Marker serialized as the string `"heuristic"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Heuristic {
    Heuristic,
}

/// Error bound attached to a reported number: a certified bound or a `"heuristic"` tag.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ErrorBound {
    Certified(f64),
    Heuristic(Heuristic),
}

impl ErrorBound {
    pub fn heuristic() -> Self {
        ErrorBound::Heuristic(Heuristic::Heuristic)
    }

    pub fn certified(bound: f64) -> Self {
        ErrorBound::Certified(bound)
    }
}

/// One reported number. Checks pass iff `|value - expected| ≤ tolerance`, scaled by
/// `|expected|` when `relative` is set; plain values carry no expectation and pass.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckResult {
    pub name: String,
    /// `null` in JSON when no value could be computed.
    #[serde(deserialize_with = "nan_from_null")]
    pub value: f64,
    pub error_bound: ErrorBound,
    pub expected: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub relative: bool,
    pub pass: bool,
}

impl CheckResult {
    pub fn absolute(
        name: impl Into<String>,
        value: f64,
        error_bound: ErrorBound,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        let pass = (value - expected).abs() <= tolerance;
        Self {
            name: name.into(),
            value,
            error_bound,
            expected: Some(expected),
            tolerance: Some(tolerance),
            relative: false,
            pass,
        }
    }

    pub fn relative(
        name: impl Into<String>,
        value: f64,
        error_bound: ErrorBound,
        expected: f64,
        tolerance: f64,
    ) -> Self {
        let pass = (value - expected).abs() <= tolerance * expected.abs();
        Self {
            name: name.into(),
            value,
            error_bound,
            expected: Some(expected),
            tolerance: Some(tolerance),
            relative: true,
            pass,
        }
    }

    /// A reported value without an expectation.
    pub fn value(name: impl Into<String>, value: f64, error_bound: ErrorBound) -> Self {
        Self {
            name: name.into(),
            value,
            error_bound,
            expected: None,
            tolerance: None,
            relative: false,
            pass: value.is_finite(),
        }
    }

    /// Boolean property reported as `1` (holds) or `0`, expected `1`.
    pub fn flag(name: impl Into<String>, holds: bool) -> Self {
        Self {
            name: name.into(),
            value: if holds { 1.0 } else { 0.0 },
            error_bound: ErrorBound::Certified(0.0),
            expected: Some(1.0),
            tolerance: Some(0.0),
            relative: false,
            pass: holds,
        }
    }

    /// A failed check carrying an error message in its name.
    pub fn failed(name: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Self {
            name: format!("{}: {message}", name.into()),
            value: f64::NAN,
            error_bound: ErrorBound::heuristic(),
            expected: None,
            tolerance: None,
            relative: false,
            pass: false,
        }
    }
}

fn nan_from_null<'de, D: serde::Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
}

/// Report written by every CLI command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report {
    pub command: String,
    pub config: Value,
    pub results: Vec<CheckResult>,
    pub seed: u64,
}

impl Report {
    pub fn pass(&self) -> bool {
        self.results.iter().all(|r| r.pass)
    }

    pub fn failing(&self) -> impl Iterator<Item = &CheckResult> {
        self.results.iter().filter(|r| !r.pass)
    }

    /// Header plus one row per result.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("name,value,error_bound,expected,tolerance,relative,pass\n");
        for r in &self.results {
            let bound = match r.error_bound {
                ErrorBound::Certified(b) => format!("{b:e}"),
                ErrorBound::Heuristic(_) => "heuristic".to_string(),
            };
            let expected = r.expected.map(|e| format!("{e:.17e}")).unwrap_or_default();
            let tolerance = r.tolerance.map(|t| format!("{t:e}")).unwrap_or_default();
            s.push_str(&format!(
                "{},{:.17e},{},{},{},{},{}\n",
                csv_field(&r.name),
                r.value,
                bound,
                expected,
                tolerance,
                r.relative,
                r.pass
            ));
        }
        s
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}
