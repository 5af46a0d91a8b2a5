//! Experiment configuration: one JSON document per run.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use spectral_surgery::cylinder::BoundaryCondition;
use spectral_surgery::oned_oracle::SchrodingerProblem;
use spectral_surgery::relative_det::PerModeRule;
use spectral_surgery::spectra::CrossSectionSpectrum;
use spectral_surgery::surgery::{Law, SurgeryModel};

/// Report serialization.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

/// A complete run: the experiment, output controls and the random seed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    #[serde(default)]
    pub format: OutputFormat,
    #[serde(default)]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment) -> Self {
        Self {
            experiment,
            format: OutputFormat::Json,
            output: None,
            seed: 0,
        }
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// One experiment per subcommand.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    DetCylinder(DetCylinderParams),
    Zeta(ZetaParams),
    RelativeDet(RelativeDetParams),
    BfkCheck(BfkCheckParams),
    Surgery(SurgeryParams),
    ScatteringCheck(ScatteringCheckParams),
    #[serde(rename = "oracle-1d")]
    Oracle1d(Oracle1dParams),
    Acceptance(AcceptanceParams),
}

impl Experiment {
    pub fn name(&self) -> &'static str {
        match self {
            Experiment::DetCylinder(_) => "det-cylinder",
            Experiment::Zeta(_) => "zeta",
            Experiment::RelativeDet(_) => "relative-det",
            Experiment::BfkCheck(_) => "bfk-check",
            Experiment::Surgery(_) => "surgery",
            Experiment::ScatteringCheck(_) => "scattering-check",
            Experiment::Oracle1d(_) => "oracle-1d",
            Experiment::Acceptance(_) => "acceptance",
        }
    }
}

fn dirichlet() -> BoundaryCondition {
    BoundaryCondition::Dirichlet
}

fn tol_1e5() -> f64 {
    1e-5
}

fn tol_1e6() -> f64 {
    1e-6
}

fn tol_1e8() -> f64 {
    1e-8
}

fn tol_1e10() -> f64 {
    1e-10
}

fn tol_probe() -> f64 {
    0.02
}

fn trials() -> usize {
    1000
}

fn max_dim() -> usize {
    8
}

/// Determinant of `-∂²_u + Δ_Y` on `[0, length] × Y`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetCylinderParams {
    pub spectrum: CrossSectionSpectrum,
    pub length: f64,
    #[serde(default = "dirichlet")]
    pub left: BoundaryCondition,
    #[serde(default = "dirichlet")]
    pub right: BoundaryCondition,
    /// Relative tolerance between independent evaluations.
    #[serde(default = "tol_1e6")]
    pub tolerance: f64,
}

/// Spectral zeta invariants of `Δ_Y` and values at extra points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZetaParams {
    pub spectrum: CrossSectionSpectrum,
    #[serde(default)]
    pub s: Vec<f64>,
    /// Tolerance of the closed-form cross-checks.
    #[serde(default = "tol_1e8")]
    pub tolerance: f64,
}

/// Relative determinant of a per-mode pair, optionally with the small-λ probe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelativeDetParams {
    pub spectrum: CrossSectionSpectrum,
    pub rule: PerModeRule,
    #[serde(default)]
    pub probe: bool,
    /// Relative tolerance against the gluing route.
    #[serde(default = "tol_1e5")]
    pub tolerance: f64,
    /// Absolute tolerance of the fitted small-λ exponent.
    #[serde(default = "tol_probe")]
    pub probe_tolerance: f64,
}

/// Two-hypersurface gluing identity at several spectral parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BfkCheckParams {
    pub model: SurgeryModel,
    pub z: Vec<f64>,
    #[serde(default = "tol_1e6")]
    pub tolerance: f64,
}

/// An adiabatic law along a grid of neck lengths.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurgeryParams {
    pub model: SurgeryModel,
    pub law: Law,
    pub grid: Vec<f64>,
    /// Overrides the law's default relative tolerance.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

/// Brute-force block-determinant identity on random involution pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScatteringCheckParams {
    #[serde(default = "trials")]
    pub trials: usize,
    #[serde(default = "max_dim")]
    pub max_dim: usize,
    #[serde(default = "tol_1e10")]
    pub tolerance: f64,
}

/// Gelfand–Yaglom determinant with optional gluing cuts.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Oracle1dParams {
    pub problem: SchrodingerProblem,
    #[serde(default)]
    pub cuts: Vec<f64>,
    #[serde(default = "tol_1e8")]
    pub tolerance: f64,
}

/// The full acceptance suite.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AcceptanceParams {}
