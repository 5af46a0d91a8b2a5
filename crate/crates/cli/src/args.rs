//! Command-line flags and their translation into an [`ExperimentConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use spectral_surgery::cylinder::BoundaryCondition;
use spectral_surgery::oned_oracle::{Potential, SchrodingerProblem};
use spectral_surgery::relative_det::PerModeRule;
use spectral_surgery::spectra::{
    circle_spectrum, dirichlet_interval_spectrum, point_spectrum, shift_spectrum, torus_spectrum, CrossSectionSpectrum,
};
use spectral_surgery::surgery::{Cap, Law, SurgeryModel};
use spectral_surgery::Result;

use crate::config::*;

#[derive(Parser, Debug)]
#[command(
    name = "spectral-surgery",
    version,
    about = "Determinants on product geometries and their adiabatic limits"
)]
pub struct Cli {
    /// Experiment configuration (JSON); replaces the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Report format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,
    /// Report path; stdout when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Print the resolved configuration instead of running it.
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Option<Command>,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Determinant of -d²/du² + Δ_Y on [0, L] × Y.
    DetCylinder {
        #[command(flatten)]
        y: SpectrumArgs,
        #[arg(long)]
        length: f64,
        #[arg(long, default_value = "dirichlet", value_parser = parse_serde::<BoundaryCondition>)]
        left: BoundaryCondition,
        #[arg(long, default_value = "dirichlet", value_parser = parse_serde::<BoundaryCondition>)]
        right: BoundaryCondition,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Zeta invariants of Δ_Y.
    Zeta {
        #[command(flatten)]
        y: SpectrumArgs,
        /// Extra evaluation points.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        s: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// Relative determinant of a per-mode pair.
    RelativeDet {
        #[command(flatten)]
        y: SpectrumArgs,
        #[arg(long, value_enum)]
        rule: RuleArg,
        /// Translation length for `translate` and `neumann-cap`.
        #[arg(long, default_value_t = 1.0)]
        a: f64,
        /// Also fit the small-λ exponent.
        #[arg(long)]
        probe: bool,
        #[arg(long, default_value_t = 1e-5)]
        tolerance: f64,
    },
    /// Two-hypersurface gluing identity.
    BfkCheck {
        #[command(flatten)]
        y: SpectrumArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Spectral parameters.
        #[arg(long, value_delimiter = ',', default_value = "0.3,1,10")]
        z: Vec<f64>,
        #[arg(long, default_value_t = 1e-6)]
        tolerance: f64,
    },
    /// Adiabatic law along a grid of neck half-lengths.
    Surgery {
        #[command(flatten)]
        y: SpectrumArgs,
        #[command(flatten)]
        model: ModelArgs,
        /// Spectral shift of the model.
        #[arg(long, default_value_t = 0.0)]
        z: f64,
        #[arg(long, value_parser = parse_serde::<Law>)]
        law: Law,
        #[arg(long, value_delimiter = ',', default_value = "1,2,4,8")]
        grid: Vec<f64>,
        #[arg(long)]
        tolerance: Option<f64>,
    },
    /// Block-determinant identity on random involution pairs.
    ScatteringCheck {
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        max_dim: usize,
        #[arg(long, default_value_t = 1e-10)]
        tolerance: f64,
    },
    /// Gelfand–Yaglom determinant of -d²/dx² + V + z with constant V.
    #[command(name = "oracle-1d")]
    Oracle1d {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        potential: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        a: f64,
        #[arg(long, default_value_t = 1.0, allow_hyphen_values = true)]
        b: f64,
        #[arg(long, default_value = "dirichlet", value_parser = parse_serde::<BoundaryCondition>)]
        left: BoundaryCondition,
        #[arg(long, default_value = "dirichlet", value_parser = parse_serde::<BoundaryCondition>)]
        right: BoundaryCondition,
        #[arg(long, default_value_t = 0.0)]
        shift: f64,
        /// Interior cut points for the gluing check.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        cuts: Vec<f64>,
        #[arg(long, default_value_t = 1e-8)]
        tolerance: f64,
    },
    /// The full acceptance suite.
    Acceptance,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossSection {
    Circle,
    Torus,
    Point,
    DirichletInterval,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum RuleArg {
    Identical,
    NeumannVsDirichlet,
    Translate,
    NeumannCap,
}

/// Cross-section `Y` and an optional spectral shift.
#[derive(Args, Debug)]
pub struct SpectrumArgs {
    #[arg(long, value_enum, default_value = "circle")]
    pub cross_section: CrossSection,
    /// Length of the circle, torus side or interval.
    #[arg(long, default_value_t = 1.0)]
    pub circumference: f64,
    /// Number of zero modes of a point cross-section.
    #[arg(long, default_value_t = 1)]
    pub modes: u64,
    /// Constant added to Δ_Y.
    #[arg(long, default_value_t = 0.0)]
    pub y_shift: f64,
    /// Eigenvalue cutoff of the explicit part of the spectrum.
    #[arg(long, default_value_t = 1e4)]
    pub cutoff: f64,
}

/// Caps and neck of a product model.
#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 0.7)]
    pub cap1_length: f64,
    #[arg(long, default_value = "dirichlet", value_parser = parse_serde::<BoundaryCondition>)]
    pub cap1_bc: BoundaryCondition,
    #[arg(long, default_value_t = 1.3)]
    pub cap2_length: f64,
    #[arg(long, default_value = "dirichlet", value_parser = parse_serde::<BoundaryCondition>)]
    pub cap2_bc: BoundaryCondition,
    /// Drop the second cap.
    #[arg(long)]
    pub one_cap: bool,
    /// Neck half-length.
    #[arg(long, default_value_t = 1.0)]
    pub r: f64,
}

/// Parses a kebab-case serde enum name.
fn parse_serde<T: DeserializeOwned>(s: &str) -> std::result::Result<T, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|e| e.to_string())
}

impl SpectrumArgs {
    pub fn build(&self) -> Result<CrossSectionSpectrum> {
        let base = match self.cross_section {
            CrossSection::Circle => circle_spectrum(self.circumference, self.cutoff)?,
            CrossSection::Torus => torus_spectrum(self.circumference, self.cutoff)?,
            CrossSection::Point => point_spectrum(self.modes)?,
            CrossSection::DirichletInterval => dirichlet_interval_spectrum(self.circumference, self.cutoff)?,
        };
        if self.y_shift != 0.0 {
            shift_spectrum(&base, self.y_shift)
        } else {
            Ok(base)
        }
    }
}

impl ModelArgs {
    pub fn build(&self, spectrum: CrossSectionSpectrum, z: f64) -> Result<SurgeryModel> {
        let cap1 = Cap::new(self.cap1_length, self.cap1_bc)?;
        let cap2 = if self.one_cap {
            None
        } else {
            Some(Cap::new(self.cap2_length, self.cap2_bc)?)
        };
        SurgeryModel::new(spectrum, cap1, cap2, self.r, z)
    }
}

impl Command {
    /// The experiment described by the flags.
    pub fn experiment(&self) -> Result<Experiment> {
        Ok(match self {
            Command::DetCylinder {
                y,
                length,
                left,
                right,
                tolerance,
            } => Experiment::DetCylinder(DetCylinderParams {
                spectrum: y.build()?,
                length: *length,
                left: *left,
                right: *right,
                tolerance: *tolerance,
            }),
            Command::Zeta { y, s, tolerance } => Experiment::Zeta(ZetaParams {
                spectrum: y.build()?,
                s: s.clone(),
                tolerance: *tolerance,
            }),
            Command::RelativeDet {
                y,
                rule,
                a,
                probe,
                tolerance,
            } => {
                let rule = match rule {
                    RuleArg::Identical => PerModeRule::Identical,
                    RuleArg::NeumannVsDirichlet => PerModeRule::NeumannVsDirichlet,
                    RuleArg::Translate => PerModeRule::Translate { a: *a },
                    RuleArg::NeumannCap => PerModeRule::NeumannCap { a: *a },
                };
                Experiment::RelativeDet(RelativeDetParams {
                    spectrum: y.build()?,
                    rule,
                    probe: *probe,
                    tolerance: *tolerance,
                    probe_tolerance: 0.02,
                })
            }
            Command::BfkCheck { y, model, z, tolerance } => Experiment::BfkCheck(BfkCheckParams {
                model: model.build(y.build()?, 0.0)?,
                z: z.clone(),
                tolerance: *tolerance,
            }),
            Command::Surgery {
                y,
                model,
                z,
                law,
                grid,
                tolerance,
            } => Experiment::Surgery(SurgeryParams {
                model: model.build(y.build()?, *z)?,
                law: *law,
                grid: grid.clone(),
                tolerance: *tolerance,
            }),
            Command::ScatteringCheck {
                trials,
                max_dim,
                tolerance,
            } => Experiment::ScatteringCheck(ScatteringCheckParams {
                trials: *trials,
                max_dim: *max_dim,
                tolerance: *tolerance,
            }),
            Command::Oracle1d {
                potential,
                a,
                b,
                left,
                right,
                shift,
                cuts,
                tolerance,
            } => Experiment::Oracle1d(Oracle1dParams {
                problem: SchrodingerProblem::new(
                    Potential::Constant { value: *potential },
                    *a,
                    *b,
                    *left,
                    *right,
                    *shift,
                )?,
                cuts: cuts.clone(),
                tolerance: *tolerance,
            }),
            Command::Acceptance => Experiment::Acceptance(AcceptanceParams {}),
        })
    }
}
