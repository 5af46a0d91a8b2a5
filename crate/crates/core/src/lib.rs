//! Zeta-regularized determinants, relative determinants and Dirichlet-to-Neumann
//! determinants of Laplace-type operators on product geometries `[a, b] × Y`, with
//! the gluing identities and adiabatic-limit laws checked against independent
//! one-dimensional and closed-form oracles.

pub mod acceptance;
pub mod cylinder;
pub mod dtn;
pub mod error;
pub mod extrapolate;
pub mod mellin;
pub mod oned_oracle;
pub mod quad;
pub mod relative_det;
pub mod report;
pub mod scattering;
pub mod special_fn;
pub mod spectra;
pub mod surgery;
pub mod zeta_det;

pub use error::{Error, Result};
