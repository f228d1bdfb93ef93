//! Pseudospectral toolkit for the intermediate long wave equation, its scaled
//! form and the KdV limit: transforms and norms, dispersion symbols, resonance
//! functions, an integrating-factor solver, and the studies built on them.

pub mod dynamics;
pub mod error;
pub mod experiments;
pub mod quadrature;
pub mod resonance;
pub mod selftest;
pub mod series;
pub mod spectral;
pub mod symbols;

pub use dynamics::{EquationKind, SolverConfig, State, TrajectoryRecord};
pub use error::{Error, Result};
pub use experiments::{ExperimentReport, Outcome, Verdict};
pub use resonance::FrequencyTriple;
pub use spectral::{RealGrid, SpectralField};
pub use symbols::DepthParameter;
