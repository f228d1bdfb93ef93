//! Studies built on the solver and the resonance toolkit.

mod fd;
mod profile;
mod report;
mod shallow;
mod sweeps;
mod witness;

pub use fd::{
    gateaux_fd_crosscheck, run_fd_check, second_derivative_terms, FdCheckSpec,
    SecondDerivativeTerms, MIN_REGIME_SLOPE, TIME_QUADRATURE_TOLERANCE,
};
pub use profile::Profile;
pub use report::{
    least_squares, log_log_fit, ExperimentReport, LinearFit, NamedFit, Outcome, Series, Verdict,
    REPORT_SCHEMA_VERSION,
};
pub use shallow::{
    run_convergence, run_equicontinuity, tail_profile, ConvergenceStudySpec, EquicontinuitySpec,
    RunSettings,
};
pub use sweeps::{run_resonance_sweep, ResonanceSweepSpec};
pub use witness::{
    gateaux_second_derivative_quadrature, run_instability, witness_data_norm,
    InstabilityWitnessSpec, WitnessProfile, MIN_SEPARATION, REFINEMENT_TOLERANCE,
};
