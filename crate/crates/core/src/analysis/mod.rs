//! Post-hoc diagnostics and oracles over a finished run.
//!
//! Every function here is pure: it reads a [`TrajectoryLog`] (or a vector of
//! inputs) and returns numbers. Nothing mutates the simulation.
//!
//! [`TrajectoryLog`]: crate::harness::log::TrajectoryLog

use thiserror::Error;

pub mod auxiliary;
pub mod consensus_point;
pub mod decomposition;
pub mod lyapunov;
pub mod metrics;
pub mod numeric;
pub mod regression;
pub mod truncation;

pub use auxiliary::{
    build_auxiliary, verify_centralized_recursion, AuxiliarySequences, CatchUpConvention,
    RecursionCheck,
};
pub use consensus_point::{consensus_point, invert_gain, ConsensusPoint};
pub use decomposition::{decomposition_max_error, noise_decomposition, NoiseParts};
pub use lyapunov::{gain_roots, lyapunov_gradient_error, lyapunov_v};
pub use metrics::{consensus_metrics, verification_report, MetricsRow, VerificationReport};
pub use regression::{consensus_residual, regression_g};
pub use truncation::{m_of, truncation_times, TruncationTimes, Window};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("{what} cross-check failed at index {index}: discrepancy {error:e}")]
    CrossCheck {
        what: &'static str,
        index: usize,
        error: f64,
    },
    #[error("could not bracket a solution for target {target}")]
    BracketFailure { target: f64 },
    #[error("solver residual {residual:e} exceeds tolerance {tol:e}")]
    NotConverged { residual: f64, tol: f64 },
    #[error("step {0} is not in the log")]
    StepNotLogged(u64),
    #[error("log is incomplete: {0}")]
    IncompleteLog(String),
}
