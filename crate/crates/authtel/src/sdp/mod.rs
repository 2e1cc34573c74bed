//! Dense primal-dual interior-point solver for the small SDPs built from moment matrices,
//! and the driver that re-derives self-testing constants from them.

mod curve;
mod instance;
mod ipm;
mod presolve;
mod solve;

pub use curve::{derive_alpha, fit_alpha, is_monotone, min_fidelity_curve, AlphaDerivation, CurvePoint, MIN_GRID_POINTS};
pub use instance::{LinearForm, SdpConstraint, SdpInstance, SparseSym};
pub use ipm::DIVERGENCE_THRESHOLD;
pub use solve::{
    solve, Infeasibility, SdpSolution, SdpStatus, SolutionReport, Tolerances, TraceRow, CONTRACT_GAP,
    CONTRACT_MIN_EIGENVALUE, CONTRACT_RESIDUAL, REPORT_SCHEMA,
};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SdpError {
    #[error("matrix index {index} outside dimension {dim}")]
    Index { index: usize, dim: usize },
    #[error("non-finite coefficient")]
    NonFinite,
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("degenerate curve: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Npa(#[from] crate::npa::NpaError),
}
