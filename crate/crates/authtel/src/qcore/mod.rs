//! Exact linear algebra for the shared pair: states, dichotomic observables,
//! measurement models, Born-rule sampling, the SWAP isometry and teleportation.

mod isometry;
mod json;
mod observable;
pub mod random;
mod sampling;
mod state;
mod teleport;

pub use isometry::{swap_isometry_extract, Extraction};
pub use json::{ComplexMatrixDoc, QcoreDocument, SCHEMA};
pub use observable::{
    chsh_value, correlation, steering_value, Assemblage, ChshSettings, MeasurementModel, Observable,
    ObservableLabel, SideModel,
};
pub use sampling::{sample_round, OutcomeTable};
pub use state::{
    bell_state, bell_vector, fidelity_to_pure, maximally_mixed, rotated_bell_vector, werner_state,
    JointState, TwoQubitState,
};
pub use teleport::{haar_qubit, teleport_average_fidelity, TeleportEstimate};

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type CVector = nalgebra::DVector<C64>;

/// Deviation allowed before symmetrization.
pub const HERMITIAN_TOL: f64 = 1e-10;
/// Trace tolerance for normalized states.
pub const TRACE_TOL: f64 = 1e-12;
/// Smallest eigenvalue accepted for a PSD state.
pub const EIGEN_TOL: f64 = -1e-10;
/// Tolerance for projector idempotence and completeness.
pub const PROJECTOR_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QcoreError {
    #[error("matrix is not Hermitian (deviation {deviation:.3e})")]
    NotHermitian { deviation: f64 },
    #[error("trace is {trace}, expected 1")]
    TraceNotOne { trace: f64 },
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPositive { min_eigenvalue: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("visibility {0} outside [0, 1]")]
    InvalidVisibility(f64),
    #[error("observable does not square to the identity (deviation {deviation:.3e})")]
    NotInvolution { deviation: f64 },
    #[error("invalid projector for setting {setting}: {reason}")]
    InvalidProjector { setting: usize, reason: String },
    #[error("state vector has zero norm")]
    ZeroVector,
    #[error("malformed document: {0}")]
    Document(String),
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)])
}

/// Largest entrywise modulus of `m - m†`.
pub(crate) fn hermitian_deviation(m: &CMatrix) -> f64 {
    let mut dev: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Checks Hermiticity at [`HERMITIAN_TOL`] and returns the symmetrized matrix.
pub(crate) fn checked_hermitian(m: &CMatrix) -> Result<CMatrix, QcoreError> {
    if m.nrows() != m.ncols() {
        return Err(QcoreError::DimensionMismatch { expected: m.nrows(), found: m.ncols() });
    }
    let deviation = hermitian_deviation(m);
    if deviation > HERMITIAN_TOL || !deviation.is_finite() {
        return Err(QcoreError::NotHermitian { deviation });
    }
    Ok(symmetrize(m))
}

pub(crate) fn min_eigenvalue(m: &CMatrix) -> f64 {
    m.clone().symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
}

pub fn trace(m: &CMatrix) -> C64 {
    m.diagonal().iter().sum()
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// Partial trace over the second factor of a `da*db` square matrix.
pub fn trace_out_second(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    let mut out = CMatrix::zeros(da, da);
    for a in 0..da {
        for ap in 0..da {
            let mut s = C64::new(0.0, 0.0);
            for b in 0..db {
                s += m[(a * db + b, ap * db + b)];
            }
            out[(a, ap)] = s;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partial_trace_of_product() {
        let a = CMatrix::from_row_slice(2, 2, &[c(0.3, 0.0), c(0.1, 0.2), c(0.1, -0.2), c(0.7, 0.0)]);
        let b = CMatrix::identity(3, 3) * c(1.0 / 3.0, 0.0);
        let reduced = trace_out_second(&kron(&a, &b), 2, 3);
        assert!(max_abs_diff(&reduced, &a) < 1e-15);
    }

    #[test]
    fn hermitian_check_rejects() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert!(matches!(checked_hermitian(&m), Err(QcoreError::NotHermitian { .. })));
    }
}
