use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::{
    c, checked_hermitian, kron, min_eigenvalue, trace, CMatrix, CVector, QcoreError, C64, EIGEN_TOL,
    TRACE_TOL,
};

/// Density matrix of a two-qubit pair, qubit A first.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: CMatrix,
}

impl TwoQubitState {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(matrix: CMatrix) -> Result<Self, QcoreError> {
        if matrix.nrows() != 4 || matrix.ncols() != 4 {
            return Err(QcoreError::DimensionMismatch { expected: 4, found: matrix.nrows() });
        }
        let matrix = checked_hermitian(&matrix)?;
        let tr = trace(&matrix);
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(QcoreError::TraceNotOne { trace: tr.re });
        }
        let min_eigenvalue = min_eigenvalue(&matrix);
        if min_eigenvalue < EIGEN_TOL {
            return Err(QcoreError::NotPositive { min_eigenvalue });
        }
        Ok(TwoQubitState { matrix })
    }

    pub fn from_pure(psi: &CVector) -> Result<Self, QcoreError> {
        if psi.len() != 4 {
            return Err(QcoreError::DimensionMismatch { expected: 4, found: psi.len() });
        }
        let psi = normalized(psi)?;
        TwoQubitState::new(&psi * psi.adjoint())
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn to_joint(&self) -> JointState {
        JointState { dims: (2, 2), rho: self.matrix.clone() }
    }
}

/// Density matrix on A ⊗ B with arbitrary local dimensions, row index `a * db + b`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    dims: (usize, usize),
    rho: CMatrix,
}

impl JointState {
    pub fn new(rho: CMatrix, dims: (usize, usize)) -> Result<Self, QcoreError> {
        let n = dims.0 * dims.1;
        if rho.nrows() != n || rho.ncols() != n {
            return Err(QcoreError::DimensionMismatch { expected: n, found: rho.nrows() });
        }
        let rho = checked_hermitian(&rho)?;
        let tr = trace(&rho);
        if (tr.re - 1.0).abs() > 1e-10 {
            return Err(QcoreError::TraceNotOne { trace: tr.re });
        }
        let min_eigenvalue = min_eigenvalue(&rho);
        if min_eigenvalue < EIGEN_TOL {
            return Err(QcoreError::NotPositive { min_eigenvalue });
        }
        Ok(JointState { dims, rho })
    }

    pub fn pure(psi: &CVector, dims: (usize, usize)) -> Result<Self, QcoreError> {
        if psi.len() != dims.0 * dims.1 {
            return Err(QcoreError::DimensionMismatch { expected: dims.0 * dims.1, found: psi.len() });
        }
        let psi = normalized(psi)?;
        Ok(JointState { dims, rho: &psi * psi.adjoint() })
    }

    pub fn dims(&self) -> (usize, usize) {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.rho
    }

    /// `(a ⊗ b) ρ (a ⊗ b)†`, without renormalization.
    pub fn apply_local(&self, a: &CMatrix, b: &CMatrix) -> Result<JointState, QcoreError> {
        if a.nrows() != self.dims.0 {
            return Err(QcoreError::DimensionMismatch { expected: self.dims.0, found: a.nrows() });
        }
        if b.nrows() != self.dims.1 {
            return Err(QcoreError::DimensionMismatch { expected: self.dims.1, found: b.nrows() });
        }
        let op = kron(a, b);
        Ok(JointState { dims: self.dims, rho: &op * &self.rho * op.adjoint() })
    }

    /// Reduced state of a qubit pair; errors unless both sides are qubits.
    pub fn to_two_qubit(&self) -> Result<TwoQubitState, QcoreError> {
        if self.dims != (2, 2) {
            return Err(QcoreError::DimensionMismatch { expected: 4, found: self.dims.0 * self.dims.1 });
        }
        TwoQubitState::new(self.rho.clone())
    }
}

fn normalized(psi: &CVector) -> Result<CVector, QcoreError> {
    let n = psi.norm();
    if n == 0.0 || !n.is_finite() {
        return Err(QcoreError::ZeroVector);
    }
    Ok(psi / c(n, 0.0))
}

/// (|00⟩ + |11⟩)/√2.
pub fn bell_vector() -> CVector {
    let h = c(FRAC_1_SQRT_2, 0.0);
    let z = c(0.0, 0.0);
    CVector::from_vec(vec![h, z, z, h])
}

/// The Bell pair rotated so that Z⊗Z, X⊗Z, Z⊗X and −X⊗X all have expectation 1/√2.
pub fn rotated_bell_vector() -> CVector {
    let (s, co) = (PI / 8.0).sin_cos();
    let h = FRAC_1_SQRT_2;
    CVector::from_vec(vec![c(h * co, 0.0), c(h * s, 0.0), c(h * s, 0.0), c(-h * co, 0.0)])
}

pub fn bell_state() -> TwoQubitState {
    let v = bell_vector();
    TwoQubitState { matrix: &v * v.adjoint() }
}

pub fn maximally_mixed() -> TwoQubitState {
    TwoQubitState { matrix: CMatrix::identity(4, 4) * c(0.25, 0.0) }
}

/// `v |Φ⁺⟩⟨Φ⁺| + (1 − v) 𝟙/4`.
pub fn werner_state(v: f64) -> Result<TwoQubitState, QcoreError> {
    if !(0.0..=1.0).contains(&v) {
        return Err(QcoreError::InvalidVisibility(v));
    }
    let m = bell_state().matrix * c(v, 0.0) + maximally_mixed().matrix * c(1.0 - v, 0.0);
    Ok(TwoQubitState { matrix: m })
}

/// `⟨φ|ρ|φ⟩` for normalized `φ`, clamped to [0, 1].
pub fn fidelity_to_pure(rho: &TwoQubitState, phi: &CVector) -> f64 {
    let phi = match normalized(phi) {
        Ok(p) if p.len() == 4 => p,
        _ => return 0.0,
    };
    let value: C64 = (phi.adjoint() * rho.matrix() * &phi)[(0, 0)];
    debug_assert!(value.im.abs() < 1e-10);
    value.re.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{max_abs_diff, pauli_x, pauli_z};

    #[test]
    fn bell_entries() {
        let m = bell_state().matrix().clone();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i == 0 || i == 3) && (j == 0 || j == 3) { 0.5 } else { 0.0 };
                assert!((m[(i, j)] - c(expected, 0.0)).norm() < 1e-15);
            }
        }
        let mut eig: Vec<f64> = m.symmetric_eigenvalues().iter().cloned().collect();
        eig.sort_by(|a, b| b.partial_cmp(a).unwrap());
        assert!((eig[0] - 1.0).abs() < 1e-12 && eig[1..].iter().all(|e| e.abs() < 1e-12));
    }

    #[test]
    fn werner_limits_and_fidelity() {
        assert!(max_abs_diff(werner_state(1.0).unwrap().matrix(), bell_state().matrix()) < 1e-15);
        assert!(max_abs_diff(werner_state(0.0).unwrap().matrix(), maximally_mixed().matrix()) < 1e-15);
        let f = fidelity_to_pure(&werner_state(0.88).unwrap(), &bell_vector());
        assert!((f - 0.91).abs() < 1e-12);
        assert!(werner_state(1.2).is_err());
        assert!(werner_state(-0.01).is_err());
    }

    #[test]
    fn fidelity_cases() {
        assert!((fidelity_to_pure(&bell_state(), &bell_vector()) - 1.0).abs() < 1e-14);
        let phi = CVector::from_vec(vec![c(0.6, 0.0), c(0.0, 0.8), c(0.0, 0.0), c(0.0, 0.0)]);
        assert!((fidelity_to_pure(&maximally_mixed(), &phi) - 0.25).abs() < 1e-14);
    }

    #[test]
    fn rotated_bell_correlations() {
        let psi = rotated_bell_vector();
        let ev = |a: &CMatrix, b: &CMatrix| (psi.adjoint() * kron(a, b) * &psi)[(0, 0)].re;
        let (x, z) = (pauli_x(), pauli_z());
        let r = FRAC_1_SQRT_2;
        assert!((ev(&z, &z) - r).abs() < 1e-14);
        assert!((ev(&x, &z) - r).abs() < 1e-14);
        assert!((ev(&z, &x) - r).abs() < 1e-14);
        assert!((ev(&x, &x) + r).abs() < 1e-14);
    }

    #[test]
    fn validation_errors() {
        let mut m = bell_state().matrix().clone();
        m[(0, 0)] = c(0.9, 0.0);
        assert!(matches!(TwoQubitState::new(m), Err(QcoreError::TraceNotOne { .. })));
        let neg = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.2, 0.0), c(-0.2, 0.0), c(0.0, 0.0), c(0.0, 0.0)]));
        assert!(matches!(TwoQubitState::new(neg), Err(QcoreError::NotPositive { .. })));
        let psi = CVector::from_vec(vec![c(1.0, 0.0); 6]);
        assert!(JointState::pure(&psi, (2, 3)).is_ok());
        assert!(JointState::pure(&psi, (2, 2)).is_err());
    }
}
