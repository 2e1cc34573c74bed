use std::f64::consts::FRAC_1_SQRT_2;

use serde::{Deserialize, Serialize};

use super::{
    c, checked_hermitian, identity, kron, max_abs_diff, pauli_x, pauli_z, trace, trace_out_second,
    CMatrix, JointState, QcoreError, TwoQubitState, PROJECTOR_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ObservableLabel {
    X,
    Z,
    Custom,
}

/// A ±1-valued qubit observable.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    matrix: CMatrix,
    label: ObservableLabel,
}

impl Observable {
    pub fn new(matrix: CMatrix, label: ObservableLabel) -> Result<Self, QcoreError> {
        if matrix.nrows() != 2 || matrix.ncols() != 2 {
            return Err(QcoreError::DimensionMismatch { expected: 2, found: matrix.nrows() });
        }
        let matrix = checked_hermitian(&matrix)?;
        let deviation = max_abs_diff(&(&matrix * &matrix), &identity(2));
        if deviation > 1e-12 {
            return Err(QcoreError::NotInvolution { deviation });
        }
        Ok(Observable { matrix, label })
    }

    pub fn custom(matrix: CMatrix) -> Result<Self, QcoreError> {
        Observable::new(matrix, ObservableLabel::Custom)
    }

    pub fn x() -> Self {
        Observable { matrix: pauli_x(), label: ObservableLabel::X }
    }

    pub fn z() -> Self {
        Observable { matrix: pauli_z(), label: ObservableLabel::Z }
    }

    /// `(Z + s X)/√2` for `s = ±1`.
    pub fn diagonal(sign: f64) -> Self {
        let m = (pauli_z() + pauli_x() * c(sign, 0.0)) * c(FRAC_1_SQRT_2, 0.0);
        Observable { matrix: m, label: ObservableLabel::Custom }
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn label(&self) -> ObservableLabel {
        self.label
    }

    /// Projector onto the +1 eigenspace.
    pub fn plus_projector(&self) -> CMatrix {
        (identity(2) + &self.matrix) * c(0.5, 0.0)
    }
}

/// Four observables `A_0, A_1, B_0, B_1` for a CHSH test.
#[derive(Debug, Clone, PartialEq)]
pub struct ChshSettings {
    pub alice: [Observable; 2],
    pub bob: [Observable; 2],
}

impl ChshSettings {
    /// Settings reaching 2√2 on (|00⟩+|11⟩)/√2.
    pub fn optimal() -> Self {
        ChshSettings {
            alice: [Observable::diagonal(1.0), Observable::diagonal(-1.0)],
            bob: [Observable::z(), Observable::x()],
        }
    }
}

/// Projective two-outcome measurements on one side: `E_{0|y}` for settings
/// `y = 0` (the Z-like setting) and `y = 1` (the X-like setting).
#[derive(Debug, Clone, PartialEq)]
pub struct SideModel {
    dim: usize,
    projectors: [CMatrix; 2],
}

impl SideModel {
    pub fn new(projectors: [CMatrix; 2]) -> Result<Self, QcoreError> {
        let dim = projectors[0].nrows();
        let mut checked = Vec::with_capacity(2);
        for (y, p) in projectors.iter().enumerate() {
            if p.nrows() != dim || p.ncols() != dim {
                return Err(QcoreError::DimensionMismatch { expected: dim, found: p.nrows() });
            }
            let p = checked_hermitian(p).map_err(|e| QcoreError::InvalidProjector { setting: y, reason: e.to_string() })?;
            let deviation = max_abs_diff(&(&p * &p), &p);
            if deviation > PROJECTOR_TOL {
                return Err(QcoreError::InvalidProjector {
                    setting: y,
                    reason: format!("not idempotent (deviation {deviation:.3e})"),
                });
            }
            checked.push(p);
        }
        let p1 = checked.pop().unwrap();
        let p0 = checked.pop().unwrap();
        Ok(SideModel { dim, projectors: [p0, p1] })
    }

    /// `E_{0|0} = |0⟩⟨0|`, `E_{0|1} = |+⟩⟨+|`.
    pub fn ideal_qubit() -> Self {
        let p0 = (identity(2) + pauli_z()) * c(0.5, 0.0);
        let p1 = (identity(2) + pauli_x()) * c(0.5, 0.0);
        SideModel { dim: 2, projectors: [p0, p1] }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// `E_{b|y}`; outcome 1 is the complement of outcome 0.
    pub fn projector(&self, y: usize, b: usize) -> CMatrix {
        let e = self.projectors[y].clone();
        if b == 0 {
            e
        } else {
            identity(self.dim) - e
        }
    }

    /// `2 E_{0|y} − 𝟙`.
    pub fn observable(&self, y: usize) -> CMatrix {
        &self.projectors[y] * c(2.0, 0.0) - identity(self.dim)
    }
}

/// Measurement devices of the untrusted side(s).
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementModel {
    pub bob: SideModel,
    /// Present only when Alice's devices are untrusted.
    pub alice: Option<SideModel>,
}

impl MeasurementModel {
    pub fn one_sided(bob: SideModel) -> Self {
        MeasurementModel { bob, alice: None }
    }

    pub fn device_independent(alice: SideModel, bob: SideModel) -> Self {
        MeasurementModel { bob, alice: Some(alice) }
    }

    pub fn ideal_one_sided() -> Self {
        MeasurementModel::one_sided(SideModel::ideal_qubit())
    }

    pub fn ideal_device_independent() -> Self {
        MeasurementModel::device_independent(SideModel::ideal_qubit(), SideModel::ideal_qubit())
    }

    /// Local dimensions `(d_A, d_B)` the model acts on.
    pub fn dims(&self) -> (usize, usize) {
        (self.alice.as_ref().map_or(2, SideModel::dim), self.bob.dim())
    }
}

/// Alice's conditional states `τ_{b|y}` for a trusted qubit A.
#[derive(Debug, Clone, PartialEq)]
pub struct Assemblage {
    /// `elements[y][b]`.
    pub elements: [[CMatrix; 2]; 2],
}

impl Assemblage {
    pub fn new(state: &JointState, bob: &SideModel) -> Result<Self, QcoreError> {
        let (da, db) = state.dims();
        if da != 2 {
            return Err(QcoreError::DimensionMismatch { expected: 2, found: da });
        }
        if db != bob.dim() {
            return Err(QcoreError::DimensionMismatch { expected: db, found: bob.dim() });
        }
        let tau = |y: usize, b: usize| {
            let op = kron(&identity(2), &bob.projector(y, b));
            trace_out_second(&(op * state.matrix()), 2, db)
        };
        Ok(Assemblage { elements: [[tau(0, 0), tau(0, 1)], [tau(1, 0), tau(1, 1)]] })
    }

    /// `Σ_b τ_{b|y}` for setting `y`.
    pub fn marginal(&self, y: usize) -> CMatrix {
        &self.elements[y][0] + &self.elements[y][1]
    }

    /// Largest deviation between the two settings' marginals.
    pub fn signalling(&self) -> f64 {
        max_abs_diff(&self.marginal(0), &self.marginal(1))
    }

    pub fn is_valid(&self) -> bool {
        self.signalling() < 1e-10 && (trace(&self.marginal(0)).re - 1.0).abs() < 1e-10
    }
}

/// `tr((a ⊗ b) ρ)`.
pub fn correlation(rho: &TwoQubitState, a: &Observable, b: &Observable) -> f64 {
    let value = trace(&(kron(a.matrix(), b.matrix()) * rho.matrix()));
    debug_assert!(value.im.abs() < 1e-12);
    value.re
}

/// `⟨X⊗X⟩ + ⟨Z⊗Z⟩`.
pub fn steering_value(rho: &TwoQubitState) -> f64 {
    correlation(rho, &Observable::x(), &Observable::x()) + correlation(rho, &Observable::z(), &Observable::z())
}

/// `⟨A_0B_0⟩ + ⟨A_1B_0⟩ + ⟨A_0B_1⟩ − ⟨A_1B_1⟩`.
pub fn chsh_value(rho: &TwoQubitState, settings: &ChshSettings) -> f64 {
    let [a0, a1] = &settings.alice;
    let [b0, b1] = &settings.bob;
    correlation(rho, a0, b0) + correlation(rho, a1, b0) + correlation(rho, a0, b1) - correlation(rho, a1, b1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{bell_state, maximally_mixed, random, werner_state, CVector};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn correlation_examples() {
        let (x, z) = (Observable::x(), Observable::z());
        assert!((correlation(&bell_state(), &x, &x) - 1.0).abs() < 1e-14);
        let w = werner_state(0.37).unwrap();
        assert!((correlation(&w, &z, &z) - 0.37).abs() < 1e-14);
        assert!(correlation(&maximally_mixed(), &x, &z).abs() < 1e-15);
    }

    #[test]
    fn inequality_values() {
        assert!((steering_value(&bell_state()) - 2.0).abs() < 1e-14);
        assert!((steering_value(&werner_state(0.6).unwrap()) - 1.2).abs() < 1e-14);
        assert!(steering_value(&maximally_mixed()).abs() < 1e-15);
        let opt = ChshSettings::optimal();
        assert!((chsh_value(&bell_state(), &opt) - 2.0 * 2f64.sqrt()).abs() < 1e-14);
        let v = 0.81;
        assert!((chsh_value(&werner_state(v).unwrap(), &opt) - 2.0 * 2f64.sqrt() * v).abs() < 1e-14);
    }

    #[test]
    fn product_state_respects_classical_bound() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut psi = CVector::zeros(4);
        psi[0] = c(1.0, 0.0);
        let rho = TwoQubitState::from_pure(&psi).unwrap();
        for _ in 0..200 {
            let mut obs = || Observable::custom(random::random_qubit_observable(&mut rng)).unwrap();
            let settings = ChshSettings { alice: [obs(), obs()], bob: [obs(), obs()] };
            assert!(chsh_value(&rho, &settings) <= 2.0 + 1e-12);
        }
    }

    #[test]
    fn observable_validation() {
        assert!(Observable::custom(CMatrix::identity(2, 2) * c(0.5, 0.0)).is_err());
        assert!(Observable::custom(-pauli_z()).is_ok());
        let d = Observable::diagonal(-1.0);
        assert!(max_abs_diff(&(d.matrix() * d.matrix()), &identity(2)) < 1e-15);
    }

    #[test]
    fn side_model_rejects_non_projector() {
        let half = CMatrix::identity(2, 2) * c(0.5, 0.0);
        assert!(SideModel::new([half, pauli_z()]).is_err());
        let ideal = SideModel::ideal_qubit();
        assert!(max_abs_diff(&ideal.observable(1), &pauli_x()) < 1e-15);
        assert!(max_abs_diff(&(ideal.projector(0, 0) + ideal.projector(0, 1)), &identity(2)) < 1e-15);
    }

    #[test]
    fn bell_assemblage() {
        let a = Assemblage::new(&bell_state().to_joint(), &SideModel::ideal_qubit()).unwrap();
        assert!(a.is_valid());
        assert!((a.elements[0][0][(0, 0)].re - 0.5).abs() < 1e-15);
        assert!(a.elements[0][0][(1, 1)].norm() < 1e-15);
    }
}
