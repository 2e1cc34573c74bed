use super::{identity, kron, trace, trace_out_second, CMatrix, JointState, MeasurementModel, QcoreError, SideModel, TwoQubitState};

/// Which untrusted sides the SWAP isometry acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Extraction {
    /// Alice trusted: output is A ⊗ B′.
    Bob,
    /// Both untrusted: output is A′ ⊗ B′.
    Both,
}

/// Kraus operators `E_{0|0}` and `X(𝟙 − E_{0|0})` of the SWAP isometry with the ancilla traced
/// against its computational basis, where `Z = 2E_{0|0} − 𝟙` and `X = 2E_{0|1} − 𝟙`.
fn swap_kraus(side: &SideModel) -> [CMatrix; 2] {
    let p0 = side.projector(0, 0);
    let x = side.observable(1);
    let k1 = x * (identity(side.dim()) - &p0);
    [p0, k1]
}

/// Applies the SWAP isometry to the untrusted side(s) and returns the extracted qubit pair.
pub fn swap_isometry_extract(
    state: &JointState,
    model: &MeasurementModel,
    side: Extraction,
) -> Result<TwoQubitState, QcoreError> {
    let (da, db) = state.dims();
    if db != model.bob.dim() {
        return Err(QcoreError::DimensionMismatch { expected: model.bob.dim(), found: db });
    }
    let kb = swap_kraus(&model.bob);
    let mut out = CMatrix::zeros(4, 4);
    match side {
        Extraction::Bob => {
            if da != 2 {
                return Err(QcoreError::DimensionMismatch { expected: 2, found: da });
            }
            let ops: Vec<CMatrix> = kb.iter().map(|k| kron(&identity(2), k)).collect();
            for (j, kj) in ops.iter().enumerate() {
                let left = kj * state.matrix();
                for (jp, kjp) in ops.iter().enumerate() {
                    let block = trace_out_second(&(&left * kjp.adjoint()), 2, db);
                    for a in 0..2 {
                        for ap in 0..2 {
                            out[(2 * a + j, 2 * ap + jp)] = block[(a, ap)];
                        }
                    }
                }
            }
        }
        Extraction::Both => {
            let alice = model.alice.as_ref().ok_or(QcoreError::DimensionMismatch { expected: da, found: 0 })?;
            if da != alice.dim() {
                return Err(QcoreError::DimensionMismatch { expected: alice.dim(), found: da });
            }
            let ka = swap_kraus(alice);
            let mut ops = Vec::with_capacity(4);
            for a in &ka {
                for b in &kb {
                    ops.push(kron(a, b));
                }
            }
            for (r, kr) in ops.iter().enumerate() {
                let left = kr * state.matrix();
                for (s, ks) in ops.iter().enumerate() {
                    out[(r, s)] = trace(&(&left * ks.adjoint()));
                }
            }
        }
    }
    TwoQubitState::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{
        bell_state, bell_vector, c, fidelity_to_pure, max_abs_diff, random, rotated_bell_vector, werner_state, CVector,
    };
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ideal_bell_is_fixed() {
        let out = swap_isometry_extract(&bell_state().to_joint(), &MeasurementModel::ideal_one_sided(), Extraction::Bob).unwrap();
        assert!(max_abs_diff(out.matrix(), bell_state().matrix()) < 1e-14);
    }

    #[test]
    fn ideal_di_returns_rotated_pair() {
        let psi = JointState::pure(&rotated_bell_vector(), (2, 2)).unwrap();
        let out = swap_isometry_extract(&psi, &MeasurementModel::ideal_device_independent(), Extraction::Both).unwrap();
        assert!((fidelity_to_pure(&out, &rotated_bell_vector()) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn werner_purification() {
        // Purify ρ(v) on A ⊗ (B ⊗ R) with R four-dimensional; Bob's ideal Paulis act on B only.
        let v = 0.63;
        let rho = werner_state(v).unwrap();
        let eig = rho.matrix().clone().symmetric_eigen();
        let mut psi = CVector::zeros(16);
        for k in 0..4 {
            let lam = eig.eigenvalues[k].max(0.0).sqrt();
            for idx in 0..4 {
                let (a, b) = (idx / 2, idx % 2);
                psi[a * 8 + b * 4 + k] += eig.eigenvectors[(idx, k)] * c(lam, 0.0);
            }
        }
        let state = JointState::pure(&psi, (2, 8)).unwrap();
        let ideal = SideModel::ideal_qubit();
        let lift = |p: CMatrix| kron(&p, &identity(4));
        let bob = SideModel::new([lift(ideal.projector(0, 0)), lift(ideal.projector(1, 0))]).unwrap();
        let out = swap_isometry_extract(&state, &MeasurementModel::one_sided(bob), Extraction::Bob).unwrap();
        assert!((fidelity_to_pure(&out, &bell_vector()) - (1.0 + 3.0 * v) / 4.0).abs() < 1e-12);
    }

    #[test]
    fn output_trace_is_one() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for d in [2, 3, 4] {
            let state = random::random_pure_state((2, d), &mut rng);
            let model = random::random_one_sided_model(d, &mut rng);
            let out = swap_isometry_extract(&state, &model, Extraction::Bob).unwrap();
            assert!((crate::qcore::trace(out.matrix()).re - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn dimension_mismatch() {
        let model = MeasurementModel::one_sided(SideModel::new([identity(3), identity(3)]).unwrap());
        assert!(swap_isometry_extract(&bell_state().to_joint(), &model, Extraction::Bob).is_err());
        let ideal = MeasurementModel::ideal_one_sided();
        assert!(swap_isometry_extract(&bell_state().to_joint(), &ideal, Extraction::Both).is_err());
    }
}
