use crate::qcore::{
    bell_vector, fidelity_to_pure, kron, pauli_x, pauli_z, rotated_bell_vector, swap_isometry_extract, CMatrix,
    Extraction, JointState, MeasurementModel,
};
use crate::Trust;

use super::{NpaError, Objective};

/// Fidelity of the SWAP-extracted pair with its ideal target, computed from the isometry
/// itself rather than from moments. Measurement objectives apply the untrusted observables
/// (Pauli observables on a trusted side) before extraction and compare against the ideal
/// state acted on by the corresponding Pauli pair.
pub fn isometry_fidelity(
    trust: Trust,
    objective: Objective,
    state: &JointState,
    model: &MeasurementModel,
) -> Result<f64, NpaError> {
    if !Objective::for_trust(trust).contains(&objective) {
        return Err(NpaError::Unsupported(format!("objective {objective} in the {trust} setting")));
    }
    let pauli = |s: usize| if s == 0 { pauli_z() } else { pauli_x() };
    let (ideal, extraction) = match trust {
        Trust::OneSided => (bell_vector(), Extraction::Bob),
        Trust::DeviceIndependent => (rotated_bell_vector(), Extraction::Both),
    };
    let mismatch = |e: crate::qcore::QcoreError| NpaError::ModelMismatch(e.to_string());
    let (input, target) = match objective.settings() {
        None => (state.clone(), ideal),
        Some((sa, sb)) => {
            let a_op: CMatrix = match (&model.alice, trust) {
                (Some(alice), Trust::DeviceIndependent) => alice.observable(sa),
                _ => pauli(sa),
            };
            let b_op = model.bob.observable(sb);
            let target = kron(&pauli(sa), &pauli(sb)) * ideal;
            (state.apply_local(&a_op, &b_op).map_err(mismatch)?, target)
        }
    };
    let out = swap_isometry_extract(&input, model, extraction).map_err(mismatch)?;
    Ok(fidelity_to_pure(&out, &target))
}
