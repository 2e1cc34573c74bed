use rand::Rng;
use serde::{Deserialize, Serialize};

use super::mode::rotated_frame;
use super::protocol::Accepted;
use super::ProtosimError;
use crate::qcore::{identity, kron, teleport_average_fidelity, TeleportEstimate, TwoQubitState};
use crate::Trust;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TeleportReport {
    pub estimate: TeleportEstimate,
    /// Certified fidelity of the withheld pair, which also bounds the teleportation fidelity.
    pub certified: f64,
    /// `estimate.mean − certified`.
    pub margin: f64,
}

impl TeleportReport {
    /// Whether the estimate is consistent with the certificate at three standard errors.
    pub fn honors_certificate(&self) -> bool {
        self.estimate.mean + 3.0 * self.estimate.std_error >= self.certified
    }
}

/// Teleports Haar-random inputs through the extracted withheld pair. In the fully
/// device-independent mode the pair is first rotated into the `|Φ⁺⟩` frame on Bob's side.
pub fn teleport_with_certificate<R: Rng + ?Sized>(
    accepted: &Accepted,
    n_inputs: usize,
    rng: &mut R,
) -> Result<TeleportReport, ProtosimError> {
    let pair = &accepted.withheld;
    let mut resource = pair.extracted()?;
    if pair.mode().trust == Trust::DeviceIndependent {
        let u = kron(&identity(2), &rotated_frame());
        resource = TwoQubitState::new(&u * resource.matrix() * u.adjoint())?;
    }
    let estimate = teleport_average_fidelity(&resource, n_inputs, rng);
    let certified = accepted.certificate.fidelity;
    Ok(TeleportReport { estimate, certified, margin: estimate.mean - certified })
}
