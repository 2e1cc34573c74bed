use serde::{Deserialize, Serialize};

use super::ProtosimError;
use crate::cert::CertificateParams;
use crate::qcore::{
    bell_vector, c, identity, maximally_mixed, rotated_bell_vector, CMatrix, CVector, Extraction, JointState,
    MeasurementModel, Observable,
};
use crate::{Inequality, Trust};

/// Alice's measurement in one tested subset.
#[derive(Debug, Clone)]
pub(crate) enum AliceSetting {
    /// Trusted qubit measurement, given by its +1 projector.
    Trusted(CMatrix),
    /// Setting index of her untrusted device.
    Device(usize),
}

#[derive(Debug, Clone)]
pub(crate) struct SubsetSetting {
    pub label: &'static str,
    pub alice: AliceSetting,
    /// Bob's setting index (0 Z-like, 1 X-like).
    pub bob: usize,
    /// Weight of the subset average in the tested statistic.
    pub sign: f64,
}

/// Trust setting and tested inequality of a protocol run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mode {
    pub trust: Trust,
    pub inequality: Inequality,
}

impl Mode {
    pub fn of(params: &CertificateParams) -> Self {
        Mode { trust: params.trust, inequality: params.inequality }
    }

    /// The pair the extraction isometry should recover: `|Φ⁺⟩` one-sided, the rotated pair
    /// for the device-independent CHSH test.
    pub fn target(&self) -> CVector {
        match self.trust {
            Trust::OneSided => bell_vector(),
            Trust::DeviceIndependent => rotated_bell_vector(),
        }
    }

    pub fn extraction(&self) -> Extraction {
        match self.trust {
            Trust::OneSided => Extraction::Bob,
            Trust::DeviceIndependent => Extraction::Both,
        }
    }

    pub fn ideal_state(&self) -> JointState {
        JointState::pure(&self.target(), (2, 2)).expect("normalized target")
    }

    pub fn ideal_model(&self) -> MeasurementModel {
        match self.trust {
            Trust::OneSided => MeasurementModel::ideal_one_sided(),
            Trust::DeviceIndependent => MeasurementModel::ideal_device_independent(),
        }
    }

    /// `v |target⟩⟨target| + (1 − v) 𝟙/4`.
    pub fn werner(&self, v: f64) -> Result<JointState, ProtosimError> {
        if !(0.0..=1.0).contains(&v) {
            return Err(ProtosimError::Source(format!("visibility {v} outside [0, 1]")));
        }
        let t = self.target();
        let m = &t * t.adjoint() * c(v, 0.0) + maximally_mixed().matrix() * c(1.0 - v, 0.0);
        Ok(JointState::new(m, (2, 2))?)
    }

    /// Rejects states and devices that do not fit this mode.
    pub(crate) fn check(&self, state: &JointState, model: &MeasurementModel) -> Result<(), ProtosimError> {
        let (da, db) = state.dims();
        if db != model.bob.dim() {
            return Err(ProtosimError::Source(format!("Bob's device acts on dimension {}, state has {db}", model.bob.dim())));
        }
        match (self.trust, &model.alice) {
            (Trust::OneSided, _) if da != 2 => Err(ProtosimError::Source("trusted side must be a qubit".into())),
            (Trust::DeviceIndependent, None) => Err(ProtosimError::Source("device-independent runs need Alice's device".into())),
            (Trust::DeviceIndependent, Some(a)) if a.dim() != da => {
                Err(ProtosimError::Source(format!("Alice's device acts on dimension {}, state has {da}", a.dim())))
            }
            _ => Ok(()),
        }
    }

    /// Tested subsets in partition order.
    pub(crate) fn subsets(&self) -> Vec<SubsetSetting> {
        let trusted = |o: Observable| AliceSetting::Trusted(o.plus_projector());
        match (self.trust, self.inequality) {
            (_, Inequality::Steering) => vec![
                SubsetSetting { label: "XX", alice: trusted(Observable::x()), bob: 1, sign: 1.0 },
                SubsetSetting { label: "ZZ", alice: trusted(Observable::z()), bob: 0, sign: 1.0 },
            ],
            (Trust::OneSided, Inequality::Chsh) => {
                let a = |x: usize| trusted(Observable::diagonal(if x == 0 { 1.0 } else { -1.0 }));
                chsh_subsets(a)
            }
            (Trust::DeviceIndependent, Inequality::Chsh) => chsh_subsets(AliceSetting::Device),
        }
    }
}

fn chsh_subsets(alice: impl Fn(usize) -> AliceSetting) -> Vec<SubsetSetting> {
    const LABELS: [&str; 4] = ["A0B0", "A0B1", "A1B0", "A1B1"];
    (0..4)
        .map(|s| {
            let (x, y) = (s / 2, s % 2);
            SubsetSetting { label: LABELS[s], alice: alice(x), bob: y, sign: if x == 1 && y == 1 { -1.0 } else { 1.0 } }
        })
        .collect()
}

/// Reflection taking the rotated pair to `|Φ⁺⟩` when applied to the second qubit.
pub(crate) fn rotated_frame() -> CMatrix {
    let (s, co) = (std::f64::consts::PI / 8.0).sin_cos();
    let m = CMatrix::from_row_slice(2, 2, &[c(co, 0.0), c(s, 0.0), c(s, 0.0), c(-co, 0.0)]);
    debug_assert!(crate::qcore::max_abs_diff(&(&m * &m), &identity(2)) < 1e-12);
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::{fidelity_to_pure, kron, swap_isometry_extract, OutcomeTable};

    fn ideal_value(mode: Mode) -> f64 {
        let state = mode.ideal_state();
        let model = mode.ideal_model();
        mode.subsets()
            .iter()
            .map(|s| {
                let ap = match &s.alice {
                    AliceSetting::Trusted(p) => p.clone(),
                    AliceSetting::Device(x) => model.alice.as_ref().unwrap().projector(*x, 0),
                };
                s.sign * OutcomeTable::new(&state, &ap, &model.bob.projector(s.bob, 0)).unwrap().correlation()
            })
            .sum()
    }

    #[test]
    fn ideal_sources_reach_the_maximum() {
        for (trust, ineq) in [
            (Trust::OneSided, Inequality::Steering),
            (Trust::OneSided, Inequality::Chsh),
            (Trust::DeviceIndependent, Inequality::Chsh),
        ] {
            let mode = Mode { trust, inequality: ineq };
            assert!((ideal_value(mode) - ineq.max_value()).abs() < 1e-12, "{trust} {ineq}");
            let ext = swap_isometry_extract(&mode.ideal_state(), &mode.ideal_model(), mode.extraction()).unwrap();
            assert!((fidelity_to_pure(&ext, &mode.target()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn werner_scales_the_value() {
        let mode = Mode { trust: Trust::DeviceIndependent, inequality: Inequality::Chsh };
        let state = mode.werner(0.8).unwrap();
        let model = mode.ideal_model();
        let v: f64 = mode
            .subsets()
            .iter()
            .map(|s| {
                let AliceSetting::Device(x) = s.alice else { unreachable!() };
                let t = OutcomeTable::new(&state, &model.alice.as_ref().unwrap().projector(x, 0), &model.bob.projector(s.bob, 0));
                s.sign * t.unwrap().correlation()
            })
            .sum();
        assert!((v - 0.8 * 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn frame_maps_rotated_pair_to_bell() {
        let r = rotated_frame();
        let mapped = kron(&identity(2), &r) * rotated_bell_vector();
        assert!((mapped - bell_vector()).norm() < 1e-12);
    }
}
