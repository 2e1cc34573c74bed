use std::f64::consts::SQRT_2;

use serde::{Deserialize, Serialize};

use super::{CertError, CertificateParams};
use crate::{Inequality, Trust};

/// Identifiers of the closed forms behind a certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FormulaIds {
    pub bound: String,
    pub copies: String,
    pub tail: String,
}

impl FormulaIds {
    fn of(params: &CertificateParams) -> Self {
        let variant = if params.iid { "iid" } else { "noniid" };
        FormulaIds {
            bound: format!("{}.{variant}.{}", params.inequality, if params.iid { "linear" } else { "sqrt" }),
            copies: format!("copies.{}.{variant}.c{}", params.inequality, copy_factor(params)),
            tail: if params.iid { "chernoff-hoeffding".into() } else { "azuma-hoeffding".into() },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCertificate {
    pub params: CertificateParams,
    /// Lower bound on the extracted-state fidelity, clamped to `[0, 1]`.
    pub fidelity: f64,
    /// Lower bound on the probability that the fidelity bound holds, clamped to `[0, 1]`.
    pub probability: f64,
    pub copies: u64,
    /// Total deviation `δ` entering `F ≥ 1 − αδ` (iid) or `F ≥ 1 − √(αδ)` (non-iid).
    pub deviation: f64,
    /// Set when clamping removed all content from the bound.
    pub vacuous: bool,
    pub formula: FormulaIds,
}

/// Leading constant `c` in `K = ⌈(c q² x / ε²) ln(1/ε) + 1⌉`.
fn copy_factor(params: &CertificateParams) -> u32 {
    match (params.inequality, params.iid) {
        (Inequality::Steering, true) => 4,
        (Inequality::Steering, false) => 16,
        (Inequality::Chsh, true) => 8,
        (Inequality::Chsh, false) => 32,
    }
}

/// Number of tested pairs `n = K − 1` before rounding.
pub(crate) fn tested_pairs(params: &CertificateParams) -> f64 {
    let (e, q, x) = (params.epsilon, params.q, params.x);
    f64::from(copy_factor(params)) * q * q * x / (e * e) * (1.0 / e).ln()
}

/// `K` with `K − 1` divisible by the number of tested subsets (2 for steering, 4 for CHSH).
pub fn required_copies(params: &CertificateParams) -> u64 {
    let raw = (tested_pairs(params) + 1.0).ceil();
    let mut k = if raw >= 4.0e18 { 4_000_000_000_000_000_000u64 } else { raw as u64 };
    k = k.max(2);
    let g = params.subsets();
    let rem = (k - 1) % g;
    if rem != 0 {
        k += g - rem;
    }
    k
}

/// `exp(−K d² / 2)`: iid averages of `K` outcomes in `[−1, 1]` falling `d` below the mean.
pub fn chernoff_tail(copies: u64, deviation: f64) -> f64 {
    (-(copies as f64) * deviation * deviation / 2.0).exp()
}

/// `exp(−K d² / 8)`: martingale with increments bounded by 2 drifting `K d` below zero.
pub fn azuma_tail(copies: u64, deviation: f64) -> f64 {
    (-(copies as f64) * deviation * deviation / 8.0).exp()
}

/// Total deviation in the closed forms.
pub(crate) fn closed_form_deviation(params: &CertificateParams) -> f64 {
    let (e, q, x) = (params.epsilon, params.q, params.x);
    let l = (1.0 / e).ln();
    match (params.inequality, params.iid) {
        (Inequality::Steering, true) => 2.0 * e / q + e,
        (Inequality::Steering, false) => {
            2.0 * e / q + e / 2.0 + (4.0 * q * q * x * e * l + 2.0 * e * e) / (8.0 * q * q * x * l + e * e)
        }
        (Inequality::Chsh, true) => 4.0 * e / q + e,
        (Inequality::Chsh, false) => {
            4.0 * e / q
                + 3.0 * e / 4.0
                + (4.0 * q * q * x * e * l + (2.0 + SQRT_2) * e * e) / (16.0 * q * q * x * l + 2.0 * e * e)
        }
    }
}

/// Fidelity and success-probability bounds with the matching copy count.
pub fn fidelity_bound(params: &CertificateParams) -> Result<FidelityCertificate, CertError> {
    params.validate()?;
    let delta = closed_form_deviation(params);
    let confidence = 1.0 - params.epsilon.powf(params.x);
    let (raw_f, raw_p) = if params.iid {
        let f = 1.0 - params.alpha * delta;
        (f, confidence)
    } else {
        let f = 1.0 - (params.alpha * delta).sqrt();
        (f, confidence * f)
    };
    let fidelity = raw_f.clamp(0.0, 1.0);
    let probability = raw_p.clamp(0.0, 1.0);
    Ok(FidelityCertificate {
        params: *params,
        fidelity,
        probability,
        copies: required_copies(params),
        deviation: delta,
        vacuous: fidelity <= 0.0 || probability <= 0.0,
        formula: FormulaIds::of(params),
    })
}

/// From an average-fidelity bound `1 − η`: a uniformly random member has fidelity at least
/// `1 − √η` with probability at least `1 − √η`.
pub fn lemma4_individual(eta: f64) -> Result<(f64, f64), CertError> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(CertError::Parameter { name: "eta", value: eta, reason: "must lie in [0, 1]" });
    }
    let s = eta.sqrt();
    Ok((1.0 - s, 1.0 - s))
}

/// Measurement constants: 3.10 (one-sided) and 3.70 (device-independent).
pub fn measurement_alpha(trust: Trust) -> f64 {
    match trust {
        Trust::OneSided => 3.10,
        Trust::DeviceIndependent => 3.70,
    }
}

/// `1 − α′ε` for the measurement self-test, `ε` the gap to maximal violation of the setting's
/// inequality (steering one-sided, CHSH otherwise), clamped to `[0, 1]`.
pub fn measurement_selftest_fidelity(violation: f64, trust: Trust) -> Result<f64, CertError> {
    let max = match trust {
        Trust::OneSided => Inequality::Steering.max_value(),
        Trust::DeviceIndependent => Inequality::Chsh.max_value(),
    };
    if !violation.is_finite() || violation > max + 1e-12 {
        return Err(CertError::Violation { violation, max });
    }
    let eps = (max - violation).max(0.0);
    Ok((1.0 - measurement_alpha(trust) * eps).clamp(0.0, 1.0))
}

/// Step-by-step quantities of the finite-statistics argument, recomputed from the protocol
/// structure rather than from the closed forms.
#[cfg(test)]
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DerivationScratch {
    /// Tested pairs.
    pub n: f64,
    pub subsets: f64,
    /// Size of the subset that also contains the untested pair (non-iid) or of any subset.
    pub k_first: f64,
    pub k_other: f64,
    /// Ideal correlator value per subset.
    pub mu: f64,
    /// Observed deviation per subset after splitting `ε` evenly.
    pub eps_subset: f64,
    /// Worst-case deviation of the untested pair (non-iid only).
    pub eps_hypothetical: Option<f64>,
    /// `γ = K_sub · ε/q`, the tail parameter per subset.
    pub gamma: f64,
    /// Per-subset tail probability.
    pub tail: f64,
    pub delta: f64,
    /// `αδ`.
    pub eta: f64,
    /// `√η − η` from the averaging lemma (non-iid only).
    pub beta: Option<f64>,
}

#[cfg(test)]
pub(crate) fn derivation_scratch(params: &CertificateParams, n: f64) -> DerivationScratch {
    let (e, q) = (params.epsilon, params.q);
    let g = params.subsets() as f64;
    let mu = params.inequality.max_value() / g;
    let k_sub = n / g;
    let eps_subset = e / g;
    let eps_hypothetical = (!params.iid).then_some(1.0 + mu);
    // Shift of the first subset's mean when the untested pair is counted at its worst case.
    let first_shift = match eps_hypothetical {
        Some(h) => (k_sub * eps_subset + h) / (k_sub + 1.0),
        None => eps_subset,
    };
    let delta = g * e / q + (g - 1.0) * eps_subset + first_shift;
    let gamma = k_sub * e / q;
    let dev = gamma / k_sub;
    let tail = if params.iid { (-k_sub * dev * dev / 2.0).exp() } else { (-k_sub * dev * dev / 8.0).exp() };
    let eta = params.alpha * delta;
    DerivationScratch {
        n,
        subsets: g,
        k_first: if params.iid { k_sub } else { k_sub + 1.0 },
        k_other: k_sub,
        mu,
        eps_subset,
        eps_hypothetical,
        gamma,
        tail,
        delta,
        eta,
        beta: (!params.iid).then(|| eta.sqrt() - eta),
    }
}
