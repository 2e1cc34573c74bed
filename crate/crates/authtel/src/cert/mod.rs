//! Finite-statistics certification: concentration tails, fidelity bounds for the steering and
//! CHSH variants of the protocol (iid and non-iid), copy counts, and the inverse planner.

mod bound;
mod plan;
mod sweep;

use serde::{Deserialize, Serialize};

use crate::{Inequality, Trust};

pub use bound::{
    azuma_tail, chernoff_tail, fidelity_bound, lemma4_individual, measurement_alpha, measurement_selftest_fidelity,
    required_copies, FidelityCertificate, FormulaIds,
};
pub use plan::{max_epsilon, min_werner_visibility, plan, Binding, Plan, PlanBounds, Range};
pub use sweep::{classical_crossing, figure2_rows, write_sweep_csv, Figure2Row, SweepRow, CLASSICAL_FIDELITY};

pub const SCHEMA: &str = "cert/1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CertError {
    #[error("invalid parameter {name} = {value}: {reason}")]
    Parameter { name: &'static str, value: f64, reason: &'static str },
    #[error("the device-independent setting is certified with the CHSH inequality only")]
    Unsupported,
    #[error("violation {violation} exceeds the maximum {max}")]
    Violation { violation: f64, max: f64 },
    #[error("infeasible ({binding}): {detail}")]
    Infeasible { binding: Binding, detail: String },
    #[error("csv: {0}")]
    Csv(String),
}

/// Where a self-testing constant came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaSource {
    PaperDefault,
    SdpDerived,
    Explicit,
}

impl AlphaSource {
    pub fn as_str(self) -> &'static str {
        match self {
            AlphaSource::PaperDefault => "paper-default",
            AlphaSource::SdpDerived => "sdp-derived",
            AlphaSource::Explicit => "explicit",
        }
    }
}

/// Published state constants: 1.26 (one-sided steering), 0.90 (one-sided CHSH), 1.19 (DI CHSH).
pub fn default_alpha(trust: Trust, inequality: Inequality) -> Option<f64> {
    match (trust, inequality) {
        (Trust::OneSided, Inequality::Steering) => Some(1.26),
        (Trust::OneSided, Inequality::Chsh) => Some(0.90),
        (Trust::DeviceIndependent, Inequality::Chsh) => Some(1.19),
        (Trust::DeviceIndependent, Inequality::Steering) => None,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CertificateParams {
    pub trust: Trust,
    pub inequality: Inequality,
    pub iid: bool,
    /// Accepted deviation from maximal violation.
    pub epsilon: f64,
    /// Slack divisor of the statistical deviation.
    pub q: f64,
    /// Confidence exponent: failure probability `ε^x`.
    pub x: f64,
    pub alpha: f64,
    pub alpha_source: AlphaSource,
}

impl CertificateParams {
    /// Parameters with the published constant for the setting.
    pub fn new(trust: Trust, inequality: Inequality, iid: bool, epsilon: f64, q: f64, x: f64) -> Result<Self, CertError> {
        let alpha = default_alpha(trust, inequality).ok_or(CertError::Unsupported)?;
        let p = CertificateParams { trust, inequality, iid, epsilon, q, x, alpha, alpha_source: AlphaSource::PaperDefault };
        p.validate()?;
        Ok(p)
    }

    pub fn with_alpha(mut self, alpha: f64, source: AlphaSource) -> Result<Self, CertError> {
        self.alpha = alpha;
        self.alpha_source = source;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), CertError> {
        let bad = |name, value, reason| Err(CertError::Parameter { name, value, reason });
        if self.trust == Trust::DeviceIndependent && self.inequality == Inequality::Steering {
            return Err(CertError::Unsupported);
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return bad("epsilon", self.epsilon, "must lie in (0, 1)");
        }
        if !(self.q >= 1.0 && self.q.is_finite()) {
            return bad("q", self.q, "must be finite and at least 1");
        }
        if !(self.x > 0.0 && self.x.is_finite()) {
            return bad("x", self.x, "must be finite and positive");
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return bad("alpha", self.alpha, "must be finite and positive");
        }
        Ok(())
    }

    /// Number of tested subsets: two bases for steering, four setting pairs for CHSH.
    pub fn subsets(&self) -> u64 {
        match self.inequality {
            Inequality::Steering => 2,
            Inequality::Chsh => 4,
        }
    }

    /// Acceptance threshold on the estimated inequality value.
    pub fn threshold(&self) -> f64 {
        self.inequality.max_value() - self.epsilon
    }
}

/// JSON envelope for certificates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateDocument {
    pub schema: String,
    pub version: String,
    pub certificate: FidelityCertificate,
}

impl CertificateDocument {
    pub fn new(certificate: FidelityCertificate) -> Self {
        CertificateDocument { schema: SCHEMA.into(), version: crate::VERSION.into(), certificate }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }
}
