use std::fmt;
use std::sync::Arc;

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::mode::Mode;
use super::ProtosimError;
use crate::qcore::{JointState, MeasurementModel};

/// One emitted pair together with the devices that will measure it.
#[derive(Debug, Clone)]
pub struct Emission {
    pub state: Arc<JointState>,
    pub model: Arc<MeasurementModel>,
}

impl Emission {
    pub(crate) fn key(&self) -> (usize, usize) {
        (Arc::as_ptr(&self.state) as usize, Arc::as_ptr(&self.model) as usize)
    }
}

/// A history-dependent source: called once per pair in emission order. It never sees the
/// verifier's choices, which are made after all pairs exist.
pub trait Strategy: Send {
    fn emit(&mut self, index: u64, rng: &mut dyn RngCore) -> Emission;
}

/// Builds a fresh strategy for each protocol run.
pub trait StrategyFactory: Send + Sync {
    fn name(&self) -> String;
    fn start(&self, mode: &Mode, copies: u64, rng: &mut dyn RngCore) -> Result<Box<dyn Strategy>, ProtosimError>;
}

/// Where the pairs come from.
#[derive(Clone)]
#[allow(clippy::large_enum_variant)] // built once per experiment and shared by reference
pub enum SourceModel {
    /// The target state measured by ideal devices.
    HonestIdeal,
    /// `v |target⟩⟨target| + (1 − v) 𝟙/4` with ideal devices.
    Werner(f64),
    /// The same state and devices every round.
    IidArbitrary { state: JointState, model: MeasurementModel },
    NonIid(Arc<dyn StrategyFactory>),
}

impl fmt::Debug for SourceModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourceModel::HonestIdeal => write!(f, "HonestIdeal"),
            SourceModel::Werner(v) => write!(f, "Werner({v})"),
            SourceModel::IidArbitrary { state, .. } => write!(f, "IidArbitrary(dims {:?})", state.dims()),
            SourceModel::NonIid(s) => write!(f, "NonIid({})", s.name()),
        }
    }
}

impl SourceModel {
    pub fn name(&self) -> String {
        match self {
            SourceModel::HonestIdeal => "honest-ideal".into(),
            SourceModel::Werner(v) => format!("werner({v})"),
            SourceModel::IidArbitrary { .. } => "iid-arbitrary".into(),
            SourceModel::NonIid(s) => s.name(),
        }
    }

    pub(crate) fn start(&self, mode: &Mode, copies: u64, rng: &mut dyn RngCore) -> Result<Box<dyn Strategy>, ProtosimError> {
        let fixed = |state: JointState, model: MeasurementModel| -> Result<Box<dyn Strategy>, ProtosimError> {
            mode.check(&state, &model)?;
            Ok(Box::new(Fixed(Emission { state: Arc::new(state), model: Arc::new(model) })))
        };
        match self {
            SourceModel::HonestIdeal => fixed(mode.ideal_state(), mode.ideal_model()),
            SourceModel::Werner(v) => fixed(mode.werner(*v)?, mode.ideal_model()),
            SourceModel::IidArbitrary { state, model } => fixed(state.clone(), model.clone()),
            SourceModel::NonIid(factory) => factory.start(mode, copies, rng),
        }
    }
}

struct Fixed(Emission);

impl Strategy for Fixed {
    fn emit(&mut self, _: u64, _: &mut dyn RngCore) -> Emission {
        self.0.clone()
    }
}

/// Ideal pairs except one uniformly placed pair of visibility `bad_visibility`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneBadPair {
    pub bad_visibility: f64,
}

impl StrategyFactory for OneBadPair {
    fn name(&self) -> String {
        format!("one-bad-pair({})", self.bad_visibility)
    }

    fn start(&self, mode: &Mode, copies: u64, rng: &mut dyn RngCore) -> Result<Box<dyn Strategy>, ProtosimError> {
        let model = Arc::new(mode.ideal_model());
        Ok(Box::new(OneBadPairRun {
            bad_index: rng.random_range(0..copies),
            good: Emission { state: Arc::new(mode.ideal_state()), model: model.clone() },
            bad: Emission { state: Arc::new(mode.werner(self.bad_visibility)?), model },
        }))
    }
}

struct OneBadPairRun {
    bad_index: u64,
    good: Emission,
    bad: Emission,
}

impl Strategy for OneBadPairRun {
    fn emit(&mut self, index: u64, _: &mut dyn RngCore) -> Emission {
        if index == self.bad_index {
            self.bad.clone()
        } else {
            self.good.clone()
        }
    }
}

/// Werner pairs whose visibility moves linearly from `start` to `end` over the run, in
/// `levels` equal steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Drifting {
    pub start: f64,
    pub end: f64,
    pub levels: u32,
}

impl StrategyFactory for Drifting {
    fn name(&self) -> String {
        format!("drifting({}->{})", self.start, self.end)
    }

    fn start(&self, mode: &Mode, copies: u64, _: &mut dyn RngCore) -> Result<Box<dyn Strategy>, ProtosimError> {
        let levels = self.levels.max(1) as usize;
        let model = Arc::new(mode.ideal_model());
        let emissions = (0..levels)
            .map(|l| {
                let t = if levels == 1 { 0.0 } else { l as f64 / (levels - 1) as f64 };
                let v = self.start + (self.end - self.start) * t;
                Ok(Emission { state: Arc::new(mode.werner(v)?), model: model.clone() })
            })
            .collect::<Result<Vec<_>, ProtosimError>>()?;
        Ok(Box::new(DriftingRun { emissions, copies }))
    }
}

struct DriftingRun {
    emissions: Vec<Emission>,
    copies: u64,
}

impl Strategy for DriftingRun {
    fn emit(&mut self, index: u64, _: &mut dyn RngCore) -> Emission {
        let n = self.emissions.len() as u64;
        let level = (index * n / self.copies.max(1)).min(n - 1);
        self.emissions[level as usize].clone()
    }
}

/// Serializable description of the built-in sources.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SourceSpec {
    HonestIdeal,
    Werner { visibility: f64 },
    OneBadPair { bad_visibility: f64 },
    Drifting { start: f64, end: f64, levels: u32 },
}

impl SourceSpec {
    pub fn build(&self) -> Result<SourceModel, ProtosimError> {
        let vis = |v: f64| {
            if (0.0..=1.0).contains(&v) {
                Ok(v)
            } else {
                Err(ProtosimError::Source(format!("visibility {v} outside [0, 1]")))
            }
        };
        Ok(match *self {
            SourceSpec::HonestIdeal => SourceModel::HonestIdeal,
            SourceSpec::Werner { visibility } => SourceModel::Werner(vis(visibility)?),
            SourceSpec::OneBadPair { bad_visibility } => {
                SourceModel::NonIid(Arc::new(OneBadPair { bad_visibility: vis(bad_visibility)? }))
            }
            SourceSpec::Drifting { start, end, levels } => {
                SourceModel::NonIid(Arc::new(Drifting { start: vis(start)?, end: vis(end)?, levels }))
            }
        })
    }
}
