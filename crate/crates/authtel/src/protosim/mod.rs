//! Monte Carlo runs of the authentication protocol: sources, the verifier's sampling and
//! acceptance test, soundness experiments and teleportation through the withheld pair.

mod experiment;
mod mode;
mod protocol;
mod source;
mod teleport;

pub use experiment::{
    soundness_experiment, ExperimentConfig, ExperimentDocument, ExperimentReport, ExperimentSummary, TrialRecord,
};
pub use mode::Mode;
pub use protocol::{
    run_protocol, Accepted, Ordering, Outcome, ProtocolRun, ProtocolTranscript, Round, RunOptions, SubsetSummary,
    Verdict, WithheldPair,
};
pub use source::{Drifting, Emission, OneBadPair, SourceModel, SourceSpec, Strategy, StrategyFactory};
pub use teleport::{teleport_with_certificate, TeleportReport};

use crate::cert::CertError;
use crate::qcore::QcoreError;

pub const SCHEMA: &str = "protosim/1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProtosimError {
    #[error("source: {0}")]
    Source(String),
    #[error(transparent)]
    Qcore(#[from] QcoreError),
    #[error(transparent)]
    Cert(#[from] CertError),
    #[error("experiment: {0}")]
    Experiment(String),
}
