use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::protocol::{run_protocol, RunOptions, Verdict};
use super::source::SourceModel;
use super::teleport::teleport_with_certificate;
use super::{ProtosimError, SCHEMA};
use crate::cert::{fidelity_bound, CertificateParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub trials: u64,
    pub seed: u64,
    /// Haar inputs teleported through each accepted pair; 0 skips teleportation.
    pub teleport_inputs: usize,
}

/// One row of the batch CSV.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: u64,
    pub verdict: Verdict,
    #[serde(rename = "certified_F")]
    pub certified_f: f64,
    #[serde(rename = "true_F")]
    pub true_f: Option<f64>,
    #[serde(rename = "teleport_F")]
    pub teleport_f: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub source: String,
    pub copies: u64,
    pub trials: u64,
    pub accepted: u64,
    pub acceptance_rate: f64,
    pub certified_fidelity: f64,
    /// `1 − certificate probability`.
    pub failure_probability: f64,
    /// Accepted runs whose withheld pair falls below the certified fidelity.
    pub violations: u64,
    pub violation_fraction: f64,
    /// Three binomial standard errors of the failure probability over the accepted runs.
    pub margin: f64,
    pub bound_honored: bool,
    pub mean_true_fidelity: Option<f64>,
    pub mean_teleport_fidelity: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub summary: ExperimentSummary,
    pub records: Vec<TrialRecord>,
}

/// JSON envelope echoing the inputs next to the summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDocument {
    pub schema: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub params: CertificateParams,
    pub summary: ExperimentSummary,
}

impl ExperimentReport {
    pub fn document(&self, config: &ExperimentConfig, params: &CertificateParams) -> ExperimentDocument {
        ExperimentDocument {
            schema: SCHEMA.into(),
            version: crate::VERSION.into(),
            config: *config,
            params: *params,
            summary: self.summary.clone(),
        }
    }

    /// Writes the per-trial rows, preceded by `# ` comment lines.
    pub fn write_csv<W: Write>(&self, mut out: W, comments: &[String]) -> Result<(), ProtosimError> {
        for c in comments {
            writeln!(out, "# {c}").map_err(|e| ProtosimError::Experiment(e.to_string()))?;
        }
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        for r in &self.records {
            w.serialize(r).map_err(|e| ProtosimError::Experiment(e.to_string()))?;
        }
        w.flush().map_err(|e| ProtosimError::Experiment(e.to_string()))
    }
}

fn mean(values: impl Iterator<Item = f64>) -> Option<f64> {
    let (n, s) = values.fold((0u64, 0.0), |(n, s), v| (n + 1, s + v));
    (n > 0).then(|| s / n as f64)
}

/// Repeats the protocol with independent per-trial streams `(seed, trial)` and compares each
/// accepted certificate with the true fidelity of the withheld pair.
pub fn soundness_experiment(
    source: &SourceModel,
    params: &CertificateParams,
    config: &ExperimentConfig,
) -> Result<ExperimentReport, ProtosimError> {
    if config.trials == 0 {
        return Err(ProtosimError::Experiment("at least one trial is required".into()));
    }
    let certificate = fidelity_bound(params)?;
    let records = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(trial);
            let run = run_protocol(source, params, &RunOptions::default(), &mut rng)?;
            let mut record = TrialRecord {
                trial,
                verdict: run.transcript.verdict,
                certified_f: certificate.fidelity,
                true_f: None,
                teleport_f: None,
            };
            if let Some(acc) = run.accepted() {
                record.true_f = Some(acc.withheld.true_fidelity()?);
                if config.teleport_inputs > 0 {
                    record.teleport_f = Some(teleport_with_certificate(acc, config.teleport_inputs, &mut rng)?.estimate.mean);
                }
            }
            Ok(record)
        })
        .collect::<Result<Vec<_>, ProtosimError>>()?;

    let accepted = records.iter().filter(|r| r.verdict == Verdict::Accept).count() as u64;
    let violations = records.iter().filter(|r| r.true_f.is_some_and(|f| f < certificate.fidelity)).count() as u64;
    let failure = 1.0 - certificate.probability;
    let violation_fraction = if accepted == 0 { 0.0 } else { violations as f64 / accepted as f64 };
    let margin = if accepted == 0 { 0.0 } else { 3.0 * (failure * (1.0 - failure) / accepted as f64).sqrt() };
    let summary = ExperimentSummary {
        source: source.name(),
        copies: certificate.copies,
        trials: config.trials,
        accepted,
        acceptance_rate: accepted as f64 / config.trials as f64,
        certified_fidelity: certificate.fidelity,
        failure_probability: failure,
        violations,
        violation_fraction,
        margin,
        bound_honored: violation_fraction <= failure + margin,
        mean_true_fidelity: mean(records.iter().filter_map(|r| r.true_f)),
        mean_teleport_fidelity: mean(records.iter().filter_map(|r| r.teleport_f)),
    };
    Ok(ExperimentReport { summary, records })
}
