use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::mode::{AliceSetting, Mode, SubsetSetting};
use super::source::{Emission, SourceModel};
use super::ProtosimError;
use crate::cert::{fidelity_bound, CertificateParams, FidelityCertificate};
use crate::qcore::{fidelity_to_pure, swap_isometry_extract, JointState, MeasurementModel, OutcomeTable, TwoQubitState};

/// When the tested pairs are measured relative to emission.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// All pairs are stored, then measured.
    #[default]
    Batch,
    /// Each tested pair is measured as it arrives. Certificate values are unchanged.
    OnTheFly,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunOptions {
    /// Keep every measured round in the transcript.
    pub record_rounds: bool,
    pub ordering: Ordering,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Accept,
    Reject,
}

/// One measured pair: its emission index, subset and ±1 outcomes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Round {
    pub index: u64,
    pub subset: u8,
    pub a: i8,
    pub b: i8,
}

impl Round {
    pub fn product(&self) -> i8 {
        self.a * self.b
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsetSummary {
    pub label: String,
    pub rounds: u64,
    /// Sum of `a·b` over the subset.
    pub sum: i64,
    pub mean: f64,
    /// Weight of `mean` in the statistic.
    pub sign: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolTranscript {
    pub mode: Mode,
    pub source: String,
    pub copies: u64,
    pub withheld_index: u64,
    pub ordering: Ordering,
    pub subsets: Vec<SubsetSummary>,
    pub statistic: f64,
    pub threshold: f64,
    pub verdict: Verdict,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rounds: Option<Vec<Round>>,
}

/// The unmeasured pair, available only after acceptance.
#[derive(Debug, Clone)]
pub struct WithheldPair {
    index: u64,
    mode: Mode,
    emission: Emission,
}

impl WithheldPair {
    pub fn index(&self) -> u64 {
        self.index
    }

    pub fn state(&self) -> &JointState {
        &self.emission.state
    }

    pub fn model(&self) -> &MeasurementModel {
        &self.emission.model
    }

    /// The qubit pair recovered by the SWAP isometry built from the devices actually used.
    pub fn extracted(&self) -> Result<TwoQubitState, ProtosimError> {
        Ok(swap_isometry_extract(self.state(), self.model(), self.mode.extraction())?)
    }

    /// Fidelity of the extracted pair with the target.
    pub fn true_fidelity(&self) -> Result<f64, ProtosimError> {
        Ok(fidelity_to_pure(&self.extracted()?, &self.mode.target()))
    }

    pub(crate) fn mode(&self) -> Mode {
        self.mode
    }
}

#[derive(Debug, Clone)]
pub struct Accepted {
    pub certificate: FidelityCertificate,
    pub withheld: WithheldPair,
}

#[derive(Debug, Clone)]
pub enum Outcome {
    Accepted(Box<Accepted>),
    Rejected,
}

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub transcript: ProtocolTranscript,
    pub outcome: Outcome,
}

impl ProtocolRun {
    pub fn accepted(&self) -> Option<&Accepted> {
        match &self.outcome {
            Outcome::Accepted(a) => Some(a),
            Outcome::Rejected => None,
        }
    }
}

/// Keeps pair `r` out of reach of the measurement loop. It can only be opened with the
/// verdict in hand.
struct Sealed(Option<Emission>);

impl Sealed {
    fn open(self, verdict: Verdict) -> Option<Emission> {
        match verdict {
            Verdict::Accept => self.0,
            Verdict::Reject => None,
        }
    }
}

/// Outcome distributions per subset for each distinct emission.
struct TableCache {
    mode: Mode,
    settings: Vec<SubsetSetting>,
    tables: HashMap<(usize, usize), (Emission, Vec<OutcomeTable>)>,
}

const CACHE_LIMIT: usize = 4096;

impl TableCache {
    fn table(&mut self, emission: &Emission, subset: usize) -> Result<&OutcomeTable, ProtosimError> {
        let key = emission.key();
        if !self.tables.contains_key(&key) {
            self.mode.check(&emission.state, &emission.model)?;
            let tables = self
                .settings
                .iter()
                .map(|s| {
                    let alice = match &s.alice {
                        AliceSetting::Trusted(p) => p.clone(),
                        AliceSetting::Device(x) => {
                            emission.model.alice.as_ref().expect("checked device model").projector(*x, 0)
                        }
                    };
                    OutcomeTable::new(&emission.state, &alice, &emission.model.bob.projector(s.bob, 0))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if self.tables.len() >= CACHE_LIMIT {
                self.tables.clear();
            }
            self.tables.insert(key, (emission.clone(), tables));
        }
        Ok(&self.tables[&key].1[subset])
    }
}

/// Runs the protocol once: `K = required_copies(params)` pairs, a uniformly random withheld
/// index `r`, a uniformly random equal partition of the rest into the tested subsets, and
/// acceptance iff the signed sum of subset averages reaches `max − ε`.
///
/// The source draws from its own stream, split off before any verifier choice, so it cannot
/// learn `r` or the partition.
pub fn run_protocol<R: Rng + ?Sized>(
    source: &SourceModel,
    params: &CertificateParams,
    options: &RunOptions,
    rng: &mut R,
) -> Result<ProtocolRun, ProtosimError> {
    params.validate()?;
    let certificate = fidelity_bound(params)?;
    let copies = certificate.copies;
    let mode = Mode::of(params);
    let settings = mode.subsets();
    let g = settings.len() as u64;
    debug_assert_eq!((copies - 1) % g, 0);

    let mut source_rng = ChaCha8Rng::seed_from_u64(rng.random());
    let mut strategy = source.start(&mode, copies, &mut source_rng)?;

    let r = rng.random_range(0..copies);
    let per_subset = (copies - 1) / g;
    let mut labels: Vec<u8> = (0..g as u8).flat_map(|s| std::iter::repeat_n(s, per_subset as usize)).collect();
    labels.shuffle(rng);

    let mut cache = TableCache { mode, settings: settings.clone(), tables: HashMap::new() };
    let mut sums = vec![0i64; settings.len()];
    let mut counts = vec![0u64; settings.len()];
    let mut rounds = options.record_rounds.then(|| Vec::with_capacity(labels.len()));
    let mut sealed = Sealed(None);
    let mut next_label = labels.iter();

    for index in 0..copies {
        let emission = strategy.emit(index, &mut source_rng);
        if index == r {
            sealed = Sealed(Some(emission));
            continue;
        }
        let subset = *next_label.next().expect("one label per tested pair");
        let (a, b) = cache.table(&emission, subset as usize)?.sample(rng);
        sums[subset as usize] += i64::from(a * b);
        counts[subset as usize] += 1;
        if let Some(rs) = rounds.as_mut() {
            rs.push(Round { index, subset, a, b });
        }
    }

    let subsets: Vec<SubsetSummary> = settings
        .iter()
        .enumerate()
        .map(|(s, setting)| SubsetSummary {
            label: setting.label.to_string(),
            rounds: counts[s],
            sum: sums[s],
            mean: sums[s] as f64 / counts[s].max(1) as f64,
            sign: setting.sign,
        })
        .collect();
    let statistic: f64 = subsets.iter().map(|s| s.sign * s.mean).sum();
    let threshold = params.threshold();
    let verdict = if statistic >= threshold { Verdict::Accept } else { Verdict::Reject };

    let transcript = ProtocolTranscript {
        mode,
        source: source.name(),
        copies,
        withheld_index: r,
        ordering: options.ordering,
        subsets,
        statistic,
        threshold,
        verdict,
        rounds,
    };
    let outcome = match sealed.open(verdict) {
        Some(emission) => Outcome::Accepted(Box::new(Accepted {
            certificate,
            withheld: WithheldPair { index: r, mode, emission },
        })),
        None => Outcome::Rejected,
    };
    Ok(ProtocolRun { transcript, outcome })
}
