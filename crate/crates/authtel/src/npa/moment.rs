use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::functional::{inequality_functional, objective_functional, Functional, Objective};
use super::word::OperatorWord;
use super::NpaError;
use crate::{Inequality, Trust};

/// Block position `(k, l)` of Γ.
pub type Position = (usize, usize);

/// Linear relations between entries of Γ implied by the operator algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MomentConstraint {
    /// `Γ_first = Γ_second`.
    Equal { first: Position, second: Position },
    /// `Γ_first = Γ_second†`.
    Adjoint { first: Position, second: Position },
    /// `Γ_at = Γ_at†` for an off-diagonal self-adjoint moment.
    SelfAdjoint { at: Position },
    /// The identity moment has unit trace.
    Normalization,
}

/// Symbolic moment matrix with its objective, test functional and violation level.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentProblem {
    pub trust: Trust,
    pub words: Vec<OperatorWord>,
    /// Distinct moments; `entry_ids` index into this list.
    pub moments: Vec<OperatorWord>,
    entry_ids: Vec<usize>,
    pub constraints: Vec<MomentConstraint>,
    pub objective: Objective,
    pub inequality: Inequality,
    pub violation: f64,
    pub objective_functional: Functional,
    pub inequality_functional: Functional,
}

impl MomentProblem {
    /// Number of rows of Γ in words.
    pub fn size(&self) -> usize {
        self.words.len()
    }

    /// Side of each moment block: 2 when Alice's qubit is trusted, else 1.
    pub fn block(&self) -> usize {
        match self.trust {
            Trust::OneSided => 2,
            Trust::DeviceIndependent => 1,
        }
    }

    pub fn entry_id(&self, k: usize, l: usize) -> usize {
        self.entry_ids[k * self.words.len() + l]
    }

    pub fn entry_word(&self, k: usize, l: usize) -> &OperatorWord {
        &self.moments[self.entry_id(k, l)]
    }

    /// First row-major position holding `word`.
    pub fn position_of(&self, word: &OperatorWord) -> Option<Position> {
        let id = self.moments.binary_search(word).ok()?;
        let n = self.words.len();
        self.entry_ids.iter().position(|&e| e == id).map(|i| (i / n, i % n))
    }

    /// Counts of each constraint kind, `(equal, adjoint, self_adjoint, normalization)`.
    pub fn constraint_breakdown(&self) -> (usize, usize, usize, usize) {
        let mut c = (0, 0, 0, 0);
        for k in &self.constraints {
            match k {
                MomentConstraint::Equal { .. } => c.0 += 1,
                MomentConstraint::Adjoint { .. } => c.1 += 1,
                MomentConstraint::SelfAdjoint { .. } => c.2 += 1,
                MomentConstraint::Normalization => c.3 += 1,
            }
        }
        c
    }
}

/// Builds Γ over `words` with every duplicate-moment equality, the fidelity objective and
/// the constraint `test = w`.
///
/// Constraint convention: within each class of upper-triangular positions whose moments are
/// equal or adjoint, one relation is emitted for every unordered pair of positions; off-diagonal
/// self-adjoint moments additionally get a Hermiticity relation; the identity moment is
/// normalized. The list is redundant on purpose and is reduced by the solver's presolve.
pub fn build_moment_problem(
    trust: Trust,
    words: &[OperatorWord],
    objective: Objective,
    inequality: Inequality,
    violation: f64,
) -> Result<MomentProblem, NpaError> {
    if words.iter().any(|w| w.alphabet().is_some_and(|a| a != trust)) {
        return Err(NpaError::MixedAlphabet);
    }
    if words.first().map(|w| !w.is_identity()).unwrap_or(true) {
        return Err(NpaError::MissingWord("1 (as the first row)".into()));
    }
    let mut sorted = words.to_vec();
    sorted.sort();
    sorted.dedup();
    if sorted.len() != words.len() {
        return Err(NpaError::DuplicateWord);
    }
    let objective_functional = objective_functional(trust, objective)?;
    let inequality_functional = inequality_functional(trust, inequality)?;
    if !violation.is_finite() {
        return Err(NpaError::Parse(format!("violation {violation}")));
    }

    let n = words.len();
    let entry_words: Vec<OperatorWord> = (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (k, l) = (idx / n, idx % n);
            words[l].adjoint().mul(&words[k]).expect("single alphabet")
        })
        .collect();
    let mut moments = entry_words.clone();
    moments.sort();
    moments.dedup();
    let entry_ids: Vec<usize> = entry_words.iter().map(|w| moments.binary_search(w).expect("present")).collect();

    for f in [&objective_functional, &inequality_functional] {
        for w in f.words() {
            if moments.binary_search(&w).is_err() {
                return Err(NpaError::MissingWord(w.to_string()));
            }
        }
    }

    let mut classes: BTreeMap<&OperatorWord, Vec<Position>> = BTreeMap::new();
    let mut constraints = vec![MomentConstraint::Normalization];
    let mut self_adjoint = Vec::new();
    for k in 0..n {
        for l in k..n {
            let w = &entry_words[k * n + l];
            let adj = &moments[entry_ids[l * n + k]];
            let key = if w <= adj { w } else { adj };
            classes.entry(key).or_default().push((k, l));
            if k != l && w == adj {
                self_adjoint.push(MomentConstraint::SelfAdjoint { at: (k, l) });
            }
        }
    }
    for positions in classes.values() {
        for (i, &p) in positions.iter().enumerate() {
            for &q in &positions[i + 1..] {
                let same = entry_ids[p.0 * n + p.1] == entry_ids[q.0 * n + q.1];
                constraints.push(if same {
                    MomentConstraint::Equal { first: p, second: q }
                } else {
                    MomentConstraint::Adjoint { first: p, second: q }
                });
            }
        }
    }
    constraints.extend(self_adjoint);

    Ok(MomentProblem {
        trust,
        words: words.to_vec(),
        moments,
        entry_ids,
        constraints,
        objective,
        inequality,
        violation,
        objective_functional,
        inequality_functional,
    })
}

/// Default word sets: length ≤ 3 for the one-sided problem, ≤ 4 per party otherwise.
pub fn default_words(trust: Trust) -> Vec<OperatorWord> {
    match trust {
        Trust::OneSided => super::generate_words(trust, 3),
        Trust::DeviceIndependent => super::generate_words(trust, 4),
    }
}
