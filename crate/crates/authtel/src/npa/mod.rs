//! Operator words, NPA moment matrices with automated equality constraints, and the
//! fidelity and test functionals expressed in moments.

mod embed;
mod functional;
mod gamma;
mod moment;
mod reference;
mod sdpa;
mod word;

pub use embed::{realify, to_sdp_instance};
pub use functional::{inequality_functional, objective_functional, table_words, Functional, FunctionalTerm, Objective};
pub use gamma::{instantiate_gamma, moment_value, NumericGamma};
pub use reference::isometry_fidelity;
pub use moment::{build_moment_problem, default_words, MomentConstraint, MomentProblem, Position};
pub use sdpa::{export_sdpa, import_sdpa, read_sdpa, write_sdpa, ProblemSpec, SdpaDocument, SIGN_CONVENTION};
pub use word::{canonicalize, generate_words, parse_product, parse_word, OperatorWord, Party, Symbol, WordPolynomial};

use serde::{Deserialize, Serialize};

use crate::Trust;

pub const SCHEMA: &str = "npa/1";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NpaError {
    #[error("word mixes symbols from different alphabets")]
    MixedAlphabet,
    #[error("word is not in canonical form: {0}")]
    NotCanonical(String),
    #[error("cannot parse `{0}`")]
    Parse(String),
    #[error("word list lacks required word {0}")]
    MissingWord(String),
    #[error("word list contains duplicates")]
    DuplicateWord,
    #[error("unsupported combination: {0}")]
    Unsupported(String),
    #[error("model does not match the alphabet: {0}")]
    ModelMismatch(String),
    #[error("SDPA format error: {0}")]
    Sdpa(String),
    #[error("I/O failure: {0}")]
    Io(String),
}

/// Serialized word list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordList {
    pub schema: String,
    pub trust: Trust,
    pub words: Vec<OperatorWord>,
}

impl WordList {
    pub fn new(trust: Trust, words: Vec<OperatorWord>) -> Self {
        WordList { schema: SCHEMA.to_string(), trust, words }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("word lists serialize")
    }

    pub fn from_json(text: &str) -> Result<Self, NpaError> {
        let list: WordList = serde_json::from_str(text).map_err(|e| NpaError::Parse(e.to_string()))?;
        if list.schema != SCHEMA {
            return Err(NpaError::Parse(format!("unsupported schema `{}`", list.schema)));
        }
        if list.words.iter().any(|w| w.alphabet().is_some_and(|a| a != list.trust)) {
            return Err(NpaError::MixedAlphabet);
        }
        Ok(list)
    }
}

#[cfg(test)]
mod tests;
