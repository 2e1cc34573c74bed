use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::NpaError;
use crate::Trust;

/// Untrusted measurement operators. `E00`/`E01` are Bob's projectors `E_{0|0}`, `E_{0|1}`;
/// the rest are dichotomic observables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Symbol {
    E00,
    E01,
    ZA,
    XA,
    ZB,
    XB,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

impl Symbol {
    pub fn party(self) -> Party {
        match self {
            Symbol::ZA | Symbol::XA => Party::Alice,
            _ => Party::Bob,
        }
    }

    pub fn alphabet(self) -> Trust {
        match self {
            Symbol::E00 | Symbol::E01 => Trust::OneSided,
            _ => Trust::DeviceIndependent,
        }
    }

    /// Projectors are idempotent; observables are involutions.
    pub fn is_projector(self) -> bool {
        self.alphabet() == Trust::OneSided
    }

    /// Measurement setting index: 0 for Z-like, 1 for X-like.
    pub fn setting(self) -> usize {
        match self {
            Symbol::E00 | Symbol::ZA | Symbol::ZB => 0,
            Symbol::E01 | Symbol::XA | Symbol::XB => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Symbol::E00 => "E0|0",
            Symbol::E01 => "E0|1",
            Symbol::ZA => "ZA",
            Symbol::XA => "XA",
            Symbol::ZB => "ZB",
            Symbol::XB => "XB",
        }
    }

    pub fn alphabet_symbols(trust: Trust) -> &'static [Symbol] {
        match trust {
            Trust::OneSided => &[Symbol::E00, Symbol::E01],
            Trust::DeviceIndependent => &[Symbol::ZA, Symbol::XA, Symbol::ZB, Symbol::XB],
        }
    }
}

/// A product of operators in canonical form. The empty word is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Symbol>", into = "Vec<Symbol>")]
pub struct OperatorWord(Vec<Symbol>);

impl OperatorWord {
    pub fn identity() -> Self {
        OperatorWord(Vec::new())
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_empty()
    }

    /// Alphabet of the word; `None` for the identity.
    pub fn alphabet(&self) -> Option<Trust> {
        self.0.first().map(|s| s.alphabet())
    }

    /// `w†`: reversal, re-canonicalized so parties stay ordered.
    pub fn adjoint(&self) -> OperatorWord {
        let rev: Vec<Symbol> = self.0.iter().rev().copied().collect();
        canonicalize(&rev).expect("reversal keeps the alphabet")
    }

    pub fn is_self_adjoint(&self) -> bool {
        self.adjoint() == *self
    }

    /// Canonical form of `self · other`.
    pub fn mul(&self, other: &OperatorWord) -> Result<OperatorWord, NpaError> {
        let mut s = self.0.clone();
        s.extend_from_slice(&other.0);
        canonicalize(&s)
    }

    /// Number of symbols belonging to each party, `(alice, bob)`.
    pub fn party_lengths(&self) -> (usize, usize) {
        let a = self.0.iter().filter(|s| s.party() == Party::Alice).count();
        (a, self.0.len() - a)
    }
}

impl Ord for OperatorWord {
    /// Graded lexicographic: shorter words first, then by symbol sequence.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for OperatorWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<Symbol>> for OperatorWord {
    type Error = NpaError;

    fn try_from(symbols: Vec<Symbol>) -> Result<Self, Self::Error> {
        let w = canonicalize(&symbols)?;
        if w.0 != symbols {
            return Err(NpaError::NotCanonical(format!("{symbols:?}")));
        }
        Ok(w)
    }
}

impl From<OperatorWord> for Vec<Symbol> {
    fn from(w: OperatorWord) -> Self {
        w.0
    }
}

impl fmt::Display for OperatorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let names: Vec<&str> = self.0.iter().map(|s| s.name()).collect();
        f.write_str(&names.join(" "))
    }
}

/// Reduces a symbol sequence to canonical form: Alice's symbols are moved before Bob's
/// (their relative order kept), then adjacent equal symbols collapse (`EE = E`) or cancel
/// (`ZZ = 𝟙`).
pub fn canonicalize(symbols: &[Symbol]) -> Result<OperatorWord, NpaError> {
    if let Some(first) = symbols.first() {
        let alphabet = first.alphabet();
        if symbols.iter().any(|s| s.alphabet() != alphabet) {
            return Err(NpaError::MixedAlphabet);
        }
    }
    let mut out = reduce_party(symbols.iter().copied().filter(|s| s.party() == Party::Alice));
    out.extend(reduce_party(symbols.iter().copied().filter(|s| s.party() == Party::Bob)));
    Ok(OperatorWord(out))
}

fn reduce_party(symbols: impl Iterator<Item = Symbol>) -> Vec<Symbol> {
    let mut stack: Vec<Symbol> = Vec::new();
    for s in symbols {
        if stack.last() == Some(&s) {
            if !s.is_projector() {
                stack.pop();
            }
        } else {
            stack.push(s);
        }
    }
    stack
}

/// All canonical words with at most `max_local_length` symbols per party, sorted graded-lex.
pub fn generate_words(trust: Trust, max_local_length: usize) -> Vec<OperatorWord> {
    let mut words = match trust {
        Trust::OneSided => local_words(Symbol::alphabet_symbols(trust), max_local_length),
        Trust::DeviceIndependent => {
            let alice = local_words(&[Symbol::ZA, Symbol::XA], max_local_length);
            let bob = local_words(&[Symbol::ZB, Symbol::XB], max_local_length);
            let mut all = Vec::with_capacity(alice.len() * bob.len());
            for a in &alice {
                for b in &bob {
                    all.push(a.mul(b).expect("same alphabet"));
                }
            }
            all
        }
    };
    words.sort();
    words.dedup();
    words
}

fn local_words(alphabet: &[Symbol], max_len: usize) -> Vec<OperatorWord> {
    let mut frontier = vec![Vec::<Symbol>::new()];
    let mut all = vec![OperatorWord::identity()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for w in &frontier {
            for &s in alphabet {
                let mut v = w.clone();
                v.push(s);
                all.push(canonicalize(&v).expect("single alphabet"));
                next.push(v);
            }
        }
        frontier = next;
    }
    all.sort();
    all.dedup();
    all
}

/// Real linear combination of canonical words.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct WordPolynomial {
    pub terms: BTreeMap<OperatorWord, f64>,
}

impl WordPolynomial {
    pub fn add_term(&mut self, coeff: f64, word: OperatorWord) {
        *self.terms.entry(word).or_insert(0.0) += coeff;
    }

    fn mul_word(&self, factor: &[(f64, OperatorWord)]) -> Result<WordPolynomial, NpaError> {
        let mut out = WordPolynomial::default();
        for (w, c) in &self.terms {
            for (fc, fw) in factor {
                out.add_term(c * fc, w.mul(fw)?);
            }
        }
        out.terms.retain(|_, c| *c != 0.0);
        Ok(out)
    }
}

/// Parses a whitespace-separated operator product such as `"E1|0 E0|1"` or `"ZA XB"`.
/// `1` is the identity; `E1|y` is replaced by `𝟙 − E0|y` and expanded.
pub fn parse_product(text: &str) -> Result<WordPolynomial, NpaError> {
    let mut poly = WordPolynomial::default();
    poly.add_term(1.0, OperatorWord::identity());
    for token in text.split_whitespace() {
        let one = OperatorWord::identity();
        let single = |s: Symbol| OperatorWord(vec![s]);
        let factor: Vec<(f64, OperatorWord)> = match token {
            "1" => vec![(1.0, one)],
            "E0|0" => vec![(1.0, single(Symbol::E00))],
            "E0|1" => vec![(1.0, single(Symbol::E01))],
            "E1|0" => vec![(1.0, one), (-1.0, single(Symbol::E00))],
            "E1|1" => vec![(1.0, one), (-1.0, single(Symbol::E01))],
            "ZA" => vec![(1.0, single(Symbol::ZA))],
            "XA" => vec![(1.0, single(Symbol::XA))],
            "ZB" => vec![(1.0, single(Symbol::ZB))],
            "XB" => vec![(1.0, single(Symbol::XB))],
            other => return Err(NpaError::Parse(other.to_string())),
        };
        poly = poly.mul_word(&factor)?;
    }
    Ok(poly)
}

/// Parses a single canonical word, rejecting expansions.
pub fn parse_word(text: &str) -> Result<OperatorWord, NpaError> {
    let poly = parse_product(text)?;
    match poly.terms.iter().collect::<Vec<_>>().as_slice() {
        [(w, c)] if **c == 1.0 => Ok((*w).clone()),
        _ => Err(NpaError::Parse(text.to_string())),
    }
}
