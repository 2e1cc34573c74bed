use std::f64::consts::SQRT_2;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::word::{parse_product, OperatorWord};
use super::NpaError;
use crate::{Inequality, Trust};

/// Fidelity objectives: the extracted state, or the state after a measurement pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Objective {
    #[serde(rename = "state")]
    State,
    #[serde(rename = "ZB")]
    Zb,
    #[serde(rename = "XB")]
    Xb,
    #[serde(rename = "ZAZB")]
    ZaZb,
    #[serde(rename = "XAXB")]
    XaXb,
    #[serde(rename = "ZAXB")]
    ZaXb,
}

impl Objective {
    pub fn as_str(self) -> &'static str {
        match self {
            Objective::State => "state",
            Objective::Zb => "ZB",
            Objective::Xb => "XB",
            Objective::ZaZb => "ZAZB",
            Objective::XaXb => "XAXB",
            Objective::ZaXb => "ZAXB",
        }
    }

    pub fn for_trust(trust: Trust) -> &'static [Objective] {
        match trust {
            Trust::OneSided => &[Objective::State, Objective::Zb, Objective::Xb],
            Trust::DeviceIndependent => &[Objective::State, Objective::ZaZb, Objective::XaXb, Objective::ZaXb],
        }
    }

    /// Measurement objectives, as opposed to the state objective.
    pub fn is_measurement(self) -> bool {
        self != Objective::State
    }

    /// Settings `(alice, bob)` applied before extraction (0 = Z, 1 = X); `None` for the state.
    pub fn settings(self) -> Option<(usize, usize)> {
        match self {
            Objective::State => None,
            Objective::Zb | Objective::ZaZb => Some((0, 0)),
            Objective::Xb | Objective::XaXb => Some((1, 1)),
            Objective::ZaXb => Some((0, 1)),
        }
    }
}

impl FromStr for Objective {
    type Err = NpaError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_uppercase().as_str() {
            "STATE" => Ok(Objective::State),
            "ZB" => Ok(Objective::Zb),
            "XB" => Ok(Objective::Xb),
            "ZAZB" => Ok(Objective::ZaZb),
            "XAXB" => Ok(Objective::XaXb),
            "ZAXB" => Ok(Objective::ZaXb),
            _ => Err(NpaError::Parse(s.to_string())),
        }
    }
}

impl fmt::Display for Objective {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// `coeff · Re(m_word[row, col])`; scalar moments use `(0, 0)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalTerm {
    pub coeff: f64,
    pub word: OperatorWord,
    pub row: usize,
    pub col: usize,
}

/// Real-linear functional of the moments.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Functional {
    pub terms: Vec<FunctionalTerm>,
}

impl Functional {
    fn push(&mut self, coeff: f64, expr: &str, row: usize, col: usize) -> Result<(), NpaError> {
        for (word, c) in parse_product(expr)?.terms {
            self.terms.push(FunctionalTerm { coeff: coeff * c, word, row, col });
        }
        Ok(())
    }

    fn scaled(mut self, s: f64) -> Self {
        for t in &mut self.terms {
            t.coeff *= s;
        }
        self
    }

    /// Distinct words referenced.
    pub fn words(&self) -> Vec<OperatorWord> {
        let mut w: Vec<OperatorWord> = self.terms.iter().map(|t| t.word.clone()).collect();
        w.sort();
        w.dedup();
        w
    }

    /// Evaluates against a moment oracle returning the (block) value of each word.
    pub fn evaluate(&self, moment: impl Fn(&OperatorWord) -> crate::qcore::CMatrix) -> f64 {
        self.terms.iter().map(|t| t.coeff * moment(&t.word)[(t.row, t.col)].re).sum()
    }
}

/// One-sided expressions use projector words spelled with digits, `"010"` for
/// `E_{0|0}E_{0|1}E_{0|0}` and `""` for the identity.
fn bob_word(digits: &str) -> String {
    if digits.is_empty() {
        return "1".into();
    }
    digits.chars().map(|ch| if ch == '0' { "E0|0" } else { "E0|1" }).collect::<Vec<_>>().join(" ")
}

type BlockTerm = (f64, &'static str, usize, usize);

const ONE_SIDED_STATE: &[BlockTerm] = &[
    (0.5, "0", 0, 0),
    (1.0, "10", 0, 1),
    (-1.0, "010", 0, 1),
    (1.0, "01", 1, 0),
    (-1.0, "010", 1, 0),
    (0.5, "", 1, 1),
    (-0.5, "0", 1, 1),
];

const ONE_SIDED_XB: &[BlockTerm] = &[
    (0.5, "", 0, 0),
    (-0.5, "0", 0, 0),
    (-2.0, "101", 0, 0),
    (1.0, "01", 0, 0),
    (1.0, "10", 0, 0),
    (-1.0, "01", 0, 1),
    (-1.0, "10", 1, 0),
    (2.0, "101", 1, 1),
    (-1.0, "01", 1, 1),
    (-1.0, "10", 1, 1),
    (0.5, "0", 1, 1),
];

/// Shared off-diagonal part of the X_B expression, added at (0,1) and (1,0) with weight ½.
const ONE_SIDED_XB_COMMON: &[(f64, &str)] =
    &[(4.0, "0101"), (4.0, "1010"), (4.0, "101"), (-2.0, "010"), (-8.0, "10101")];

const R: f64 = SQRT_2;

/// DI tables as `(coefficient, word)` pairs; the overall ½ is applied when building.
fn di_table(objective: Objective) -> Vec<(f64, &'static str)> {
    let common = [
        (-1.0 / 8.0, "ZA XA ZB XB"),
        (-1.0 / 8.0, "XA ZA XB ZB"),
        (1.0 / 8.0, "XA ZA ZB XB"),
        (1.0 / 8.0, "ZA XA XB ZB"),
    ];
    let mut t: Vec<(f64, &'static str)> = vec![(0.5, "1")];
    t.extend_from_slice(&common);
    match objective {
        Objective::State | Objective::ZaZb => t.extend_from_slice(&[
            (1.0 / (2.0 * R), "ZA ZB"),
            (1.0 / (4.0 * R), "ZA XB"),
            (1.0 / (4.0 * R), "XA ZB"),
            (-1.0 / (8.0 * R), "XA XB"),
            (1.0 / (8.0 * R), "ZA XA ZA XB"),
            (1.0 / (8.0 * R), "XA ZB XB ZB"),
            (-1.0 / (4.0 * R), "ZA XA ZA ZB"),
            (-1.0 / (4.0 * R), "ZA ZB XB ZB"),
            (-1.0 / (8.0 * R), "ZA XA ZA ZB XB ZB"),
        ]),
        Objective::XaXb => t.extend_from_slice(&[
            (-1.0 / (8.0 * R), "XA XB"),
            (-1.0 / (4.0 * R), "XA ZA XA XB"),
            (-1.0 / (4.0 * R), "XA XB ZB XB"),
            (1.0 / (2.0 * R), "XA ZA XA XB ZB XB"),
            (1.0 / (8.0 * R), "XA ZA XA ZA XA XB"),
            (1.0 / (8.0 * R), "XA XB ZB XB ZB XB"),
            (1.0 / (4.0 * R), "XA ZA XA ZA XA XB ZB XB"),
            (1.0 / (4.0 * R), "XA ZA XA XB ZB XB ZB XB"),
            (-1.0 / (8.0 * R), "XA ZA XA ZA XA XB ZB XB ZB XB"),
        ]),
        Objective::ZaXb => t.extend_from_slice(&[
            (1.0 / (4.0 * R), "ZA XB"),
            (-1.0 / (8.0 * R), "XA XB"),
            (1.0 / (8.0 * R), "ZA XA ZA XB"),
            (-1.0 / (2.0 * R), "ZA XB ZB XB"),
            (-1.0 / (4.0 * R), "XA XB ZB XB"),
            (1.0 / (4.0 * R), "ZA XA ZA XB ZB XB"),
            (-1.0 / (4.0 * R), "ZA XB ZB XB ZB XB"),
            (1.0 / (8.0 * R), "XA XB ZB XB ZB XB"),
            (-1.0 / (8.0 * R), "ZA XA ZA XB ZB XB ZB XB"),
        ]),
        _ => unreachable!("one-sided objectives are handled separately"),
    }
    t
}

/// Fidelity of the SWAP-extracted state with its ideal target, as a functional of moments.
pub fn objective_functional(trust: Trust, objective: Objective) -> Result<Functional, NpaError> {
    let mut f = Functional::default();
    match (trust, objective) {
        (Trust::OneSided, Objective::State | Objective::Zb) => {
            for &(c, w, r, col) in ONE_SIDED_STATE {
                f.push(c, &bob_word(w), r, col)?;
            }
        }
        (Trust::OneSided, Objective::Xb) => {
            for &(c, w, r, col) in ONE_SIDED_XB {
                f.push(c, &bob_word(w), r, col)?;
            }
            for (r, col) in [(0, 1), (1, 0)] {
                for &(c, w) in ONE_SIDED_XB_COMMON {
                    f.push(0.5 * c, &bob_word(w), r, col)?;
                }
            }
        }
        (Trust::DeviceIndependent, Objective::State | Objective::ZaZb | Objective::XaXb | Objective::ZaXb) => {
            for (c, w) in di_table(objective) {
                f.push(0.5 * c, w, 0, 0)?;
            }
        }
        _ => return Err(NpaError::Unsupported(format!("objective {objective} in the {trust} setting"))),
    }
    Ok(f)
}

/// Test statistic as a functional of moments.
pub fn inequality_functional(trust: Trust, inequality: Inequality) -> Result<Functional, NpaError> {
    match (trust, inequality) {
        (Trust::OneSided, _) => {
            // tr[σ_Z(2τ_{0|0} − ρ_A) + σ_X(2τ_{0|1} − ρ_A)]
            let mut f = Functional::default();
            f.push(2.0, "E0|0", 0, 0)?;
            f.push(-1.0, "1", 0, 0)?;
            f.push(-2.0, "E0|0", 1, 1)?;
            f.push(1.0, "1", 1, 1)?;
            for (r, col) in [(0, 1), (1, 0)] {
                f.push(2.0, "E0|1", r, col)?;
                f.push(-1.0, "1", r, col)?;
            }
            Ok(match inequality {
                Inequality::Steering => f,
                Inequality::Chsh => f.scaled(SQRT_2),
            })
        }
        (Trust::DeviceIndependent, Inequality::Chsh) => {
            let mut f = Functional::default();
            for (c, w) in [(1.0, "ZA ZB"), (1.0, "XA ZB"), (1.0, "ZA XB"), (-1.0, "XA XB")] {
                f.push(c, w, 0, 0)?;
            }
            Ok(f)
        }
        (Trust::DeviceIndependent, Inequality::Steering) => {
            Err(NpaError::Unsupported("the steering test needs a trusted party".into()))
        }
    }
}

/// Every word appearing in the tables, for completeness checks.
pub fn table_words(trust: Trust) -> Vec<OperatorWord> {
    let mut out = Vec::new();
    for &o in Objective::for_trust(trust) {
        out.extend(objective_functional(trust, o).expect("valid pair").words());
    }
    out.sort();
    out.dedup();
    out
}
