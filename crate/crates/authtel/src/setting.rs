use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Which side's devices are trusted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Trust {
    /// Alice trusted, Bob untrusted.
    #[serde(rename = "1sDI")]
    OneSided,
    /// Neither party trusted.
    #[serde(rename = "DI")]
    DeviceIndependent,
}

/// The correlation test used to accept the source.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Inequality {
    #[serde(rename = "steering")]
    Steering,
    #[serde(rename = "chsh")]
    Chsh,
}

impl Inequality {
    /// Quantum maximum of the test statistic.
    pub fn max_value(self) -> f64 {
        match self {
            Inequality::Steering => 2.0,
            Inequality::Chsh => 2.0 * std::f64::consts::SQRT_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Inequality::Steering => "steering",
            Inequality::Chsh => "chsh",
        }
    }
}

impl Trust {
    pub fn as_str(self) -> &'static str {
        match self {
            Trust::OneSided => "1sDI",
            Trust::DeviceIndependent => "DI",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("unrecognised {kind} `{value}`")]
pub struct ParseSettingError {
    pub kind: &'static str,
    pub value: String,
}

impl FromStr for Trust {
    type Err = ParseSettingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "1sdi" | "one-sided" | "onesided" => Ok(Trust::OneSided),
            "di" | "device-independent" => Ok(Trust::DeviceIndependent),
            _ => Err(ParseSettingError { kind: "trust setting", value: s.to_string() }),
        }
    }
}

impl FromStr for Inequality {
    type Err = ParseSettingError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "steering" => Ok(Inequality::Steering),
            "chsh" => Ok(Inequality::Chsh),
            _ => Err(ParseSettingError { kind: "inequality", value: s.to_string() }),
        }
    }
}

impl fmt::Display for Trust {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
