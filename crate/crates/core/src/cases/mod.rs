//! The three worked experiments as ready-made designs with pinned values.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::ExperimentDesign;

pub mod fernandes;
pub mod kale;
pub mod weather;

/// An expected value with its tolerance. `reference_only` pins are
/// reported but not expected to reproduce from the shipped inputs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Pin {
    pub value: f64,
    pub tolerance: f64,
    #[serde(default)]
    pub reference_only: bool,
}

impl Pin {
    pub fn new(value: f64, tolerance: f64) -> Self {
        Pin { value, tolerance, reference_only: false }
    }

    pub fn reference(value: f64, tolerance: f64) -> Self {
        Pin { value, tolerance, reference_only: true }
    }

    /// Pin whose tolerance is a fraction of its value.
    pub fn relative(value: f64, fraction: f64) -> Self {
        Pin::new(value, (value * fraction).abs())
    }

    pub fn holds(&self, actual: f64) -> bool {
        (actual - self.value).abs() <= self.tolerance + 1e-12
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CaseStudy {
    pub name: String,
    pub design: ExperimentDesign,
    pub expected: BTreeMap<String, Pin>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CaseName {
    Weather,
    Kale2020,
    Fernandes2018,
}

impl CaseName {
    pub const ALL: [CaseName; 3] = [CaseName::Weather, CaseName::Kale2020, CaseName::Fernandes2018];

    pub fn as_str(&self) -> &'static str {
        match self {
            CaseName::Weather => "weather",
            CaseName::Kale2020 => "kale2020",
            CaseName::Fernandes2018 => "fernandes2018",
        }
    }
}

impl fmt::Display for CaseName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CaseName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "weather" => Ok(CaseName::Weather),
            "kale2020" | "kale" => Ok(CaseName::Kale2020),
            "fernandes2018" | "fernandes" => Ok(CaseName::Fernandes2018),
            _ => Err(Error::Unknown { kind: "case", name: s.to_string() }),
        }
    }
}
