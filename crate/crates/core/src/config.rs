//! JSON configuration: one design source plus run options.
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "case": { "name": "fernandes2018", "scenario": 2, "distributions": "trials.csv" },
//!   "options": { "seed": 7, "n": 100000 }
//! }
//! ```
//!
//! `case` names a built-in study; `design` holds a full experiment design
//! instead. Exactly one of the two must be present. Relative paths resolve
//! against the config file's directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::behavioral::DEFAULT_BIN_WIDTH;
use crate::cases::fernandes::{self, FernandesOptions, SCENARIOS};
use crate::cases::{kale, weather, CaseName, Pin};
use crate::error::{Error, Result};
use crate::generative::transit_grid;
use crate::io::read_distributions_file;
use crate::model::ExperimentDesign;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case", deny_unknown_fields)]
pub enum CaseSpec {
    Weather,
    Kale2020 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        levels: Option<Vec<f64>>,
    },
    Fernandes2018 {
        /// All three scenarios when absent.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        scenario: Option<u8>,
        distributions: PathBuf,
        #[serde(default)]
        options: FernandesOptions,
    },
}

impl CaseSpec {
    pub fn name(&self) -> CaseName {
        match self {
            CaseSpec::Weather => CaseName::Weather,
            CaseSpec::Kale2020 { .. } => CaseName::Kale2020,
            CaseSpec::Fernandes2018 { .. } => CaseName::Fernandes2018,
        }
    }
}

/// Options shared by the commands. Absent fields take command defaults.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bin_width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub smoothing_alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
}

impl RunOptions {
    /// Fields set in `other` win.
    pub fn overlay(&self, other: &RunOptions) -> RunOptions {
        RunOptions {
            seed: other.seed.or(self.seed),
            n: other.n.or(self.n),
            bin_width: other.bin_width.or(self.bin_width),
            grid_step: other.grid_step.or(self.grid_step),
            smoothing_alpha: other.smoothing_alpha.or(self.smoothing_alpha),
            out: other.out.clone().or_else(|| self.out.clone()),
        }
    }

    pub fn bin_width(&self) -> f64 {
        self.bin_width.unwrap_or(DEFAULT_BIN_WIDTH)
    }

    pub fn smoothing_alpha(&self) -> f64 {
        self.smoothing_alpha.unwrap_or(0.0)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(w) = self.bin_width {
            if !(w > 0.0 && w <= 1.0) {
                out.push(format!("bin width must lie in (0, 1] (got {w})"));
            }
        }
        if let Some(a) = self.smoothing_alpha {
            if !(a >= 0.0 && a.is_finite()) {
                out.push(format!("smoothing alpha must be >= 0 (got {a})"));
            }
        }
        if self.n == Some(0) {
            out.push("n must be >= 1".to_string());
        }
        if let Some(s) = self.grid_step {
            if let Err(e) = transit_grid(s) {
                out.push(e.to_string());
            }
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub case: Option<CaseSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub design: Option<ExperimentDesign>,
    #[serde(default)]
    pub options: RunOptions,
}

impl ConfigFile {
    pub fn from_design(design: ExperimentDesign) -> Self {
        ConfigFile {
            schema_version: SCHEMA_VERSION,
            case: None,
            design: Some(design),
            options: RunOptions::default(),
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.schema_version != SCHEMA_VERSION {
            out.push(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        match (&self.case, &self.design) {
            (Some(_), Some(_)) => out.push("config has both `case` and `design`".to_string()),
            (None, None) => out.push("config needs one of `case` or `design`".to_string()),
            _ => {}
        }
        out.extend(self.options.violations());
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ConfigFile = serde_json::from_str(text)?;
        match cfg.violations() {
            v if v.is_empty() => Ok(cfg),
            v => Err(Error::Invalid(v)),
        }
    }

    /// Reads a config and makes its relative paths absolute.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = ConfigFile::parse(&fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new("."));
        if let Some(CaseSpec::Fernandes2018 { distributions, .. }) = &mut cfg.case {
            if distributions.is_relative() {
                *distributions = base.join(&*distributions);
            }
        }
        Ok(cfg)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

/// Where a command's design comes from.
#[derive(Clone, Debug, PartialEq)]
pub enum DesignSource {
    Case(CaseSpec),
    Design(Box<ExperimentDesign>),
}

impl DesignSource {
    pub fn from_config(cfg: ConfigFile) -> Result<Self> {
        match (cfg.case, cfg.design) {
            (Some(c), None) => Ok(DesignSource::Case(c)),
            (None, Some(d)) => Ok(DesignSource::Design(Box::new(d))),
            _ => Err(Error::Invalid(vec!["config needs exactly one design source".into()])),
        }
    }
}

/// A design ready for analysis, with the values it is expected to reproduce.
#[derive(Clone, Debug, PartialEq)]
pub struct LoadedDesign {
    pub label: String,
    pub design: ExperimentDesign,
    pub expected: BTreeMap<String, Pin>,
}

/// Builds every design a source describes. A Fernandes case without a
/// scenario yields one design per scenario.
pub fn resolve(source: &DesignSource, options: &RunOptions) -> Result<Vec<LoadedDesign>> {
    let v = options.violations();
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let single = |case: crate::cases::CaseStudy, label: &str| LoadedDesign {
        label: label.to_string(),
        design: case.design,
        expected: case.expected,
    };
    match source {
        DesignSource::Design(d) => {
            let v = d.violations();
            if !v.is_empty() {
                return Err(Error::Invalid(v));
            }
            Ok(vec![LoadedDesign {
                label: d.name.clone(),
                design: (**d).clone(),
                expected: BTreeMap::new(),
            }])
        }
        DesignSource::Case(CaseSpec::Weather) => Ok(vec![single(weather::build_weather()?, "weather")]),
        DesignSource::Case(CaseSpec::Kale2020 { levels }) => {
            Ok(vec![single(kale::build_kale(levels.clone())?, "kale2020")])
        }
        DesignSource::Case(CaseSpec::Fernandes2018 { scenario, distributions, options: fopts }) => {
            let dists = read_distributions_file(distributions)?;
            let mut fopts = fopts.clone();
            if let Some(step) = options.grid_step {
                fopts.grid_step = step;
            }
            let ids: Vec<u8> = match scenario {
                Some(s) => vec![*s],
                None => SCENARIOS.to_vec(),
            };
            ids.iter()
                .map(|s| {
                    let case = fernandes::build_fernandes(*s, &dists, &fopts)?;
                    Ok(single(case, &format!("scenario {s}")))
                })
                .collect()
        }
    }
}
