//! Bus-catching decisions over 40 arrival-time distributions in three
//! payoff scenarios. Arrival distributions come from a parameter file.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cases::{CaseStudy, Pin};
use crate::error::{Error, Result};
use crate::generative::{discretize, transit_grid, BoxCoxT, DiscretizedDistribution};
use crate::model::{
    format_value, ActionSpace, DecisionTask, ExperimentDesign, InformationStructure, ScoringRule,
    StateSpace, Strategy, TransitRule,
};
use crate::payment::ConversionRule;

pub const SCENARIOS: [u8; 3] = [1, 2, 3];
pub const BASE_PAYMENT: f64 = 1.25;
pub const DEFAULT_GRID_STEP: f64 = 0.25;
pub const LATEST_DEPARTURE: i64 = 30;
pub const FULL: &str = "full";
pub const TEXT_STRATEGIES: [&str; 3] = ["text60", "text85", "text99"];

/// One trial's arrival-time distribution, in minutes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialDistribution {
    pub trial_id: String,
    pub dist: BoxCoxT,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub id: u8,
    pub rule: TransitRule,
    /// Dollars per 1000 points.
    pub dollars_per_thousand: f64,
}

pub fn scenario(id: u8) -> Result<Scenario> {
    let (r0, rw, rd, t, d) = match id {
        1 => (8.0, -14.0, 14.0, 90.0, 0.01698),
        2 => (14.0, -14.0, 14.0, 60.0, 0.08228),
        3 => (8.0, -17.0, 17.0, 120.0, 0.016076),
        _ => {
            return Err(Error::InvalidParameter(format!(
                "scenario must be 1, 2 or 3 (got {id})"
            )))
        }
    };
    Ok(Scenario { id, rule: TransitRule::new(r0, rw, rd, t), dollars_per_thousand: d })
}

impl Scenario {
    pub fn conversion(&self) -> ConversionRule {
        ConversionRule::Affine { base: BASE_PAYMENT, rate: self.dollars_per_thousand / 1000.0 }
    }

    /// Pays only for points above what always leaving at minute 30 earns.
    pub fn shifted_conversion(&self, trials: u32) -> ConversionRule {
        ConversionRule::ShiftedAffine {
            base: BASE_PAYMENT,
            rate: self.dollars_per_thousand / 1000.0,
            shift: f64::from(trials) * LATEST_DEPARTURE as f64 * self.rule.r0,
        }
    }
}

/// How the states carry the second bus.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StateEncoding {
    /// States are (trial, arrival) pairs; a missed bus is followed by one
    /// from the same trial's distribution.
    #[default]
    TrialAware,
    /// States are arrival times; the second bus follows the agent's belief.
    PlugIn,
}

/// Which trials a text display cannot tell apart.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TextPartition {
    /// Every trial is its own class.
    Identity,
    /// `trial_id -> class label`; every trial must be listed.
    Explicit { classes: BTreeMap<String, String> },
    /// Trials whose `probability` quantile rounds to the same multiple of
    /// `resolution` minutes share a class.
    RoundedQuantile { probability: f64, resolution: f64 },
}

impl TextPartition {
    /// Example coarsening for a one-sided text display at `level`:
    /// the quantile rounded to whole minutes.
    pub fn example(level: f64) -> Self {
        TextPartition::RoundedQuantile { probability: level, resolution: 1.0 }
    }

    pub fn class_of(&self, trial: &TrialDistribution) -> Result<String> {
        match self {
            TextPartition::Identity => Ok(trial.trial_id.clone()),
            TextPartition::Explicit { classes } => {
                classes.get(&trial.trial_id).cloned().ok_or_else(|| {
                    Error::InvalidParameter(format!("text partition misses trial `{}`", trial.trial_id))
                })
            }
            TextPartition::RoundedQuantile { probability, resolution } => {
                if !(*resolution > 0.0) {
                    return Err(Error::InvalidParameter(format!("resolution {resolution}")));
                }
                let q = trial.dist.quantile(*probability)?;
                let rounded = (q / resolution).round() * resolution;
                Ok(format!("q{}={}", format_value(probability * 100.0), format_value(rounded)))
            }
        }
    }
}

fn default_grid_step() -> f64 {
    DEFAULT_GRID_STEP
}

fn default_text() -> BTreeMap<String, TextPartition> {
    TEXT_STRATEGIES
        .iter()
        .map(|s| (s.to_string(), TextPartition::Identity))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FernandesOptions {
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    #[serde(default)]
    pub encoding: StateEncoding,
    #[serde(default = "default_text")]
    pub text_partitions: BTreeMap<String, TextPartition>,
}

impl Default for FernandesOptions {
    fn default() -> Self {
        FernandesOptions {
            grid_step: DEFAULT_GRID_STEP,
            encoding: StateEncoding::TrialAware,
            text_partitions: default_text(),
        }
    }
}

impl FernandesOptions {
    /// Text strategies coarsened by [`TextPartition::example`].
    pub fn with_example_partitions(mut self) -> Self {
        for (name, level) in TEXT_STRATEGIES.iter().zip([0.60, 0.85, 0.99]) {
            self.text_partitions.insert(name.to_string(), TextPartition::example(level));
        }
        self
    }
}

/// Discretized arrival distribution of every trial.
pub fn discretize_trials(dists: &[TrialDistribution], grid_step: f64) -> Result<Vec<DiscretizedDistribution>> {
    let grid = transit_grid(grid_step)?;
    dists.iter().map(|t| discretize(|y| t.dist.cdf(y), &grid)).collect()
}

fn state_label(trial: &str, theta: f64) -> String {
    format!("{trial}@{}", format_value(theta))
}

fn task_for(scn: &Scenario, dists: &[TrialDistribution], cells: &[DiscretizedDistribution], encoding: StateEncoding) -> Result<DecisionTask> {
    let actions = ActionSpace::IntegerGrid { lo: 0, hi: LATEST_DEPARTURE, step: 1 };
    let grid = &cells[0].grid;
    match encoding {
        StateEncoding::PlugIn => DecisionTask::new(
            StateSpace::numeric(grid.clone())?,
            actions,
            ScoringRule::Transit(scn.rule.clone()),
        ),
        StateEncoding::TrialAware => {
            let labels = dists
                .iter()
                .flat_map(|t| grid.iter().map(move |g| state_label(&t.trial_id, *g)));
            let states = StateSpace::new(labels)?;
            let scores = (0..actions.len())
                .map(|a| {
                    let a = a as f64;
                    cells
                        .iter()
                        .flat_map(|c| {
                            let m = c.mean();
                            c.grid.iter().map(move |th| scn.rule.payoff(a, *th, m))
                        })
                        .collect()
                })
                .collect();
            DecisionTask::new(states, actions, ScoringRule::Matrix { scores })
        }
    }
}

/// Joint over trial signals, each drawn with equal probability.
fn trial_rows(cells: &[DiscretizedDistribution], encoding: StateEncoding) -> Vec<Vec<f64>> {
    let n = cells.len();
    let w = 1.0 / n as f64;
    let k = cells[0].grid.len();
    cells
        .iter()
        .enumerate()
        .map(|(i, c)| match encoding {
            StateEncoding::PlugIn => c.masses.iter().map(|m| w * m).collect(),
            StateEncoding::TrialAware => {
                let mut row = vec![0.0; n * k];
                for (j, m) in c.masses.iter().enumerate() {
                    row[i * k + j] = w * m;
                }
                row
            }
        })
        .collect()
}

/// Merges trial rows by text class, in order of first appearance.
fn coarsen(rows: &[Vec<f64>], classes: &[String]) -> Result<InformationStructure> {
    let mut labels: Vec<String> = Vec::new();
    let mut joint: Vec<Vec<f64>> = Vec::new();
    for (row, class) in rows.iter().zip(classes) {
        match labels.iter().position(|l| l == class) {
            Some(i) => joint[i].iter_mut().zip(row).for_each(|(a, b)| *a += b),
            None => {
                labels.push(class.clone());
                joint.push(row.clone());
            }
        }
    }
    InformationStructure::new(labels, joint)
}

pub fn build_fernandes(scenario_id: u8, dists: &[TrialDistribution], options: &FernandesOptions) -> Result<CaseStudy> {
    let scn = scenario(scenario_id)?;
    if dists.is_empty() {
        return Err(Error::InvalidParameter("no trial distributions".into()));
    }
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = dists.iter().find(|t| !seen.insert(t.trial_id.as_str())) {
        return Err(Error::InvalidParameter(format!("duplicate trial `{}`", dup.trial_id)));
    }
    let cells = discretize_trials(dists, options.grid_step)?;
    let task = task_for(&scn, dists, &cells, options.encoding)?;
    let rows = trial_rows(&cells, options.encoding);
    let ids: Vec<String> = dists.iter().map(|t| t.trial_id.clone()).collect();
    let mut strategies = vec![Strategy {
        name: FULL.into(),
        structure: InformationStructure::new(ids, rows.clone())?,
    }];
    for (name, partition) in &options.text_partitions {
        let classes = dists.iter().map(|t| partition.class_of(t)).collect::<Result<Vec<_>>>()?;
        strategies.push(Strategy { name: name.clone(), structure: coarsen(&rows, &classes)? });
    }
    let mut design = ExperimentDesign::new(format!("fernandes2018-s{scenario_id}"), task, strategies)?;
    design.conversion = Some(scn.conversion());
    design.trials = dists.len() as u32;

    // Reference values for the original distributions; not reproducible from
    // the parameter files shipped here.
    let (base, bench, delta, text, f0, f1, df, ratio, base_ratio) = match scenario_id {
        1 => (1078.7, 1171.8, 93.1, [1170.3, 1171.0, 1165.0], 1.983, 2.046, 0.063, 0.0312, 0.921),
        2 => (767.5, 852.0, 84.6, [851.5, 851.6, 848.1], 3.776, 4.054, 0.278, 0.0737, 0.901),
        _ => (1850.2, 1919.4, 69.3, [1918.7, 1918.3, 1914.9], 2.440, 2.484, 0.044, 0.0182, 0.964),
    };
    let mut expected = BTreeMap::new();
    let mut pin = |k: &str, p: Pin| {
        expected.insert(k.to_string(), p);
    };
    pin("baseline", Pin::reference(base, 0.05));
    pin("benchmark", Pin::reference(bench, 0.05));
    pin("value_of_information", Pin::reference(delta, 0.1));
    pin("visualization_optimal.full", Pin::reference(bench, 0.05));
    for (name, v) in TEXT_STRATEGIES.iter().zip(text) {
        pin(&format!("visualization_optimal.{name}"), Pin::reference(v, 0.05));
    }
    pin("baseline_ratio", Pin::reference(base_ratio, 0.0005));
    pin("payment.baseline", Pin::reference(f0, 0.0005));
    pin("payment.informed", Pin::reference(f1, 0.0005));
    pin("payment.incentive", Pin::reference(df, 0.0005));
    pin("payment.incentive_ratio", Pin::reference(ratio, 0.00005));
    pin("conversion.base", Pin::new(BASE_PAYMENT, 0.0));
    pin("conversion.dollars_per_thousand", Pin::new(scn.dollars_per_thousand, 0.0));
    Ok(CaseStudy { name: "fernandes2018".into(), design, expected })
}
