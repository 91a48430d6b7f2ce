//! Behavioral scores from trial records: the empirical action/state joint,
//! its expected score, the calibrated score, and the belief/optimization
//! loss decomposition.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    report_bin, ActionSpace, Belief, DecisionTask, ExperimentDesign, ReportModel,
};
use crate::rational;

pub const DEFAULT_BIN_WIDTH: f64 = 0.02;

/// A participant response: a decision, or a probability report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Response {
    Action(String),
    Probability(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial_id: String,
    pub strategy: String,
    pub signal: String,
    pub state: String,
    pub response: Response,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    RawCounts,
    BinnedReports { bin_width: f64 },
}

/// Observed counts over (action, state). Rows are actions.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalJoint {
    pub actions: Vec<String>,
    pub states: Vec<String>,
    pub counts: Vec<Vec<u64>>,
    pub provenance: Provenance,
}

impl EmpiricalJoint {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn masses(&self) -> Vec<Vec<f64>> {
        let n = self.total() as f64;
        self.counts
            .iter()
            .map(|r| r.iter().map(|c| *c as f64 / n).collect())
            .collect()
    }

    pub fn action_mass(&self, action: usize) -> f64 {
        self.counts[action].iter().sum::<u64>() as f64 / self.total() as f64
    }

    /// State distribution given an action, with additive smoothing `alpha`.
    /// `None` for actions never taken.
    pub fn conditional(&self, action: usize, alpha: f64) -> Option<Belief> {
        let row = &self.counts[action];
        if row.iter().sum::<u64>() == 0 {
            return None;
        }
        let w: Vec<f64> = row.iter().map(|c| *c as f64 + alpha).collect();
        Belief::from_weights(&w).ok()
    }

    /// Adds the counts of another joint over the same actions and states.
    pub fn merge(&mut self, other: &EmpiricalJoint) -> Result<()> {
        if self.actions != other.actions || self.states != other.states || self.provenance != other.provenance {
            return Err(Error::Dimension("merging joints over different spaces".into()));
        }
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IngestOptions {
    pub bin_width: f64,
}

impl Default for IngestOptions {
    fn default() -> Self {
        IngestOptions {
            bin_width: DEFAULT_BIN_WIDTH,
        }
    }
}

/// Folds records into an empirical joint. Decision records count
/// (action, state) pairs; probability reports are binned and each bin
/// becomes an action.
pub fn ingest(
    records: &[TrialRecord],
    design: &ExperimentDesign,
    options: IngestOptions,
) -> Result<EmpiricalJoint> {
    let first = records.first().ok_or(Error::NoRecords)?;
    let reports = matches!(first.response, Response::Probability(_));
    let task = &design.task;
    let (actions, provenance) = if reports {
        let space = ActionSpace::ProbabilityReport {
            bin_width: options.bin_width,
        };
        let v = space.violations();
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        (
            space.labels(),
            Provenance::BinnedReports {
                bin_width: options.bin_width,
            },
        )
    } else {
        (task.actions.labels(), Provenance::RawCounts)
    };
    let mut counts = vec![vec![0u64; task.n_states()]; actions.len()];
    let mut bad_ids = Vec::new();
    let mut details = Vec::new();
    for r in records {
        let mut problems = Vec::new();
        let state = task.states.index_of(&r.state);
        if state.is_none() {
            problems.push(format!("unknown state `{}`", r.state));
        }
        match design.strategy(&r.strategy) {
            Ok(s) if s.structure.signal_index(&r.signal).is_none() => {
                problems.push(format!("unknown signal `{}` for strategy `{}`", r.signal, r.strategy))
            }
            Ok(_) => {}
            Err(_) => problems.push(format!("unknown strategy `{}`", r.strategy)),
        }
        let action = match (&r.response, reports) {
            (Response::Action(a), false) => {
                let i = task.actions.index_of(a);
                if i.is_none() {
                    problems.push(format!("unknown action `{a}`"));
                }
                i
            }
            (Response::Probability(p), true) => {
                if (0.0..=1.0).contains(p) {
                    Some(report_bin(options.bin_width, *p))
                } else {
                    problems.push(format!("probability report {p} outside [0, 1]"));
                    None
                }
            }
            _ => {
                problems.push("mixed decision and probability records".to_string());
                None
            }
        };
        match (action, state) {
            (Some(a), Some(s)) if problems.is_empty() => counts[a][s] += 1,
            _ => {
                bad_ids.push(r.trial_id.clone());
                details.extend(problems.into_iter().map(|p| format!("{}: {p}", r.trial_id)));
            }
        }
    }
    if !bad_ids.is_empty() {
        return Err(Error::UnknownTrialValues { ids: bad_ids, details });
    }
    Ok(EmpiricalJoint {
        actions,
        states: task.states.labels.clone(),
        counts,
        provenance,
    })
}

/// The task that scores the joint's actions: the design task for raw
/// decisions, its report form for binned probability reports.
pub fn scoring_task(design: &ExperimentDesign, joint: &EmpiricalJoint) -> Result<DecisionTask> {
    match joint.provenance {
        Provenance::RawCounts => Ok(design.task.clone()),
        Provenance::BinnedReports { bin_width } => {
            let default_model;
            let model = match &design.report_model {
                Some(m) => m,
                None => {
                    default_model = ReportModel::binary();
                    &default_model
                }
            };
            design.task.report_task(bin_width, model)
        }
    }
}

fn check_joint(joint: &EmpiricalJoint, task: &DecisionTask) -> Result<()> {
    if joint.total() == 0 {
        return Err(Error::NoRecords);
    }
    if joint.actions.len() != task.n_actions() || joint.states.len() != task.n_states() {
        return Err(Error::Dimension("joint does not match the scoring task".into()));
    }
    Ok(())
}

/// Expected score under the empirical joint.
pub fn behavioral_score(joint: &EmpiricalJoint, task: &DecisionTask) -> Result<f64> {
    check_joint(joint, task)?;
    let mut total = 0.0;
    for a in 0..joint.actions.len() {
        if let Some(q) = joint.conditional(a, 0.0) {
            total += joint.action_mass(a) * task.expected_score(a, &q)?;
        }
    }
    Ok(total)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    /// Replacement action for each observed action; `None` where the action
    /// was never taken.
    pub policy: Vec<Option<usize>>,
    pub score: f64,
}

/// Replaces every observed action by the action optimal under its
/// empirical state conditional. `alpha` smooths the conditional used to
/// pick the replacement; the score is taken under the observed one.
pub fn calibrate(joint: &EmpiricalJoint, task: &DecisionTask, alpha: f64) -> Result<Calibration> {
    check_joint(joint, task)?;
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter(format!("smoothing alpha {alpha}")));
    }
    let mut policy = Vec::with_capacity(joint.actions.len());
    let mut score = 0.0;
    for a in 0..joint.actions.len() {
        match (joint.conditional(a, alpha), joint.conditional(a, 0.0)) {
            (Some(smoothed), Some(observed)) => {
                let (best, _) = task.optimal_action(&smoothed)?;
                score += joint.action_mass(a) * task.expected_score(best, &observed)?;
                policy.push(Some(best));
            }
            _ => policy.push(None),
        }
    }
    Ok(Calibration { policy, score })
}

/// `max(B - R0, 0)`
pub fn behavioral_value_of_information(behavioral: f64, baseline: f64) -> f64 {
    (behavioral - baseline).max(0.0)
}

/// `(R_V - C) / delta`
pub fn belief_loss(visualization_optimal: f64, calibrated: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::ZeroInformationValue);
    }
    Ok((visualization_optimal - calibrated) / delta)
}

/// `(C - B) / delta`
pub fn optimization_loss(calibrated: f64, behavioral: f64, delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::ZeroInformationValue);
    }
    Ok((calibrated - behavioral) / delta)
}

/// Turns probability-report records into decision records by playing the
/// action optimal under the belief each report maps to.
pub fn decisions_from_beliefs(
    records: &[TrialRecord],
    task: &DecisionTask,
    model: &ReportModel,
) -> Result<Vec<TrialRecord>> {
    let labels = task.actions.labels();
    records
        .iter()
        .map(|r| {
            let Response::Probability(p) = r.response else {
                return Err(Error::InvalidParameter(format!(
                    "trial {} is not a probability report",
                    r.trial_id
                )));
            };
            let belief = model.belief(p, task.n_states())?;
            let (a, _) = task.optimal_action(&belief)?;
            Ok(TrialRecord {
                response: Response::Action(labels[a].clone()),
                ..r.clone()
            })
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostOptions {
    pub bin_width: f64,
    pub smoothing_alpha: f64,
}

impl Default for PostOptions {
    fn default() -> Self {
        PostOptions {
            bin_width: DEFAULT_BIN_WIDTH,
            smoothing_alpha: 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    /// Strategy name, or `"pooled"`.
    pub strategy: String,
    pub n_trials: u64,
    pub baseline: f64,
    pub visualization_optimal: f64,
    pub value_of_information: f64,
    pub behavioral: f64,
    pub calibrated: f64,
    pub behavioral_value_of_information: f64,
    /// Raw ratios; `None` when the design has no information value.
    pub belief_loss: Option<f64>,
    pub optimization_loss: Option<f64>,
    /// The agent did no better than the prior alone.
    pub below_baseline: bool,
    /// A loss fell outside [0, 1].
    pub out_of_range: bool,
}

/// Per-strategy loss reports plus a pooled row weighted by trial counts.
pub fn analyze_trials(
    design: &ExperimentDesign,
    records: &[TrialRecord],
    options: PostOptions,
) -> Result<Vec<LossReport>> {
    if records.is_empty() {
        return Err(Error::NoRecords);
    }
    let rational = rational::analyze(design)?;
    let ingest_opts = IngestOptions {
        bin_width: options.bin_width,
    };
    // validate everything up front so errors list every offending row
    let pooled_joint = ingest(records, design, ingest_opts)?;
    let task = scoring_task(design, &pooled_joint)?;

    let mut groups: BTreeMap<&str, Vec<TrialRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.strategy.as_str()).or_default().push(r.clone());
    }
    let delta = rational.value_of_information;
    let mut out = Vec::new();
    let mut weighted_rv = 0.0;
    for name in &rational.strategy_order {
        let Some(recs) = groups.get(name.as_str()) else {
            continue;
        };
        let joint = ingest(recs, design, ingest_opts)?;
        let rv = rational.per_strategy[name].visualization_optimal;
        weighted_rv += rv * joint.total() as f64;
        out.push(loss_row(name, &joint, &task, rational.baseline, rv, delta, options.smoothing_alpha)?);
    }
    if out.len() > 1 {
        let rv = weighted_rv / pooled_joint.total() as f64;
        out.push(loss_row("pooled", &pooled_joint, &task, rational.baseline, rv, delta, options.smoothing_alpha)?);
    }
    Ok(out)
}

fn loss_row(
    name: &str,
    joint: &EmpiricalJoint,
    task: &DecisionTask,
    baseline: f64,
    rv: f64,
    delta: f64,
    alpha: f64,
) -> Result<LossReport> {
    let b = behavioral_score(joint, task)?;
    let c = calibrate(joint, task, alpha)?.score;
    let bl = belief_loss(rv, c, delta).ok();
    let ol = optimization_loss(c, b, delta).ok();
    let out_of_range = [bl, ol]
        .iter()
        .flatten()
        .any(|x| !(-1e-9..=1.0 + 1e-9).contains(x));
    Ok(LossReport {
        strategy: name.to_string(),
        n_trials: joint.total(),
        baseline,
        visualization_optimal: rv,
        value_of_information: delta,
        behavioral: b,
        calibrated: c,
        behavioral_value_of_information: behavioral_value_of_information(b, baseline),
        belief_loss: bl,
        optimization_loss: ol,
        below_baseline: b < baseline,
        out_of_range,
    })
}
