//! Decision problems: states, actions, beliefs, scoring rules and
//! information structures, plus the elementary expected-score and
//! argmax operations everything else is built from.
//!
//! A [`DecisionTask`] bundles a state space, an action space and a scoring
//! rule. Pairing a task with an [`InformationStructure`] gives a
//! [`DecisionProblem`]; pairing it with several named structures gives an
//! [`ExperimentDesign`].

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::generative::{pos_to_win_probability, win_probability_to_pos};
use crate::payment::ConversionRule;

/// Tolerance used for every probability-vector normalization check.
pub const PROB_TOL: f64 = 1e-9;

/// Tolerance for strategies sharing the same state prior.
pub const PRIOR_MATCH_TOL: f64 = 1e-6;

/// Minutes between the first and the guaranteed second bus.
pub const SECOND_BUS_OFFSET: f64 = 30.0;

/// Finite, ordered set of states. Numeric values are optional and only
/// needed by rules that do arithmetic on the state (the transit rule).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateSpace {
    pub labels: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
}

impl StateSpace {
    pub fn new<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Result<Self> {
        let space = StateSpace {
            labels: labels.into_iter().map(Into::into).collect(),
            values: None,
        };
        space.check()?;
        Ok(space)
    }

    /// A numeric state space; labels are the formatted values.
    pub fn numeric(values: Vec<f64>) -> Result<Self> {
        let space = StateSpace {
            labels: values.iter().map(|v| format_value(*v)).collect(),
            values: Some(values),
        };
        space.check()?;
        Ok(space)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.labels.is_empty() {
            out.push("state space is empty".to_string());
        }
        let mut seen = HashSet::new();
        for l in &self.labels {
            if !seen.insert(l.as_str()) {
                out.push(format!("duplicate state `{l}`"));
            }
        }
        if let Some(values) = &self.values {
            if values.len() != self.labels.len() {
                out.push(format!(
                    "dimension: {} state values for {} states",
                    values.len(),
                    self.labels.len()
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                out.push("non-finite state value".to_string());
            }
        }
        out
    }

    fn check(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Invalid(v))
        }
    }
}

/// Formats a grid value without trailing zeros: `10`, `10.25`.
pub fn format_value(v: f64) -> String {
    if v.fract() == 0.0 {
        format!("{}", v as i64)
    } else {
        let s = format!("{v:.6}");
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    }
}

/// The set of actions an agent can take. Grids and report bins are always
/// expanded to a finite list.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ActionSpace {
    Finite { labels: Vec<String> },
    /// Integers `lo, lo + step, ..., <= hi`.
    IntegerGrid { lo: i64, hi: i64, step: i64 },
    /// Probability reports for a binary event, binned with width `bin_width`.
    ProbabilityReport { bin_width: f64 },
}

impl ActionSpace {
    pub fn finite<S: Into<String>>(labels: impl IntoIterator<Item = S>) -> Self {
        ActionSpace::Finite {
            labels: labels.into_iter().map(Into::into).collect(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ActionSpace::Finite { labels } => labels.len(),
            ActionSpace::IntegerGrid { lo, hi, step } => {
                if *step <= 0 || hi < lo {
                    0
                } else {
                    ((hi - lo) / step + 1) as usize
                }
            }
            ActionSpace::ProbabilityReport { bin_width } => report_bin_count(*bin_width),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn labels(&self) -> Vec<String> {
        match self {
            ActionSpace::Finite { labels } => labels.clone(),
            ActionSpace::IntegerGrid { lo, step, .. } => (0..self.len())
                .map(|i| (lo + step * i as i64).to_string())
                .collect(),
            ActionSpace::ProbabilityReport { bin_width } => (0..self.len())
                .map(|i| format!("{:.4}", i as f64 * bin_width))
                .collect(),
        }
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        match self {
            ActionSpace::Finite { labels } => labels.iter().position(|l| l == label),
            _ => self.labels().iter().position(|l| l == label),
        }
    }

    /// Numeric value of an action, where the space has one.
    pub fn value(&self, index: usize) -> Option<f64> {
        match self {
            ActionSpace::Finite { .. } => None,
            ActionSpace::IntegerGrid { lo, step, .. } => Some((lo + step * index as i64) as f64),
            ActionSpace::ProbabilityReport { bin_width } => Some(bin_midpoint(*bin_width, index)),
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        match self {
            ActionSpace::Finite { labels } => {
                let mut seen = HashSet::new();
                for l in labels {
                    if !seen.insert(l.as_str()) {
                        out.push(format!("duplicate action `{l}`"));
                    }
                }
            }
            ActionSpace::IntegerGrid { lo, hi, step } => {
                if *step <= 0 {
                    out.push(format!("grid step must be > 0 (got {step})"));
                }
                if hi < lo {
                    out.push(format!("grid upper bound {hi} below lower bound {lo}"));
                }
            }
            ActionSpace::ProbabilityReport { bin_width } => {
                if !(*bin_width > 0.0 && *bin_width <= 1.0) {
                    out.push(format!("bin width must lie in (0, 1] (got {bin_width})"));
                }
            }
        }
        if out.is_empty() && self.is_empty() {
            out.push("action space is empty".to_string());
        }
        out
    }
}

/// Number of width-`w` bins covering `[0, 1]`.
pub fn report_bin_count(w: f64) -> usize {
    if !(w > 0.0 && w <= 1.0) {
        return 0;
    }
    (1.0 / w - 1e-9).ceil().max(1.0) as usize
}

/// Bin index of a probability report; the last bin is closed on the right.
pub fn report_bin(w: f64, report: f64) -> usize {
    let n = report_bin_count(w);
    let k = (report / w + 1e-9).floor();
    (k.max(0.0) as usize).min(n - 1)
}

pub fn bin_midpoint(w: f64, index: usize) -> f64 {
    let lo = index as f64 * w;
    let hi = ((index + 1) as f64 * w).min(1.0);
    0.5 * (lo + hi)
}

/// A probability vector over a state space.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Belief(Vec<f64>);

impl Belief {
    /// Inputs within [`PROB_TOL`] of unit mass are renormalized; anything
    /// further off is rejected.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::Dimension("empty belief".into()));
        }
        if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= -PROB_TOL && **p <= 1.0 + PROB_TOL)) {
            return Err(Error::InvalidProbability(format!("{p} outside [0, 1]")));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::NotNormalized { sum });
        }
        Ok(Belief(probs.into_iter().map(|p| p.max(0.0) / sum).collect()))
    }

    /// Normalizes arbitrary non-negative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let sum: f64 = weights.iter().sum();
        if !(sum > 0.0) || weights.iter().any(|w| *w < 0.0 || !w.is_finite()) {
            return Err(Error::InvalidProbability(
                "weights must be non-negative with positive total".into(),
            ));
        }
        Ok(Belief(weights.iter().map(|w| w / sum).collect()))
    }

    pub fn point_mass(n: usize, index: usize) -> Self {
        let mut v = vec![0.0; n];
        v[index] = 1.0;
        Belief(v)
    }

    pub fn uniform(n: usize) -> Self {
        Belief(vec![1.0 / n as f64; n])
    }

    /// Binary belief with `p` on state 1.
    pub fn binary(p: f64) -> Result<Self> {
        Belief::new(vec![1.0 - p, p])
    }

    pub fn probs(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mean(&self, values: &[f64]) -> f64 {
        self.0.iter().zip(values).map(|(p, v)| p * v).sum()
    }

    /// Convex combination `lambda * self + (1 - lambda) * other`.
    pub fn mix(&self, other: &Belief, lambda: f64) -> Result<Belief> {
        if self.len() != other.len() {
            return Err(Error::Dimension("mixing beliefs of different sizes".into()));
        }
        Belief::new(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| lambda * a + (1.0 - lambda) * b)
                .collect(),
        )
    }
}

impl<'de> Deserialize<'de> for Belief {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Vec::<f64>::deserialize(d)?;
        Belief::new(v).map_err(serde::de::Error::custom)
    }
}

/// How the second-bus arrival enters the transit payoff.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondBus {
    /// Plug in the belief mean of the second arrival.
    #[default]
    PlugInMean,
    /// Sum explicitly over an independent second arrival drawn from the belief.
    FullExpectation,
}

/// Bus-catching payoff. Scores are in points per trial.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransitRule {
    /// Points per minute of activity before leaving.
    pub r0: f64,
    /// Points per minute waiting at the stop (non-positive).
    pub rw: f64,
    /// Points per minute at the destination.
    pub rd: f64,
    /// Maximum minutes at the destination.
    pub horizon: f64,
    #[serde(default = "default_offset")]
    pub offset: f64,
    #[serde(default)]
    pub second_bus: SecondBus,
}

fn default_offset() -> f64 {
    SECOND_BUS_OFFSET
}

impl TransitRule {
    pub fn new(r0: f64, rw: f64, rd: f64, horizon: f64) -> Self {
        TransitRule {
            r0,
            rw,
            rd,
            horizon,
            offset: SECOND_BUS_OFFSET,
            second_bus: SecondBus::PlugInMean,
        }
    }

    /// Payoff for leaving at `a` when the bus comes at `theta` and the
    /// second bus at `second + offset`.
    pub fn payoff(&self, a: f64, theta: f64, second: f64) -> f64 {
        if a <= theta {
            self.r0 * a + self.rw * (theta - a) + self.rd * self.horizon
        } else {
            self.r0 * a
                + self.rw * (second + self.offset - a)
                + self.rd * (self.horizon - (second - theta))
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (name, v) in [
            ("r0", self.r0),
            ("rw", self.rw),
            ("rd", self.rd),
            ("horizon", self.horizon),
            ("offset", self.offset),
        ] {
            if !v.is_finite() {
                out.push(format!("transit parameter {name} is not finite"));
            }
        }
        if self.rw > 0.0 {
            out.push(format!("waiting rate rw must be <= 0 (got {})", self.rw));
        }
        if !(self.horizon > 0.0) {
            out.push(format!("horizon T must be > 0 (got {})", self.horizon));
        }
        out
    }
}

/// Payoff `S(a, theta)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ScoringRule {
    /// Rows are actions, columns are states.
    Matrix { scores: Vec<Vec<f64>> },
    Transit(TransitRule),
}

/// A state space, an action space and the scoring rule linking them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionTask {
    pub states: StateSpace,
    pub actions: ActionSpace,
    pub rule: ScoringRule,
}

impl DecisionTask {
    pub fn new(states: StateSpace, actions: ActionSpace, rule: ScoringRule) -> Result<Self> {
        let task = DecisionTask { states, actions, rule };
        let v = task.violations();
        if v.is_empty() {
            Ok(task)
        } else {
            Err(Error::Invalid(v))
        }
    }

    pub fn n_states(&self) -> usize {
        self.states.len()
    }

    pub fn n_actions(&self) -> usize {
        self.actions.len()
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = self.states.violations();
        out.extend(self.actions.violations());
        match &self.rule {
            ScoringRule::Matrix { scores } => {
                if scores.len() != self.actions.len() {
                    out.push(format!(
                        "dimension: score matrix has {} rows for {} actions",
                        scores.len(),
                        self.actions.len()
                    ));
                }
                if let Some(row) = scores.iter().find(|r| r.len() != self.states.len()) {
                    out.push(format!(
                        "dimension: score matrix row has {} columns for {} states",
                        row.len(),
                        self.states.len()
                    ));
                }
                if scores.iter().flatten().any(|s| !s.is_finite()) {
                    out.push("score matrix has non-finite entries".to_string());
                }
            }
            ScoringRule::Transit(t) => {
                out.extend(t.violations());
                if self.states.values.is_none() {
                    out.push("transit rule needs numeric state values".to_string());
                }
                if !matches!(self.actions, ActionSpace::IntegerGrid { .. }) {
                    out.push("transit rule needs an integer-grid action space".to_string());
                }
            }
        }
        out
    }

    fn check_belief(&self, belief: &Belief) -> Result<()> {
        if belief.len() != self.n_states() {
            return Err(Error::Dimension(format!(
                "belief over {} states, task has {}",
                belief.len(),
                self.n_states()
            )));
        }
        Ok(())
    }

    fn check_action(&self, action: usize) -> Result<()> {
        if action >= self.n_actions() {
            return Err(Error::Dimension(format!(
                "action index {action} out of range ({} actions)",
                self.n_actions()
            )));
        }
        Ok(())
    }

    fn state_values(&self) -> Result<&[f64]> {
        self.states
            .values
            .as_deref()
            .ok_or_else(|| Error::Dimension("state space has no numeric values".into()))
    }

    fn action_value(&self, action: usize) -> Result<f64> {
        self.actions
            .value(action)
            .ok_or_else(|| Error::Dimension("action space has no numeric values".into()))
    }

    /// Expected score `S(a, p)` of an action under a belief.
    pub fn expected_score(&self, action: usize, belief: &Belief) -> Result<f64> {
        self.check_belief(belief)?;
        self.check_action(action)?;
        let p = belief.probs();
        match &self.rule {
            ScoringRule::Matrix { scores } => {
                Ok(scores[action].iter().zip(p).map(|(s, q)| s * q).sum())
            }
            ScoringRule::Transit(t) => {
                let values = self.state_values()?;
                let a = self.action_value(action)?;
                Ok(match t.second_bus {
                    SecondBus::PlugInMean => {
                        let m = belief.mean(values);
                        values.iter().zip(p).map(|(th, q)| q * t.payoff(a, *th, m)).sum()
                    }
                    SecondBus::FullExpectation => {
                        let mut total = 0.0;
                        for (th, q) in values.iter().zip(p) {
                            if *q == 0.0 {
                                continue;
                            }
                            for (th2, q2) in values.iter().zip(p) {
                                total += q * q2 * t.payoff(a, *th, *th2);
                            }
                        }
                        total
                    }
                })
            }
        }
    }

    /// Expected score of every action.
    pub fn expected_scores(&self, belief: &Belief) -> Result<Vec<f64>> {
        (0..self.n_actions())
            .map(|a| self.expected_score(a, belief))
            .collect()
    }

    /// Argmax action and its expected score. Ties go to the lowest index.
    pub fn optimal_action(&self, belief: &Belief) -> Result<(usize, f64)> {
        if self.actions.is_empty() {
            return Err(Error::EmptyActions);
        }
        let scores = self.expected_scores(belief)?;
        Ok(argmax(&scores))
    }

    /// Score of the action that is optimal under `reported`, evaluated at
    /// the realized state.
    pub fn proper_score(&self, reported: &Belief, realized: usize) -> Result<f64> {
        if realized >= self.n_states() {
            return Err(Error::Dimension(format!("state index {realized} out of range")));
        }
        let (a, _) = self.optimal_action(reported)?;
        self.state_score(a, realized, reported)
    }

    /// Score of `action` at a single state. The transit rule's second-bus
    /// term uses the mean under `context`.
    pub fn state_score(&self, action: usize, state: usize, context: &Belief) -> Result<f64> {
        self.check_action(action)?;
        match &self.rule {
            ScoringRule::Matrix { scores } => Ok(scores[action][state]),
            ScoringRule::Transit(t) => {
                self.check_belief(context)?;
                let values = self.state_values()?;
                let a = self.action_value(action)?;
                Ok(t.payoff(a, values[state], context.mean(values)))
            }
        }
    }

    /// Tabulates the rule as a score matrix. For the transit rule the
    /// second-bus mean is fixed at `second_bus_mean`.
    pub fn tabulate(&self, second_bus_mean: f64) -> Result<Vec<Vec<f64>>> {
        match &self.rule {
            ScoringRule::Matrix { scores } => Ok(scores.clone()),
            ScoringRule::Transit(t) => {
                let values = self.state_values()?;
                (0..self.n_actions())
                    .map(|a| {
                        let av = self.action_value(a)?;
                        Ok(values
                            .iter()
                            .map(|th| t.payoff(av, *th, second_bus_mean))
                            .collect())
                    })
                    .collect()
            }
        }
    }

    /// The equivalent task whose actions are binned probability reports:
    /// each bin plays the action optimal under the belief its midpoint
    /// maps to.
    pub fn report_task(&self, bin_width: f64, model: &ReportModel) -> Result<DecisionTask> {
        let ScoringRule::Matrix { scores } = &self.rule else {
            return Err(Error::InvalidParameter(
                "report tasks need a matrix scoring rule".into(),
            ));
        };
        let actions = ActionSpace::ProbabilityReport { bin_width };
        let v = actions.violations();
        if !v.is_empty() {
            return Err(Error::Invalid(v));
        }
        let rows = (0..actions.len())
            .map(|i| {
                let belief = model.belief(bin_midpoint(bin_width, i), self.n_states())?;
                let (a, _) = self.optimal_action(&belief)?;
                Ok(scores[a].clone())
            })
            .collect::<Result<Vec<_>>>()?;
        DecisionTask::new(
            self.states.clone(),
            actions,
            ScoringRule::Matrix { scores: rows },
        )
    }
}

/// Index and value of the maximum; the first maximal entry wins.
pub fn argmax(values: &[f64]) -> (usize, f64) {
    let mut best = (0, values[0]);
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > best.1 {
            best = (i, *v);
        }
    }
    best
}

/// Maps a reported probability to a transformed event probability.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ReportTransform {
    #[default]
    Identity,
    /// Probability of superiority to probability of winning.
    PosToWin,
}

impl ReportTransform {
    pub fn apply(&self, report: f64) -> Result<f64> {
        match self {
            ReportTransform::Identity => {
                if (0.0..=1.0).contains(&report) {
                    Ok(report)
                } else {
                    Err(Error::InvalidProbability(format!("report {report}")))
                }
            }
            ReportTransform::PosToWin => pos_to_win_probability(report),
        }
    }

    pub fn invert(&self, event_prob: f64) -> Result<f64> {
        match self {
            ReportTransform::Identity => Ok(event_prob),
            ReportTransform::PosToWin => win_probability_to_pos(event_prob),
        }
    }
}

/// How a scalar probability report maps onto a belief over the states:
/// the report (after `transform`) is the probability of the event, and
/// mass within the event and its complement follows fixed profiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportModel {
    pub event_profile: Belief,
    pub complement_profile: Belief,
    #[serde(default)]
    pub transform: ReportTransform,
}

impl ReportModel {
    /// Binary states; the report is the probability of state 1.
    pub fn binary() -> Self {
        ReportModel {
            event_profile: Belief::point_mass(2, 1),
            complement_profile: Belief::point_mass(2, 0),
            transform: ReportTransform::Identity,
        }
    }

    pub fn belief(&self, report: f64, n_states: usize) -> Result<Belief> {
        if self.event_profile.len() != n_states || self.complement_profile.len() != n_states {
            return Err(Error::Dimension("report model does not match state space".into()));
        }
        let t = self.transform.apply(report)?;
        self.event_profile.mix(&self.complement_profile, t)
    }

    /// Probability of the event under a belief.
    pub fn event_probability(&self, belief: &Belief) -> f64 {
        belief
            .probs()
            .iter()
            .zip(self.event_profile.probs())
            .filter(|(_, e)| **e > 0.0)
            .map(|(p, _)| p)
            .sum()
    }

    /// The report a truthful agent holding `belief` would give.
    pub fn truthful_report(&self, belief: &Belief) -> Result<f64> {
        self.transform.invert(self.event_probability(belief).clamp(0.0, 1.0))
    }

    pub fn violations(&self, n_states: usize) -> Vec<String> {
        let mut out = Vec::new();
        if self.event_profile.len() != n_states || self.complement_profile.len() != n_states {
            out.push("dimension: report model does not match state space".to_string());
        }
        let overlap = self
            .event_profile
            .probs()
            .iter()
            .zip(self.complement_profile.probs())
            .any(|(a, b)| *a > 0.0 && *b > 0.0);
        if overlap {
            out.push("report model event and complement profiles overlap".to_string());
        }
        out
    }
}

/// Joint distribution over signals and states (rows are signals).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InformationStructure {
    pub signals: Vec<String>,
    pub joint: Vec<Vec<f64>>,
}

impl InformationStructure {
    pub fn new<S: Into<String>>(
        signals: impl IntoIterator<Item = S>,
        joint: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let s = InformationStructure {
            signals: signals.into_iter().map(Into::into).collect(),
            joint,
        };
        let v = s.violations(None);
        if v.is_empty() {
            Ok(s)
        } else {
            Err(Error::Invalid(v))
        }
    }

    /// A single uninformative signal carrying the given prior.
    pub fn uninformative(name: &str, prior: &Belief) -> Self {
        InformationStructure {
            signals: vec![name.to_string()],
            joint: vec![prior.probs().to_vec()],
        }
    }

    pub fn n_signals(&self) -> usize {
        self.signals.len()
    }

    pub fn signal_index(&self, name: &str) -> Option<usize> {
        self.signals.iter().position(|s| s == name)
    }

    pub fn signal_mass(&self, signal: usize) -> f64 {
        self.joint[signal].iter().sum()
    }

    /// Checks the structure, optionally against a state count.
    pub fn violations(&self, n_states: Option<usize>) -> Vec<String> {
        let mut out = Vec::new();
        if self.signals.is_empty() {
            out.push("information structure has no signals".to_string());
        }
        if self.joint.len() != self.signals.len() {
            out.push(format!(
                "dimension: joint has {} rows for {} signals",
                self.joint.len(),
                self.signals.len()
            ));
        }
        let mut seen = HashSet::new();
        for s in &self.signals {
            if !seen.insert(s.as_str()) {
                out.push(format!("duplicate signal `{s}`"));
            }
        }
        let width = n_states.or_else(|| self.joint.first().map(Vec::len));
        if let Some(w) = width {
            if self.joint.iter().any(|r| r.len() != w) {
                out.push(format!("dimension: joint rows must have {w} state columns"));
            }
        }
        if self.joint.iter().flatten().any(|p| !(p.is_finite() && *p >= 0.0)) {
            out.push("joint has negative or non-finite entries".to_string());
        }
        let total: f64 = self.joint.iter().flatten().sum();
        if (total - 1.0).abs() > PROB_TOL {
            out.push(format!("mass ≠ 1: joint sums to {total}"));
        }
        for (name, row) in self.signals.iter().zip(&self.joint) {
            if row.iter().sum::<f64>() <= 0.0 {
                out.push(format!("signal `{name}` has zero mass"));
            }
        }
        out
    }
}

/// A decision task with one information structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecisionProblem {
    pub task: DecisionTask,
    pub structure: InformationStructure,
}

impl DecisionProblem {
    pub fn new(task: DecisionTask, structure: InformationStructure) -> Result<Self> {
        let p = DecisionProblem { task, structure };
        match validate(&p) {
            v if v.is_empty() => Ok(p),
            v => Err(Error::Invalid(v)),
        }
    }
}

/// Checks every invariant of a problem and returns all violations.
pub fn validate(problem: &DecisionProblem) -> Vec<String> {
    let mut out = problem.task.violations();
    out.extend(problem.structure.violations(Some(problem.task.n_states())));
    out
}

/// A named visualization strategy.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Strategy {
    pub name: String,
    pub structure: InformationStructure,
}

/// Several strategies over the same task and data-generating process.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentDesign {
    pub name: String,
    pub task: DecisionTask,
    pub strategies: Vec<Strategy>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conversion: Option<ConversionRule>,
    /// Trials per participant; incentives are computed on cumulative scores.
    #[serde(default = "one")]
    pub trials: u32,
    /// Mapping from probability reports to beliefs, for belief tasks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub report_model: Option<ReportModel>,
}

fn one() -> u32 {
    1
}

impl ExperimentDesign {
    pub fn new(name: impl Into<String>, task: DecisionTask, strategies: Vec<Strategy>) -> Result<Self> {
        let d = ExperimentDesign {
            name: name.into(),
            task,
            strategies,
            conversion: None,
            trials: 1,
            report_model: None,
        };
        match d.violations() {
            v if v.is_empty() => Ok(d),
            v => Err(Error::Invalid(v)),
        }
    }

    pub fn strategy(&self, name: &str) -> Result<&Strategy> {
        self.strategies
            .iter()
            .find(|s| s.name == name)
            .ok_or_else(|| Error::Unknown {
                kind: "strategy",
                name: name.to_string(),
            })
    }

    pub fn problem(&self, strategy: &str) -> Result<DecisionProblem> {
        Ok(DecisionProblem {
            task: self.task.clone(),
            structure: self.strategy(strategy)?.structure.clone(),
        })
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = self.task.violations();
        if self.strategies.is_empty() {
            out.push("design has no strategies".to_string());
        }
        let n = self.task.n_states();
        let mut seen = HashSet::new();
        let mut reference: Option<Vec<f64>> = None;
        for s in &self.strategies {
            if !seen.insert(s.name.as_str()) {
                out.push(format!("duplicate strategy `{}`", s.name));
            }
            let v = s.structure.violations(Some(n));
            if !v.is_empty() {
                out.extend(v.into_iter().map(|m| format!("strategy `{}`: {m}", s.name)));
                continue;
            }
            let marginal = state_marginal(&s.structure);
            match &reference {
                None => reference = Some(marginal),
                Some(r) => {
                    if r.iter().zip(&marginal).any(|(a, b)| (a - b).abs() > PRIOR_MATCH_TOL) {
                        out.push(format!(
                            "strategy `{}` does not share the state prior of the other strategies",
                            s.name
                        ));
                    }
                }
            }
        }
        if let Some(m) = &self.report_model {
            out.extend(m.violations(n));
        }
        if let Some(c) = &self.conversion {
            out.extend(c.violations());
        }
        out
    }
}

pub(crate) fn state_marginal(s: &InformationStructure) -> Vec<f64> {
    let n = s.joint.first().map_or(0, Vec::len);
    let mut m = vec![0.0; n];
    for row in &s.joint {
        for (acc, p) in m.iter_mut().zip(row) {
            *acc += p;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn salting() -> DecisionTask {
        DecisionTask::new(
            StateSpace::new(["not_freezing", "freezing"]).unwrap(),
            ActionSpace::finite(["no_salt", "salt"]),
            ScoringRule::Matrix {
                scores: vec![vec![0.0, -100.0], vec![-10.0, 0.0]],
            },
        )
        .unwrap()
    }

    fn transit(r0: f64, rw: f64, rd: f64, t: f64) -> DecisionTask {
        DecisionTask::new(
            StateSpace::numeric((0..=30).map(f64::from).collect()).unwrap(),
            ActionSpace::IntegerGrid { lo: 0, hi: 30, step: 1 },
            ScoringRule::Transit(TransitRule::new(r0, rw, rd, t)),
        )
        .unwrap()
    }

    #[test]
    fn salting_expected_scores() {
        let task = salting();
        let certain_dry = Belief::binary(0.0).unwrap();
        assert_eq!(task.expected_score(1, &certain_dry).unwrap(), -10.0);
        let prior = Belief::binary(0.0796).unwrap();
        assert!((task.expected_score(0, &prior).unwrap() + 7.96).abs() < 1e-12);
    }

    #[test]
    fn transit_branches() {
        let task = transit(14.0, -14.0, 14.0, 60.0);
        let at_ten = Belief::point_mass(31, 10);
        assert_eq!(task.expected_score(10, &at_ten).unwrap(), 980.0);
        assert_eq!(task.expected_score(11, &at_ten).unwrap(), 588.0);
    }

    #[test]
    fn salting_optimal_actions() {
        let task = salting();
        let (a, s) = task.optimal_action(&Belief::binary(0.05).unwrap()).unwrap();
        assert_eq!(a, 0);
        assert!((s + 5.0).abs() < 1e-12);
        let (a, _) = task.optimal_action(&Belief::binary(0.1587).unwrap()).unwrap();
        assert_eq!(a, 1);
    }

    #[test]
    fn indifference_point_is_one_eleventh() {
        let task = salting();
        let p = 1.0 / 11.0;
        let s = task.expected_scores(&Belief::binary(p).unwrap()).unwrap();
        assert!((s[0] - s[1]).abs() < 1e-12);
        // ties go to the lower index
        assert_eq!(argmax(&[1.0, 1.0]).0, 0);
        assert_eq!(task.optimal_action(&Belief::binary(0.0950).unwrap()).unwrap().0, 1);
        assert_eq!(task.optimal_action(&Belief::binary(0.0900).unwrap()).unwrap().0, 0);
    }

    #[test]
    fn salting_proper_scores() {
        let task = salting();
        let b = |p| Belief::binary(p).unwrap();
        assert_eq!(task.proper_score(&b(0.05), 1).unwrap(), -100.0);
        assert_eq!(task.proper_score(&b(0.2), 1).unwrap(), 0.0);
        assert_eq!(task.proper_score(&b(1.0), 1).unwrap(), 0.0);
    }

    #[test]
    fn belief_normalization() {
        assert!(Belief::new(vec![0.5, 0.5 + 1e-10]).is_ok());
        assert!(matches!(
            Belief::new(vec![0.5, 0.4]),
            Err(Error::NotNormalized { .. })
        ));
        assert!(Belief::new(vec![1.5, -0.5]).is_err());
        let task = salting();
        assert!(matches!(
            task.expected_score(0, &Belief::uniform(3)),
            Err(Error::Dimension(_))
        ));
    }

    #[test]
    fn validate_reports_every_violation() {
        let task = salting();
        let good = DecisionProblem {
            task: task.clone(),
            structure: InformationStructure {
                signals: vec!["2".into(), "3".into(), "4".into(), "5".into()],
                joint: vec![
                    vec![0.24845, 0.00155],
                    vec![0.23805, 0.01195],
                    vec![0.2236, 0.0264],
                    vec![0.2103, 0.0397],
                ],
            },
        };
        assert!(validate(&good).is_empty());

        let light = DecisionProblem {
            task: task.clone(),
            structure: InformationStructure {
                signals: vec!["a".into()],
                joint: vec![vec![0.5, 0.4]],
            },
        };
        let v = validate(&light);
        assert!(v.iter().any(|m| m.contains("mass ≠ 1")), "{v:?}");

        let three = DecisionProblem {
            task: DecisionTask {
                states: StateSpace::new(["a", "b", "c"]).unwrap(),
                ..task
            },
            structure: InformationStructure {
                signals: vec!["x".into(), "y".into()],
                joint: vec![vec![0.3, 0.2, 0.0], vec![0.4, 0.1, 0.0]],
            },
        };
        let v = validate(&three);
        assert!(v.iter().any(|m| m.contains("dimension")), "{v:?}");
    }

    #[test]
    fn tabulated_transit_matches_formula() {
        let task = transit(8.0, -14.0, 14.0, 90.0);
        let belief = Belief::from_weights(&(0..31).map(|i| 1.0 + (i % 7) as f64).collect::<Vec<_>>()).unwrap();
        let m = belief.mean(task.states.values.as_ref().unwrap());
        let table = task.tabulate(m).unwrap();
        let wrapped = DecisionTask::new(
            task.states.clone(),
            task.actions.clone(),
            ScoringRule::Matrix { scores: table },
        )
        .unwrap();
        for a in 0..31 {
            let x = task.expected_score(a, &belief).unwrap();
            let y = wrapped.expected_score(a, &belief).unwrap();
            assert!((x - y).abs() <= 1e-9 * x.abs().max(1.0));
        }
    }

    #[test]
    fn full_expectation_mode_agrees_with_plug_in() {
        let mut task = transit(14.0, -14.0, 14.0, 60.0);
        let belief = Belief::from_weights(&(0..31).map(|i| ((i * 13) % 11) as f64 + 0.5).collect::<Vec<_>>()).unwrap();
        let plug: Vec<f64> = task.expected_scores(&belief).unwrap();
        if let ScoringRule::Transit(t) = &mut task.rule {
            t.second_bus = SecondBus::FullExpectation;
        }
        let full = task.expected_scores(&belief).unwrap();
        for (a, b) in plug.iter().zip(&full) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn report_bins() {
        assert_eq!(report_bin_count(0.02), 50);
        assert_eq!(report_bin(0.02, 0.551), report_bin(0.02, 0.559));
        assert_eq!(report_bin(0.02, 0.551), 27);
        assert_eq!(report_bin(0.02, 0.56), 28);
        assert_eq!(report_bin(0.02, 1.0), 49);
        assert_eq!(report_bin(0.02, 0.0), 0);
        assert!((bin_midpoint(0.02, 27) - 0.55).abs() < 1e-12);
        assert_eq!(report_bin_count(0.3), 4);
        assert!((bin_midpoint(0.3, 3) - 0.95).abs() < 1e-12);
    }

    #[test]
    fn report_task_is_proper_form() {
        let task = salting();
        let rt = task.report_task(0.02, &ReportModel::binary()).unwrap();
        // bins below 1/11 play no-salt
        assert_eq!(rt.expected_score(2, &Belief::point_mass(2, 1)).unwrap(), -100.0);
        assert_eq!(rt.expected_score(10, &Belief::point_mass(2, 1)).unwrap(), 0.0);
    }
}
