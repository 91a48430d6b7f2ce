//! Synthetic agents that generate trial records with a known loss
//! structure. They are test fixtures for the decomposition, not models of
//! how people decide.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::behavioral::{Response, TrialRecord};
use crate::error::{Error, Result};
use crate::generative::{seeded_rng, JointSampler};
use crate::model::{Belief, ExperimentDesign, ReportModel};
use crate::rational::{posterior, prior};

pub const DEFAULT_KAPPA: f64 = 0.5;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum AgentSpec {
    /// Acts on the exact posterior.
    Rational,
    /// Ignores the signal and acts on the prior.
    Prior,
    /// Uniform over actions, or a uniform report in [0, 1].
    UniformRandom,
    /// Posterior perturbed by Gaussian noise with sd `kappa` in log-odds.
    NoisyBelief { kappa: f64 },
    /// Plays uniformly at random with probability `rate`, else as `inner`.
    Lapse { rate: f64, inner: Box<AgentSpec> },
}

impl AgentSpec {
    pub fn violations(&self) -> Vec<String> {
        match self {
            AgentSpec::NoisyBelief { kappa } if !(*kappa >= 0.0 && kappa.is_finite()) => {
                vec![format!("noise kappa must be >= 0 (got {kappa})")]
            }
            AgentSpec::Lapse { rate, inner } => {
                let mut v = inner.violations();
                if !(0.0..=1.0).contains(rate) {
                    v.push(format!("lapse rate must lie in [0, 1] (got {rate})"));
                }
                v
            }
            _ => Vec::new(),
        }
    }
}

/// Parses `rational`, `prior`, `random`, `noisy`, `noisy:k=0.3`,
/// `lapse:l=0.1:<inner>`.
impl FromStr for AgentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidParameter(format!("bad agent spec `{s}`"));
        let (head, rest) = match s.split_once(':') {
            Some((h, r)) => (h, Some(r)),
            None => (s, None),
        };
        let param = |r: &str, key: &str| -> Result<f64> {
            let v = r.strip_prefix(key).and_then(|v| v.strip_prefix('=')).unwrap_or(r);
            v.parse::<f64>().map_err(|_| bad())
        };
        let spec = match (head, rest) {
            ("rational", None) => AgentSpec::Rational,
            ("prior", None) => AgentSpec::Prior,
            ("random" | "uniform", None) => AgentSpec::UniformRandom,
            ("noisy", None) => AgentSpec::NoisyBelief { kappa: DEFAULT_KAPPA },
            ("noisy", Some(r)) => AgentSpec::NoisyBelief { kappa: param(r, "k")? },
            ("lapse", Some(r)) => {
                let (rate, inner) = r.split_once(':').ok_or_else(bad)?;
                AgentSpec::Lapse {
                    rate: param(rate, "l")?,
                    inner: Box::new(inner.parse()?),
                }
            }
            _ => return Err(bad()),
        };
        match spec.violations() {
            v if v.is_empty() => Ok(spec),
            v => Err(Error::Invalid(v)),
        }
    }
}

impl fmt::Display for AgentSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AgentSpec::Rational => write!(f, "rational"),
            AgentSpec::Prior => write!(f, "prior"),
            AgentSpec::UniformRandom => write!(f, "random"),
            AgentSpec::NoisyBelief { kappa } => write!(f, "noisy:k={kappa}"),
            AgentSpec::Lapse { rate, inner } => write!(f, "lapse:l={rate}:{inner}"),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TaskKind {
    #[default]
    Decision,
    BeliefReport,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Allocation {
    /// Independent draws of (signal, state) from the joint.
    #[default]
    Iid,
    /// Every signal once per block in shuffled order, trials weighted equally.
    BalancedBlocks,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub agent: AgentSpec,
    pub task: TaskKind,
    pub n_trials: u64,
    pub seed: u64,
    #[serde(default)]
    pub allocation: Allocation,
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

struct Context<'a> {
    design: &'a ExperimentDesign,
    posteriors: Vec<Belief>,
    prior: Belief,
    report_model: Option<ReportModel>,
    labels: Vec<String>,
}

impl Context<'_> {
    /// Log-odds noise on the report event when there is one, otherwise
    /// independent log-scale noise on every state.
    fn perturb<R: Rng>(&self, belief: &Belief, kappa: f64, rng: &mut R) -> Result<Belief> {
        if kappa == 0.0 {
            return Ok(belief.clone());
        }
        let noise = Normal::new(0.0, kappa).map_err(|e| Error::InvalidParameter(e.to_string()))?;
        if let Some(model) = &self.report_model {
            let t = model.event_probability(belief).clamp(0.0, 1.0);
            let shifted = if t == 0.0 || t == 1.0 {
                t
            } else {
                sigmoid(logit(t) + noise.sample(rng))
            };
            return model.event_profile.mix(&model.complement_profile, shifted);
        }
        let w: Vec<f64> = belief
            .probs()
            .iter()
            .map(|p| if *p > 0.0 { (p.ln() + noise.sample(rng)).exp() } else { 0.0 })
            .collect();
        Belief::from_weights(&w)
    }

    fn respond<R: Rng>(&self, agent: &AgentSpec, task: TaskKind, signal: usize, rng: &mut R) -> Result<Response> {
        let belief = match agent {
            AgentSpec::Rational => self.posteriors[signal].clone(),
            AgentSpec::Prior => self.prior.clone(),
            AgentSpec::UniformRandom => return Ok(self.uniform(task, rng)),
            AgentSpec::NoisyBelief { kappa } => self.perturb(&self.posteriors[signal], *kappa, rng)?,
            AgentSpec::Lapse { rate, inner } => {
                return if rng.gen::<f64>() < *rate {
                    Ok(self.uniform(task, rng))
                } else {
                    self.respond(inner, task, signal, rng)
                };
            }
        };
        match task {
            TaskKind::Decision => {
                let (a, _) = self.design.task.optimal_action(&belief)?;
                Ok(Response::Action(self.labels[a].clone()))
            }
            TaskKind::BeliefReport => {
                let model = self.report_model.as_ref().ok_or_else(|| {
                    Error::InvalidParameter("belief reports need a report model".into())
                })?;
                Ok(Response::Probability(model.truthful_report(&belief)?))
            }
        }
    }

    fn uniform<R: Rng>(&self, task: TaskKind, rng: &mut R) -> Response {
        match task {
            TaskKind::Decision => Response::Action(self.labels.choose(rng).expect("actions").clone()),
            TaskKind::BeliefReport => Response::Probability(rng.gen::<f64>()),
        }
    }
}

/// Report model of the design, or the plain binary one for two states.
pub fn effective_report_model(design: &ExperimentDesign) -> Option<ReportModel> {
    design
        .report_model
        .clone()
        .or_else(|| (design.task.n_states() == 2).then(ReportModel::binary))
}

/// Simulated trial records for one strategy. World draws and agent noise
/// use separate random streams, so agents that differ only in their noise
/// see the same trials.
pub fn simulate(design: &ExperimentDesign, strategy: &str, config: &SimulationConfig) -> Result<Vec<TrialRecord>> {
    if config.n_trials == 0 {
        return Err(Error::InvalidParameter("n_trials must be >= 1".into()));
    }
    let v = config.agent.violations();
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let structure = &design.strategy(strategy)?.structure;
    let ctx = Context {
        design,
        posteriors: (0..structure.n_signals())
            .map(|v| posterior(structure, v))
            .collect::<Result<_>>()?,
        prior: prior(structure)?,
        report_model: effective_report_model(design),
        labels: design.task.actions.labels(),
    };
    let mut world = seeded_rng(config.seed, 0);
    let mut agent_rng = seeded_rng(config.seed, 1);
    let sampler = JointSampler::new(&structure.joint);
    let state_samplers: Vec<JointSampler> = ctx
        .posteriors
        .iter()
        .map(|q| JointSampler::new(&[q.probs().to_vec()]))
        .collect();
    let width = config.n_trials.to_string().len();
    let mut block: Vec<usize> = Vec::new();
    let mut out = Vec::with_capacity(config.n_trials as usize);
    for i in 0..config.n_trials {
        let (signal, state) = match config.allocation {
            Allocation::Iid => sampler.sample(&mut world),
            Allocation::BalancedBlocks => {
                if block.is_empty() {
                    block = (0..structure.n_signals()).collect();
                    block.shuffle(&mut world);
                }
                let v = block.pop().expect("refilled");
                (v, state_samplers[v].sample(&mut world).1)
            }
        };
        let response = ctx.respond(&config.agent, config.task, signal, &mut agent_rng)?;
        out.push(TrialRecord {
            trial_id: format!("{i:0width$}"),
            strategy: strategy.to_string(),
            signal: structure.signals[signal].clone(),
            state: design.task.states.labels[state].clone(),
            response,
        });
    }
    Ok(out)
}
