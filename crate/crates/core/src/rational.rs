//! Rational-agent quantities: prior, posteriors, baseline, per-strategy
//! optimum, benchmark, value of information and information loss.
//!
//! Everything here is computed exactly from the tabular joint.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{
    state_marginal, validate, Belief, DecisionProblem, DecisionTask, ExperimentDesign,
    InformationStructure,
};

/// State marginal of the joint.
pub fn prior(structure: &InformationStructure) -> Result<Belief> {
    Belief::new(state_marginal(structure))
}

/// Bayes posterior over states given a signal.
pub fn posterior(structure: &InformationStructure, signal: usize) -> Result<Belief> {
    let row = structure.joint.get(signal).ok_or_else(|| Error::Unknown {
        kind: "signal",
        name: signal.to_string(),
    })?;
    let mass: f64 = row.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::ZeroMassSignal(structure.signals[signal].clone()));
    }
    Belief::from_weights(row)
}

fn ensure_valid(problem: &DecisionProblem) -> Result<()> {
    match validate(problem) {
        v if v.is_empty() => Ok(()),
        v => Err(Error::Invalid(v)),
    }
}

/// Best expected score using only the prior.
pub fn rational_baseline(problem: &DecisionProblem) -> Result<f64> {
    ensure_valid(problem)?;
    baseline_unchecked(&problem.task, &problem.structure)
}

fn baseline_unchecked(task: &DecisionTask, structure: &InformationStructure) -> Result<f64> {
    let p = prior(structure)?;
    Ok(task.optimal_action(&p)?.1)
}

/// Expected score of the agent that acts optimally on each posterior.
pub fn visualization_optimal(problem: &DecisionProblem) -> Result<f64> {
    ensure_valid(problem)?;
    optimal_unchecked(&problem.task, &problem.structure)
}

fn optimal_unchecked(task: &DecisionTask, structure: &InformationStructure) -> Result<f64> {
    let mut total = 0.0;
    for v in 0..structure.n_signals() {
        let mass = structure.signal_mass(v);
        let q = posterior(structure, v)?;
        total += mass * task.optimal_action(&q)?.1;
    }
    Ok(total)
}

/// Optimal action for every signal.
pub fn rational_policy(task: &DecisionTask, structure: &InformationStructure) -> Result<Vec<usize>> {
    (0..structure.n_signals())
        .map(|v| Ok(task.optimal_action(&posterior(structure, v)?)?.0))
        .collect()
}

fn ensure_design(design: &ExperimentDesign) -> Result<()> {
    if design.strategies.is_empty() {
        return Err(Error::EmptyDesign);
    }
    match design.violations() {
        v if v.is_empty() => Ok(()),
        v => Err(Error::Invalid(v)),
    }
}

/// Baseline for a design. All strategies share one prior, so the first
/// one is used.
pub fn design_baseline(design: &ExperimentDesign) -> Result<f64> {
    ensure_design(design)?;
    baseline_unchecked(&design.task, &design.strategies[0].structure)
}

/// Best visualization optimum across the design's strategies.
pub fn rational_benchmark(design: &ExperimentDesign) -> Result<f64> {
    ensure_design(design)?;
    let mut best = f64::NEG_INFINITY;
    for s in &design.strategies {
        best = best.max(optimal_unchecked(&design.task, &s.structure)?);
    }
    Ok(best)
}

/// Benchmark minus baseline.
pub fn value_of_information(design: &ExperimentDesign) -> Result<f64> {
    Ok(rational_benchmark(design)? - design_baseline(design)?)
}

/// `(benchmark - optimum of strategy) / value of information`.
pub fn information_loss(design: &ExperimentDesign, strategy: &str) -> Result<f64> {
    let s = design.strategy(strategy)?;
    let bench = rational_benchmark(design)?;
    let delta = bench - design_baseline(design)?;
    if !(delta > 0.0) {
        return Err(Error::ZeroInformationValue);
    }
    Ok((bench - optimal_unchecked(&design.task, &s.structure)?) / delta)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyReport {
    pub visualization_optimal: f64,
    /// `None` when the design has no information value.
    pub information_loss: Option<f64>,
    pub posteriors: BTreeMap<String, Belief>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RationalReport {
    pub baseline: f64,
    pub benchmark: f64,
    pub value_of_information: f64,
    pub prior: Belief,
    /// Strategy order as in the design.
    pub strategy_order: Vec<String>,
    pub per_strategy: BTreeMap<String, StrategyReport>,
}

const ROUNDING: f64 = 1e-12;

/// All rational quantities for a design in one pass.
pub fn analyze(design: &ExperimentDesign) -> Result<RationalReport> {
    ensure_design(design)?;
    let task = &design.task;
    let prior = prior(&design.strategies[0].structure)?;
    let baseline = task.optimal_action(&prior)?.1;
    let mut optima = Vec::with_capacity(design.strategies.len());
    for s in &design.strategies {
        optima.push(optimal_unchecked(task, &s.structure)?);
    }
    let mut benchmark = optima.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    // rounding can put an uninformative benchmark a hair below the baseline
    if benchmark < baseline && baseline - benchmark <= ROUNDING * (1.0 + baseline.abs()) {
        benchmark = baseline;
    }
    let delta = benchmark - baseline;
    let mut per_strategy = BTreeMap::new();
    for (s, opt) in design.strategies.iter().zip(&optima) {
        let posteriors = (0..s.structure.n_signals())
            .map(|v| Ok((s.structure.signals[v].clone(), posterior(&s.structure, v)?)))
            .collect::<Result<BTreeMap<_, _>>>()?;
        per_strategy.insert(
            s.name.clone(),
            StrategyReport {
                visualization_optimal: *opt,
                information_loss: (delta > 0.0).then(|| (benchmark - opt) / delta),
                posteriors,
            },
        );
    }
    Ok(RationalReport {
        baseline,
        benchmark,
        value_of_information: delta,
        prior,
        strategy_order: design.strategies.iter().map(|s| s.name.clone()).collect(),
        per_strategy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ActionSpace, ScoringRule, StateSpace, Strategy};

    fn weather_structure() -> InformationStructure {
        InformationStructure::new(
            ["2", "3", "4", "5"],
            vec![
                vec![0.24845, 0.00155],
                vec![0.23805, 0.01195],
                vec![0.2236, 0.0264],
                vec![0.2103, 0.0397],
            ],
        )
        .unwrap()
    }

    fn salting() -> DecisionTask {
        DecisionTask::new(
            StateSpace::new(["not_freezing", "freezing"]).unwrap(),
            ActionSpace::finite(["no_salt", "salt"]),
            ScoringRule::Matrix {
                scores: vec![vec![0.0, -100.0], vec![-10.0, 0.0]],
            },
        )
        .unwrap()
    }

    #[test]
    fn weather_prior_and_posteriors() {
        let s = weather_structure();
        assert!((prior(&s).unwrap().probs()[1] - 0.0796).abs() < 1e-12);
        assert!((posterior(&s, 0).unwrap().probs()[1] - 0.0062).abs() < 1e-12);
        assert!((posterior(&s, 3).unwrap().probs()[1] - 0.1588).abs() < 1e-12);
    }

    #[test]
    fn single_signal_prior_is_its_conditional() {
        let s = InformationStructure::new(["only"], vec![vec![0.3, 0.7]]).unwrap();
        assert_eq!(prior(&s).unwrap(), posterior(&s, 0).unwrap());
    }

    #[test]
    fn revealing_signal_gives_point_mass() {
        let s = InformationStructure::new(["a", "b"], vec![vec![0.4, 0.0], vec![0.0, 0.6]]).unwrap();
        assert_eq!(posterior(&s, 1).unwrap().probs(), &[0.0, 1.0]);
    }

    #[test]
    fn zero_mass_signal_is_refused() {
        let s = InformationStructure {
            signals: vec!["a".into(), "b".into()],
            joint: vec![vec![0.5, 0.5], vec![0.0, 0.0]],
        };
        assert!(matches!(posterior(&s, 1), Err(Error::ZeroMassSignal(_))));
    }

    #[test]
    fn weather_rational_quantities() {
        let p = DecisionProblem::new(salting(), weather_structure()).unwrap();
        assert!((rational_baseline(&p).unwrap() + 7.96).abs() < 1e-9);
        assert!((visualization_optimal(&p).unwrap() + 5.689).abs() < 1e-9);
    }

    #[test]
    fn design_level_quantities() {
        let s = weather_structure();
        let mean = InformationStructure::uninformative("mean", &prior(&s).unwrap());
        let d = ExperimentDesign::new(
            "weather",
            salting(),
            vec![
                Strategy { name: "mean".into(), structure: mean },
                Strategy { name: "ci".into(), structure: s.clone() },
            ],
        )
        .unwrap();
        assert!((rational_benchmark(&d).unwrap() + 5.689).abs() < 1e-9);
        assert!((value_of_information(&d).unwrap() - 2.271).abs() < 1e-9);
        assert!((information_loss(&d, "mean").unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(information_loss(&d, "ci").unwrap(), 0.0);

        let single = ExperimentDesign::new(
            "w",
            salting(),
            vec![Strategy { name: "ci".into(), structure: s }],
        )
        .unwrap();
        let p = single.problem("ci").unwrap();
        assert_eq!(rational_benchmark(&single).unwrap(), visualization_optimal(&p).unwrap());
    }

    #[test]
    fn independent_signals_carry_no_value() {
        let s = InformationStructure::new(
            ["a", "b"],
            vec![vec![0.3 * 0.9, 0.3 * 0.1], vec![0.7 * 0.9, 0.7 * 0.1]],
        )
        .unwrap();
        let d = ExperimentDesign::new("flat", salting(), vec![Strategy { name: "x".into(), structure: s }]).unwrap();
        assert!(value_of_information(&d).unwrap().abs() < 1e-12);
        assert!(matches!(information_loss(&d, "x"), Err(Error::ZeroInformationValue)));
        let r = analyze(&d).unwrap();
        assert_eq!(r.per_strategy["x"].information_loss, None);
    }

    #[test]
    fn empty_design_is_refused() {
        let d = ExperimentDesign {
            name: "none".into(),
            task: salting(),
            strategies: vec![],
            conversion: None,
            trials: 1,
            report_model: None,
        };
        assert!(matches!(rational_benchmark(&d), Err(Error::EmptyDesign)));
    }
}
