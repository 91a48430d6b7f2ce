//! Fantasy-sports hiring decision with a probability-of-superiority report.
//! Scores are in millions of simulated currency.

use std::collections::BTreeMap;

use crate::cases::{CaseStudy, Pin};
use crate::error::{Error, Result};
use crate::generative::{kale_joint, TwoTeamDgm, KALE_STATES};
use crate::model::{
    ActionSpace, Belief, DecisionTask, ExperimentDesign, ReportModel, ReportTransform,
    ScoringRule, StateSpace, Strategy,
};
use crate::payment::ConversionRule;

pub const ACTIONS: [&str; 2] = ["no_hire", "hire"];
pub const STRATEGIES: [&str; 4] = ["ci", "densities", "hops", "qdps"];
pub const TRIALS: u32 = 32;
/// Award per win in millions.
pub const AWARD: f64 = 3.17;
/// Cost of hiring the new player in millions.
pub const HIRE_COST: f64 = 1.0;

/// Rows are `no_hire`, `hire`; columns follow [`KALE_STATES`].
pub fn hiring_task() -> Result<DecisionTask> {
    let won = AWARD - HIRE_COST;
    DecisionTask::new(
        StateSpace::new(KALE_STATES)?,
        ActionSpace::finite(ACTIONS),
        ScoringRule::Matrix {
            scores: vec![
                vec![0.0, 0.0, AWARD, AWARD],
                vec![-HIRE_COST, won, -HIRE_COST, won],
            ],
        },
    )
}

/// A report is a PoS judgment for the team with the new player; the event
/// is winning with the player, and the other outcome stays a coin flip.
pub fn report_model() -> ReportModel {
    ReportModel {
        event_profile: Belief::new(vec![0.0, 0.5, 0.0, 0.5]).expect("profile"),
        complement_profile: Belief::new(vec![0.5, 0.0, 0.5, 0.0]).expect("profile"),
        transform: ReportTransform::PosToWin,
    }
}

/// $1 plus $0.08 per million above a 150M target, from a 108M start.
pub fn conversion() -> ConversionRule {
    ConversionRule::FlooredAffine { base: 1.0, rate: 0.08, floor: 150.0 - 108.0 }
}

/// Event probability at which the first two actions are equally good under
/// the report model. `None` when the difference does not change sign.
pub fn decision_threshold(task: &DecisionTask, model: &ReportModel) -> Result<Option<f64>> {
    if task.n_actions() != 2 {
        return Err(Error::InvalidParameter("threshold needs exactly two actions".into()));
    }
    let gap = |b: &Belief| -> Result<f64> { Ok(task.expected_score(1, b)? - task.expected_score(0, b)?) };
    let g0 = gap(&model.complement_profile)?;
    let g1 = gap(&model.event_profile)?;
    if g0 == g1 || g0.signum() == g1.signum() {
        return Ok(None);
    }
    Ok(Some(g0 / (g0 - g1)))
}

/// `levels` overrides the eight PoS levels and drops the prior check.
pub fn build_kale(levels: Option<Vec<f64>>) -> Result<CaseStudy> {
    let dgm = match levels {
        Some(l) => TwoTeamDgm::with_levels(l),
        None => TwoTeamDgm::hiring(),
    };
    let joint = kale_joint(&dgm)?;
    let strategies = STRATEGIES
        .iter()
        .map(|s| Strategy { name: s.to_string(), structure: joint.clone() })
        .collect();
    let mut design = ExperimentDesign::new("kale2020", hiring_task()?, strategies)?;
    design.conversion = Some(conversion());
    design.trials = TRIALS;
    design.report_model = Some(report_model());
    let v = design.violations();
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }

    let mut expected = BTreeMap::new();
    let mut pin = |k: &str, p: Pin| {
        expected.insert(k.to_string(), p);
    };
    pin("prior_event_probability", Pin::new(0.805, 0.005));
    pin("decision_threshold", Pin::new(0.8155, 0.0005));
    pin("baseline", Pin::new(1.575, 0.025));
    pin("benchmark", Pin::new(1.77, 0.03));
    pin("value_of_information", Pin::new(0.20, 0.03));
    pin("payment.baseline", Pin::relative(1.66, 0.05));
    pin("payment.informed", Pin::relative(2.17, 0.05));
    pin("payment.incentive", Pin::relative(0.51, 0.05));
    pin("payment.incentive_ratio", Pin::relative(0.3072, 0.05));
    Ok(CaseStudy { name: "kale2020".into(), design, expected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{analyze, prior};

    #[test]
    fn threshold() {
        let t = decision_threshold(&hiring_task().unwrap(), &report_model()).unwrap().unwrap();
        assert!((t - 2.585 / 3.17).abs() < 1e-12);
        assert!((t - 0.8155).abs() < 0.0005);
    }

    #[test]
    fn rational_quantities() {
        let case = build_kale(None).unwrap();
        let r = analyze(&case.design).unwrap();
        let e = &case.expected;
        // no_hire at the prior: half the award
        assert!((r.baseline - 1.585).abs() < 1e-9);
        assert!(e["baseline"].holds(r.baseline));
        assert!(e["benchmark"].holds(r.benchmark));
        assert!(e["value_of_information"].holds(r.value_of_information));
        let p = prior(&case.design.strategies[0].structure).unwrap();
        assert!(e["prior_event_probability"].holds(p.probs()[1] + p.probs()[3]));
    }

    #[test]
    fn flat_levels_have_no_value() {
        let case = build_kale(Some(vec![0.5; 8])).unwrap();
        let r = analyze(&case.design).unwrap();
        assert!(r.value_of_information.abs() < 1e-12);
    }

    #[test]
    fn report_at_threshold() {
        let m = report_model();
        let pos = m.transform.invert(2.585 / 3.17).unwrap();
        let b = m.belief(pos, 4).unwrap();
        let s = hiring_task().unwrap().expected_scores(&b).unwrap();
        assert!((s[0] - s[1]).abs() < 1e-9);
    }
}
