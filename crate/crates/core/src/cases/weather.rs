//! Road-salting decision with a freezing forecast.

use std::collections::BTreeMap;

use crate::cases::{CaseStudy, Pin};
use crate::error::Result;
use crate::model::{
    ActionSpace, DecisionTask, ExperimentDesign, InformationStructure, ScoringRule, StateSpace,
    Strategy,
};
use crate::payment::ConversionRule;
use crate::rational::prior;

pub const STATES: [&str; 2] = ["not_freezing", "freezing"];
pub const ACTIONS: [&str; 2] = ["no_salt", "salt"];
pub const SIGNALS: [&str; 4] = ["2", "3", "4", "5"];

/// Rows are signals (forecast sd in degrees), columns are states.
const JOINT: [[f64; 2]; 4] = [
    [0.24845, 0.00155],
    [0.23805, 0.01195],
    [0.2236, 0.0264],
    [0.2103, 0.0397],
];

/// Salting costs 10 points; an unsalted freeze costs 100.
pub fn salting_task() -> Result<DecisionTask> {
    DecisionTask::new(
        StateSpace::new(STATES)?,
        ActionSpace::finite(ACTIONS),
        ScoringRule::Matrix {
            scores: vec![vec![0.0, -100.0], vec![-10.0, 0.0]],
        },
    )
}

pub fn forecast_joint() -> Result<InformationStructure> {
    InformationStructure::new(SIGNALS, JOINT.iter().map(|r| r.to_vec()).collect())
}

pub fn build_weather() -> Result<CaseStudy> {
    let joint = forecast_joint()?;
    let mean = InformationStructure::uninformative("mean", &prior(&joint)?);
    let mut strategies = vec![Strategy { name: "mean".into(), structure: mean }];
    for name in ["ci", "gradient", "hops"] {
        strategies.push(Strategy { name: name.into(), structure: joint.clone() });
    }
    let mut design = ExperimentDesign::new("weather", salting_task()?, strategies)?;
    design.conversion = Some(ConversionRule::Affine { base: 1.0, rate: 0.01 });

    let mut expected = BTreeMap::new();
    let mut pin = |k: &str, p: Pin| {
        expected.insert(k.to_string(), p);
    };
    pin("baseline", Pin::new(-7.96, 0.005));
    pin("benchmark", Pin::new(-5.69, 0.005));
    pin("value_of_information", Pin::new(2.27, 0.01));
    for s in ["ci", "gradient", "hops"] {
        pin(&format!("visualization_optimal.{s}"), Pin::new(-5.69, 0.005));
        pin(&format!("information_loss.{s}"), Pin::new(0.0, 1e-9));
    }
    pin("visualization_optimal.mean", Pin::new(-7.96, 0.005));
    pin("information_loss.mean", Pin::new(1.0, 1e-9));
    pin("payment.baseline", Pin::new(0.920, 0.001));
    pin("payment.informed", Pin::new(0.943, 0.001));
    pin("payment.incentive", Pin::new(0.023, 0.001));
    pin("payment.incentive_ratio", Pin::new(0.025, 0.0005));
    Ok(CaseStudy { name: "weather".into(), design, expected })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generative::{weather_joint, GaussianThresholdDgm};
    use crate::payment::incentive;
    use crate::rational::analyze;

    #[test]
    fn pins_hold() {
        let case = build_weather().unwrap();
        let r = analyze(&case.design).unwrap();
        let e = &case.expected;
        assert!(e["baseline"].holds(r.baseline));
        assert!(e["benchmark"].holds(r.benchmark));
        assert!(e["value_of_information"].holds(r.value_of_information));
        for (name, s) in &r.per_strategy {
            assert!(e[&format!("visualization_optimal.{name}")].holds(s.visualization_optimal));
            assert!(e[&format!("information_loss.{name}")].holds(s.information_loss.unwrap()));
        }
        let row = incentive("all", r.baseline, r.benchmark, case.design.conversion.as_ref().unwrap(), 1).unwrap();
        assert!(e["payment.baseline"].holds(row.baseline_payment));
        assert!(e["payment.informed"].holds(row.informed_payment));
        assert!(e["payment.incentive"].holds(row.incentive));
        assert!(e["payment.incentive_ratio"].holds(row.incentive_ratio));
    }

    #[test]
    fn tabulated_joint_matches_generative_model() {
        let tabulated = forecast_joint().unwrap();
        let generated = weather_joint(&GaussianThresholdDgm::weather()).unwrap();
        assert_eq!(tabulated.signals, generated.signals);
        for (a, b) in tabulated.joint.iter().flatten().zip(generated.joint.iter().flatten()) {
            assert!((a - b).abs() < 5e-5, "{a} vs {b}");
        }
    }
}
