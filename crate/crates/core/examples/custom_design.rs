//! A design built by hand: an umbrella decision under two forecast
//! displays, saved as a config file the CLI can read back.
//!
//! cargo run --example custom_design [-- design.json]
//! rational-agent pre --config design.json

use rational_agent::config::ConfigFile;
use rational_agent::model::{
    ActionSpace, DecisionTask, ExperimentDesign, InformationStructure, ScoringRule, StateSpace, Strategy,
};
use rational_agent::payment::ConversionRule;
use rational_agent::rational::analyze;

fn main() -> rational_agent::Result<()> {
    let task = DecisionTask::new(
        StateSpace::new(["dry", "rain"])?,
        ActionSpace::finite(["leave_it", "take_it"]),
        ScoringRule::Matrix { scores: vec![vec![0.0, -10.0], vec![-2.0, -2.0]] },
    )?;
    // both displays share the 30% prior chance of rain
    let icon = InformationStructure::new(["sun", "cloud"], vec![vec![0.45, 0.05], vec![0.25, 0.25]])?;
    let percent = InformationStructure::new(
        ["10%", "40%", "80%"],
        vec![vec![0.36, 0.04], vec![0.24, 0.16], vec![0.10, 0.10]],
    )?;
    let mut design = ExperimentDesign::new(
        "umbrella",
        task,
        vec![
            Strategy { name: "icon".into(), structure: icon },
            Strategy { name: "percent".into(), structure: percent },
        ],
    )?;
    design.conversion = Some(ConversionRule::Affine { base: 2.0, rate: 0.05 });
    design.trials = 20;

    let r = analyze(&design)?;
    println!("R∅ {:.3}  R_V^R {:.3}  Δ {:.3}", r.baseline, r.benchmark, r.value_of_information);
    for name in &r.strategy_order {
        let s = &r.per_strategy[name];
        println!("  {name:<8} R_V {:.3}  information loss {:.1}%", s.visualization_optimal, s.information_loss.unwrap_or(0.0) * 100.0);
    }

    let text = ConfigFile::from_design(design).to_json()?;
    match std::env::args().nth(1) {
        Some(path) => {
            std::fs::write(&path, &text)?;
            println!("wrote {path}");
        }
        None => print!("{text}"),
    }
    Ok(())
}
