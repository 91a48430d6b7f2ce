//! Simulated agents on the salting task and the split of their shortfall
//! into belief loss and optimization loss.
//!
//! cargo run --release --example decomposition

use rational_agent::behavioral::{analyze_trials, PostOptions};
use rational_agent::cases::weather;
use rational_agent::simulate::{simulate, AgentSpec, Allocation, SimulationConfig, TaskKind};

fn main() -> rational_agent::Result<()> {
    let design = weather::build_weather()?.design;
    let agents: Vec<AgentSpec> = ["rational", "prior", "random", "noisy:k=1", "lapse:l=0.3:rational"]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;

    println!("{:<22} {:>9} {:>9} {:>11} {:>11}", "agent", "B", "C", "belief", "optimization");
    for agent in agents {
        let config = SimulationConfig {
            agent: agent.clone(),
            task: TaskKind::Decision,
            n_trials: 50_000,
            seed: 7,
            allocation: Allocation::Iid,
        };
        let records = simulate(&design, "ci", &config)?;
        let row = &analyze_trials(&design, &records, PostOptions::default())?[0];
        let pct = |x: Option<f64>| x.map_or("-".into(), |v| format!("{:.1}%", v * 100.0));
        println!(
            "{:<22} {:>9.3} {:>9.3} {:>11} {:>11}",
            agent.to_string(),
            row.behavioral,
            row.calibrated,
            pct(row.belief_loss),
            pct(row.optimization_loss)
        );
    }

    // a belief-report task: responses are binned into actions
    let config = SimulationConfig {
        agent: AgentSpec::NoisyBelief { kappa: 0.5 },
        task: TaskKind::BeliefReport,
        n_trials: 20_000,
        seed: 3,
        allocation: Allocation::BalancedBlocks,
    };
    let records = simulate(&design, "hops", &config)?;
    let opts = PostOptions { bin_width: 0.05, smoothing_alpha: 0.5 };
    let row = &analyze_trials(&design, &records, opts)?[0];
    println!(
        "noisy reports, binned: B {:.3}  C {:.3}  BVoI {:.3}",
        row.behavioral, row.calibrated, row.behavioral_value_of_information
    );
    Ok(())
}
