//! Writing trial records to the trial CSV format and reading them back,
//! including how malformed rows are reported.
//!
//! cargo run --example trial_csv

use rational_agent::behavioral::{analyze_trials, PostOptions};
use rational_agent::cases::kale;
use rational_agent::io::{read_trials, write_trials};
use rational_agent::simulate::{simulate, AgentSpec, Allocation, SimulationConfig, TaskKind};

fn main() -> rational_agent::Result<()> {
    let design = kale::build_kale(None)?.design;
    let config = SimulationConfig {
        agent: AgentSpec::NoisyBelief { kappa: 0.3 },
        task: TaskKind::BeliefReport,
        n_trials: 4000,
        seed: 21,
        allocation: Allocation::Iid,
    };
    let records = simulate(&design, "hops", &config)?;

    let mut buf = Vec::new();
    write_trials(&mut buf, &records)?;
    let text = String::from_utf8(buf).expect("csv is utf-8");
    for line in text.lines().take(4) {
        println!("{line}");
    }
    let back = read_trials(text.as_bytes())?;
    assert_eq!(back, records);

    let rows = analyze_trials(&design, &back, PostOptions { bin_width: 0.05, smoothing_alpha: 0.0 })?;
    for row in &rows {
        println!(
            "{}: {} trials, B {:.4}, C {:.4}, R_V {:.4}",
            row.strategy, row.n_trials, row.behavioral, row.calibrated, row.visualization_optimal
        );
    }

    let bad = "trial_id,strategy,signal,state,response_kind,response\n\
               1,hops,pos1=0.5500,win/win,probability,high\n\
               2,hops,pos1=0.5500,win/win,guess,0.4\n";
    match read_trials(bad.as_bytes()) {
        Err(e) => println!("rejected: {e}"),
        Ok(_) => unreachable!("malformed rows must not parse"),
    }
    Ok(())
}
