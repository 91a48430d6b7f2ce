//! Transit decisions: when to leave for the bus given a predictive
//! distribution of its arrival. Reads the bundled distribution file, or
//! the path given as the first argument.
//!
//! cargo run --example fernandes_pre [-- trials.csv]

use std::path::PathBuf;

use rational_agent::cases::fernandes::{build_fernandes, FernandesOptions, SCENARIOS};
use rational_agent::io::read_distributions_file;
use rational_agent::payment::{format_currency, incentive};
use rational_agent::rational::analyze;

fn main() -> rational_agent::Result<()> {
    let path = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/transit_trials.csv"));
    let dists = read_distributions_file(&path)?;
    println!("{} trials from {}", dists.len(), path.display());

    // text displays group trials by a rounded quantile
    let options = FernandesOptions::default().with_example_partitions();
    for id in SCENARIOS {
        let case = build_fernandes(id, &dists, &options)?;
        let design = &case.design;
        let r = analyze(design)?;
        println!(
            "scenario {id}: R∅ {:.1}  R_V^R {:.1}  Δ {:.1}",
            r.baseline, r.benchmark, r.value_of_information
        );
        for name in &r.strategy_order {
            let s = &r.per_strategy[name];
            println!(
                "    {name:<7} R_V {:>8.1}  information loss {:>6.2}%",
                s.visualization_optimal,
                s.information_loss.unwrap_or(0.0) * 100.0
            );
        }
        if let Some(rule) = &design.conversion {
            let row = incentive("full", r.baseline, r.benchmark, rule, design.trials)?;
            println!(
                "    pay {} -> {} over {} trials (Δf {})",
                format_currency(row.baseline_payment),
                format_currency(row.informed_payment),
                design.trials,
                format_currency(row.incentive)
            );
        }
    }
    Ok(())
}
