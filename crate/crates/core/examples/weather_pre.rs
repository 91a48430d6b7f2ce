//! Baseline, benchmark and incentives for the salting task.
//!
//! cargo run --example weather_pre

use rational_agent::cases::weather;
use rational_agent::payment::{format_currency, incentive};
use rational_agent::rational::analyze;

fn main() -> rational_agent::Result<()> {
    let case = weather::build_weather()?;
    let design = &case.design;
    let r = analyze(design)?;

    println!("prior P(freezing) = {:.4}", r.prior.probs()[1]);
    println!("R∅   = {:.3}", r.baseline);
    println!("R_V^R = {:.3}", r.benchmark);
    println!("Δ    = {:.3}", r.value_of_information);
    for name in &r.strategy_order {
        let s = &r.per_strategy[name];
        let loss = s.information_loss.map_or("-".to_string(), |l| format!("{:.1}%", l * 100.0));
        println!("  {name:<9} R_V {:>7.3}  information loss {loss}", s.visualization_optimal);
        for (signal, q) in &s.posteriors {
            println!("      signal {signal}: P(freezing) = {:.4}", q.probs()[1]);
        }
    }

    let rule = design.conversion.as_ref().expect("weather has a payment rule");
    let row = incentive("all", r.baseline, r.benchmark, rule, design.trials)?;
    println!(
        "payment {} without, {} with the forecast: Δf {} ({:.1}%)",
        format_currency(row.baseline_payment),
        format_currency(row.informed_payment),
        format_currency(row.incentive),
        row.incentive_ratio * 100.0
    );
    Ok(())
}
