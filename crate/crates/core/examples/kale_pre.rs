//! A four-state hiring task whose participants report a probability of
//! superiority. Shows the report model, the decision threshold and how the
//! choice of PoS levels moves the prior.
//!
//! cargo run --example kale_pre

use rational_agent::cases::kale;
use rational_agent::generative::{pos_to_win_probability, PosLevels};
use rational_agent::payment::{format_currency, incentive};
use rational_agent::rational::analyze;

fn main() -> rational_agent::Result<()> {
    let case = kale::build_kale(None)?;
    let design = &case.design;
    let model = kale::report_model();
    let r = analyze(design)?;

    println!("P(new player wins) = {:.4}", model.event_probability(&r.prior));
    if let Some(t) = kale::decision_threshold(&design.task, &model)? {
        println!("hire when the win probability exceeds {t:.4}");
    }
    for pos in [0.55, 0.75, 0.95] {
        println!("  PoS {pos:.2} -> win probability {:.4}", pos_to_win_probability(pos)?);
    }
    println!("R∅ {:.4}  R_V^R {:.4}  Δ {:.4}", r.baseline, r.benchmark, r.value_of_information);
    for name in &r.strategy_order {
        println!("  {name:<10} R_V {:.4}", r.per_strategy[name].visualization_optimal);
    }

    let rule = design.conversion.as_ref().expect("kale has a payment rule");
    let row = incentive("all", r.baseline, r.benchmark, rule, design.trials)?;
    println!(
        "{} trials: {} -> {} (Δf {}, {:.2}%)",
        design.trials,
        format_currency(row.baseline_payment),
        format_currency(row.informed_payment),
        format_currency(row.incentive),
        row.incentive_ratio * 100.0
    );

    // geometric spacing of the same range puts less mass on strong signals
    let geometric = PosLevels::Geometric { lo: 0.55, hi: 0.95, count: 8 }.levels();
    let alt = analyze(&kale::build_kale(Some(geometric))?.design)?;
    println!("geometric levels: P(win) = {:.4}", model.event_probability(&alt.prior));
    Ok(())
}
