//! Seeded Monte Carlo estimates of R∅ and R_V against the exact values.
//!
//! cargo run --release --example monte_carlo

use rational_agent::cases::weather;
use rational_agent::generative::{monte_carlo_score, weather_joint, BoxCoxT, GaussianThresholdDgm, seeded_rng};
use rational_agent::rational::{analyze, rational_policy};

fn main() -> rational_agent::Result<()> {
    let design = weather::build_weather()?.design;
    let problem = design.problem("ci")?;
    let r = analyze(&design)?;
    let informed = rational_policy(&problem.task, &problem.structure)?;
    let uninformed = vec![design.task.optimal_action(&r.prior)?.0; informed.len()];
    let exact_rv = r.per_strategy["ci"].visualization_optimal;

    for seed in 0..5 {
        let e0 = monte_carlo_score(&problem, &uninformed, 100_000, seed)?;
        let e1 = monte_carlo_score(&problem, &informed, 100_000, seed)?;
        println!(
            "seed {seed}: R∅ {:.3} ± {:.3} (exact {:.3})   R_V {:.3} ± {:.3} (exact {:.3})",
            e0.mean, e0.std_error, r.baseline, e1.mean, e1.std_error, exact_rv
        );
    }

    // the forecast joint derived from its Gaussian generating process
    let derived = weather_joint(&GaussianThresholdDgm::weather())?;
    for (signal, row) in derived.signals.iter().zip(&derived.joint) {
        println!("signal {signal}: P(v, freezing) = {:.5}", row[1]);
    }

    // draws from a Box-Cox t arrival distribution
    let dist = BoxCoxT::new(12.0, 0.15, 0.4, 10.0)?;
    let mut rng = seeded_rng(1, 0);
    let draws: Vec<f64> = (0..10_000).map(|_| dist.sample(&mut rng)).collect();
    let median = {
        let mut d = draws.clone();
        d.sort_by(f64::total_cmp);
        d[d.len() / 2]
    };
    println!("Box-Cox t median: sampled {median:.3}, quantile {:.3}", dist.quantile(0.5)?);
    Ok(())
}
