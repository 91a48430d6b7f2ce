mod common;

use common::{agent_joint, assert_close, design_with_garbling, random_kernel, random_problem, CountProblem};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rational_agent::behavioral::{behavioral_score, calibrate};
use rational_agent::model::{Belief, ScoringRule};
use rational_agent::rational::analyze;

const TOL: f64 = 1e-9;

fn scores(p: &CountProblem) -> &Vec<Vec<f64>> {
    match &p.task.rule {
        ScoringRule::Matrix { scores } => scores,
        _ => unreachable!(),
    }
}

/// Brute-force R∅ and R_V straight from the counts.
fn oracle(p: &CountProblem) -> (f64, f64) {
    let s = scores(p);
    let total: u64 = p.counts.iter().flatten().sum();
    let n = total as f64;
    let best = |mass: &dyn Fn(usize) -> f64| {
        s.iter()
            .map(|row| row.iter().enumerate().map(|(th, x)| x * mass(th)).sum::<f64>())
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let r0 = best(&|th| p.counts.iter().map(|r| r[th]).sum::<u64>() as f64 / n);
    let rv = p.counts.iter().map(|r| best(&|th| r[th] as f64 / n)).sum();
    (r0, rv)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn rational_ordering_and_oracle(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng);
        let d = design_with_garbling(&mut rng, &p);
        let r = analyze(&d).unwrap();
        let rv = r.per_strategy["original"].visualization_optimal;
        let (r0, rv_oracle) = oracle(&p);
        assert_close(r.baseline, r0, TOL);
        assert_close(rv, rv_oracle, TOL);
        prop_assert!(r.baseline <= rv + TOL);
        prop_assert!(rv <= r.benchmark + TOL);
        prop_assert!(r.value_of_information >= 0.0);
        assert_close(r.per_strategy["none"].visualization_optimal, r.baseline, TOL);
    }

    #[test]
    fn garbling_never_helps(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng);
        let d = design_with_garbling(&mut rng, &p);
        let r = analyze(&d).unwrap();
        prop_assert!(
            r.per_strategy["garbled"].visualization_optimal
                <= r.per_strategy["original"].visualization_optimal + TOL
        );
        prop_assert!(r.per_strategy["garbled"].visualization_optimal >= r.baseline - TOL);
    }

    #[test]
    fn calibration_bounds(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng);
        let policy = random_kernel(&mut rng, p.n_signals(), p.n_actions(), 4);
        let joint = agent_joint(&p, &policy);
        let b = behavioral_score(&joint, &p.task).unwrap();
        let c = calibrate(&joint, &p.task, 0.0).unwrap().score;
        let (r0, rv) = oracle(&p);
        prop_assert!(c >= b - TOL, "C {c} < B {b}");
        prop_assert!(c >= r0 - TOL, "C {c} < R0 {r0}");
        prop_assert!(c <= rv + TOL, "C {c} > R_V {rv}");
    }

    #[test]
    fn reports_are_proper(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = random_problem(&mut rng);
        let n = p.n_states();
        let draw = |rng: &mut ChaCha8Rng| {
            let w: Vec<f64> = (0..n).map(|_| rand::Rng::gen_range(rng, 0.01..1.0)).collect();
            Belief::from_weights(&w).unwrap()
        };
        let truth = draw(&mut rng);
        let other = draw(&mut rng);
        let expected = |reported: &Belief| -> f64 {
            (0..n)
                .map(|th| truth.probs()[th] * p.task.proper_score(reported, th).unwrap())
                .sum()
        };
        prop_assert!(expected(&truth) >= expected(&other) - TOL);
    }
}

#[test]
fn rational_agent_joint_reaches_visualization_optimum() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..200 {
        let p = random_problem(&mut rng);
        let structure = p.structure();
        let best = rational_agent::rational::rational_policy(&p.task, &structure).unwrap();
        let policy: Vec<Vec<u64>> = best
            .iter()
            .map(|a| (0..p.n_actions()).map(|i| u64::from(i == *a)).collect())
            .collect();
        let joint = agent_joint(&p, &policy);
        let b = behavioral_score(&joint, &p.task).unwrap();
        let c = calibrate(&joint, &p.task, 0.0).unwrap().score;
        let (_, rv) = oracle(&p);
        assert_close(b, rv, TOL);
        assert_close(c, rv, TOL);
    }
}
