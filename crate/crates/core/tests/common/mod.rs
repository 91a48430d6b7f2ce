#![allow(dead_code)]

use rand::Rng;
use rational_agent::behavioral::{EmpiricalJoint, Provenance};
use rational_agent::model::{
    ActionSpace, DecisionTask, ExperimentDesign, InformationStructure, ScoringRule, StateSpace, Strategy,
};

/// A small decision problem whose joint is built from integer counts, so
/// agent joints and garblings derived from it stay exact.
#[derive(Clone, Debug)]
pub struct CountProblem {
    pub task: DecisionTask,
    /// `counts[v][theta]`
    pub counts: Vec<Vec<u64>>,
}

impl CountProblem {
    pub fn structure(&self) -> InformationStructure {
        structure_from_counts(&self.counts)
    }

    pub fn n_signals(&self) -> usize {
        self.counts.len()
    }

    pub fn n_states(&self) -> usize {
        self.task.n_states()
    }

    pub fn n_actions(&self) -> usize {
        self.task.n_actions()
    }
}

pub fn structure_from_counts(counts: &[Vec<u64>]) -> InformationStructure {
    let total: u64 = counts.iter().flatten().sum();
    let joint = counts
        .iter()
        .map(|row| row.iter().map(|c| *c as f64 / total as f64).collect())
        .collect();
    let signals: Vec<String> = (0..counts.len()).map(|v| format!("v{v}")).collect();
    InformationStructure::new(signals, joint).expect("valid joint")
}

/// Up to 5 states, 5 actions and 6 signals.
pub fn random_problem<R: Rng>(rng: &mut R) -> CountProblem {
    let n_states = rng.gen_range(2..=5);
    let n_actions = rng.gen_range(1..=5);
    let n_signals = rng.gen_range(1..=6);
    let scores = (0..n_actions)
        .map(|_| (0..n_states).map(|_| rng.gen_range(-10.0..10.0)).collect())
        .collect();
    let task = DecisionTask::new(
        StateSpace::new((0..n_states).map(|s| format!("s{s}"))).unwrap(),
        ActionSpace::finite((0..n_actions).map(|a| format!("a{a}"))),
        ScoringRule::Matrix { scores },
    )
    .unwrap();
    let counts = (0..n_signals)
        .map(|_| (0..n_states).map(|_| rng.gen_range(0..10u64)).collect::<Vec<_>>())
        .collect::<Vec<_>>();
    let mut counts = counts;
    // every signal and the whole table need some mass
    for row in counts.iter_mut() {
        if row.iter().all(|c| *c == 0) {
            let i = rng.gen_range(0..n_states);
            row[i] = 1;
        }
    }
    CountProblem { task, counts }
}

/// Integer row-stochastic matrix with rows summing to `units`.
pub fn random_kernel<R: Rng>(rng: &mut R, rows: usize, cols: usize, units: u64) -> Vec<Vec<u64>> {
    (0..rows)
        .map(|_| {
            let mut row = vec![0u64; cols];
            for _ in 0..units {
                row[rng.gen_range(0..cols)] += 1;
            }
            row
        })
        .collect()
}

/// Counts after passing each signal through `kernel[v][v']`.
pub fn garble(counts: &[Vec<u64>], kernel: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let n_out = kernel[0].len();
    let n_states = counts[0].len();
    let mut out = vec![vec![0u64; n_states]; n_out];
    for (v, row) in counts.iter().enumerate() {
        for (w, k) in kernel[v].iter().enumerate() {
            for (th, c) in row.iter().enumerate() {
                out[w][th] += c * k;
            }
        }
    }
    // drop signals that never fire
    out.retain(|r| r.iter().any(|c| *c > 0));
    out
}

/// The exact joint of actions and states for an agent that plays
/// `policy[v][a] / units` on signal `v`.
pub fn agent_joint(problem: &CountProblem, policy: &[Vec<u64>]) -> EmpiricalJoint {
    let mut counts = vec![vec![0u64; problem.n_states()]; problem.n_actions()];
    for (v, row) in problem.counts.iter().enumerate() {
        for (a, w) in policy[v].iter().enumerate() {
            for (th, c) in row.iter().enumerate() {
                counts[a][th] += c * w;
            }
        }
    }
    EmpiricalJoint {
        actions: problem.task.actions.labels(),
        states: problem.task.states.labels.clone(),
        counts,
        provenance: Provenance::RawCounts,
    }
}

/// A design with the problem's structure, a garbling of it and an
/// uninformative strategy.
pub fn design_with_garbling<R: Rng>(rng: &mut R, problem: &CountProblem) -> ExperimentDesign {
    let n_out = rng.gen_range(1..=6);
    let kernel = random_kernel(rng, problem.n_signals(), n_out, 6);
    let garbled = garble(&problem.counts, &kernel);
    let pooled = vec![problem.counts.iter().fold(vec![0u64; problem.n_states()], |mut acc, r| {
        for (x, c) in acc.iter_mut().zip(r) {
            *x += c;
        }
        acc
    })];
    ExperimentDesign::new(
        "random",
        problem.task.clone(),
        vec![
            Strategy { name: "original".into(), structure: problem.structure() },
            Strategy { name: "garbled".into(), structure: structure_from_counts(&garbled) },
            Strategy { name: "none".into(), structure: structure_from_counts(&pooled) },
        ],
    )
    .expect("valid design")
}

pub fn assert_close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol * (1.0 + b.abs()), "{a} vs {b}");
}
