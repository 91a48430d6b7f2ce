use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::DecisionProblem;
use crate::rational::posterior;

/// Reproducible generator for a seed and an independent stream number.
pub fn seeded_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Draws `(signal, state)` index pairs from a joint table.
#[derive(Clone, Debug)]
pub struct JointSampler {
    n_states: usize,
    cumulative: Vec<f64>,
}

impl JointSampler {
    pub fn new(joint: &[Vec<f64>]) -> Self {
        let n_states = joint.first().map_or(0, Vec::len);
        let mut acc = 0.0;
        let cumulative = joint
            .iter()
            .flatten()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        JointSampler { n_states, cumulative }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, usize) {
        let total = *self.cumulative.last().expect("non-empty joint");
        let u = rng.gen::<f64>() * total;
        // first cell whose cumulative mass exceeds u; it always has positive mass
        let k = self
            .cumulative
            .partition_point(|c| *c <= u)
            .min(self.cumulative.len() - 1);
        (k / self.n_states, k % self.n_states)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n: u64,
}

/// Mean score and standard error of `policy` (signal index to action
/// index) over `n` draws from the joint.
pub fn monte_carlo_score(
    problem: &DecisionProblem,
    policy: &[usize],
    n: u64,
    seed: u64,
) -> Result<McEstimate> {
    if n == 0 {
        return Err(Error::InvalidParameter("Monte Carlo needs n >= 1".into()));
    }
    let s = &problem.structure;
    if policy.len() != s.n_signals() {
        return Err(Error::Dimension(format!(
            "policy covers {} signals, structure has {}",
            policy.len(),
            s.n_signals()
        )));
    }
    let task = &problem.task;
    // per-signal score rows; the transit second bus follows the signal's posterior
    let rows = (0..s.n_signals())
        .map(|v| {
            let q = posterior(s, v)?;
            (0..task.n_states())
                .map(|th| task.state_score(policy[v], th, &q))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let sampler = JointSampler::new(&s.joint);
    let mut rng = seeded_rng(seed, 0);
    // Welford
    let (mut mean, mut m2) = (0.0, 0.0);
    for i in 1..=n {
        let (v, th) = sampler.sample(&mut rng);
        let x = rows[v][th];
        let d = x - mean;
        mean += d / i as f64;
        m2 += d * (x - mean);
    }
    let var = if n > 1 { m2 / (n - 1) as f64 } else { 0.0 };
    Ok(McEstimate {
        mean,
        std_error: (var / n as f64).sqrt(),
        n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cases::weather;
    use crate::rational::{rational_policy, visualization_optimal};

    #[test]
    fn weather_rational_policy_converges() {
        let case = weather::build_weather().unwrap();
        let p = case.design.problem("ci").unwrap();
        let policy = rational_policy(&p.task, &p.structure).unwrap();
        let est = monte_carlo_score(&p, &policy, 200_000, 11).unwrap();
        let exact = visualization_optimal(&p).unwrap();
        assert!((est.mean - exact).abs() < 3.0 * est.std_error, "{est:?} vs {exact}");
    }

    #[test]
    fn constant_no_salt_matches_baseline() {
        let case = weather::build_weather().unwrap();
        let p = case.design.problem("ci").unwrap();
        let est = monte_carlo_score(&p, &[0, 0, 0, 0], 200_000, 5).unwrap();
        assert!((est.mean + 7.96).abs() < 3.0 * est.std_error);
    }

    #[test]
    fn degenerate_joint_has_zero_variance() {
        let case = weather::build_weather().unwrap();
        let mut p = case.design.problem("ci").unwrap();
        p.structure.signals = vec!["x".into()];
        p.structure.joint = vec![vec![1.0, 0.0]];
        let est = monte_carlo_score(&p, &[1], 1000, 1).unwrap();
        assert_eq!(est.mean, -10.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn seeded_runs_repeat() {
        let case = weather::build_weather().unwrap();
        let p = case.design.problem("ci").unwrap();
        let a = monte_carlo_score(&p, &[0, 0, 1, 1], 10_000, 42).unwrap();
        let b = monte_carlo_score(&p, &[0, 0, 1, 1], 10_000, 42).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_score(&p, &[0, 0, 1, 1], 0, 42).is_err());
    }

    #[test]
    fn sampler_skips_empty_cells() {
        let s = JointSampler::new(&[vec![0.0, 0.5], vec![0.0, 0.5]]);
        let mut rng = seeded_rng(1, 0);
        for _ in 0..1000 {
            let (_, th) = s.sample(&mut rng);
            assert_eq!(th, 1);
        }
    }
}
