use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::model::{format_value, InformationStructure, PROB_TOL};

fn std_normal() -> Normal {
    Normal::new(0.0, 1.0).expect("unit normal")
}

pub fn normal_cdf(x: f64) -> f64 {
    std_normal().cdf(x)
}

pub fn normal_quantile(p: f64) -> f64 {
    std_normal().inverse_cdf(p)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ThresholdDirection {
    /// State 1 iff `x <= threshold`.
    AtOrBelow,
    /// State 1 iff `x >= threshold`.
    AtOrAbove,
}

/// `x ~ N(mean, sigma^2)` with sigma drawn from a finite set; the signal
/// reveals sigma and the binary state thresholds `x`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianThresholdDgm {
    pub mean: f64,
    /// `(sigma, selection probability)`
    pub sigma_levels: Vec<(f64, f64)>,
    pub threshold: f64,
    pub direction: ThresholdDirection,
}

impl GaussianThresholdDgm {
    /// Daily low `N(5, sigma^2)`, sigma uniform on {2, 3, 4, 5}, freezing at 0.
    pub fn weather() -> Self {
        GaussianThresholdDgm {
            mean: 5.0,
            sigma_levels: [2.0, 3.0, 4.0, 5.0].iter().map(|s| (*s, 0.25)).collect(),
            threshold: 0.0,
            direction: ThresholdDirection::AtOrBelow,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.sigma_levels.is_empty() {
            out.push("no sigma levels".to_string());
        }
        if self.sigma_levels.iter().any(|(s, _)| !(*s > 0.0 && s.is_finite())) {
            out.push("sigma levels must be > 0".to_string());
        }
        if self.sigma_levels.iter().any(|(_, p)| !(*p >= 0.0)) {
            out.push("selection probabilities must be >= 0".to_string());
        }
        let total: f64 = self.sigma_levels.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > PROB_TOL {
            out.push(format!("selection probabilities sum to {total}"));
        }
        out
    }

    /// Probability of state 1 given sigma.
    pub fn event_probability(&self, sigma: f64) -> f64 {
        let below = normal_cdf((self.threshold - self.mean) / sigma);
        match self.direction {
            ThresholdDirection::AtOrBelow => below,
            ThresholdDirection::AtOrAbove => 1.0 - below,
        }
    }
}

/// One signal per sigma level; columns are states 0 and 1.
pub fn weather_joint(dgm: &GaussianThresholdDgm) -> Result<InformationStructure> {
    let v = dgm.violations();
    if !v.is_empty() {
        return Err(Error::Invalid(v));
    }
    let signals = dgm.sigma_levels.iter().map(|(s, _)| format_value(*s));
    let joint = dgm
        .sigma_levels
        .iter()
        .map(|(s, w)| {
            let q = dgm.event_probability(*s);
            vec![w * (1.0 - q), w * q]
        })
        .collect();
    InformationStructure::new(signals, joint)
}

/// Maps a probability of superiority `Pr[x1 > x0]` to `Pr[x1 >= 100]`
/// when `x0 ~ N(100, s^2)` and `x1 ~ N(mu, s^2)`.
pub fn pos_to_win_probability(pos: f64) -> Result<f64> {
    if !(pos > 0.0 && pos < 1.0) {
        return Err(Error::InvalidProbability(format!(
            "probability of superiority must lie in (0, 1), got {pos}"
        )));
    }
    Ok(normal_cdf(std::f64::consts::SQRT_2 * normal_quantile(pos)))
}

/// Inverse of [`pos_to_win_probability`], extended to the endpoints.
pub fn win_probability_to_pos(win: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&win) {
        return Err(Error::InvalidProbability(format!("win probability {win}")));
    }
    if win == 0.0 || win == 1.0 {
        return Ok(win);
    }
    Ok(normal_cdf(normal_quantile(win) / std::f64::consts::SQRT_2))
}

/// How the eight ground-truth PoS levels are laid out.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PosLevels {
    /// Evenly spaced, both endpoints included.
    Linear { lo: f64, hi: f64, count: usize },
    /// Evenly spaced in log(PoS), both endpoints included.
    Geometric { lo: f64, hi: f64, count: usize },
    Explicit { levels: Vec<f64> },
}

impl PosLevels {
    pub fn levels(&self) -> Vec<f64> {
        match self {
            PosLevels::Linear { lo, hi, count } => spaced(*lo, *hi, *count, |x| x, |x| x),
            PosLevels::Geometric { lo, hi, count } => spaced(*lo, *hi, *count, f64::ln, f64::exp),
            PosLevels::Explicit { levels } => levels.clone(),
        }
    }
}

fn spaced(lo: f64, hi: f64, n: usize, fwd: fn(f64) -> f64, back: fn(f64) -> f64) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (fwd(lo), fwd(hi));
    (0..n)
        .map(|i| back(a + (b - a) * i as f64 / (n - 1) as f64))
        .collect()
}

/// Labels of the two-team state space: outcome without / with the new player.
pub const KALE_STATES: [&str; 4] = ["lose/lose", "lose/win", "win/lose", "win/win"];

/// Fantasy-team stimuli: score without the new player `N(100, s^2)`, with
/// the player `N(mu, s^2)`; the signal reveals which PoS level was drawn.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TwoTeamDgm {
    pub baseline_mean: f64,
    pub sigmas: Vec<f64>,
    pub win_threshold: f64,
    pub levels: PosLevels,
    /// Probability of winning without the player.
    pub base_win_probability: f64,
    /// Required `(target, tolerance)` for the prior win probability with the player.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub prior_check: Option<(f64, f64)>,
}

impl TwoTeamDgm {
    /// Eight levels from 0.55 to 0.95, evenly spaced, with the 80.5% prior check.
    pub fn hiring() -> Self {
        TwoTeamDgm {
            baseline_mean: 100.0,
            sigmas: vec![5.0, 15.0],
            win_threshold: 100.0,
            levels: PosLevels::Linear { lo: 0.55, hi: 0.95, count: 8 },
            base_win_probability: 0.5,
            prior_check: Some((0.805, 0.005)),
        }
    }

    pub fn with_levels(levels: Vec<f64>) -> Self {
        TwoTeamDgm {
            levels: PosLevels::Explicit { levels },
            prior_check: None,
            ..TwoTeamDgm::hiring()
        }
    }

    /// Mean of the player's score that realizes a PoS level at a given sigma.
    pub fn player_mean(&self, pos: f64, sigma: f64) -> Result<f64> {
        let _ = pos_to_win_probability(pos)?;
        Ok(self.baseline_mean + std::f64::consts::SQRT_2 * sigma * normal_quantile(pos))
    }

    pub fn win_probabilities(&self) -> Result<Vec<f64>> {
        self.levels.levels().into_iter().map(pos_to_win_probability).collect()
    }
}

/// One signal per PoS level (uniform); states are [`KALE_STATES`] with the
/// no-player outcome independent of everything else.
pub fn kale_joint(dgm: &TwoTeamDgm) -> Result<InformationStructure> {
    let levels = dgm.levels.levels();
    if levels.is_empty() {
        return Err(Error::InvalidParameter("no PoS levels".into()));
    }
    let wins = dgm.win_probabilities()?;
    let prior_win = wins.iter().sum::<f64>() / wins.len() as f64;
    if let Some((target, tol)) = dgm.prior_check {
        if (prior_win - target).abs() > tol {
            return Err(Error::MarginalCheck(format!(
                "prior win probability {prior_win:.4} outside {target} ± {tol}"
            )));
        }
    }
    let w = 1.0 / levels.len() as f64;
    let b = dgm.base_win_probability;
    let signals = levels.iter().enumerate().map(|(i, p)| format!("pos{}={p:.4}", i + 1));
    let joint = wins
        .iter()
        .map(|q| {
            vec![
                w * (1.0 - b) * (1.0 - q),
                w * (1.0 - b) * q,
                w * b * (1.0 - q),
                w * b * q,
            ]
        })
        .collect();
    InformationStructure::new(signals, joint)
}
