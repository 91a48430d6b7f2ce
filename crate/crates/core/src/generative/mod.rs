//! Parametric data-generating processes and the sampling, discretization
//! and Monte Carlo utilities that connect them to finite-state analysis.

mod boxcox;
mod discretize;
mod dgm;
mod monte_carlo;

pub use boxcox::BoxCoxT;
pub use discretize::{discretize, transit_grid, DiscretizedDistribution, DEFAULT_TRANSIT_CELLS};
pub use dgm::{
    kale_joint, normal_cdf, normal_quantile, pos_to_win_probability, weather_joint,
    win_probability_to_pos, GaussianThresholdDgm, PosLevels, ThresholdDirection, TwoTeamDgm,
    KALE_STATES,
};
pub use monte_carlo::{monte_carlo_score, seeded_rng, JointSampler, McEstimate};
