//! Rational-agent benchmarks for decision experiments.
//!
//! Before an experiment: the rational baseline, the best score attainable
//! with each visualization strategy, the value of information and the
//! incentive it buys ([`rational`], [`payment`]). After an experiment: the
//! behavioral and calibrated scores of trial records and their split into
//! belief loss and optimization loss ([`behavioral`]).
//!
//! The runnable examples under `examples/` walk through each capability:
//!
//! | example | shows |
//! |---|---|
//! | `weather_pre` | baseline, benchmark and incentives for the salting task |
//! | `kale_pre` | a four-state hiring task with a PoS report |
//! | `fernandes_pre` | transit decisions from a distribution file |
//! | `decomposition` | simulated agents and their loss decomposition |
//! | `monte_carlo` | seeded Monte Carlo checks against exact values |
//! | `custom_design` | a design built by hand and saved as config |
//! | `trial_csv` | writing and re-reading trial records |

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod behavioral;
pub mod cases;
pub mod cli;
pub mod config;
pub mod error;
pub mod generative;
pub mod io;
pub mod model;
pub mod payment;
pub mod rational;
pub mod report;
pub mod simulate;

pub use error::{Error, Result};
