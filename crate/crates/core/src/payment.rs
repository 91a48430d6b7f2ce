//! Score-to-currency conversion and incentive tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Function from (possibly cumulative) score points to currency.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConversionRule {
    /// `base + rate * score`
    Affine { base: f64, rate: f64 },
    /// `base + rate * max(0, score - floor)`
    FlooredAffine { base: f64, rate: f64, floor: f64 },
    /// `rate * (score - shift) + base`
    ShiftedAffine { base: f64, rate: f64, shift: f64 },
}

impl ConversionRule {
    pub fn convert(&self, score: f64) -> f64 {
        match *self {
            ConversionRule::Affine { base, rate } => base + rate * score,
            ConversionRule::FlooredAffine { base, rate, floor } => {
                base + rate * (score - floor).max(0.0)
            }
            ConversionRule::ShiftedAffine { base, rate, shift } => rate * (score - shift) + base,
        }
    }

    pub fn violations(&self) -> Vec<String> {
        let (base, rate, extra) = match *self {
            ConversionRule::Affine { base, rate } => (base, rate, 0.0),
            ConversionRule::FlooredAffine { base, rate, floor } => (base, rate, floor),
            ConversionRule::ShiftedAffine { base, rate, shift } => (base, rate, shift),
        };
        let mut out = Vec::new();
        if !(base.is_finite() && rate.is_finite() && extra.is_finite()) {
            out.push("conversion parameters must be finite".to_string());
        }
        if rate < 0.0 {
            out.push(format!("conversion rate must be >= 0 (got {rate})"));
        }
        out
    }
}

/// Expected payments to a rational agent without and with the signal.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IncentiveRow {
    pub label: String,
    pub baseline_payment: f64,
    pub informed_payment: f64,
    pub incentive: f64,
    pub incentive_ratio: f64,
}

/// Incentive to consult the visualization when per-trial expected scores
/// are `baseline` and `informed` over `trials` trials. Cumulative scores
/// are converted at their expectation, which is exact for affine rules
/// and the usual linearization otherwise.
pub fn incentive(
    label: impl Into<String>,
    baseline: f64,
    informed: f64,
    rule: &ConversionRule,
    trials: u32,
) -> Result<IncentiveRow> {
    let n = f64::from(trials);
    let f0 = rule.convert(n * baseline);
    let f1 = rule.convert(n * informed);
    if f0 == 0.0 {
        return Err(Error::ZeroBaselinePayment);
    }
    Ok(IncentiveRow {
        label: label.into(),
        baseline_payment: f0,
        informed_payment: f1,
        incentive: f1 - f0,
        incentive_ratio: (f1 - f0) / f0,
    })
}

/// Formats currency the way the reports do: `$0.920`.
pub fn format_currency(x: f64) -> String {
    if x < 0.0 {
        format!("-${:.3}", -x)
    } else {
        format!("${x:.3}")
    }
}
