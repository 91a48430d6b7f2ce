//! Command summaries: text tables for people, JSON for machines.
//!
//! JSON output is deterministic: ordered maps, fixed field order and no
//! timestamps, so identical inputs give identical bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::behavioral::LossReport;
use crate::cases::kale::decision_threshold;
use crate::config::LoadedDesign;
use crate::error::{Error, Result};
use crate::generative::monte_carlo_score;
use crate::model::{ExperimentDesign, PRIOR_MATCH_TOL, PROB_TOL};
use crate::payment::{format_currency, incentive, ConversionRule, IncentiveRow};
use crate::rational::{self, rational_policy, RationalReport};
use crate::simulate::effective_report_model;

/// Slack for the ordering checks on computed scores.
pub const INVARIANT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub probability: f64,
    pub prior_match: f64,
    pub invariant: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { probability: PROB_TOL, prior_match: PRIOR_MATCH_TOL, invariant: INVARIANT_TOL }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StrategyRow {
    pub strategy: String,
    pub n_signals: usize,
    pub visualization_optimal: f64,
    pub information_loss: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PinCheck {
    pub quantity: String,
    pub expected: f64,
    pub tolerance: f64,
    pub actual: Option<f64>,
    pub holds: Option<bool>,
    pub reference_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McCheck {
    pub strategy: String,
    pub quantity: String,
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
    pub n: u64,
    pub seed: u64,
    pub within_three_se: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DesignPre {
    pub label: String,
    pub design: String,
    pub trials: u32,
    pub baseline: f64,
    pub benchmark: f64,
    pub value_of_information: f64,
    /// `R0 / benchmark` when the benchmark is positive.
    pub baseline_ratio: Option<f64>,
    pub prior_event_probability: Option<f64>,
    pub decision_threshold: Option<f64>,
    pub strategies: Vec<StrategyRow>,
    pub incentive: Option<IncentiveRow>,
    pub conversion: Option<ConversionRule>,
    pub pins: Vec<PinCheck>,
    pub monte_carlo: Vec<McCheck>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PreSummary {
    pub command: String,
    pub source: String,
    pub tolerances: Tolerances,
    pub designs: Vec<DesignPre>,
}

/// Fails when the computed quantities break the orderings every design
/// must satisfy.
pub fn check_rational(r: &RationalReport) -> Result<()> {
    let tol = INVARIANT_TOL * (1.0 + r.benchmark.abs().max(r.baseline.abs()));
    let mut bad = Vec::new();
    for (name, s) in &r.per_strategy {
        if s.visualization_optimal < r.baseline - tol {
            bad.push(format!("R_V({name}) = {} below baseline {}", s.visualization_optimal, r.baseline));
        }
        if s.visualization_optimal > r.benchmark + tol {
            bad.push(format!("R_V({name}) above benchmark"));
        }
    }
    if r.value_of_information < -tol {
        bad.push(format!("negative value of information {}", r.value_of_information));
    }
    if bad.is_empty() {
        Ok(())
    } else {
        Err(Error::Invariant(bad.join("; ")))
    }
}

/// Rational analysis of one design, with optional Monte Carlo checks at
/// `(n, seed)`.
pub fn pre_analysis(loaded: &LoadedDesign, monte_carlo: Option<(u64, u64)>) -> Result<DesignPre> {
    let design = &loaded.design;
    let r = rational::analyze(design)?;
    check_rational(&r)?;
    let incentive = match &design.conversion {
        Some(rule) => Some(incentive("all", r.baseline, r.benchmark, rule, design.trials)?),
        None => None,
    };
    let model = effective_report_model(design);
    let prior_event_probability = model.as_ref().map(|m| m.event_probability(&r.prior));
    let decision_threshold = match &model {
        Some(m) if design.task.n_actions() == 2 => decision_threshold(&design.task, m)?,
        _ => None,
    };
    let strategies: Vec<StrategyRow> = r
        .strategy_order
        .iter()
        .zip(&design.strategies)
        .map(|(name, s)| StrategyRow {
            strategy: name.clone(),
            n_signals: s.structure.n_signals(),
            visualization_optimal: r.per_strategy[name].visualization_optimal,
            information_loss: r.per_strategy[name].information_loss,
        })
        .collect();
    let mut out = DesignPre {
        label: loaded.label.clone(),
        design: design.name.clone(),
        trials: design.trials,
        baseline: r.baseline,
        benchmark: r.benchmark,
        value_of_information: r.value_of_information,
        baseline_ratio: (r.benchmark > 0.0).then(|| r.baseline / r.benchmark),
        prior_event_probability,
        decision_threshold,
        strategies,
        incentive,
        conversion: design.conversion.clone(),
        pins: Vec::new(),
        monte_carlo: Vec::new(),
    };
    let values = quantities(&out);
    out.pins = loaded
        .expected
        .iter()
        .map(|(k, p)| {
            let actual = values.get(k).copied();
            PinCheck {
                quantity: k.clone(),
                expected: p.value,
                tolerance: p.tolerance,
                actual,
                holds: actual.map(|a| p.holds(a)),
                reference_only: p.reference_only,
            }
        })
        .collect();
    if let Some((n, seed)) = monte_carlo {
        out.monte_carlo = monte_carlo_checks(design, &r, n, seed)?;
    }
    Ok(out)
}

/// Named quantities a pin can refer to.
pub fn quantities(d: &DesignPre) -> BTreeMap<String, f64> {
    let mut m = BTreeMap::new();
    m.insert("baseline".to_string(), d.baseline);
    m.insert("benchmark".to_string(), d.benchmark);
    m.insert("value_of_information".to_string(), d.value_of_information);
    let optional = [
        ("baseline_ratio", d.baseline_ratio),
        ("prior_event_probability", d.prior_event_probability),
        ("decision_threshold", d.decision_threshold),
    ];
    for (k, v) in optional {
        if let Some(v) = v {
            m.insert(k.to_string(), v);
        }
    }
    for s in &d.strategies {
        m.insert(format!("visualization_optimal.{}", s.strategy), s.visualization_optimal);
        if let Some(l) = s.information_loss {
            m.insert(format!("information_loss.{}", s.strategy), l);
        }
    }
    if let Some(i) = &d.incentive {
        m.insert("payment.baseline".into(), i.baseline_payment);
        m.insert("payment.informed".into(), i.informed_payment);
        m.insert("payment.incentive".into(), i.incentive);
        m.insert("payment.incentive_ratio".into(), i.incentive_ratio);
    }
    if let Some(ConversionRule::Affine { base, rate }) = &d.conversion {
        m.insert("conversion.base".into(), *base);
        m.insert("conversion.dollars_per_thousand".into(), rate * 1000.0);
    }
    m
}

fn monte_carlo_checks(design: &ExperimentDesign, r: &RationalReport, n: u64, seed: u64) -> Result<Vec<McCheck>> {
    let mut out = Vec::new();
    let prior_action = design.task.optimal_action(&r.prior)?.0;
    for s in &design.strategies {
        let problem = design.problem(&s.name)?;
        let policies = [
            ("baseline", vec![prior_action; s.structure.n_signals()], r.baseline),
            (
                "visualization_optimal",
                rational_policy(&design.task, &s.structure)?,
                r.per_strategy[&s.name].visualization_optimal,
            ),
        ];
        for (quantity, policy, exact) in policies {
            let est = monte_carlo_score(&problem, &policy, n, seed)?;
            out.push(McCheck {
                strategy: s.name.clone(),
                quantity: quantity.to_string(),
                exact,
                estimate: est.mean,
                std_error: est.std_error,
                n,
                seed,
                within_three_se: (est.mean - exact).abs() <= 3.0 * est.std_error + 1e-12,
            });
        }
    }
    Ok(out)
}

fn pct(x: f64) -> String {
    format!("{:.2}%", 100.0 * x)
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map_or_else(|| "-".to_string(), f)
}

/// Rows are quantities and strategies, columns are designs.
pub fn render_pre(summary: &PreSummary) -> String {
    let designs = &summary.designs;
    let mut rows: Vec<(String, Vec<String>)> = Vec::new();
    let mut row = |label: &str, f: &dyn Fn(&DesignPre) -> String| {
        rows.push((label.to_string(), designs.iter().map(f).collect()));
    };
    row("R∅ baseline", &|d| format!("{:.3}", d.baseline));
    row("R_V^R benchmark", &|d| format!("{:.3}", d.benchmark));
    row("Δ value of information", &|d| format!("{:.3}", d.value_of_information));
    if designs.iter().any(|d| d.baseline_ratio.is_some()) {
        row("R∅ / R_V^R", &|d| opt(d.baseline_ratio, pct));
    }
    if designs.iter().any(|d| d.prior_event_probability.is_some()) {
        row("prior event probability", &|d| opt(d.prior_event_probability, |x| format!("{x:.4}")));
    }
    if designs.iter().any(|d| d.decision_threshold.is_some()) {
        row("decision threshold", &|d| opt(d.decision_threshold, |x| format!("{x:.4}")));
    }
    let mut names: Vec<String> = Vec::new();
    for d in designs {
        for s in &d.strategies {
            if !names.contains(&s.strategy) {
                names.push(s.strategy.clone());
            }
        }
    }
    let find = |d: &DesignPre, n: &str| d.strategies.iter().find(|s| s.strategy == n).cloned();
    for n in &names {
        row(&format!("R_V {n}"), &|d| opt(find(d, n), |s| format!("{:.3}", s.visualization_optimal)));
    }
    for n in &names {
        row(&format!("information loss {n}"), &|d| {
            opt(find(d, n).and_then(|s| s.information_loss), pct)
        });
    }
    if designs.iter().any(|d| d.incentive.is_some()) {
        let inc = |d: &DesignPre, f: fn(&IncentiveRow) -> String| opt(d.incentive.as_ref(), f);
        row("trials per participant", &|d| d.trials.to_string());
        row("f(R∅)", &|d| inc(d, |i| format_currency(i.baseline_payment)));
        row("f(R_V^R)", &|d| inc(d, |i| format_currency(i.informed_payment)));
        row("Δf", &|d| inc(d, |i| format_currency(i.incentive)));
        row("Δf / f(R∅)", &|d| inc(d, |i| pct(i.incentive_ratio)));
    }

    let mut out = String::new();
    let header: Vec<String> = designs.iter().map(|d| d.label.clone()).collect();
    write_table(&mut out, "", &header, &rows);

    let pins: Vec<(String, Vec<String>)> = designs
        .iter()
        .flat_map(|d| {
            d.pins.iter().map(move |p| {
                let status = match (p.reference_only, p.holds) {
                    (true, _) => "reference",
                    (false, Some(true)) => "ok",
                    (false, Some(false)) => "MISS",
                    (false, None) => "n/a",
                };
                (
                    format!("{} {}", d.label, p.quantity),
                    vec![
                        format!("{} ± {}", trim(p.expected), trim(p.tolerance)),
                        opt(p.actual, |a| format!("{a:.4}")),
                        status.to_string(),
                    ],
                )
            })
        })
        .collect();
    if !pins.is_empty() {
        out.push('\n');
        let h = ["expected".to_string(), "actual".to_string(), "status".to_string()];
        write_table(&mut out, "pinned value", &h, &pins);
    }
    let mc: Vec<(String, Vec<String>)> = designs
        .iter()
        .flat_map(|d| {
            d.monte_carlo.iter().map(move |c| {
                (
                    format!("{} {} {}", d.label, c.strategy, c.quantity),
                    vec![
                        format!("{:.4}", c.exact),
                        format!("{:.4}", c.estimate),
                        format!("{:.4}", c.std_error),
                        if c.within_three_se { "ok" } else { "MISS" }.to_string(),
                    ],
                )
            })
        })
        .collect();
    if !mc.is_empty() {
        out.push('\n');
        let h = ["exact", "estimate", "s.e.", "3 s.e."].map(String::from);
        write_table(&mut out, "Monte Carlo", &h, &mc);
    }
    out
}

fn trim(x: f64) -> String {
    let s = format!("{x:.6}");
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}

fn write_table(out: &mut String, corner: &str, header: &[String], rows: &[(String, Vec<String>)]) {
    let w0 = rows.iter().map(|r| r.0.chars().count()).chain([corner.chars().count()]).max().unwrap_or(0);
    let widths: Vec<usize> = (0..header.len())
        .map(|j| {
            rows.iter()
                .map(|r| r.1[j].chars().count())
                .chain([header[j].chars().count()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let pad = |s: &str, w: usize| format!("{}{}", " ".repeat(w - s.chars().count()), s);
    let left = |s: &str, w: usize| format!("{}{}", s, " ".repeat(w - s.chars().count()));
    let mut line = left(corner, w0);
    for (h, w) in header.iter().zip(&widths) {
        line.push_str("  ");
        line.push_str(&pad(h, *w));
    }
    let _ = writeln!(out, "{}", line.trim_end());
    let total = w0 + widths.iter().map(|w| w + 2).sum::<usize>();
    let _ = writeln!(out, "{}", "-".repeat(total));
    for (label, cells) in rows {
        let mut line = left(label, w0);
        for (c, w) in cells.iter().zip(&widths) {
            line.push_str("  ");
            line.push_str(&pad(c, *w));
        }
        let _ = writeln!(out, "{}", line.trim_end());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PostSummary {
    pub command: String,
    pub source: String,
    pub design: String,
    pub bin_width: f64,
    pub smoothing_alpha: f64,
    pub n_records: usize,
    pub tolerances: Tolerances,
    pub rows: Vec<LossReport>,
    pub warnings: Vec<String>,
}

/// Warnings for rows that fall below the baseline or outside [0, 1].
pub fn post_warnings(rows: &[LossReport]) -> Vec<String> {
    let mut out = Vec::new();
    for r in rows {
        if r.below_baseline {
            out.push(format!(
                "{}: behavioral score {:.4} is below the baseline {:.4}; cannot reject that the agents got no useful information",
                r.strategy, r.behavioral, r.baseline
            ));
        }
        if r.out_of_range {
            out.push(format!("{}: a loss ratio falls outside [0, 1]", r.strategy));
        }
    }
    out
}

pub fn render_post(summary: &PostSummary) -> String {
    let header = ["n", "B", "C", "R_V", "R∅", "BVoI", "belief loss", "opt. loss"].map(String::from);
    let rows: Vec<(String, Vec<String>)> = summary
        .rows
        .iter()
        .map(|r| {
            (
                r.strategy.clone(),
                vec![
                    r.n_trials.to_string(),
                    format!("{:.4}", r.behavioral),
                    format!("{:.4}", r.calibrated),
                    format!("{:.4}", r.visualization_optimal),
                    format!("{:.4}", r.baseline),
                    format!("{:.4}", r.behavioral_value_of_information),
                    opt(r.belief_loss, pct),
                    opt(r.optimization_loss, pct),
                ],
            )
        })
        .collect();
    let mut out = String::new();
    write_table(&mut out, "strategy", &header, &rows);
    for w in &summary.warnings {
        let _ = writeln!(out, "warning: {w}");
    }
    out
}

pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}
