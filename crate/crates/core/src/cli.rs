//! Command-line surface: `pre`, `post`, `simulate` and `export`.
//!
//! Exit codes: 0 success, 2 input error, 3 internal invariant violation.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::behavioral::{analyze_trials, PostOptions};
use crate::cases::fernandes::FernandesOptions;
use crate::cases::CaseName;
use crate::config::{resolve, CaseSpec, ConfigFile, DesignSource, LoadedDesign, RunOptions};
use crate::error::{Error, Result};
use crate::io::{read_trials_file, write_trials};
use crate::report::{post_warnings, pre_analysis, render_post, render_pre, to_json, PostSummary, PreSummary, Tolerances};
use crate::simulate::{simulate, AgentSpec, Allocation, SimulationConfig, TaskKind};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_INVARIANT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "rational-agent", version, about = "Rational-agent benchmarks and loss decomposition for decision experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Baseline, benchmark, value of information, information loss and incentives.
    Pre(PreArgs),
    /// Behavioral and calibrated scores with the belief/optimization loss split.
    Post(PostArgs),
    /// Trial records from a synthetic agent, as trial CSV.
    Simulate(SimulateArgs),
    /// Writes a design as a config file.
    Export(ExportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TextPartitions {
    /// Every trial is its own text class.
    Identity,
    /// Trials grouped by their rounded one-sided quantile.
    Example,
}

#[derive(Debug, Args)]
pub struct SourceArgs {
    /// Built-in case study: weather, kale2020, fernandes2018.
    #[arg(long, conflicts_with = "config")]
    pub case: Option<String>,
    /// JSON config file (schema_version 1).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Transit scenario (1, 2 or 3); all three when omitted.
    #[arg(long)]
    pub scenario: Option<u8>,
    /// Transit distribution CSV (trial_id,mu,sigma,nu,tau).
    #[arg(long)]
    pub dists: Option<PathBuf>,
    /// Text-display classes for the transit case.
    #[arg(long, value_enum)]
    pub text_partitions: Option<TextPartitions>,
    /// Arrival grid step in minutes; must divide 30.
    #[arg(long)]
    pub grid_step: Option<f64>,
}

#[derive(Debug, Args)]
pub struct PreArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Monte Carlo draws for a check against the exact values.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Path for the JSON summary.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PostArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// Trial CSV (trial_id,strategy,signal,state,response_kind,response).
    #[arg(long)]
    pub trials: PathBuf,
    /// Width of the probability-report bins.
    #[arg(long)]
    pub bin_width: Option<f64>,
    /// Additive smoothing for the empirical state conditionals.
    #[arg(long)]
    pub smoothing_alpha: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum TaskArg {
    Decision,
    Belief,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum AllocationArg {
    Iid,
    Balanced,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    /// rational, prior, random, noisy[:k=K], lapse:l=L:<agent>
    #[arg(long, default_value = "rational")]
    pub agent: String,
    #[arg(long, value_enum, default_value = "decision")]
    pub task: TaskArg,
    /// Strategy to simulate; every strategy when omitted.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Trials per strategy.
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "iid")]
    pub allocation: AllocationArg,
    /// Output CSV; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub source: SourceArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub const DEFAULT_SIMULATION_TRIALS: u64 = 1000;

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Invariant(_) => EXIT_INVARIANT,
        _ => EXIT_INPUT,
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if code == EXIT_OK { write!(stdout, "{text}") } else { write!(stderr, "{text}") };
            return code;
        }
    };
    match execute(cli.command, stdout) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            match &e {
                Error::Invalid(v) => v.iter().for_each(|m| {
                    let _ = writeln!(stderr, "  - {m}");
                }),
                Error::UnknownTrialValues { details, .. } => details.iter().for_each(|m| {
                    let _ = writeln!(stderr, "  - {m}");
                }),
                _ => {}
            }
            exit_code(&e)
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<()> {
    match command {
        Command::Pre(a) => cmd_pre(a, stdout),
        Command::Post(a) => cmd_post(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::Export(a) => cmd_export(a, stdout),
    }
}

struct Source {
    label: String,
    source: DesignSource,
    options: RunOptions,
}

fn load_source(args: &SourceArgs) -> Result<Source> {
    let cli_opts = RunOptions { grid_step: args.grid_step, ..Default::default() };
    let (label, mut source, file_opts) = match (&args.case, &args.config) {
        (Some(name), None) => {
            let spec = match name.parse::<CaseName>()? {
                CaseName::Weather => CaseSpec::Weather,
                CaseName::Kale2020 => CaseSpec::Kale2020 { levels: None },
                CaseName::Fernandes2018 => CaseSpec::Fernandes2018 {
                    scenario: None,
                    distributions: args.dists.clone().ok_or_else(|| {
                        Error::InvalidParameter("fernandes2018 needs a distribution file (--dists)".into())
                    })?,
                    options: FernandesOptions::default(),
                },
            };
            (name.clone(), DesignSource::Case(spec), RunOptions::default())
        }
        (None, Some(path)) => {
            let cfg = ConfigFile::load(path)?;
            let opts = cfg.options.clone();
            (path.display().to_string(), DesignSource::from_config(cfg)?, opts)
        }
        _ => {
            return Err(Error::InvalidParameter("give exactly one of --case or --config".into()));
        }
    };
    if let DesignSource::Case(CaseSpec::Fernandes2018 { scenario, distributions, options }) = &mut source {
        if args.scenario.is_some() {
            *scenario = args.scenario;
        }
        if let Some(d) = &args.dists {
            *distributions = d.clone();
        }
        match args.text_partitions {
            Some(TextPartitions::Example) => *options = options.clone().with_example_partitions(),
            Some(TextPartitions::Identity) => *options = FernandesOptions { text_partitions: FernandesOptions::default().text_partitions, ..options.clone() },
            None => {}
        }
    } else if args.scenario.is_some() || args.dists.is_some() || args.text_partitions.is_some() {
        return Err(Error::InvalidParameter(
            "--scenario, --dists and --text-partitions apply to fernandes2018 only".into(),
        ));
    }
    Ok(Source { label, source, options: file_opts.overlay(&cli_opts) })
}

fn single(designs: Vec<LoadedDesign>) -> Result<LoadedDesign> {
    let n = designs.len();
    let mut it = designs.into_iter();
    match (it.next(), n) {
        (Some(d), 1) => Ok(d),
        _ => Err(Error::InvalidParameter(format!(
            "source describes {n} designs; pick one (e.g. --scenario)"
        ))),
    }
}

fn write_out(path: Option<&Path>, text: &str) -> Result<()> {
    if let Some(p) = path {
        fs::write(p, text)?;
    }
    Ok(())
}

fn cmd_pre(a: PreArgs, stdout: &mut dyn Write) -> Result<()> {
    let src = load_source(&a.source)?;
    let opts = src.options.overlay(&RunOptions { n: a.n, seed: a.seed, out: a.out, ..Default::default() });
    let designs = resolve(&src.source, &opts)?;
    let mc = opts.n.map(|n| (n, opts.seed.unwrap_or(0)));
    let summary = PreSummary {
        command: "pre".into(),
        source: src.label,
        tolerances: Tolerances::default(),
        designs: designs.iter().map(|d| pre_analysis(d, mc)).collect::<Result<_>>()?,
    };
    write!(stdout, "{}", render_pre(&summary))?;
    write_out(opts.out.as_deref(), &to_json(&summary)?)
}

fn cmd_post(a: PostArgs, stdout: &mut dyn Write) -> Result<()> {
    let src = load_source(&a.source)?;
    let opts = src.options.overlay(&RunOptions {
        bin_width: a.bin_width,
        smoothing_alpha: a.smoothing_alpha,
        out: a.out,
        ..Default::default()
    });
    let loaded = single(resolve(&src.source, &opts)?)?;
    let records = read_trials_file(&a.trials)?;
    let post = PostOptions { bin_width: opts.bin_width(), smoothing_alpha: opts.smoothing_alpha() };
    let rows = analyze_trials(&loaded.design, &records, post)?;
    if post.smoothing_alpha == 0.0 {
        for r in &rows {
            if let Some(c) = calibrated_below_behavioral(r) {
                return Err(Error::Invariant(c));
            }
        }
    }
    let summary = PostSummary {
        command: "post".into(),
        source: src.label,
        design: loaded.design.name.clone(),
        bin_width: post.bin_width,
        smoothing_alpha: post.smoothing_alpha,
        n_records: records.len(),
        tolerances: Tolerances::default(),
        warnings: post_warnings(&rows),
        rows,
    };
    write!(stdout, "{}", render_post(&summary))?;
    write_out(opts.out.as_deref(), &to_json(&summary)?)
}

/// Without smoothing each calibrated action is optimal for its own
/// conditional, so C cannot fall below B.
fn calibrated_below_behavioral(r: &crate::behavioral::LossReport) -> Option<String> {
    (r.calibrated < r.behavioral - 1e-9)
        .then(|| format!("{}: calibrated score below behavioral score", r.strategy))
}

fn cmd_simulate(a: SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let src = load_source(&a.source)?;
    let opts = src.options.overlay(&RunOptions { n: a.n, seed: a.seed, out: a.out, ..Default::default() });
    let loaded = single(resolve(&src.source, &opts)?)?;
    let agent: AgentSpec = a.agent.parse()?;
    let design = &loaded.design;
    let names: Vec<String> = match &a.strategy {
        Some(s) => vec![design.strategy(s)?.name.clone()],
        None => design.strategies.iter().map(|s| s.name.clone()).collect(),
    };
    let seed = opts.seed.unwrap_or(0);
    let mut records = Vec::new();
    for (k, name) in names.iter().enumerate() {
        let cfg = SimulationConfig {
            agent: agent.clone(),
            task: match a.task {
                TaskArg::Decision => TaskKind::Decision,
                TaskArg::Belief => TaskKind::BeliefReport,
            },
            n_trials: opts.n.unwrap_or(DEFAULT_SIMULATION_TRIALS),
            seed: seed.wrapping_add(k as u64),
            allocation: match a.allocation {
                AllocationArg::Iid => Allocation::Iid,
                AllocationArg::Balanced => Allocation::BalancedBlocks,
            },
        };
        let mut recs = simulate(design, name, &cfg)?;
        if names.len() > 1 {
            for r in &mut recs {
                r.trial_id = format!("{name}-{}", r.trial_id);
            }
        }
        records.extend(recs);
    }
    match &opts.out {
        Some(p) => write_trials(fs::File::create(p)?, &records),
        None => write_trials(stdout, &records),
    }
}

fn cmd_export(a: ExportArgs, stdout: &mut dyn Write) -> Result<()> {
    let src = load_source(&a.source)?;
    let loaded = single(resolve(&src.source, &src.options)?)?;
    let text = ConfigFile::from_design(loaded.design).to_json()?;
    match &a.out {
        Some(p) => Ok(fs::write(p, text)?),
        None => Ok(write!(stdout, "{text}")?),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let mut full = vec!["rational-agent"];
        full.extend_from_slice(args);
        let code = run(full, &mut out, &mut err);
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn pre_weather() {
        let (code, out, _) = run_args(&["pre", "--case", "weather"]);
        assert_eq!(code, 0);
        assert!(out.contains("-7.960") && out.contains("-5.689") && out.contains("2.271"));
    }

    #[test]
    fn input_errors_exit_two() {
        assert_eq!(run_args(&["pre", "--case", "moon"]).0, 2);
        assert_eq!(run_args(&["pre"]).0, 2);
        assert_eq!(run_args(&["pre", "--case", "fernandes2018"]).0, 2);
        assert_eq!(run_args(&["pre", "--case", "weather", "--scenario", "1"]).0, 2);
        assert_eq!(run_args(&["simulate", "--case", "weather", "--agent", "genius"]).0, 2);
        assert_eq!(run_args(&["bogus"]).0, 2);
        assert_eq!(run_args(&["--help"]).0, 0);
    }

    #[test]
    fn simulate_to_stdout_is_deterministic() {
        let a = run_args(&["simulate", "--case", "weather", "--strategy", "ci", "--n", "50", "--seed", "3"]);
        let b = run_args(&["simulate", "--case", "weather", "--strategy", "ci", "--n", "50", "--seed", "3"]);
        assert_eq!(a.0, 0);
        assert_eq!(a.1, b.1);
        assert_eq!(a.1.lines().count(), 51);
    }
}
