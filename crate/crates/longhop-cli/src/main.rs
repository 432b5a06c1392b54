//! Command-line front end: analytic queries, Monte Carlo runs, experiment
//! sweeps over a line network, and analytic-vs-empirical comparisons.
//! All output is CSV with a fixed column order; every run logs its fully
//! resolved configuration to stderr so any row can be reproduced.
//!
//! Exit codes: 0 ok, 1 comparison failure, 2 usage error, 3 analytic
//! non-termination (with --fail-on-nonterminating).

mod gspec;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use longhop::analytics::{
    self, closed_form_multipass, closed_form_one_pass, Density, McFallback, QuadratureSpec,
};
use longhop::chainsim::{self, NodePlacement, RelayExperiment, RelayOptions};
use longhop::model::{scenario_positions, DecisionFunction, Scenario};
use longhop::montecarlo::{estimate_detailed, Mode, PlacementSource, SimConfig};
use longhop::radio::RadioConfig;

use gspec::GSpec;
use output::OutputTarget;

#[derive(Parser)]
#[command(
    name = "longhop",
    version,
    about = "Probabilistic long-hop routing: analytics, simulation, experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Print exact, quadrature, and closed-form expected-progress values.
    Analytic(AnalyticArgs),
    /// Run seeded Monte Carlo trials and emit one CSV aggregate row.
    Simulate(SimulateArgs),
    /// Sweep the (N, d, m) grid over a line network and emit one CSV row
    /// per combination.
    Experiment(ExperimentArgs),
    /// Run both the analytic value and a simulation and compare them.
    Compare(CompareArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    OnePass,
    MultiPass,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::OnePass => Mode::OnePass,
            ModeArg::MultiPass => Mode::MultiPass,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ScenarioArg {
    Uniform,
    Unfavourable,
    Favourable,
}

impl From<ScenarioArg> for Scenario {
    fn from(s: ScenarioArg) -> Scenario {
        match s {
            ScenarioArg::Uniform => Scenario::Uniform,
            ScenarioArg::Unfavourable => Scenario::Unfavourable,
            ScenarioArg::Favourable => Scenario::Favourable,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PositionsArg {
    RandomUniform,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlacementArg {
    Random,
    EquallySpaced,
}

impl From<PlacementArg> for NodePlacement {
    fn from(p: PlacementArg) -> NodePlacement {
        match p {
            PlacementArg::Random => NodePlacement::Random,
            PlacementArg::EquallySpaced => NodePlacement::EquallySpaced,
        }
    }
}

#[derive(Args)]
struct AnalyticArgs {
    /// one-pass or multi-pass election.
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Decision function: uniform | constant:P | power[:K] | linear[:D] |
    /// hybrid[:K[:P]]. Defaults parameterize by --n.
    #[arg(long)]
    g: String,
    /// Node count.
    #[arg(long)]
    n: usize,
    /// Evaluate on a fixed scenario placement.
    #[arg(long, value_enum, conflicts_with = "positions")]
    scenario: Option<ScenarioArg>,
    /// Evaluate for i.i.d. random positions (the default).
    #[arg(long, value_enum)]
    positions: Option<PositionsArg>,
    /// Absolute quadrature tolerance.
    #[arg(long, default_value_t = 1e-10)]
    quad_tol: f64,
    /// Write CSV here instead of stdout.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    /// Decision function (see `analytic --help`).
    #[arg(long)]
    g: String,
    /// Node count.
    #[arg(long)]
    n: usize,
    /// Redraw i.i.d. uniform positions each trial.
    #[arg(long, conflicts_with = "scenario")]
    random: bool,
    /// Use a fixed scenario placement every trial.
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    /// Line length for --random positions.
    #[arg(long, default_value_t = 1.0)]
    line_length: f64,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Multi-pass round cap per trial.
    #[arg(long, default_value_t = 10_000)]
    max_rounds: u32,
    /// Exit 3 if the election provably never terminates.
    #[arg(long)]
    fail_on_nonterminating: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Node counts, comma separated.
    #[arg(long, default_value = "20,200", value_delimiter = ',')]
    n_values: Vec<usize>,
    /// Line lengths in meters, comma separated.
    #[arg(
        long,
        default_value = "200,300,400,600,1000,2500,5000,7500",
        value_delimiter = ','
    )]
    d_values: Vec<f64>,
    /// Opaque sweep parameter, threaded verbatim into the CSV.
    #[arg(
        long,
        default_value = "-5,0,1,5",
        value_delimiter = ',',
        allow_hyphen_values = true
    )]
    m_values: Vec<String>,
    /// Nominal radio range in meters.
    #[arg(long, default_value_t = 130.0)]
    range: f64,
    /// Nominal transmit power in dBm.
    #[arg(long, default_value_t = -5.0, allow_hyphen_values = true)]
    tx_power: f64,
    /// Per-station power variation, as a fraction of linear power.
    #[arg(long, default_value_t = 0.1)]
    jitter: f64,
    #[arg(long, value_enum, default_value_t = ModeArg::OnePass)]
    algorithm: ModeArg,
    /// Decision-function family, parameterized by the estimated in-range
    /// count N/d·r per combination: uniform | power | hybrid | linear |
    /// constant:P.
    #[arg(long, default_value = "power")]
    g_family: String,
    #[arg(long, value_enum, default_value_t = PlacementArg::Random)]
    placement: PlacementArg,
    #[arg(long, default_value_t = 500)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Interpret each m value as the nominal transmit power in dBm.
    #[arg(long)]
    bind_m_to_tx: bool,
    /// Exclude hops originating in the last range-length of the line.
    #[arg(long)]
    exclude_edge: bool,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Args)]
struct CompareArgs {
    #[arg(long, value_enum)]
    mode: ModeArg,
    #[arg(long)]
    g: String,
    #[arg(long)]
    n: usize,
    #[arg(long, conflicts_with = "scenario")]
    random: bool,
    #[arg(long, value_enum)]
    scenario: Option<ScenarioArg>,
    #[arg(long, default_value_t = 100_000)]
    trials: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = 10_000)]
    max_rounds: u32,
    /// |empirical - analytic| / std_error above this fails the run.
    #[arg(long, default_value_t = 4.0)]
    threshold: f64,
    /// Compare against this value instead of the analytic one.
    #[arg(long, allow_hyphen_values = true)]
    expect: Option<f64>,
    #[arg(long)]
    out: Option<String>,
}

enum RunError {
    Usage(String),
    ComparisonFailed,
    NonTerminating(String),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for RunError {
    fn from(e: anyhow::Error) -> Self {
        RunError::Other(e)
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError::Other(e.into())
    }
}

fn usage(msg: impl Into<String>) -> RunError {
    RunError::Usage(msg.into())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analytic(args) => cmd_analytic(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Experiment(args) => cmd_experiment(args),
        Command::Compare(args) => cmd_compare(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(RunError::ComparisonFailed) => ExitCode::from(1),
        Err(RunError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(RunError::NonTerminating(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
        Err(RunError::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn cmd_analytic(args: AnalyticArgs) -> Result<(), RunError> {
    if args.n == 0 {
        return Err(usage("--n must be >= 1"));
    }
    let spec = GSpec::parse(&args.g).map_err(usage)?;
    let g = spec.resolve(args.n as f64).map_err(usage)?;
    let mode: Mode = args.mode.into();
    let quad = QuadratureSpec {
        abs_tolerance: args.quad_tol,
        ..QuadratureSpec::default()
    };
    let positions_label = match args.scenario {
        Some(s) => format!("scenario:{}", Scenario::from(s)),
        None => "random-uniform".to_string(),
    };
    eprintln!(
        "config: cmd=analytic mode={mode} g={g} n={} positions={positions_label} quad_tol={:e}",
        args.n, args.quad_tol
    );

    let mut out = OutputTarget::create(args.out.as_deref())?;
    out.line("mode,g,n,positions,method,value")?;

    match (mode, args.scenario) {
        (Mode::OnePass, Some(s)) => {
            let xs = scenario_positions(s.into(), args.n).map_err(|e| usage(e.to_string()))?;
            let value = analytics::expected_hop_one_pass_fixed(&g, &xs)
                .map_err(|e| usage(e.to_string()))?;
            analytic_row(&mut out, mode, &g, args.n, &positions_label, "exact", value)?;
        }
        (Mode::MultiPass, Some(s)) => {
            let xs = scenario_positions(s.into(), args.n).map_err(|e| usage(e.to_string()))?;
            let value = analytics::expected_hop_multipass_fixed(&g, &xs)
                .map_err(|e| usage(e.to_string()))?;
            analytic_row(&mut out, mode, &g, args.n, &positions_label, "exact", value)?;
        }
        (Mode::OnePass, None) => {
            let density = Density::uniform(1.0);
            let value = analytics::expected_hop_one_pass_random(&g, args.n, &density, &quad)
                .map_err(|e| usage(e.to_string()))?;
            analytic_row(
                &mut out,
                mode,
                &g,
                args.n,
                &positions_label,
                "quadrature",
                value,
            )?;
            if let Some(kind) = spec.one_pass_closed_form(args.n) {
                let closed = closed_form_one_pass(kind, args.n);
                analytic_row(
                    &mut out,
                    mode,
                    &g,
                    args.n,
                    &positions_label,
                    "closed-form",
                    closed,
                )?;
            }
        }
        (Mode::MultiPass, None) => {
            let density = Density::uniform(1.0);
            let est = analytics::expected_hop_multipass_random(
                &g,
                args.n,
                &density,
                &quad,
                &McFallback::default(),
            )
            .map_err(|e| usage(e.to_string()))?;
            let method = match est.std_error {
                None => "quadrature",
                Some(_) => "monte-carlo-fallback",
            };
            analytic_row(
                &mut out,
                mode,
                &g,
                args.n,
                &positions_label,
                method,
                est.value,
            )?;
            if let Some(kind) = spec.multi_pass_closed_form(args.n) {
                let closed = closed_form_multipass(kind, args.n);
                analytic_row(
                    &mut out,
                    mode,
                    &g,
                    args.n,
                    &positions_label,
                    "closed-form",
                    closed,
                )?;
            }
        }
    }
    out.finish()
}

#[allow(clippy::too_many_arguments)]
fn analytic_row(
    out: &mut OutputTarget,
    mode: Mode,
    g: &DecisionFunction,
    n: usize,
    positions: &str,
    method: &str,
    value: f64,
) -> Result<(), RunError> {
    out.line(&format!("{mode},{g},{n},{positions},{method},{value:.10}"))?;
    Ok(())
}

fn simulate_source(
    n: usize,
    scenario: Option<ScenarioArg>,
    line_length: f64,
) -> Result<PlacementSource, RunError> {
    match scenario {
        Some(s) => {
            let xs = scenario_positions(s.into(), n).map_err(|e| usage(e.to_string()))?;
            Ok(PlacementSource::Fixed(xs))
        }
        None => Ok(PlacementSource::RandomUniform { n, line_length }),
    }
}

/// Best-effort analytic non-termination check for a multi-pass run.
fn provably_nonterminating(g: &DecisionFunction, source: &PlacementSource) -> bool {
    match source {
        PlacementSource::Fixed(xs) => matches!(
            analytics::win_prob_multipass_fixed(g, xs),
            Err(analytics::AnalyticsError::NonTerminating)
        ),
        PlacementSource::RandomUniform { n, .. } => match g.as_constant() {
            Some(p) => p == 0.0 || (p == 1.0 && *n >= 2),
            None => false,
        },
    }
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), RunError> {
    if args.n == 0 {
        return Err(usage("--n must be >= 1"));
    }
    let spec = GSpec::parse(&args.g).map_err(usage)?;
    let g = spec.resolve(args.n as f64).map_err(usage)?;
    let mode: Mode = args.mode.into();
    let source = simulate_source(args.n, args.scenario, args.line_length)?;
    let cfg = SimConfig::with_max_rounds(args.trials, args.seed, args.max_rounds)
        .map_err(|e| usage(e.to_string()))?;
    eprintln!(
        "config: cmd=simulate mode={mode} g={g} n={} source={} line_length={} trials={} seed={} max_rounds={}",
        args.n,
        match &source {
            PlacementSource::Fixed(_) => "fixed-scenario",
            PlacementSource::RandomUniform { .. } => "random-uniform",
        },
        args.line_length,
        args.trials,
        args.seed,
        args.max_rounds
    );

    if args.fail_on_nonterminating
        && mode == Mode::MultiPass
        && provably_nonterminating(&g, &source)
    {
        return Err(RunError::NonTerminating(format!(
            "g={g} can never elect a unique transmitter on this placement"
        )));
    }

    let est = estimate_detailed(mode, &g, &source, &cfg).map_err(|e| usage(e.to_string()))?;
    let mut out = OutputTarget::create(args.out.as_deref())?;
    out.line("mode,g,n,trials,seed,mean_progress,std_error,mean_rounds,truncated_count")?;
    out.line(&format!(
        "{mode},{g},{},{},{},{:.10},{:.10},{:.6},{}",
        args.n,
        args.trials,
        args.seed,
        est.progress.mean,
        est.progress.std_error,
        est.mean_rounds,
        est.truncated_trials
    ))?;
    out.finish()
}

fn cmd_experiment(args: ExperimentArgs) -> Result<(), RunError> {
    if args.n_values.is_empty() || args.d_values.is_empty() || args.m_values.is_empty() {
        return Err(usage(
            "--n-values, --d-values, and --m-values must be nonempty",
        ));
    }
    if args.trials == 0 {
        return Err(usage("--trials must be >= 1"));
    }
    if !(args.range.is_finite() && args.range > 0.0) {
        return Err(usage("--range must be > 0"));
    }
    let mode: Mode = args.algorithm.into();
    let family = GSpec::parse(&args.g_family).map_err(usage)?;
    eprintln!(
        "config: cmd=experiment N={:?} d={:?} m={:?} r={} tx_power={} jitter={} algorithm={mode} \
         g_family={} placement={} trials={} seed={} bind_m_to_tx={} exclude_edge={}",
        args.n_values,
        args.d_values,
        args.m_values,
        args.range,
        args.tx_power,
        args.jitter,
        args.g_family,
        NodePlacement::from(args.placement),
        args.trials,
        args.seed,
        args.bind_m_to_tx,
        args.exclude_edge
    );

    let mut out = OutputTarget::create(args.out.as_deref())?;
    out.line("N,d,m,r,density_n,algorithm,g,placement,trials,mean_norm_dist,std_dev,hop_count")?;

    let mut combo_index = 0u64;
    for &n_nodes in &args.n_values {
        for &d in &args.d_values {
            for m in &args.m_values {
                let tx_power = if args.bind_m_to_tx {
                    m.parse::<f64>().map_err(|_| {
                        usage(format!(
                            "--bind-m-to-tx requires numeric m values, got {m:?}"
                        ))
                    })?
                } else {
                    args.tx_power
                };
                let radio = RadioConfig::indoor(tx_power, args.range, args.jitter)
                    .map_err(|e| usage(e.to_string()))?;
                let density = chainsim::expected_density(n_nodes, d, args.range);
                let g = family.resolve_clamped(density).map_err(usage)?;
                let experiment = RelayExperiment {
                    n_nodes,
                    line_length_m: d,
                    radio,
                    placement: args.placement.into(),
                    mode,
                    options: RelayOptions::default(),
                    trials: args.trials,
                    seed: args.seed,
                    stream_offset: combo_index << 32,
                };
                let stats = run_cell(&experiment, &g, args.exclude_edge)?;
                out.line(&format!(
                    "{n_nodes},{d},{m},{r},{density},{mode},{g},{placement},{trials},{mean},{std},{hops}",
                    r = args.range,
                    placement = NodePlacement::from(args.placement),
                    trials = args.trials,
                    mean = if stats.hop_count > 0 {
                        format!("{:.10}", stats.mean)
                    } else {
                        String::new()
                    },
                    std = match stats.std_dev {
                        Some(s) => format!("{s:.10}"),
                        None => String::new(),
                    },
                    hops = stats.hop_count
                ))?;
                combo_index += 1;
            }
        }
    }
    out.finish()
}

struct CellStats {
    mean: f64,
    std_dev: Option<f64>,
    hop_count: u64,
}

fn run_cell(
    experiment: &RelayExperiment,
    g: &DecisionFunction,
    exclude_edge: bool,
) -> Result<CellStats, RunError> {
    let cutoff =
        exclude_edge.then(|| experiment.line_length_m - experiment.radio.nominal_range_m());
    let stats = chainsim::run_relay_trials_filtered(experiment, g, cutoff)
        .map_err(|e| RunError::Other(anyhow::anyhow!("{e}")))?;
    Ok(CellStats {
        mean: stats.mean_normalized,
        std_dev: stats.std_dev,
        hop_count: stats.hop_count,
    })
}

fn cmd_compare(args: CompareArgs) -> Result<(), RunError> {
    if args.n == 0 {
        return Err(usage("--n must be >= 1"));
    }
    let spec = GSpec::parse(&args.g).map_err(usage)?;
    let g = spec.resolve(args.n as f64).map_err(usage)?;
    let mode: Mode = args.mode.into();
    let source = simulate_source(args.n, args.scenario, 1.0)?;
    eprintln!(
        "config: cmd=compare mode={mode} g={g} n={} source={} trials={} seed={} threshold={} expect={:?}",
        args.n,
        match &source {
            PlacementSource::Fixed(_) => "fixed-scenario",
            PlacementSource::RandomUniform { .. } => "random-uniform",
        },
        args.trials,
        args.seed,
        args.threshold,
        args.expect
    );

    let analytic = match args.expect {
        Some(v) => v,
        None => analytic_value(mode, &g, &source, args.n)?,
    };

    let cfg = SimConfig::with_max_rounds(args.trials, args.seed, args.max_rounds)
        .map_err(|e| usage(e.to_string()))?;
    let est = estimate_detailed(mode, &g, &source, &cfg).map_err(|e| usage(e.to_string()))?;
    let diff = (est.progress.mean - analytic).abs();
    let z = if est.progress.std_error > 0.0 {
        diff / est.progress.std_error
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY
    };
    let ok = z <= args.threshold;

    let mut out = OutputTarget::create(args.out.as_deref())?;
    out.line("mode,g,n,trials,seed,analytic,empirical,std_error,z,verdict")?;
    out.line(&format!(
        "{mode},{g},{},{},{},{analytic:.10},{:.10},{:.10},{z:.4},{}",
        args.n,
        args.trials,
        args.seed,
        est.progress.mean,
        est.progress.std_error,
        if ok { "ok" } else { "fail" }
    ))?;
    out.finish()?;
    if ok {
        Ok(())
    } else {
        Err(RunError::ComparisonFailed)
    }
}

fn analytic_value(
    mode: Mode,
    g: &DecisionFunction,
    source: &PlacementSource,
    n: usize,
) -> Result<f64, RunError> {
    let quad = QuadratureSpec::default();
    match (mode, source) {
        (Mode::OnePass, PlacementSource::Fixed(xs)) => {
            analytics::expected_hop_one_pass_fixed(g, xs).map_err(|e| usage(e.to_string()))
        }
        (Mode::OnePass, PlacementSource::RandomUniform { line_length, .. }) => {
            let density = Density::uniform(*line_length);
            analytics::expected_hop_one_pass_random(g, n, &density, &quad)
                .map_err(|e| usage(e.to_string()))
        }
        (Mode::MultiPass, PlacementSource::Fixed(xs)) => {
            analytics::expected_hop_multipass_fixed(g, xs).map_err(|e| {
                usage(format!(
                    "no terminating analytic value for this scenario: {e}"
                ))
            })
        }
        (Mode::MultiPass, PlacementSource::RandomUniform { line_length, .. }) => {
            let density = Density::uniform(*line_length);
            let est = analytics::expected_hop_multipass_random(
                g,
                n,
                &density,
                &quad,
                &McFallback::default(),
            )
            .map_err(|e| usage(format!("no analytic value: {e}")))?;
            match est.std_error {
                None => Ok(est.value),
                Some(_) => Err(usage(
                    "no exact analytic counterpart for this g with random positions; \
                     use --expect or a fixed --scenario",
                )),
            }
        }
    }
}
