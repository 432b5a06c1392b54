//! Seeded slot-level simulation of the one-pass and multi-pass elections,
//! with deterministic parallel trial aggregation.
//!
//! Every trial draws from its own ChaCha substream keyed by (seed, trial
//! index), and batches are reduced in a fixed order, so results are
//! bit-identical regardless of how the work is scheduled.

use std::fmt;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::model::{DecisionFunction, HopResult, Placement, SlotOutcome};
use crate::numeric::{KahanSum, Moments};

#[derive(Debug, Error, PartialEq)]
pub enum McError {
    #[error("placement must contain at least one node")]
    EmptyPlacement,
    #[error("trial count must be >= 1")]
    InvalidTrials,
    #[error("max rounds must be >= 1")]
    InvalidMaxRounds,
    #[error("line length must be finite and > 0, got {0}")]
    InvalidLineLength(f64),
}

/// Which election a simulation runs per hop.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    /// A single contention slot; no winner means no progress.
    OnePass,
    /// Contention repeats round after round until a unique winner emerges
    /// or the round cap is hit.
    MultiPass,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::OnePass => "one-pass",
            Mode::MultiPass => "multi-pass",
        })
    }
}

/// Trial count, master seed, and the multi-pass round cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub max_rounds: u32,
}

pub const DEFAULT_MAX_ROUNDS: u32 = 10_000;

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Result<Self, McError> {
        Self::with_max_rounds(trials, seed, DEFAULT_MAX_ROUNDS)
    }

    pub fn with_max_rounds(trials: u64, seed: u64, max_rounds: u32) -> Result<Self, McError> {
        if trials == 0 {
            return Err(McError::InvalidTrials);
        }
        if max_rounds == 0 {
            return Err(McError::InvalidMaxRounds);
        }
        Ok(Self {
            trials,
            seed,
            max_rounds,
        })
    }
}

/// A Monte Carlo mean with its standard error (sample std dev / sqrt(n)).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub mean: f64,
    pub std_error: f64,
    pub trials: u64,
}

/// Where trial placements come from.
#[derive(Debug, Clone)]
pub enum PlacementSource {
    /// The same placement every trial.
    Fixed(Placement),
    /// `n` i.i.d. uniform positions on [0, line_length], redrawn per trial.
    RandomUniform { n: usize, line_length: f64 },
}

impl PlacementSource {
    pub fn node_count(&self) -> usize {
        match self {
            PlacementSource::Fixed(p) => p.len(),
            PlacementSource::RandomUniform { n, .. } => *n,
        }
    }

    fn validate(&self) -> Result<(), McError> {
        match self {
            PlacementSource::Fixed(p) if p.is_empty() => Err(McError::EmptyPlacement),
            PlacementSource::RandomUniform { n: 0, .. } => Err(McError::EmptyPlacement),
            PlacementSource::RandomUniform { line_length, .. }
                if !(line_length.is_finite() && *line_length > 0.0) =>
            {
                Err(McError::InvalidLineLength(*line_length))
            }
            _ => Ok(()),
        }
    }
}

/// The RNG for one trial: substream `trial` of the master seed.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn slot_on_normalized<R: Rng>(
    g: &DecisionFunction,
    round: u32,
    normalized: &[f64],
    rng: &mut R,
) -> SlotOutcome {
    let mut transmitters = 0usize;
    let mut winner = 0usize;
    for (i, &x) in normalized.iter().enumerate() {
        let p = g.eval(round, x);
        if rng.gen::<f64>() < p {
            transmitters += 1;
            winner = i;
        }
    }
    match transmitters {
        0 => SlotOutcome::Silence,
        1 => SlotOutcome::Winner(winner),
        k => SlotOutcome::Collision(k),
    }
}

/// One contention slot at round `round`: each node transmits independently
/// with probability g^round(x_i / L).
pub fn simulate_slot<R: Rng>(
    g: &DecisionFunction,
    xs: &Placement,
    round: u32,
    rng: &mut R,
) -> Result<SlotOutcome, McError> {
    if xs.is_empty() {
        return Err(McError::EmptyPlacement);
    }
    Ok(slot_on_normalized(g, round, &xs.normalized(), rng))
}

/// One-pass routing: a single slot at round 0. Progress is the winner's
/// raw position, or 0 when the slot is silent or collides.
pub fn simulate_one_pass<R: Rng>(
    g: &DecisionFunction,
    xs: &Placement,
    rng: &mut R,
) -> Result<HopResult, McError> {
    let outcome = simulate_slot(g, xs, 0, rng)?;
    Ok(HopResult {
        outcome,
        progress: outcome.winner().map_or(0.0, |i| xs.positions()[i]),
        rounds_used: 1,
        truncated: false,
    })
}

/// Multi-pass routing: slots at rounds 0, 1, 2, … until a unique winner
/// emerges or `max_rounds` slots have been spent. A capped run reports
/// `Silence`, zero progress, and `truncated = true`.
pub fn simulate_multi_pass<R: Rng>(
    g: &DecisionFunction,
    xs: &Placement,
    rng: &mut R,
    max_rounds: u32,
) -> Result<HopResult, McError> {
    if xs.is_empty() {
        return Err(McError::EmptyPlacement);
    }
    if max_rounds == 0 {
        return Err(McError::InvalidMaxRounds);
    }
    let normalized = xs.normalized();
    for round in 0..max_rounds {
        let outcome = slot_on_normalized(g, round, &normalized, rng);
        if let SlotOutcome::Winner(i) = outcome {
            return Ok(HopResult {
                outcome,
                progress: xs.positions()[i],
                rounds_used: round + 1,
                truncated: false,
            });
        }
    }
    Ok(HopResult {
        outcome: SlotOutcome::Silence,
        progress: 0.0,
        rounds_used: max_rounds,
        truncated: true,
    })
}

/// `n` i.i.d. uniform positions on [0, line_length].
pub fn sample_positions<R: Rng>(
    n: usize,
    line_length: f64,
    rng: &mut R,
) -> Result<Placement, McError> {
    if !(line_length.is_finite() && line_length > 0.0) {
        return Err(McError::InvalidLineLength(line_length));
    }
    let positions = (0..n).map(|_| rng.gen_range(0.0..line_length)).collect();
    Placement::new(positions, line_length).map_err(|_| McError::InvalidLineLength(line_length))
}

/// Full trial aggregate: mean progress with standard error, the mean round
/// count over non-truncated trials (NaN when every trial truncated), and
/// how many trials truncated or produced a winner. Truncated trials count
/// as zero progress but are excluded from the round average.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopEstimate {
    pub progress: EstimateWithError,
    pub mean_rounds: f64,
    pub truncated_trials: u64,
    pub winner_trials: u64,
}

const TRIAL_BATCH: u64 = 4096;

pub(crate) fn run_batched<A, F>(trials: u64, make_batch: F) -> Vec<A>
where
    A: Send,
    F: Fn(std::ops::Range<u64>) -> A + Sync,
{
    let n_batches = trials.div_ceil(TRIAL_BATCH);
    (0..n_batches)
        .into_par_iter()
        .map(|b| {
            let lo = b * TRIAL_BATCH;
            let hi = ((b + 1) * TRIAL_BATCH).min(trials);
            make_batch(lo..hi)
        })
        .collect()
}

fn run_trial<R: Rng>(
    mode: Mode,
    g: &DecisionFunction,
    source: &PlacementSource,
    max_rounds: u32,
    rng: &mut R,
) -> HopResult {
    let placement;
    let xs = match source {
        PlacementSource::Fixed(p) => p,
        PlacementSource::RandomUniform { n, line_length } => {
            placement = sample_positions(*n, *line_length, rng)
                .expect("source was validated before running trials");
            &placement
        }
    };
    match mode {
        Mode::OnePass => simulate_one_pass(g, xs, rng),
        Mode::MultiPass => simulate_multi_pass(g, xs, rng, max_rounds),
    }
    .expect("source was validated before running trials")
}

/// Runs `cfg.trials` independent trials and aggregates hop progress.
/// Deterministic in (seed, parameters) regardless of thread scheduling.
pub fn estimate_detailed(
    mode: Mode,
    g: &DecisionFunction,
    source: &PlacementSource,
    cfg: &SimConfig,
) -> Result<HopEstimate, McError> {
    source.validate()?;
    if cfg.trials == 0 {
        return Err(McError::InvalidTrials);
    }
    if cfg.max_rounds == 0 {
        return Err(McError::InvalidMaxRounds);
    }

    #[derive(Default)]
    struct Batch {
        progress: Moments,
        rounds: KahanSum,
        rounds_count: u64,
        truncated: u64,
        winners: u64,
    }

    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let batches = run_batched(cfg.trials, |range| {
        let mut acc = Batch::default();
        for trial in range {
            let mut rng = base.clone();
            rng.set_stream(trial);
            let hop = run_trial(mode, g, source, cfg.max_rounds, &mut rng);
            acc.progress.push(hop.progress);
            if hop.truncated {
                acc.truncated += 1;
            } else {
                acc.rounds.add(hop.rounds_used as f64);
                acc.rounds_count += 1;
            }
            if hop.outcome.is_winner() {
                acc.winners += 1;
            }
        }
        acc
    });

    let mut progress = Moments::new();
    let mut rounds = KahanSum::new();
    let mut rounds_count = 0u64;
    let mut truncated = 0u64;
    let mut winners = 0u64;
    for b in batches {
        progress.merge(b.progress);
        rounds.add(b.rounds.value());
        rounds_count += b.rounds_count;
        truncated += b.truncated;
        winners += b.winners;
    }

    Ok(HopEstimate {
        progress: EstimateWithError {
            mean: progress.mean(),
            std_error: progress.std_error(),
            trials: cfg.trials,
        },
        mean_rounds: if rounds_count > 0 {
            rounds.value() / rounds_count as f64
        } else {
            f64::NAN
        },
        truncated_trials: truncated,
        winner_trials: winners,
    })
}

/// Mean hop progress with standard error over `cfg.trials` trials,
/// re-sampling positions each trial for random sources.
pub fn estimate_expected_hop(
    mode: Mode,
    g: &DecisionFunction,
    source: &PlacementSource,
    cfg: &SimConfig,
) -> Result<EstimateWithError, McError> {
    Ok(estimate_detailed(mode, g, source, cfg)?.progress)
}

/// Per-node winner counts plus the number of trials with no winner.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinnerHistogram {
    pub counts: Vec<u64>,
    pub no_winner: u64,
    pub trials: u64,
}

/// Empirical winner distribution over `cfg.trials` trials.
pub fn winner_histogram(
    mode: Mode,
    g: &DecisionFunction,
    source: &PlacementSource,
    cfg: &SimConfig,
) -> Result<WinnerHistogram, McError> {
    source.validate()?;
    let n = source.node_count();

    let base = ChaCha8Rng::seed_from_u64(cfg.seed);
    let batches = run_batched(cfg.trials, |range| {
        let mut counts = vec![0u64; n];
        let mut no_winner = 0u64;
        for trial in range {
            let mut rng = base.clone();
            rng.set_stream(trial);
            let hop = run_trial(mode, g, source, cfg.max_rounds, &mut rng);
            match hop.outcome.winner() {
                Some(i) => counts[i] += 1,
                None => no_winner += 1,
            }
        }
        (counts, no_winner)
    });

    let mut counts = vec![0u64; n];
    let mut no_winner = 0u64;
    for (c, nw) in batches {
        for (total, add) in counts.iter_mut().zip(c) {
            *total += add;
        }
        no_winner += nw;
    }
    Ok(WinnerHistogram {
        counts,
        no_winner,
        trials: cfg.trials,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analytics::{win_prob_multipass_stationary, win_prob_one_pass_fixed};
    use crate::model::scenario_positions;
    use crate::model::Scenario;

    fn constant(p: f64) -> DecisionFunction {
        DecisionFunction::constant(p).unwrap()
    }

    #[test]
    fn certain_single_node_wins() {
        let xs = Placement::unit(vec![0.4]).unwrap();
        let mut rng = trial_rng(1, 0);
        assert_eq!(
            simulate_slot(&constant(1.0), &xs, 0, &mut rng).unwrap(),
            SlotOutcome::Winner(0)
        );
    }

    #[test]
    fn three_certain_nodes_always_collide() {
        let xs = Placement::unit(vec![0.2, 0.5, 0.8]).unwrap();
        let mut rng = trial_rng(7, 0);
        for round in 0..50 {
            assert_eq!(
                simulate_slot(&constant(1.0), &xs, round, &mut rng).unwrap(),
                SlotOutcome::Collision(3)
            );
        }
    }

    #[test]
    fn silent_one_pass_makes_no_progress() {
        let xs = Placement::unit(vec![0.3, 0.6]).unwrap();
        let mut rng = trial_rng(3, 0);
        let hop = simulate_one_pass(&constant(0.0), &xs, &mut rng).unwrap();
        assert_eq!(hop.outcome, SlotOutcome::Silence);
        assert_eq!(hop.progress, 0.0);
        assert_eq!(hop.rounds_used, 1);
    }

    #[test]
    fn empty_placement_rejected() {
        let xs = Placement::unit(vec![]).unwrap();
        let mut rng = trial_rng(0, 0);
        assert_eq!(
            simulate_slot(&constant(0.5), &xs, 0, &mut rng),
            Err(McError::EmptyPlacement)
        );
    }

    #[test]
    fn permanent_collision_truncates() {
        let xs = Placement::unit(vec![0.2, 0.8]).unwrap();
        let mut rng = trial_rng(11, 0);
        let hop = simulate_multi_pass(&constant(1.0), &xs, &mut rng, 100).unwrap();
        assert!(hop.truncated);
        assert_eq!(hop.progress, 0.0);
        assert_eq!(hop.rounds_used, 100);
        assert_eq!(hop.outcome, SlotOutcome::Silence);
    }

    #[test]
    fn two_node_winner_rate_matches_enumeration() {
        // P[exactly one of two transmits at p = 1/2] = 1/2.
        let xs = Placement::unit(vec![0.3, 0.7]).unwrap();
        let source = PlacementSource::Fixed(xs);
        let cfg = SimConfig::new(100_000, 424242).unwrap();
        let hist = winner_histogram(Mode::OnePass, &constant(0.5), &source, &cfg).unwrap();
        let wins = (hist.counts[0] + hist.counts[1]) as f64;
        let rate = wins / cfg.trials as f64;
        let sigma = (0.5 * 0.5 / cfg.trials as f64).sqrt();
        assert!((rate - 0.5).abs() < 4.0 * sigma, "rate {rate}");
    }

    #[test]
    fn sample_positions_edge_cases() {
        let mut rng = trial_rng(5, 0);
        let empty = sample_positions(0, 1.0, &mut rng).unwrap();
        assert!(empty.is_empty());
        assert!(sample_positions(3, 0.0, &mut rng).is_err());
    }

    #[test]
    fn sample_positions_mean_and_ks() {
        let n = 100_000usize;
        let l = 2.0;
        let mut rng = trial_rng(99, 0);
        let placement = sample_positions(n, l, &mut rng).unwrap();
        let mean: f64 = placement.positions().iter().sum::<f64>() / n as f64;
        // Var of U(0,2) is 1/3; 3 sigma of the sample mean.
        let sigma = (1.0 / 3.0f64 / n as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * sigma);

        let mut sorted = placement.positions().to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut d: f64 = 0.0;
        for (i, &x) in sorted.iter().enumerate() {
            let cdf = x / l;
            d = d.max((cdf - i as f64 / n as f64).abs());
            d = d.max(((i + 1) as f64 / n as f64 - cdf).abs());
        }
        // 1% critical value for the KS statistic, large-n approximation.
        let critical = 1.62762 / (n as f64).sqrt();
        assert!(d < critical, "KS distance {d} vs {critical}");
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let source = PlacementSource::RandomUniform {
            n: 6,
            line_length: 1.0,
        };
        let g = DecisionFunction::power_law(5.0).unwrap();
        let cfg = SimConfig::new(20_000, 77).unwrap();
        let a = estimate_detailed(Mode::MultiPass, &g, &source, &cfg).unwrap();
        let b = estimate_detailed(Mode::MultiPass, &g, &source, &cfg).unwrap();
        assert_eq!(a, b);
        let other = SimConfig::new(20_000, 78).unwrap();
        let c = estimate_detailed(Mode::MultiPass, &g, &source, &other).unwrap();
        assert_ne!(a.progress.mean, c.progress.mean);
    }

    #[test]
    fn one_pass_frequencies_match_analytics() {
        let xs = scenario_positions(Scenario::Uniform, 6).unwrap();
        let g = DecisionFunction::power_law(4.0).unwrap();
        let expected = win_prob_one_pass_fixed(&g, &xs).unwrap();
        let cfg = SimConfig::new(100_000, 2024).unwrap();
        let hist = winner_histogram(Mode::OnePass, &g, &PlacementSource::Fixed(xs), &cfg).unwrap();
        for (i, &p) in expected.probabilities().iter().enumerate() {
            let freq = hist.counts[i] as f64 / cfg.trials as f64;
            let sigma = (p * (1.0 - p) / cfg.trials as f64).sqrt();
            assert!((freq - p).abs() <= 4.0 * sigma, "node {i}: {freq} vs {p}");
        }
    }

    #[test]
    fn multi_pass_frequencies_match_stationary() {
        let xs = scenario_positions(Scenario::Uniform, 5).unwrap();
        let g = DecisionFunction::power_law(3.0).unwrap();
        let expected = win_prob_multipass_stationary(&g, &xs).unwrap();
        let cfg = SimConfig::new(100_000, 31337).unwrap();
        let hist =
            winner_histogram(Mode::MultiPass, &g, &PlacementSource::Fixed(xs), &cfg).unwrap();
        assert_eq!(hist.no_winner, 0);
        for (i, &p) in expected.probabilities().iter().enumerate() {
            let freq = hist.counts[i] as f64 / cfg.trials as f64;
            let sigma = (p * (1.0 - p) / cfg.trials as f64).sqrt();
            assert!((freq - p).abs() <= 4.0 * sigma, "node {i}: {freq} vs {p}");
        }
    }

    #[test]
    fn mean_rounds_is_geometric() {
        // Constant(p): success per round q = n p (1-p)^(n-1), rounds are
        // geometric with mean 1/q.
        let p = 0.2;
        let n = 5usize;
        let xs = scenario_positions(Scenario::Uniform, n).unwrap();
        let cfg = SimConfig::new(100_000, 555).unwrap();
        let est = estimate_detailed(
            Mode::MultiPass,
            &constant(p),
            &PlacementSource::Fixed(xs),
            &cfg,
        )
        .unwrap();
        let q = n as f64 * p * (1.0 - p).powi(n as i32 - 1);
        let se = ((1.0 - q) / (q * q) / cfg.trials as f64).sqrt();
        assert!(
            (est.mean_rounds - 1.0 / q).abs() <= 4.0 * se,
            "mean rounds {} vs {}",
            est.mean_rounds,
            1.0 / q
        );
        assert_eq!(est.truncated_trials, 0);
    }
}
