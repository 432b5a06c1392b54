//! Multi-hop relay over a line network: stations with individually
//! perturbed transmit powers pass a message hop by hop, each hop electing
//! the next relay among the in-range receivers ahead of the sender. The
//! measured quantity is per-hop distance normalized by the nominal radio
//! range; under power variation it can exceed 1.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{DecisionFunction, Placement};
use crate::montecarlo::{self, Mode};
use crate::numeric::Moments;
use crate::radio::{RadioConfig, RadioError};

#[derive(Debug, Error, PartialEq)]
pub enum ChainError {
    #[error("network must contain at least one node")]
    InvalidNodeCount,
    #[error("line length must be finite and > 0, got {0}")]
    InvalidLineLength(f64),
    #[error("start index {index} out of range for {nodes} nodes")]
    InvalidStartIndex { index: usize, nodes: usize },
    #[error("no hops to aggregate")]
    NoHops,
    #[error("trial count must be >= 1")]
    InvalidTrials,
    #[error(transparent)]
    Radio(#[from] RadioError),
}

/// How node positions are laid out along the line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodePlacement {
    /// i.i.d. uniform positions.
    Random,
    /// x_i = i·d/(N+1) for i = 1..=N.
    EquallySpaced,
}

impl std::fmt::Display for NodePlacement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            NodePlacement::Random => "random",
            NodePlacement::EquallySpaced => "equally-spaced",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineNode {
    pub position_m: f64,
    pub tx_power_dbm: f64,
}

/// N stations on a d-long line with per-station transmit powers and a
/// shared radio configuration. Nodes are stored sorted by position.
#[derive(Debug, Clone)]
pub struct LineNetwork {
    nodes: Vec<LineNode>,
    line_length_m: f64,
    radio: RadioConfig,
    nominal_range_m: f64,
}

impl LineNetwork {
    pub fn nodes(&self) -> &[LineNode] {
        &self.nodes
    }

    pub fn line_length_m(&self) -> f64 {
        self.line_length_m
    }

    pub fn radio(&self) -> &RadioConfig {
        &self.radio
    }

    pub fn nominal_range_m(&self) -> f64 {
        self.nominal_range_m
    }

    /// The expected number of in-range stations ahead of a mid-line
    /// sender: N/d · r.
    pub fn expected_density(&self) -> f64 {
        expected_density(self.nodes.len(), self.line_length_m, self.nominal_range_m)
    }
}

/// N/d · r: nodes per meter times the nominal range.
pub fn expected_density(n_nodes: usize, line_length_m: f64, range_m: f64) -> f64 {
    n_nodes as f64 / line_length_m * range_m
}

/// Builds the network: positions per the placement kind, each node's
/// transmit power drawn once via the radio's power jitter.
pub fn build_line_network<R: Rng>(
    n_nodes: usize,
    line_length_m: f64,
    radio: RadioConfig,
    placement: NodePlacement,
    rng: &mut R,
) -> Result<LineNetwork, ChainError> {
    if n_nodes == 0 {
        return Err(ChainError::InvalidNodeCount);
    }
    if !(line_length_m.is_finite() && line_length_m > 0.0) {
        return Err(ChainError::InvalidLineLength(line_length_m));
    }
    let positions: Vec<f64> = match placement {
        NodePlacement::Random => (0..n_nodes)
            .map(|_| rng.gen_range(0.0..line_length_m))
            .collect(),
        NodePlacement::EquallySpaced => (1..=n_nodes)
            .map(|i| i as f64 * line_length_m / (n_nodes + 1) as f64)
            .collect(),
    };
    let mut nodes: Vec<LineNode> = positions
        .into_iter()
        .map(|position_m| LineNode {
            position_m,
            tx_power_dbm: radio.perturb_tx_power_dbm(rng),
        })
        .collect();
    nodes.sort_by(|a, b| a.position_m.partial_cmp(&b.position_m).unwrap());
    let nominal_range_m = radio.nominal_range_m();
    Ok(LineNetwork {
        nodes,
        line_length_m,
        radio,
        nominal_range_m,
    })
}

/// One recorded hop: who sent, who won, and the true distance covered,
/// both raw and normalized by the nominal range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayHop {
    pub sender_index: usize,
    pub winner_index: usize,
    pub sender_pos_m: f64,
    pub raw_distance_m: f64,
    pub normalized_distance: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    /// The message reached the node with the largest position.
    ReachedEnd,
    /// No receivers in range, or a one-pass slot without a unique winner.
    Died,
    /// A round or hop cap was hit.
    TruncatedRounds,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelayTrace {
    pub hops: Vec<RelayHop>,
    pub terminated: TerminationReason,
}

/// Relay knobs. `max_hops = None` means 10·d/r, rounded up. By default
/// only nodes strictly ahead of the sender contend (progress toward the
/// line's end); `bidirectional` lifts that for sensitivity analysis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayOptions {
    pub max_hops: Option<usize>,
    pub max_rounds_per_hop: u32,
    pub bidirectional: bool,
}

impl Default for RelayOptions {
    fn default() -> Self {
        Self {
            max_hops: None,
            max_rounds_per_hop: montecarlo::DEFAULT_MAX_ROUNDS,
            bidirectional: false,
        }
    }
}

/// Relays a message from `start_index` hop by hop until the last node is
/// reached, the message dies, or a cap is hit.
///
/// Per hop: receivers are the nodes whose received power — using the
/// sender's actual (perturbed) transmit power — meets the sensitivity;
/// each receiver estimates its distance from the received power assuming
/// nominal transmit power, normalizes it by the nominal range, and
/// contends with the chosen election.
pub fn run_message_relay<R: Rng>(
    net: &LineNetwork,
    mode: Mode,
    g: &DecisionFunction,
    start_index: usize,
    rng: &mut R,
    options: &RelayOptions,
) -> Result<RelayTrace, ChainError> {
    let n = net.nodes.len();
    if start_index >= n {
        return Err(ChainError::InvalidStartIndex {
            index: start_index,
            nodes: n,
        });
    }
    let max_hops = options.max_hops.unwrap_or_else(|| {
        (10.0 * net.line_length_m / net.nominal_range_m)
            .ceil()
            .max(1.0) as usize
    });
    let last = n - 1;
    let mut current = start_index;
    let mut hops = Vec::new();

    loop {
        if current == last && !hops.is_empty() {
            return Ok(RelayTrace {
                hops,
                terminated: TerminationReason::ReachedEnd,
            });
        }
        if hops.len() >= max_hops {
            return Ok(RelayTrace {
                hops,
                terminated: TerminationReason::TruncatedRounds,
            });
        }
        let sender = net.nodes[current];
        let power_offset = sender.tx_power_dbm - net.radio.tx_power_dbm;

        let mut receiver_indices = Vec::new();
        let mut estimates = Vec::new();
        for (j, node) in net.nodes.iter().enumerate() {
            if j == current {
                continue;
            }
            if !options.bidirectional && node.position_m <= sender.position_m {
                continue;
            }
            let dist = (node.position_m - sender.position_m).abs();
            let received = if dist > 0.0 {
                net.radio.received_power_dbm(dist)? + power_offset
            } else {
                f64::INFINITY
            };
            if received >= net.radio.sensitivity_dbm {
                let estimated_m = if received.is_finite() {
                    net.radio.estimate_distance_from_dbm(received)?
                } else {
                    0.0
                };
                receiver_indices.push(j);
                estimates.push((estimated_m / net.nominal_range_m).clamp(0.0, 1.0));
            }
        }
        if receiver_indices.is_empty() {
            return Ok(RelayTrace {
                hops,
                terminated: TerminationReason::Died,
            });
        }

        let contenders = Placement::unit(estimates).expect("estimates are clamped into [0, 1]");
        let winner_slot = match mode {
            Mode::OnePass => montecarlo::simulate_slot(g, &contenders, 0, rng)
                .expect("contender list is nonempty")
                .winner(),
            Mode::MultiPass => {
                let hop = montecarlo::simulate_multi_pass(
                    g,
                    &contenders,
                    rng,
                    options.max_rounds_per_hop,
                )
                .expect("contender list is nonempty");
                if hop.truncated {
                    return Ok(RelayTrace {
                        hops,
                        terminated: TerminationReason::TruncatedRounds,
                    });
                }
                hop.outcome.winner()
            }
        };
        let Some(k) = winner_slot else {
            // One-pass silence or collision: the message makes no progress
            // and is dropped.
            return Ok(RelayTrace {
                hops,
                terminated: TerminationReason::Died,
            });
        };

        let winner_index = receiver_indices[k];
        let raw = (net.nodes[winner_index].position_m - sender.position_m).abs();
        hops.push(RelayHop {
            sender_index: current,
            winner_index,
            sender_pos_m: sender.position_m,
            raw_distance_m: raw,
            normalized_distance: raw / net.nominal_range_m,
        });
        current = winner_index;
        if current == last {
            return Ok(RelayTrace {
                hops,
                terminated: TerminationReason::ReachedEnd,
            });
        }
    }
}

/// Mean, sample (n−1) standard deviation, and count of normalized hop
/// distances. `std_dev` is `None` for a single hop.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HopStatistics {
    pub mean: f64,
    pub std_dev: Option<f64>,
    pub count: u64,
}

/// Aggregates normalized distances across all hops of all traces.
pub fn hop_distance_statistics(traces: &[RelayTrace]) -> Result<HopStatistics, ChainError> {
    hop_distance_statistics_filtered(traces, None)
}

/// Same, but optionally dropping hops that originate at or beyond
/// `max_origin_m` (e.g. the last range-length of the line, where forward
/// neighborhoods are clipped).
pub fn hop_distance_statistics_filtered(
    traces: &[RelayTrace],
    max_origin_m: Option<f64>,
) -> Result<HopStatistics, ChainError> {
    let mut moments = Moments::new();
    for trace in traces {
        for hop in &trace.hops {
            if let Some(cap) = max_origin_m {
                if hop.sender_pos_m >= cap {
                    continue;
                }
            }
            moments.push(hop.normalized_distance);
        }
    }
    if moments.count() == 0 {
        return Err(ChainError::NoHops);
    }
    Ok(HopStatistics {
        mean: moments.mean(),
        std_dev: moments.sample_std_dev(),
        count: moments.count(),
    })
}

/// One full experiment cell: repeated build-and-relay trials with a fresh
/// network per trial, each trial on its own RNG substream.
#[derive(Debug, Clone)]
pub struct RelayExperiment {
    pub n_nodes: usize,
    pub line_length_m: f64,
    pub radio: RadioConfig,
    pub placement: NodePlacement,
    pub mode: Mode,
    pub options: RelayOptions,
    pub trials: u64,
    pub seed: u64,
    /// Added to the trial index when deriving substreams, so sweep cells
    /// sharing a master seed stay decorrelated.
    pub stream_offset: u64,
}

/// Aggregate over every hop of every trial, plus trace-level termination
/// counts. The message always starts at the leftmost node.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RelayStats {
    pub mean_normalized: f64,
    pub std_dev: Option<f64>,
    pub hop_count: u64,
    pub max_normalized: f64,
    pub reached_end: u64,
    pub died: u64,
    pub truncated: u64,
}

pub fn run_relay_trials(
    exp: &RelayExperiment,
    g: &DecisionFunction,
) -> Result<RelayStats, ChainError> {
    run_relay_trials_filtered(exp, g, None)
}

/// Like [`run_relay_trials`], but hops originating at or beyond
/// `max_origin_m` are excluded from the mean/std-dev/count aggregate.
/// `max_normalized` still covers every hop.
pub fn run_relay_trials_filtered(
    exp: &RelayExperiment,
    g: &DecisionFunction,
    max_origin_m: Option<f64>,
) -> Result<RelayStats, ChainError> {
    if exp.trials == 0 {
        return Err(ChainError::InvalidTrials);
    }
    // Validate the build once so per-trial expects cannot fire.
    {
        let mut probe = ChaCha8Rng::seed_from_u64(exp.seed);
        build_line_network(
            exp.n_nodes,
            exp.line_length_m,
            exp.radio,
            exp.placement,
            &mut probe,
        )?;
    }

    #[derive(Default)]
    struct Batch {
        hops: Moments,
        max_norm: f64,
        reached_end: u64,
        died: u64,
        truncated: u64,
    }

    let base = ChaCha8Rng::seed_from_u64(exp.seed);
    let batches = montecarlo::run_batched(exp.trials, |range| {
        let mut acc = Batch::default();
        for trial in range {
            let mut rng = base.clone();
            rng.set_stream(exp.stream_offset.wrapping_add(trial));
            let net = build_line_network(
                exp.n_nodes,
                exp.line_length_m,
                exp.radio,
                exp.placement,
                &mut rng,
            )
            .expect("build parameters were validated");
            let trace = run_message_relay(&net, exp.mode, g, 0, &mut rng, &exp.options)
                .expect("start index 0 is valid for a nonempty network");
            for hop in &trace.hops {
                if max_origin_m.is_none_or(|cap| hop.sender_pos_m < cap) {
                    acc.hops.push(hop.normalized_distance);
                }
                acc.max_norm = acc.max_norm.max(hop.normalized_distance);
            }
            match trace.terminated {
                TerminationReason::ReachedEnd => acc.reached_end += 1,
                TerminationReason::Died => acc.died += 1,
                TerminationReason::TruncatedRounds => acc.truncated += 1,
            }
        }
        acc
    });

    let mut hops = Moments::new();
    let mut max_norm: f64 = 0.0;
    let mut reached_end = 0u64;
    let mut died = 0u64;
    let mut truncated = 0u64;
    for b in batches {
        hops.merge(b.hops);
        max_norm = max_norm.max(b.max_norm);
        reached_end += b.reached_end;
        died += b.died;
        truncated += b.truncated;
    }
    Ok(RelayStats {
        mean_normalized: hops.mean(),
        std_dev: hops.sample_std_dev(),
        hop_count: hops.count(),
        max_normalized: max_norm,
        reached_end,
        died,
        truncated,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::montecarlo::trial_rng;

    fn indoor(jitter: f64) -> RadioConfig {
        RadioConfig::indoor(-5.0, 130.0, jitter).unwrap()
    }

    #[test]
    fn equally_spaced_positions() {
        let mut rng = trial_rng(1, 0);
        let net = build_line_network(3, 4.0, indoor(0.0), NodePlacement::EquallySpaced, &mut rng)
            .unwrap();
        let positions: Vec<f64> = net.nodes().iter().map(|n| n.position_m).collect();
        assert_eq!(positions, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn equally_spaced_without_jitter_builds_identically() {
        // No randomness is consumed: contention is the only stochastic
        // part of such a run.
        let a = build_line_network(
            5,
            100.0,
            indoor(0.0),
            NodePlacement::EquallySpaced,
            &mut trial_rng(1, 0),
        )
        .unwrap();
        let b = build_line_network(
            5,
            100.0,
            indoor(0.0),
            NodePlacement::EquallySpaced,
            &mut trial_rng(999, 7),
        )
        .unwrap();
        assert_eq!(a.nodes(), b.nodes());
        assert!(a.nodes().iter().all(|n| n.tx_power_dbm == -5.0));
    }

    #[test]
    fn density_formula() {
        assert_eq!(expected_density(20, 200.0, 130.0), 13.0);
        assert!((expected_density(200, 7500.0, 130.0) - 3.466666666666667).abs() < 1e-12);
    }

    #[test]
    fn single_node_dies_with_zero_hops() {
        let mut rng = trial_rng(2, 0);
        let net =
            build_line_network(1, 100.0, indoor(0.0), NodePlacement::Random, &mut rng).unwrap();
        let g = DecisionFunction::constant(0.5).unwrap();
        let trace = run_message_relay(
            &net,
            Mode::MultiPass,
            &g,
            0,
            &mut rng,
            &RelayOptions::default(),
        )
        .unwrap();
        assert!(trace.hops.is_empty());
        assert_eq!(trace.terminated, TerminationReason::Died);
    }

    #[test]
    fn invalid_start_index_rejected() {
        let mut rng = trial_rng(3, 0);
        let net =
            build_line_network(2, 100.0, indoor(0.0), NodePlacement::Random, &mut rng).unwrap();
        let g = DecisionFunction::constant(0.5).unwrap();
        assert!(matches!(
            run_message_relay(
                &net,
                Mode::OnePass,
                &g,
                5,
                &mut rng,
                &RelayOptions::default()
            ),
            Err(ChainError::InvalidStartIndex { .. })
        ));
    }

    #[test]
    fn winners_are_within_actual_range_and_ahead() {
        let mut rng = trial_rng(4, 0);
        let g = DecisionFunction::power_law(5.0).unwrap();
        for trial in 0..50u64 {
            let mut trial_rng = trial_rng(900, trial);
            let net = build_line_network(
                60,
                1500.0,
                indoor(0.1),
                NodePlacement::Random,
                &mut trial_rng,
            )
            .unwrap();
            let trace = run_message_relay(
                &net,
                Mode::MultiPass,
                &g,
                0,
                &mut rng,
                &RelayOptions::default(),
            )
            .unwrap();
            for hop in &trace.hops {
                let sender = net.nodes()[hop.sender_index];
                let winner = net.nodes()[hop.winner_index];
                assert!(winner.position_m > sender.position_m);
                assert!(hop.normalized_distance > 0.0);
                let received = net.radio().received_power_dbm(hop.raw_distance_m).unwrap()
                    + (sender.tx_power_dbm - net.radio().tx_power_dbm);
                assert!(received >= net.radio().sensitivity_dbm);
            }
        }
    }

    fn collect_traces(
        exp_seed: u64,
        trials: u64,
        n_nodes: usize,
        d: f64,
        radio: RadioConfig,
        mode: Mode,
        g: &DecisionFunction,
    ) -> Vec<RelayTrace> {
        (0..trials)
            .map(|t| {
                let mut rng = trial_rng(exp_seed, t);
                let net =
                    build_line_network(n_nodes, d, radio, NodePlacement::Random, &mut rng).unwrap();
                run_message_relay(&net, mode, g, 0, &mut rng, &RelayOptions::default()).unwrap()
            })
            .collect()
    }

    #[test]
    fn dense_multipass_constant_mean_is_half() {
        // High density makes in-range forward estimates close to U(0,1);
        // the constant-g multi-pass leader is uniform among them, so each
        // full-window hop averages 1/2. Hops starting in the last range
        // length see a clipped window and are excluded.
        let (n_nodes, d) = (300, 1000.0);
        let radio = indoor(0.0);
        let density = expected_density(n_nodes, d, radio.nominal_range_m());
        let g = DecisionFunction::constant(1.0 / density).unwrap();
        let traces = collect_traces(90210, 500, n_nodes, d, radio, Mode::MultiPass, &g);
        let stats =
            hop_distance_statistics_filtered(&traces, Some(d - radio.nominal_range_m())).unwrap();
        let se = stats.std_dev.unwrap() / (stats.count as f64).sqrt();
        assert!(
            (stats.mean - 0.5).abs() < 4.0 * se,
            "mean {} se {se}",
            stats.mean
        );
    }

    #[test]
    fn one_pass_power_law_conditional_mean() {
        // For g = x^(k) on i.i.d. uniform in-range estimates, a recorded
        // hop's winner has position density (k+1)·x^k regardless of the
        // receiver count, so the full-window hop mean is (k+1)/(k+2).
        let (n_nodes, d) = (200, 2000.0);
        let radio = indoor(0.0);
        let density = expected_density(n_nodes, d, radio.nominal_range_m());
        let exponent = density - 1.0;
        let g = DecisionFunction::power_law(exponent).unwrap();
        let traces = collect_traces(424243, 500, n_nodes, d, radio, Mode::OnePass, &g);
        let stats =
            hop_distance_statistics_filtered(&traces, Some(d - radio.nominal_range_m())).unwrap();
        let se = stats.std_dev.unwrap() / (stats.count as f64).sqrt();
        let expected = (exponent + 1.0) / (exponent + 2.0);
        assert!(
            (stats.mean - expected).abs() < 4.0 * se,
            "mean {} vs {expected} (se {se})",
            stats.mean
        );
    }

    #[test]
    fn trial_runner_matches_manual_trace_collection() {
        // run_relay_trials uses substream (seed, stream_offset + trial),
        // the same streams collect_traces draws, so the filtered aggregate
        // must agree exactly.
        let (n_nodes, d) = (120, 1200.0);
        let radio = indoor(0.1);
        let g = DecisionFunction::power_law(8.0).unwrap();
        let exp = RelayExperiment {
            n_nodes,
            line_length_m: d,
            radio,
            placement: NodePlacement::Random,
            mode: Mode::OnePass,
            options: RelayOptions::default(),
            trials: 200,
            seed: 4242,
            stream_offset: 0,
        };
        let cutoff = d - radio.nominal_range_m();
        let via_runner = run_relay_trials_filtered(&exp, &g, Some(cutoff)).unwrap();
        let traces = collect_traces(4242, 200, n_nodes, d, radio, Mode::OnePass, &g);
        let manual = hop_distance_statistics_filtered(&traces, Some(cutoff)).unwrap();
        assert_eq!(via_runner.hop_count, manual.count);
        assert!((via_runner.mean_normalized - manual.mean).abs() < 1e-12);
        assert!((via_runner.std_dev.unwrap() - manual.std_dev.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn jitter_pushes_some_hops_past_nominal_range() {
        let base = RelayExperiment {
            n_nodes: 200,
            line_length_m: 2000.0,
            radio: indoor(0.1),
            placement: NodePlacement::Random,
            mode: Mode::OnePass,
            options: RelayOptions::default(),
            trials: 500,
            seed: 7777,
            stream_offset: 0,
        };
        let g = DecisionFunction::power_law(12.0).unwrap();
        let jittered = run_relay_trials(&base, &g).unwrap();
        assert!(
            jittered.max_normalized > 1.0,
            "max normalized {}",
            jittered.max_normalized
        );

        let clean = RelayExperiment {
            radio: indoor(0.0),
            ..base
        };
        let exact = run_relay_trials(&clean, &g).unwrap();
        assert!(exact.max_normalized <= 1.0 + 1e-12);
    }

    #[test]
    fn mid_line_forward_neighbor_count_matches_density() {
        let n_nodes = 200;
        let d = 2000.0;
        let radio = indoor(0.0);
        let r = radio.nominal_range_m();
        let builds = 200u64;
        let mut total = 0u64;
        for b in 0..builds {
            let mut rng = trial_rng(1234, b);
            let net =
                build_line_network(n_nodes, d, radio, NodePlacement::Random, &mut rng).unwrap();
            let mid = d / 2.0;
            let sender = net
                .nodes()
                .iter()
                .enumerate()
                .min_by(|(_, a), (_, b)| {
                    (a.position_m - mid)
                        .abs()
                        .partial_cmp(&(b.position_m - mid).abs())
                        .unwrap()
                })
                .map(|(i, _)| i)
                .unwrap();
            let pos = net.nodes()[sender].position_m;
            total += net
                .nodes()
                .iter()
                .filter(|n| n.position_m > pos && n.position_m - pos <= r)
                .count() as u64;
        }
        let mean = total as f64 / builds as f64;
        let expected = expected_density(n_nodes, d, r);
        // Binomial count over N-1 other nodes; 4 sigma of the mean.
        let p = r / d;
        let sigma = ((n_nodes as f64) * p * (1.0 - p) / builds as f64).sqrt();
        assert!(
            (mean - expected).abs() < 4.0 * sigma,
            "mean {mean} vs {expected}"
        );
    }

    #[test]
    fn hop_statistics_two_point_example() {
        let trace = RelayTrace {
            hops: vec![
                RelayHop {
                    sender_index: 0,
                    winner_index: 1,
                    sender_pos_m: 0.0,
                    raw_distance_m: 52.0,
                    normalized_distance: 0.4,
                },
                RelayHop {
                    sender_index: 1,
                    winner_index: 2,
                    sender_pos_m: 52.0,
                    raw_distance_m: 78.0,
                    normalized_distance: 0.6,
                },
            ],
            terminated: TerminationReason::ReachedEnd,
        };
        let stats = hop_distance_statistics(&[trace]).unwrap();
        assert!((stats.mean - 0.5).abs() < 1e-15);
        assert!((stats.std_dev.unwrap() - 0.1414213562373095).abs() < 1e-12);
        assert_eq!(stats.count, 2);
    }

    #[test]
    fn empty_hop_set_is_an_error() {
        let trace = RelayTrace {
            hops: vec![],
            terminated: TerminationReason::Died,
        };
        assert!(matches!(
            hop_distance_statistics(&[trace]),
            Err(ChainError::NoHops)
        ));
    }
}
