//! Probabilistic long-hop routing toolkit.
//!
//! Stations that hear a message estimate their distance from the sender by
//! inverting a path-loss law, then transmit in the next slot with a
//! probability given by a decision function of that estimate. A slot with
//! exactly one transmitter elects the next relay; collisions and silence
//! elect nobody. The crate provides:
//!
//! - [`model`]: placements, decision-function families, slot outcomes;
//! - [`analytics`]: exact win distributions and expected hop progress for
//!   one-pass and repeated (multi-pass) elections, closed forms, and
//!   quadrature for random node positions;
//! - [`montecarlo`]: seeded slot-level simulation with deterministic
//!   parallel aggregation;
//! - [`radio`]: the inverse-power path-loss model, distance estimation,
//!   and the indoor microcell loss/range formulas;
//! - [`chainsim`]: multi-hop relay experiments over a line network with
//!   per-station transmit-power variation.

pub mod analytics;
pub mod chainsim;
pub mod model;
pub mod montecarlo;
pub mod numeric;
pub mod radio;

pub use analytics::{
    appendix_term_integrals, closed_form_multipass, closed_form_one_pass,
    expected_hop_multipass_fixed, expected_hop_multipass_random, expected_hop_one_pass_fixed,
    expected_hop_one_pass_random, win_prob_multipass_series, win_prob_multipass_stationary,
    win_prob_one_pass_fixed, AnalyticsError, Density, McFallback, MultiPassForm, OnePassForm,
    QuadMethod, QuadratureSpec, RandomEstimate, WinDistribution,
};
pub use chainsim::{
    build_line_network, expected_density, hop_distance_statistics, run_message_relay,
    run_relay_trials, ChainError, LineNetwork, NodePlacement, RelayExperiment, RelayOptions,
    RelayStats, RelayTrace, TerminationReason,
};
pub use model::{
    scenario_positions, DecisionFunction, HopResult, ModelError, Placement, Scenario, SlotOutcome,
};
pub use montecarlo::{
    estimate_expected_hop, sample_positions, simulate_multi_pass, simulate_one_pass, simulate_slot,
    EstimateWithError, HopEstimate, McError, Mode, PlacementSource, SimConfig,
};
pub use radio::{
    estimate_distance_linear, indoor_path_loss_db, max_range, received_power_linear, RadioConfig,
    RadioError,
};
