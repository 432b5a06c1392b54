//! Python bindings for the longhop toolkit: decision functions, election
//! analytics, the path-loss radio model, seeded Monte Carlo estimation,
//! and line-network relay experiments.
//!
//! Built as an abi3 extension module; see python/smoke_test.py for a
//! driving example.

// The pymethods/pyfunction macros insert identity PyErr conversions that
// trip this lint.
#![allow(clippy::useless_conversion)]

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use longhop::analytics::{self, Density, McFallback, MultiPassForm, OnePassForm, QuadratureSpec};
use longhop::chainsim::{self, NodePlacement, RelayExperiment, RelayOptions};
use longhop::model::{self, Placement, Scenario};
use longhop::montecarlo::{self, Mode, PlacementSource, SimConfig};
use longhop::radio;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "one-pass" => Ok(Mode::OnePass),
        "multi-pass" => Ok(Mode::MultiPass),
        other => Err(PyValueError::new_err(format!(
            "unknown mode {other:?}; expected \"one-pass\" or \"multi-pass\""
        ))),
    }
}

fn placement(positions: Vec<f64>, line_length: f64) -> PyResult<Placement> {
    Placement::new(positions, line_length).map_err(value_err)
}

/// A round-indexed transmit-decision function g^m(x).
#[pyclass(name = "DecisionFunction", frozen)]
#[derive(Clone)]
struct PyDecisionFunction {
    inner: model::DecisionFunction,
}

#[pymethods]
impl PyDecisionFunction {
    /// Every station transmits with probability p.
    #[staticmethod]
    fn constant(p: f64) -> PyResult<Self> {
        Ok(Self {
            inner: model::DecisionFunction::constant(p).map_err(value_err)?,
        })
    }

    /// g(x) = x^exponent.
    #[staticmethod]
    fn power_law(exponent: f64) -> PyResult<Self> {
        Ok(Self {
            inner: model::DecisionFunction::power_law(exponent).map_err(value_err)?,
        })
    }

    /// g(x) = x / divisor.
    #[staticmethod]
    fn linear_scaled(divisor: f64) -> PyResult<Self> {
        Ok(Self {
            inner: model::DecisionFunction::linear_scaled(divisor).map_err(value_err)?,
        })
    }

    /// `first` decides round 0, `later` every round after that.
    #[staticmethod]
    fn hybrid(first: &Self, later: &Self) -> Self {
        Self {
            inner: model::DecisionFunction::hybrid(first.inner.clone(), later.inner.clone()),
        }
    }

    /// g^round(x), clamped into [0, 1].
    fn eval(&self, round: u32, x: f64) -> f64 {
        self.inner.eval(round, x)
    }

    fn is_round_independent(&self) -> bool {
        self.inner.is_round_independent()
    }

    fn __repr__(&self) -> String {
        format!("DecisionFunction({})", self.inner)
    }
}

/// Fixed scenario positions on the unit line: kind is "uniform",
/// "unfavourable", or "favourable".
#[pyfunction]
fn scenario_positions(kind: &str, n: usize) -> PyResult<Vec<f64>> {
    let scenario = match kind {
        "uniform" => Scenario::Uniform,
        "unfavourable" => Scenario::Unfavourable,
        "favourable" => Scenario::Favourable,
        other => return Err(PyValueError::new_err(format!("unknown scenario {other:?}"))),
    };
    Ok(model::scenario_positions(scenario, n)
        .map_err(value_err)?
        .positions()
        .to_vec())
}

/// One-slot win probabilities: (per-node list, no-winner mass).
#[pyfunction]
#[pyo3(signature = (g, positions, line_length = 1.0))]
fn win_prob_one_pass_fixed(
    g: &PyDecisionFunction,
    positions: Vec<f64>,
    line_length: f64,
) -> PyResult<(Vec<f64>, f64)> {
    let xs = placement(positions, line_length)?;
    let dist = analytics::win_prob_one_pass_fixed(&g.inner, &xs).map_err(value_err)?;
    Ok((dist.probabilities().to_vec(), dist.no_winner_mass()))
}

/// Expected one-slot hop progress on a fixed placement.
#[pyfunction]
#[pyo3(signature = (g, positions, line_length = 1.0))]
fn expected_hop_one_pass_fixed(
    g: &PyDecisionFunction,
    positions: Vec<f64>,
    line_length: f64,
) -> PyResult<f64> {
    let xs = placement(positions, line_length)?;
    analytics::expected_hop_one_pass_fixed(&g.inner, &xs).map_err(value_err)
}

/// Expected one-slot hop progress for n i.i.d. uniform positions.
#[pyfunction]
#[pyo3(signature = (g, n, line_length = 1.0))]
fn expected_hop_one_pass_random_uniform(
    g: &PyDecisionFunction,
    n: usize,
    line_length: f64,
) -> PyResult<f64> {
    let density = Density::uniform(line_length);
    analytics::expected_hop_one_pass_random(&g.inner, n, &density, &QuadratureSpec::default())
        .map_err(value_err)
}

/// Closed-form one-pass progress: kind is "uniform" (g = 1/n) or "power"
/// (g = x^(n-1)).
#[pyfunction]
fn closed_form_one_pass(kind: &str, n: usize) -> PyResult<f64> {
    if n == 0 {
        return Err(PyValueError::new_err("n must be >= 1"));
    }
    let form = match kind {
        "uniform" => OnePassForm::UniformG,
        "power" => OnePassForm::PowerG,
        other => return Err(PyValueError::new_err(format!("unknown form {other:?}"))),
    };
    Ok(analytics::closed_form_one_pass(form, n))
}

/// Stationary multi-pass leader distribution for a round-independent g.
#[pyfunction]
#[pyo3(signature = (g, positions, line_length = 1.0))]
fn win_prob_multipass_stationary(
    g: &PyDecisionFunction,
    positions: Vec<f64>,
    line_length: f64,
) -> PyResult<Vec<f64>> {
    let xs = placement(positions, line_length)?;
    let dist = analytics::win_prob_multipass_stationary(&g.inner, &xs).map_err(value_err)?;
    Ok(dist.probabilities().to_vec())
}

/// Round-by-round multi-pass distribution: (per-node list, residual mass).
#[pyfunction]
#[pyo3(signature = (g, positions, line_length = 1.0, residual_eps = 1e-12, max_rounds = 10_000))]
fn win_prob_multipass_series(
    g: &PyDecisionFunction,
    positions: Vec<f64>,
    line_length: f64,
    residual_eps: f64,
    max_rounds: u32,
) -> PyResult<(Vec<f64>, f64)> {
    let xs = placement(positions, line_length)?;
    let dist = analytics::win_prob_multipass_series(&g.inner, &xs, residual_eps, max_rounds)
        .map_err(value_err)?;
    Ok((dist.probabilities().to_vec(), dist.no_winner_mass()))
}

/// Expected multi-pass hop progress on a fixed placement.
#[pyfunction]
#[pyo3(signature = (g, positions, line_length = 1.0))]
fn expected_hop_multipass_fixed(
    g: &PyDecisionFunction,
    positions: Vec<f64>,
    line_length: f64,
) -> PyResult<f64> {
    let xs = placement(positions, line_length)?;
    analytics::expected_hop_multipass_fixed(&g.inner, &xs).map_err(value_err)
}

/// Expected multi-pass hop progress for n i.i.d. uniform positions:
/// (value, std_error or None when the reduction is exact).
#[pyfunction]
#[pyo3(signature = (g, n, line_length = 1.0))]
fn expected_hop_multipass_random_uniform(
    g: &PyDecisionFunction,
    n: usize,
    line_length: f64,
) -> PyResult<(f64, Option<f64>)> {
    let density = Density::uniform(line_length);
    let est = analytics::expected_hop_multipass_random(
        &g.inner,
        n,
        &density,
        &QuadratureSpec::default(),
        &McFallback::default(),
    )
    .map_err(value_err)?;
    Ok((est.value, est.std_error))
}

/// Closed-form multi-pass progress: kind is "constant" or "hybrid".
#[pyfunction]
fn closed_form_multipass(kind: &str, n: usize) -> PyResult<f64> {
    if n == 0 {
        return Err(PyValueError::new_err("n must be >= 1"));
    }
    let form = match kind {
        "constant" => MultiPassForm::ConstantG,
        "hybrid" => MultiPassForm::HybridG,
        other => return Err(PyValueError::new_err(format!("unknown form {other:?}"))),
    };
    Ok(analytics::closed_form_multipass(form, n))
}

/// The three term-by-term integrals behind the hybrid closed form.
#[pyfunction]
fn appendix_term_integrals(n: usize) -> PyResult<(f64, f64, f64)> {
    if n < 2 {
        return Err(PyValueError::new_err("n must be >= 2"));
    }
    Ok(analytics::appendix_term_integrals(n))
}

/// Path-loss parameters and link budget.
#[pyclass(name = "RadioConfig", frozen)]
#[derive(Clone)]
struct PyRadioConfig {
    inner: radio::RadioConfig,
}

#[pymethods]
impl PyRadioConfig {
    #[new]
    #[pyo3(signature = (p0_dbm, d0_m, alpha, tx_power_dbm, sensitivity_dbm, power_jitter_fraction = 0.0))]
    fn new(
        p0_dbm: f64,
        d0_m: f64,
        alpha: f64,
        tx_power_dbm: f64,
        sensitivity_dbm: f64,
        power_jitter_fraction: f64,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: radio::RadioConfig::new(
                p0_dbm,
                d0_m,
                alpha,
                tx_power_dbm,
                sensitivity_dbm,
                power_jitter_fraction,
            )
            .map_err(value_err)?,
        })
    }

    /// Indoor microcell configuration with the sensitivity back-computed
    /// from the wanted nominal range.
    #[staticmethod]
    #[pyo3(signature = (tx_power_dbm, range_m, power_jitter_fraction = 0.0))]
    fn indoor(tx_power_dbm: f64, range_m: f64, power_jitter_fraction: f64) -> PyResult<Self> {
        Ok(Self {
            inner: radio::RadioConfig::indoor(tx_power_dbm, range_m, power_jitter_fraction)
                .map_err(value_err)?,
        })
    }

    fn received_power_dbm(&self, d: f64) -> PyResult<f64> {
        self.inner.received_power_dbm(d).map_err(value_err)
    }

    fn estimate_distance_from_dbm(&self, p_dbm: f64) -> PyResult<f64> {
        self.inner
            .estimate_distance_from_dbm(p_dbm)
            .map_err(value_err)
    }

    fn nominal_range_m(&self) -> f64 {
        self.inner.nominal_range_m()
    }

    fn link_budget_db(&self) -> f64 {
        self.inner.link_budget_db()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Indoor microcell path loss 15.3 + 37.6 log10(d) in dB.
#[pyfunction]
fn indoor_path_loss_db(d: f64) -> PyResult<f64> {
    radio::indoor_path_loss_db(d).map_err(value_err)
}

/// Range absorbing the given maximal path loss: 10^((L-15.3)/37.6).
#[pyfunction]
fn max_range(l_max_db: f64) -> f64 {
    radio::max_range(l_max_db)
}

/// Seeded Monte Carlo estimate of expected hop progress. Positions are
/// redrawn i.i.d. uniform each trial unless `fixed_positions` is given.
/// Returns (mean, std_error, mean_rounds, truncated_trials).
#[pyfunction]
#[pyo3(signature = (mode, g, n, trials, seed, fixed_positions = None, line_length = 1.0, max_rounds = 10_000))]
#[allow(clippy::too_many_arguments)]
fn estimate_expected_hop(
    mode: &str,
    g: &PyDecisionFunction,
    n: usize,
    trials: u64,
    seed: u64,
    fixed_positions: Option<Vec<f64>>,
    line_length: f64,
    max_rounds: u32,
) -> PyResult<(f64, f64, f64, u64)> {
    let mode = parse_mode(mode)?;
    let source = match fixed_positions {
        Some(xs) => PlacementSource::Fixed(placement(xs, line_length)?),
        None => PlacementSource::RandomUniform { n, line_length },
    };
    let cfg = SimConfig::with_max_rounds(trials, seed, max_rounds).map_err(value_err)?;
    let est = montecarlo::estimate_detailed(mode, &g.inner, &source, &cfg).map_err(value_err)?;
    Ok((
        est.progress.mean,
        est.progress.std_error,
        est.mean_rounds,
        est.truncated_trials,
    ))
}

/// Line-network relay experiment: repeated build-and-relay trials.
/// Returns (mean_normalized, std_dev or None, hop_count, max_normalized).
#[pyfunction]
#[pyo3(signature = (n_nodes, line_length_m, range_m, g, algorithm = "one-pass", tx_power_dbm = -5.0, power_jitter_fraction = 0.1, placement = "random", trials = 500, seed = 42))]
#[allow(clippy::too_many_arguments)]
fn run_line_experiment(
    n_nodes: usize,
    line_length_m: f64,
    range_m: f64,
    g: &PyDecisionFunction,
    algorithm: &str,
    tx_power_dbm: f64,
    power_jitter_fraction: f64,
    placement: &str,
    trials: u64,
    seed: u64,
) -> PyResult<(f64, Option<f64>, u64, f64)> {
    let mode = parse_mode(algorithm)?;
    let placement = match placement {
        "random" => NodePlacement::Random,
        "equally-spaced" => NodePlacement::EquallySpaced,
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown placement {other:?}"
            )))
        }
    };
    let radio = radio::RadioConfig::indoor(tx_power_dbm, range_m, power_jitter_fraction)
        .map_err(value_err)?;
    let experiment = RelayExperiment {
        n_nodes,
        line_length_m,
        radio,
        placement,
        mode,
        options: RelayOptions::default(),
        trials,
        seed,
        stream_offset: 0,
    };
    let stats = chainsim::run_relay_trials(&experiment, &g.inner).map_err(value_err)?;
    Ok((
        stats.mean_normalized,
        stats.std_dev,
        stats.hop_count,
        stats.max_normalized,
    ))
}

/// Expected in-range station count N/d * r.
#[pyfunction]
fn expected_density(n_nodes: usize, line_length_m: f64, range_m: f64) -> f64 {
    chainsim::expected_density(n_nodes, line_length_m, range_m)
}

#[pymodule]
fn longhop_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyDecisionFunction>()?;
    m.add_class::<PyRadioConfig>()?;
    m.add_function(wrap_pyfunction!(scenario_positions, m)?)?;
    m.add_function(wrap_pyfunction!(win_prob_one_pass_fixed, m)?)?;
    m.add_function(wrap_pyfunction!(expected_hop_one_pass_fixed, m)?)?;
    m.add_function(wrap_pyfunction!(expected_hop_one_pass_random_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_one_pass, m)?)?;
    m.add_function(wrap_pyfunction!(win_prob_multipass_stationary, m)?)?;
    m.add_function(wrap_pyfunction!(win_prob_multipass_series, m)?)?;
    m.add_function(wrap_pyfunction!(expected_hop_multipass_fixed, m)?)?;
    m.add_function(wrap_pyfunction!(expected_hop_multipass_random_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(closed_form_multipass, m)?)?;
    m.add_function(wrap_pyfunction!(appendix_term_integrals, m)?)?;
    m.add_function(wrap_pyfunction!(indoor_path_loss_db, m)?)?;
    m.add_function(wrap_pyfunction!(max_range, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_expected_hop, m)?)?;
    m.add_function(wrap_pyfunction!(run_line_experiment, m)?)?;
    m.add_function(wrap_pyfunction!(expected_density, m)?)?;
    Ok(())
}
