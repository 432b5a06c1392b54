//! Exact and quadrature-based win probabilities and expected hop progress
//! for one-pass and multi-pass slot elections, plus the closed forms the
//! built-in decision-function families admit.

mod quadrature;

pub use quadrature::{gauss_legendre_nodes, Density, QuadMethod, QuadratureSpec};

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{DecisionFunction, Placement};
use crate::numeric::{kahan_sum, KahanSum, Moments};

/// Residual survival mass below which a multi-pass series is considered
/// fully summed.
pub const DEFAULT_RESIDUAL_EPS: f64 = 1e-12;
/// Default cap on the number of rounds a multi-pass series may sum.
pub const DEFAULT_MAX_ROUNDS: u32 = 10_000;

#[derive(Debug, Error)]
pub enum AnalyticsError {
    #[error("placement must contain at least one node")]
    EmptyPlacement,
    #[error("node count must be >= 1")]
    InvalidNodeCount,
    #[error("quadrature tolerance must be finite and > 0, got {0}")]
    InvalidTolerance(f64),
    #[error("max subdivisions must be >= 1")]
    InvalidSubdivisions,
    #[error("residual epsilon must be finite and > 0, got {0}")]
    InvalidResidualEps(f64),
    #[error("quadrature did not converge within the subdivision budget")]
    QuadratureDidNotConverge,
    #[error("density does not integrate to 1 (got {integral})")]
    DensityNotNormalized { integral: f64 },
    #[error("density rejection sampling failed; density may be badly scaled")]
    DensitySamplingFailed,
    #[error("election can never terminate: one-round success mass is zero")]
    NonTerminating,
    #[error("series truncated at the round cap with residual mass {}", partial.no_winner_mass())]
    Truncated { partial: WinDistribution },
}

/// Per-node win probabilities for a slot election, plus the probability
/// that no winner emerges.
///
/// For one-pass elections the entries and `no_winner_mass` sum to 1; for
/// multi-pass stationary results `no_winner_mass` is 0.
#[derive(Debug, Clone, PartialEq)]
pub struct WinDistribution {
    probabilities: Vec<f64>,
    no_winner_mass: f64,
}

impl WinDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }

    pub fn no_winner_mass(&self) -> f64 {
        self.no_winner_mass
    }

    /// Total probability that some node wins.
    pub fn win_mass(&self) -> f64 {
        kahan_sum(self.probabilities.iter().copied())
    }

    /// Σ x_i · P[S = i] in the placement's raw units. The no-winner case
    /// contributes zero progress.
    pub fn expected_progress(&self, placement: &Placement) -> f64 {
        kahan_sum(
            placement
                .positions()
                .iter()
                .zip(&self.probabilities)
                .map(|(x, p)| x * p),
        )
    }
}

/// g(x_i) and the per-node unique-transmitter masses
/// w_i = g(x_i) · Π_{j≠i} (1 − g(x_j)) for one round, via prefix/suffix
/// products (no division, stable when some g(x_j) = 1).
fn unique_winner_masses(g: &DecisionFunction, round: u32, xs: &[f64]) -> (Vec<f64>, f64) {
    let n = xs.len();
    let gs: Vec<f64> = xs.iter().map(|&x| g.eval(round, x)).collect();
    let mut prefix = vec![1.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] * (1.0 - gs[i]);
    }
    let mut suffix = vec![1.0; n + 1];
    for i in (0..n).rev() {
        suffix[i] = suffix[i + 1] * (1.0 - gs[i]);
    }
    let masses: Vec<f64> = (0..n).map(|i| gs[i] * prefix[i] * suffix[i + 1]).collect();
    let total = kahan_sum(masses.iter().copied());
    (masses, total)
}

/// One-pass win distribution for a fixed placement: the product formula
/// P[S = i] = g(x_i) Π_{j≠i} (1 − g(x_j)) evaluated at round 0 on the
/// normalized positions.
pub fn win_prob_one_pass_fixed(
    g: &DecisionFunction,
    xs: &Placement,
) -> Result<WinDistribution, AnalyticsError> {
    if xs.is_empty() {
        return Err(AnalyticsError::EmptyPlacement);
    }
    let (probabilities, total) = unique_winner_masses(g, 0, &xs.normalized());
    Ok(WinDistribution {
        probabilities,
        no_winner_mass: (1.0 - total).max(0.0),
    })
}

/// Expected hop length Σ x_i · P[S = i] for one slot on a fixed placement,
/// in the placement's raw units.
pub fn expected_hop_one_pass_fixed(
    g: &DecisionFunction,
    xs: &Placement,
) -> Result<f64, AnalyticsError> {
    Ok(win_prob_one_pass_fixed(g, xs)?.expected_progress(xs))
}

/// Checks ∫ density = 1 within 100x the quadrature tolerance and returns
/// the integral.
fn check_density(density: &Density, quad: &QuadratureSpec) -> Result<(), AnalyticsError> {
    let integral = quad.integrate(|x| density.eval(x), 0.0, density.line_length())?;
    if (integral - 1.0).abs() > 100.0 * quad.abs_tolerance {
        return Err(AnalyticsError::DensityNotNormalized { integral });
    }
    Ok(())
}

/// The three 1-D integrals the i.i.d. product formulas reduce to.
/// The decision function sees positions normalized by the line length.
struct RoundIntegrals {
    /// A = ∫ x g(x/L) f(x) dx
    progress_weighted: f64,
    /// B = ∫ (1 − g(x/L)) f(x) dx
    hold: f64,
    /// C = ∫ g(x/L) f(x) dx
    transmit: f64,
    /// μ = ∫ x f(x) dx
    mean_position: f64,
}

fn round_integrals(
    g: &DecisionFunction,
    round: u32,
    density: &Density,
    quad: &QuadratureSpec,
) -> Result<RoundIntegrals, AnalyticsError> {
    let l = density.line_length();
    let progress_weighted =
        quad.integrate(|x| x * g.eval(round, x / l) * density.eval(x), 0.0, l)?;
    let hold = quad.integrate(|x| (1.0 - g.eval(round, x / l)) * density.eval(x), 0.0, l)?;
    let transmit = quad.integrate(|x| g.eval(round, x / l) * density.eval(x), 0.0, l)?;
    let mean_position = quad.integrate(|x| x * density.eval(x), 0.0, l)?;
    Ok(RoundIntegrals {
        progress_weighted,
        hold,
        transmit,
        mean_position,
    })
}

/// The per-integral tolerance that keeps the assembled product within the
/// caller's tolerance: raising B to the (n-1)-th power amplifies B's
/// absolute error by roughly n.
fn budgeted(quad: &QuadratureSpec, n: usize) -> QuadratureSpec {
    QuadratureSpec {
        abs_tolerance: quad.abs_tolerance / (4.0 * n as f64),
        ..*quad
    }
}

/// Expected one-slot hop progress for `n` i.i.d. node positions drawn from
/// `density`. The product-of-integrals formula collapses to
/// n · A · B^(n-1) with A = ∫ x g f dx and B = ∫ (1 − g) f dx.
pub fn expected_hop_one_pass_random(
    g: &DecisionFunction,
    n: usize,
    density: &Density,
    quad: &QuadratureSpec,
) -> Result<f64, AnalyticsError> {
    if n == 0 {
        return Err(AnalyticsError::InvalidNodeCount);
    }
    check_density(density, quad)?;
    let ints = round_integrals(g, 0, density, &budgeted(quad, n))?;
    Ok(n as f64 * ints.progress_weighted * ints.hold.powi(n as i32 - 1))
}

/// The one-pass closed forms for i.i.d. uniform positions on the unit line.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OnePassForm {
    /// g = 1/n: classic uniform leader election.
    UniformG,
    /// g = x^(n-1): distance-preferential election.
    PowerG,
}

/// Closed-form expected one-slot progress, n >= 1. At n = 1 both forms
/// give 1/2 (0^0 is taken as 1, matching the exact single-node election).
pub fn closed_form_one_pass(kind: OnePassForm, n: usize) -> f64 {
    assert!(n >= 1, "closed_form_one_pass requires n >= 1");
    let nf = n as f64;
    let base = (1.0 - 1.0 / nf).powi(n as i32 - 1);
    match kind {
        OnePassForm::UniformG => 0.5 * base,
        OnePassForm::PowerG => nf / (nf + 1.0) * base,
    }
}

/// Leader distribution when the same round-independent g is replayed until
/// a unique transmitter emerges: the one-round masses normalized by their
/// sum. `g` is evaluated at round 0; callers are responsible for only
/// passing round-independent functions.
pub fn win_prob_multipass_stationary(
    g: &DecisionFunction,
    xs: &Placement,
) -> Result<WinDistribution, AnalyticsError> {
    if xs.is_empty() {
        return Err(AnalyticsError::EmptyPlacement);
    }
    let (masses, total) = unique_winner_masses(g, 0, &xs.normalized());
    if total == 0.0 {
        return Err(AnalyticsError::NonTerminating);
    }
    Ok(WinDistribution {
        probabilities: masses.iter().map(|m| m / total).collect(),
        no_winner_mass: 0.0,
    })
}

/// Leader distribution for a possibly round-dependent g, summed round by
/// round: P[win at round m] = (survival through rounds 0..m-1) × (unique-
/// transmitter mass at round m). Stops once the residual survival mass
/// drops below `residual_eps`; hitting `max_rounds` first yields
/// [`AnalyticsError::Truncated`] carrying the partial distribution.
pub fn win_prob_multipass_series(
    g: &DecisionFunction,
    xs: &Placement,
    residual_eps: f64,
    max_rounds: u32,
) -> Result<WinDistribution, AnalyticsError> {
    if xs.is_empty() {
        return Err(AnalyticsError::EmptyPlacement);
    }
    if !(residual_eps.is_finite() && residual_eps > 0.0) {
        return Err(AnalyticsError::InvalidResidualEps(residual_eps));
    }
    let norm = xs.normalized();
    let n = norm.len();
    let mut acc: Vec<KahanSum> = vec![KahanSum::new(); n];
    let mut survival = 1.0f64;
    for round in 0..max_rounds {
        let (masses, total) = unique_winner_masses(g, round, &norm);
        for (a, m) in acc.iter_mut().zip(&masses) {
            a.add(survival * m);
        }
        survival *= 1.0 - total;
        if survival < residual_eps {
            return Ok(WinDistribution {
                probabilities: acc.iter().map(KahanSum::value).collect(),
                no_winner_mass: survival.max(0.0),
            });
        }
    }
    Err(AnalyticsError::Truncated {
        partial: WinDistribution {
            probabilities: acc.iter().map(KahanSum::value).collect(),
            no_winner_mass: survival.max(0.0),
        },
    })
}

/// Expected multi-pass hop progress on a fixed placement, in raw units.
///
/// Dispatches on structure: a hybrid whose tail is round-independent gets
/// the exact two-stage form (round-0 masses plus survival times the tail's
/// stationary distribution); a round-independent g gets the stationary
/// formula; anything else is summed as a series with the default residual.
pub fn expected_hop_multipass_fixed(
    g: &DecisionFunction,
    xs: &Placement,
) -> Result<f64, AnalyticsError> {
    let dist = win_prob_multipass_fixed(g, xs)?;
    Ok(dist.expected_progress(xs))
}

/// The leader distribution used by [`expected_hop_multipass_fixed`].
pub fn win_prob_multipass_fixed(
    g: &DecisionFunction,
    xs: &Placement,
) -> Result<WinDistribution, AnalyticsError> {
    if xs.is_empty() {
        return Err(AnalyticsError::EmptyPlacement);
    }
    if let Some((first, later)) = g.as_hybrid() {
        if later.is_round_independent() {
            let (first_masses, first_total) = unique_winner_masses(first, 0, &xs.normalized());
            let survival = 1.0 - first_total;
            if survival <= 0.0 {
                return Ok(WinDistribution {
                    probabilities: first_masses,
                    no_winner_mass: 0.0,
                });
            }
            let tail = win_prob_multipass_stationary(later, xs)?;
            let probabilities = first_masses
                .iter()
                .zip(tail.probabilities())
                .map(|(w, t)| w + survival * t)
                .collect();
            return Ok(WinDistribution {
                probabilities,
                no_winner_mass: 0.0,
            });
        }
    }
    if g.is_round_independent() {
        win_prob_multipass_stationary(g, xs)
    } else {
        win_prob_multipass_series(g, xs, DEFAULT_RESIDUAL_EPS, DEFAULT_MAX_ROUNDS)
    }
}

/// Monte Carlo settings for the random-position multi-pass expectation
/// when no exact reduction applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McFallback {
    pub trials: u64,
    pub seed: u64,
    pub residual_eps: f64,
    pub max_rounds: u32,
}

impl Default for McFallback {
    fn default() -> Self {
        Self {
            trials: 100_000,
            seed: 0x10f6_5eed,
            residual_eps: DEFAULT_RESIDUAL_EPS,
            max_rounds: DEFAULT_MAX_ROUNDS,
        }
    }
}

/// A random-position expectation. `std_error` is `None` when the value came
/// from an exact reduction and `Some` when it was Monte Carlo estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RandomEstimate {
    pub value: f64,
    pub std_error: Option<f64>,
}

/// Expected multi-pass hop progress for `n` i.i.d. positions drawn from
/// `density`.
///
/// Exact reductions exist when every round after the first uses one shared
/// constant probability: for g = constant(p) the leader is uniform and the
/// expectation is the mean node position; for hybrid(h, constant(p)) the
/// expectation splits into three 1-D integrals (see
/// [`appendix_term_integrals`] for the uniform-density power-law case).
/// Everything else falls back to Monte Carlo over sampled placements with
/// the exact per-placement election formulas, reporting a standard error.
pub fn expected_hop_multipass_random(
    g: &DecisionFunction,
    n: usize,
    density: &Density,
    quad: &QuadratureSpec,
    fallback: &McFallback,
) -> Result<RandomEstimate, AnalyticsError> {
    if n == 0 {
        return Err(AnalyticsError::InvalidNodeCount);
    }
    check_density(density, quad)?;

    let constant_tail = match (g.as_constant(), g.as_hybrid()) {
        (Some(p), _) => Some((g.clone(), p)),
        (None, Some((first, later))) => later.as_constant().map(|p| (first.clone(), p)),
        _ => None,
    };

    if let Some((first, tail_p)) = constant_tail {
        let ints = round_integrals(&first, 0, density, &budgeted(quad, n))?;
        let value = hybrid_constant_tail_expectation(&ints, n, tail_p)?;
        return Ok(RandomEstimate {
            value,
            std_error: None,
        });
    }

    monte_carlo_expectation(g, n, density, fallback)
}

/// E = t1 + t2 − t3 for round-0 function integrals A, B, C and a constant
/// tail probability p, where
///   t1 = n A B^(n-1)
///   t2 = μ
///   t3 = A B^(n-1) + (n-1) C B^(n-2) (μ − A).
fn hybrid_constant_tail_expectation(
    ints: &RoundIntegrals,
    n: usize,
    tail_p: f64,
) -> Result<f64, AnalyticsError> {
    let nf = n as f64;
    let a = ints.progress_weighted;
    let b = ints.hold;
    let c = ints.transmit;
    let mu = ints.mean_position;

    let tail_terminates = (tail_p > 0.0 && tail_p < 1.0) || (n == 1 && tail_p > 0.0);
    if !tail_terminates {
        // The tail can never produce a unique transmitter; the election
        // still terminates if round 0 succeeds with probability one.
        let one_pass_win_mass = nf * c * b.powi(n as i32 - 1);
        if (1.0 - one_pass_win_mass).abs() <= 1e-12 {
            return Ok(nf * a * b.powi(n as i32 - 1));
        }
        return Err(AnalyticsError::NonTerminating);
    }

    let t1 = nf * a * b.powi(n as i32 - 1);
    let t3 = if n == 1 {
        a
    } else {
        a * b.powi(n as i32 - 1) + (nf - 1.0) * c * b.powi(n as i32 - 2) * (mu - a)
    };
    Ok(t1 + mu - t3)
}

fn monte_carlo_expectation(
    g: &DecisionFunction,
    n: usize,
    density: &Density,
    fallback: &McFallback,
) -> Result<RandomEstimate, AnalyticsError> {
    let l = density.line_length();
    // Grid-scanned supremum for rejection sampling; fine for the smooth
    // densities these operations are meant for.
    let grid = 4096;
    let mut sup: f64 = 0.0;
    for i in 0..=grid {
        sup = sup.max(density.eval(l * i as f64 / grid as f64));
    }
    if !(sup.is_finite() && sup > 0.0) {
        return Err(AnalyticsError::DensitySamplingFailed);
    }
    let bound = sup * 1.05;

    let mut rng = ChaCha8Rng::seed_from_u64(fallback.seed);
    let mut moments = Moments::new();
    for _ in 0..fallback.trials {
        let mut positions = Vec::with_capacity(n);
        for _ in 0..n {
            positions.push(sample_rejection(density, l, bound, &mut rng)?);
        }
        let placement =
            Placement::new(positions, l).map_err(|_| AnalyticsError::DensitySamplingFailed)?;
        let dist = if g.is_round_independent() {
            win_prob_multipass_stationary(g, &placement)?
        } else {
            win_prob_multipass_series(g, &placement, fallback.residual_eps, fallback.max_rounds)?
        };
        moments.push(dist.expected_progress(&placement));
    }
    Ok(RandomEstimate {
        value: moments.mean(),
        std_error: Some(moments.std_error()),
    })
}

fn sample_rejection(
    density: &Density,
    l: f64,
    bound: f64,
    rng: &mut ChaCha8Rng,
) -> Result<f64, AnalyticsError> {
    for _ in 0..100_000 {
        let x = rng.gen_range(0.0..l);
        let u = rng.gen_range(0.0..bound);
        if u <= density.eval(x) {
            return Ok(x);
        }
    }
    Err(AnalyticsError::DensitySamplingFailed)
}

/// Closed forms for the multi-pass expectation with i.i.d. uniform unit
/// positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MultiPassForm {
    /// g^m = p for every round: the leader is uniform, E = 1/2.
    ConstantG,
    /// g^0 = x^(n-1), g^m = p afterwards: E = (1/2)(1 + n/(n+1)(1-1/n)^n).
    HybridG,
}

/// Closed-form expected multi-pass progress, n >= 1.
pub fn closed_form_multipass(kind: MultiPassForm, n: usize) -> f64 {
    assert!(n >= 1, "closed_form_multipass requires n >= 1");
    let nf = n as f64;
    match kind {
        MultiPassForm::ConstantG => 0.5,
        MultiPassForm::HybridG => 0.5 * (1.0 + nf / (nf + 1.0) * (1.0 - 1.0 / nf).powi(n as i32)),
    }
}

/// The three term-by-term integrals behind the hybrid multi-pass closed
/// form on uniform unit positions, n >= 2:
///   term1 = n/(n+1) (1-1/n)^(n-1)
///   term2 = 1/2
///   term3 = 1/(n+1) (1-1/n)^(n-1) + (n-1)^2/(2n(n+1)) (1-1/n)^(n-2)
/// and term1 + term2 − term3 equals `closed_form_multipass(HybridG, n)`.
pub fn appendix_term_integrals(n: usize) -> (f64, f64, f64) {
    assert!(n >= 2, "appendix_term_integrals requires n >= 2");
    let nf = n as f64;
    let base1 = (1.0 - 1.0 / nf).powi(n as i32 - 1);
    let base2 = (1.0 - 1.0 / nf).powi(n as i32 - 2);
    let term1 = nf / (nf + 1.0) * base1;
    let term2 = 0.5;
    let term3 = base1 / (nf + 1.0) + (nf - 1.0) * (nf - 1.0) / (2.0 * nf * (nf + 1.0)) * base2;
    (term1, term2, term3)
}
