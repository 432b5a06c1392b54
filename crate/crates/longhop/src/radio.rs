//! Inverse-power path loss, SNR-based distance estimation, the indoor
//! microcell loss/range formulas, and transmit-power perturbation.
//!
//! The received-power model is P = P0 · (d0/d)^α, or in dB,
//! P_dBm = p0_dbm + 10·α·log10(d0/d). The noise floor is folded into the
//! receiver sensitivity; distance estimation inverts the path-loss law on
//! the measured power directly. An optional additive measurement-noise
//! hook exists and is off by default.

use rand::Rng;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum RadioError {
    #[error("distance must be finite and > 0, got {0}")]
    NonPositiveDistance(f64),
    #[error("power must be finite and > 0, got {0}")]
    NonPositivePower(f64),
    #[error("power in dBm must be finite, got {0}")]
    NonFinitePower(f64),
    #[error("reference distance must be finite and > 0, got {0}")]
    InvalidReferenceDistance(f64),
    #[error("path-loss exponent must be finite and > 0, got {0}")]
    InvalidExponent(f64),
    #[error("power jitter fraction must lie in [0, 1), got {0}")]
    InvalidJitter(f64),
    #[error("transmit power {tx_power_dbm} dBm must exceed sensitivity {sensitivity_dbm} dBm")]
    EmptyLinkBudget {
        tx_power_dbm: f64,
        sensitivity_dbm: f64,
    },
}

/// Fixed offset of the indoor microcell path-loss formula, in dB.
pub const INDOOR_LOSS_OFFSET_DB: f64 = 15.3;
/// Per-decade slope of the indoor microcell path-loss formula, in dB.
pub const INDOOR_LOSS_SLOPE_DB: f64 = 37.6;
/// The path-loss exponent implied by the indoor slope: 37.6 / 10.
pub const INDOOR_ALPHA: f64 = INDOOR_LOSS_SLOPE_DB / 10.0;

pub fn dbm_to_mw(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0)
}

pub fn mw_to_dbm(mw: f64) -> f64 {
    10.0 * mw.log10()
}

/// Path-loss parameters and the link budget of a station.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadioConfig {
    /// Received power at the reference distance, dBm, for the nominal
    /// transmit power.
    pub p0_dbm: f64,
    /// Reference distance, meters.
    pub d0_m: f64,
    /// Path-loss exponent.
    pub alpha: f64,
    /// Nominal transmit power, dBm.
    pub tx_power_dbm: f64,
    /// Receiver sensitivity threshold, dBm.
    pub sensitivity_dbm: f64,
    /// Half-width of the per-station multiplicative power variation,
    /// applied on the linear (mW) scale.
    pub power_jitter_fraction: f64,
    /// Std dev of optional additive measurement noise in dB; 0 disables it.
    pub noise_std_db: f64,
}

impl RadioConfig {
    pub fn new(
        p0_dbm: f64,
        d0_m: f64,
        alpha: f64,
        tx_power_dbm: f64,
        sensitivity_dbm: f64,
        power_jitter_fraction: f64,
    ) -> Result<Self, RadioError> {
        if !(d0_m.is_finite() && d0_m > 0.0) {
            return Err(RadioError::InvalidReferenceDistance(d0_m));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(RadioError::InvalidExponent(alpha));
        }
        if !((0.0..1.0).contains(&power_jitter_fraction) && power_jitter_fraction.is_finite()) {
            return Err(RadioError::InvalidJitter(power_jitter_fraction));
        }
        if tx_power_dbm.partial_cmp(&sensitivity_dbm) != Some(std::cmp::Ordering::Greater) {
            return Err(RadioError::EmptyLinkBudget {
                tx_power_dbm,
                sensitivity_dbm,
            });
        }
        Ok(Self {
            p0_dbm,
            d0_m,
            alpha,
            tx_power_dbm,
            sensitivity_dbm,
            power_jitter_fraction,
            noise_std_db: 0.0,
        })
    }

    /// A configuration consistent with the indoor microcell loss formula:
    /// reference distance 1 m, exponent 3.76, p0 = tx − 15.3 dB, and the
    /// sensitivity back-computed so the nominal range is `range_m`.
    pub fn indoor(
        tx_power_dbm: f64,
        range_m: f64,
        power_jitter_fraction: f64,
    ) -> Result<Self, RadioError> {
        let loss = indoor_path_loss_db(range_m)?;
        Self::new(
            tx_power_dbm - INDOOR_LOSS_OFFSET_DB,
            1.0,
            INDOOR_ALPHA,
            tx_power_dbm,
            tx_power_dbm - loss,
            power_jitter_fraction,
        )
    }

    /// Maximal path loss the link can absorb: transmit power minus
    /// sensitivity, in dB.
    pub fn link_budget_db(&self) -> f64 {
        self.tx_power_dbm - self.sensitivity_dbm
    }

    /// The distance at which nominal received power equals the
    /// sensitivity: d0 · 10^((p0 − sensitivity) / (10·α)).
    pub fn nominal_range_m(&self) -> f64 {
        self.d0_m * 10f64.powf((self.p0_dbm - self.sensitivity_dbm) / (10.0 * self.alpha))
    }

    /// Received power at distance d for the nominal transmit power:
    /// p0 + 10·α·log10(d0/d) dBm.
    pub fn received_power_dbm(&self, d: f64) -> Result<f64, RadioError> {
        if !(d.is_finite() && d > 0.0) {
            return Err(RadioError::NonPositiveDistance(d));
        }
        Ok(self.p0_dbm + 10.0 * self.alpha * (self.d0_m / d).log10())
    }

    /// Exact inverse of [`received_power_dbm`]:
    /// d = d0 · 10^((p0 − p) / (10·α)).
    pub fn estimate_distance_from_dbm(&self, p_dbm: f64) -> Result<f64, RadioError> {
        if !p_dbm.is_finite() {
            return Err(RadioError::NonFinitePower(p_dbm));
        }
        Ok(self.d0_m * 10f64.powf((self.p0_dbm - p_dbm) / (10.0 * self.alpha)))
    }

    /// One per-station transmit power draw: a factor uniform on
    /// [1 − j, 1 + j] applied to the linear (mW) power, converted back to
    /// dBm. With j = 0 this is exactly the nominal power.
    pub fn perturb_tx_power_dbm<R: Rng>(&self, rng: &mut R) -> f64 {
        if self.power_jitter_fraction == 0.0 {
            return self.tx_power_dbm;
        }
        let j = self.power_jitter_fraction;
        let factor = rng.gen_range(1.0 - j..=1.0 + j);
        mw_to_dbm(dbm_to_mw(self.tx_power_dbm) * factor)
    }

    /// Received power with the optional additive dB noise applied; with
    /// `noise_std_db = 0` this is exactly [`received_power_dbm`].
    pub fn measured_power_dbm<R: Rng>(&self, d: f64, rng: &mut R) -> Result<f64, RadioError> {
        let p = self.received_power_dbm(d)?;
        if self.noise_std_db == 0.0 {
            return Ok(p);
        }
        Ok(p + self.noise_std_db * standard_normal(rng))
    }
}

/// Box-Muller draw; avoids pulling in a distributions crate for one hook.
fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Received power in linear units: P = P0 · (d0/d)^α.
pub fn received_power_linear(p0: f64, d0: f64, alpha: f64, d: f64) -> Result<f64, RadioError> {
    if !(p0.is_finite() && p0 > 0.0) {
        return Err(RadioError::NonPositivePower(p0));
    }
    if !(d0.is_finite() && d0 > 0.0) {
        return Err(RadioError::InvalidReferenceDistance(d0));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(RadioError::InvalidExponent(alpha));
    }
    if !(d.is_finite() && d > 0.0) {
        return Err(RadioError::NonPositiveDistance(d));
    }
    Ok(p0 * (d0 / d).powf(alpha))
}

/// Exact inverse of [`received_power_linear`]: d = d0 · (P0/P)^(1/α).
pub fn estimate_distance_linear(p0: f64, d0: f64, alpha: f64, p: f64) -> Result<f64, RadioError> {
    if !(p0.is_finite() && p0 > 0.0) {
        return Err(RadioError::NonPositivePower(p0));
    }
    if !(d0.is_finite() && d0 > 0.0) {
        return Err(RadioError::InvalidReferenceDistance(d0));
    }
    if !(alpha.is_finite() && alpha > 0.0) {
        return Err(RadioError::InvalidExponent(alpha));
    }
    if !(p.is_finite() && p > 0.0) {
        return Err(RadioError::NonPositivePower(p));
    }
    Ok(d0 * (p0 / p).powf(1.0 / alpha))
}

/// Indoor microcell path loss 15.3 + 37.6·log10(d) dB.
pub fn indoor_path_loss_db(d: f64) -> Result<f64, RadioError> {
    if !(d.is_finite() && d > 0.0) {
        return Err(RadioError::NonPositiveDistance(d));
    }
    Ok(INDOOR_LOSS_OFFSET_DB + INDOOR_LOSS_SLOPE_DB * d.log10())
}

/// The range over which the maximal path loss L_max is just absorbed:
/// r = 10^((L_max − 15.3) / 37.6). Inverse of [`indoor_path_loss_db`].
pub fn max_range(l_max_db: f64) -> f64 {
    10f64.powf((l_max_db - INDOOR_LOSS_OFFSET_DB) / INDOOR_LOSS_SLOPE_DB)
}
