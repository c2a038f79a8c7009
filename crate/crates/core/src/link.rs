//! Uplink NOMA rates, OMA targets, energy accounting and QoS indicators.
//!
//! All rates are spectral efficiencies in bits/s/Hz for one timestep. The
//! effective transmit power `p_tx` is the single power variable; the power
//! allocation factor and the total power only ever appear as a product.

use crate::error::{Error, Result};

/// Per-UAV power limits, noise level and flying-energy rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerProfile {
    pub p_min: f64,
    pub p_max: f64,
    pub noise_n0: f64,
    pub e_fly: f64,
}

impl PowerProfile {
    pub fn validate(&self) -> Result<()> {
        if !(self.p_min >= 0.0) {
            return Err(Error::config("p_min", "must be >= 0"));
        }
        if !(self.p_max > self.p_min) || !self.p_max.is_finite() {
            return Err(Error::config("p_max", "must exceed p_min"));
        }
        if !(self.noise_n0 > 0.0) || !self.noise_n0.is_finite() {
            return Err(Error::config("snr_db", "noise power must be > 0"));
        }
        if !(self.e_fly >= 0.0) || !self.e_fly.is_finite() {
            return Err(Error::config("e_fly", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateReport {
    pub rate: f64,
    pub target_rate: f64,
    pub satisfied: bool,
}

impl RateReport {
    pub fn new(rate: f64, target_rate: f64) -> Self {
        RateReport {
            rate,
            target_rate,
            satisfied: rate >= target_rate,
        }
    }
}

/// Rate of the weak UAV, decoded after the strong signal has been cancelled.
pub fn weak_rate(p_tx: f64, gain: f64, n0: f64) -> f64 {
    (1.0 + p_tx * gain / n0).log2()
}

/// Rate of the strong UAV, decoded first with the weak signal as noise.
pub fn strong_rate(p_tx_i: f64, gain_i: f64, p_tx_j: f64, gain_j: f64, n0: f64) -> Result<f64> {
    if !(gain_i > gain_j) {
        return Err(Error::Contract(format!(
            "strong UAV gain {gain_i} must exceed weak UAV gain {gain_j}"
        )));
    }
    Ok(interfered_rate(p_tx_i, gain_i, p_tx_j * gain_j, n0))
}

/// Shannon rate with a fixed received interference power.
pub(crate) fn interfered_rate(p_tx: f64, gain: f64, interference: f64, n0: f64) -> f64 {
    (1.0 + p_tx * gain / (interference + n0)).log2()
}

/// Rates `(r_a, r_b)` of a co-channel pair; the higher-gain member is decoded
/// first. Equal gains decode `a` first.
pub fn pair_rates(p_a: f64, g_a: f64, p_b: f64, g_b: f64, n0: f64) -> (f64, f64) {
    if g_a >= g_b {
        (
            interfered_rate(p_a, g_a, p_b * g_b, n0),
            weak_rate(p_b, g_b, n0),
        )
    } else {
        (
            weak_rate(p_a, g_a, n0),
            interfered_rate(p_b, g_b, p_a * g_a, n0),
        )
    }
}

/// OMA rate with the 1/2 time-sharing loss, used as the per-UAV QoS floor.
pub fn target_rate(p_ref: f64, gain: f64, n0: f64) -> f64 {
    0.5 * (1.0 + (p_ref / n0) * gain).log2()
}

/// Communication plus flying energy spent over one step of length `dt`.
pub fn step_energy(p_tx: f64, e_fly: f64, dt: f64) -> Result<f64> {
    if !(dt > 0.0) {
        return Err(Error::Contract(format!(
            "step energy needs dt > 0, got {dt}"
        )));
    }
    Ok((p_tx + e_fly) * dt)
}

/// Sum over UAVs of accumulated bits per accumulated joule.
pub fn energy_efficiency(rates: &[f64], energies: &[f64]) -> Result<f64> {
    if rates.len() != energies.len() {
        return Err(Error::Contract("one energy per rate".into()));
    }
    rates.iter().zip(energies).try_fold(0.0, |acc, (&r, &e)| {
        if !(e > 0.0) {
            return Err(Error::Domain(format!("energy must be > 0, got {e}")));
        }
        Ok(acc + r / e)
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Satisfaction {
    pub kappa: Vec<bool>,
    pub count: usize,
}

pub fn satisfaction(rates: &[f64], targets: &[f64]) -> Result<Satisfaction> {
    if rates.len() != targets.len() {
        return Err(Error::Contract("one target per rate".into()));
    }
    let kappa: Vec<bool> = rates.iter().zip(targets).map(|(r, t)| r >= t).collect();
    let count = kappa.iter().filter(|&&k| k).count();
    Ok(Satisfaction { kappa, count })
}
