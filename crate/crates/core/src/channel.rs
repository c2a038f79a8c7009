//! Elevation-dependent air-to-ground channel.
//!
//! Path loss is evaluated in dB as a LOS/NLOS probability-weighted mix and
//! converted once to a linear attenuation; every rate computation downstream
//! works with the linear power gain `|h|^2 = 10^(-PL/10) * |h~|^2`.

use rand::Rng;
use rand_distr::{Distribution, Exp1};

use crate::error::{Error, Result};
use crate::mobility::LinkGeometry;

/// S-curve and excess-loss constants of the propagation environment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvironmentParams {
    pub zeta: f64,
    pub delta: f64,
    pub loss_los_db: f64,
    pub loss_nlos_db: f64,
    pub psi: f64,
}

impl Default for EnvironmentParams {
    /// Dense-urban constants.
    fn default() -> Self {
        EnvironmentParams {
            zeta: 12.0870,
            delta: 0.1139,
            loss_los_db: 1.6,
            loss_nlos_db: 23.0,
            psi: 2.0,
        }
    }
}

impl EnvironmentParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.zeta > 0.0) || !self.zeta.is_finite() {
            return Err(Error::config("zeta", "must be > 0"));
        }
        if !(self.delta > 0.0) || !self.delta.is_finite() {
            return Err(Error::config("delta", "must be > 0"));
        }
        if !self.loss_los_db.is_finite() {
            return Err(Error::config("loss_los_db", "must be finite"));
        }
        if !(self.loss_nlos_db >= self.loss_los_db) || !self.loss_nlos_db.is_finite() {
            return Err(Error::config("loss_nlos_db", "must be >= loss_los_db"));
        }
        if !(self.psi >= 1.0) || !self.psi.is_finite() {
            return Err(Error::config("psi", "must be >= 1"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LinkKind {
    Los,
    Nlos,
}

/// Probability of a line-of-sight link at elevation `theta_deg`.
/// The NLOS probability is `1 - los_probability(..)`.
pub fn los_probability(theta_deg: f64, env: &EnvironmentParams) -> f64 {
    1.0 / (1.0 + env.zeta * (-env.delta * (theta_deg - env.zeta)).exp())
}

pub fn path_loss_db(distance: f64, env: &EnvironmentParams, kind: LinkKind) -> Result<f64> {
    if !(distance > 0.0) {
        return Err(Error::Domain(format!(
            "path loss needs distance > 0, got {distance}"
        )));
    }
    let excess = match kind {
        LinkKind::Los => env.loss_los_db,
        LinkKind::Nlos => env.loss_nlos_db,
    };
    Ok(10.0 * env.psi * distance.log10() + excess)
}

/// Probability-weighted LOS/NLOS path loss, weighted in the dB domain.
pub fn combined_path_loss_db(
    distance: f64,
    theta_deg: f64,
    env: &EnvironmentParams,
) -> Result<f64> {
    let p_los = los_probability(theta_deg, env);
    let los = path_loss_db(distance, env, LinkKind::Los)?;
    let nlos = path_loss_db(distance, env, LinkKind::Nlos)?;
    Ok(p_los * los + (1.0 - p_los) * nlos)
}

pub fn channel_gain(pl_db: f64, fading_power: f64) -> f64 {
    10f64.powf(-pl_db / 10.0) * fading_power
}

/// Squared magnitude of a unit-power Rayleigh coefficient, i.e. an Exp(1)
/// variate. Zero draws are redrawn so the gain stays strictly positive.
pub fn sample_fading<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    loop {
        let x: f64 = Exp1.sample(rng);
        if x > 0.0 {
            return x;
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavChannel {
    pub uav_id: usize,
    pub pl_db: f64,
    pub fading_power: f64,
    pub gain: f64,
}

/// Channel state of the whole population at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSnapshot {
    pub time: usize,
    uavs: Vec<UavChannel>,
    ranking: Vec<usize>,
}

impl ChannelSnapshot {
    /// Builds the snapshot from per-UAV geometry and fading draws. UAV ids are
    /// the slice positions.
    pub fn compute(
        time: usize,
        geometry: &[LinkGeometry],
        fading: &[f64],
        env: &EnvironmentParams,
    ) -> Result<Self> {
        if geometry.len() != fading.len() {
            return Err(Error::Contract("one fading draw per UAV".into()));
        }
        let uavs = geometry
            .iter()
            .zip(fading)
            .enumerate()
            .map(|(uav_id, (g, &fading_power))| {
                let pl_db = combined_path_loss_db(g.slant, g.elevation_deg, env)?;
                Ok(UavChannel {
                    uav_id,
                    pl_db,
                    fading_power,
                    gain: channel_gain(pl_db, fading_power),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_channels(time, uavs)
    }

    /// Wraps precomputed per-UAV channels; `uavs[k].uav_id` must equal `k`.
    pub fn from_channels(time: usize, uavs: Vec<UavChannel>) -> Result<Self> {
        if uavs.len() < 2 {
            return Err(Error::Contract(format!(
                "a snapshot needs at least 2 UAVs, got {}",
                uavs.len()
            )));
        }
        if uavs.iter().enumerate().any(|(k, u)| u.uav_id != k) {
            return Err(Error::Contract("UAV ids must be 0..K in order".into()));
        }
        if uavs.iter().any(|u| !(u.gain > 0.0)) {
            return Err(Error::Domain("channel gains must be positive".into()));
        }
        let gains: Vec<f64> = uavs.iter().map(|u| u.gain).collect();
        let ranking = rank_ascending(&gains, 0..uavs.len());
        Ok(ChannelSnapshot {
            time,
            uavs,
            ranking,
        })
    }

    pub fn len(&self) -> usize {
        self.uavs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.uavs.is_empty()
    }

    pub fn uavs(&self) -> &[UavChannel] {
        &self.uavs
    }

    pub fn gain(&self, uav_id: usize) -> f64 {
        self.uavs[uav_id].gain
    }

    pub fn gains(&self) -> Vec<f64> {
        self.uavs.iter().map(|u| u.gain).collect()
    }

    /// UAV ids sorted by ascending gain, ties broken by ascending id.
    pub fn ranking(&self) -> &[usize] {
        &self.ranking
    }
}

/// Sorts `ids` by ascending `gains[id]`, ties by ascending id.
pub fn rank_ascending(gains: &[f64], ids: impl IntoIterator<Item = usize>) -> Vec<usize> {
    let mut ids: Vec<usize> = ids.into_iter().collect();
    ids.sort_by(|&a, &b| gains[a].total_cmp(&gains[b]).then(a.cmp(&b)));
    ids
}
