//! Time-stepped simulation loop.
//!
//! Each step moves the UAVs, redraws fading, builds a channel snapshot,
//! decides which pairs must be re-formed and accounts rates and energy. The
//! proposed scheme re-pairs only UAVs that violate a pairing condition; the
//! two baselines re-pair the whole population by rank every step.
//!
//! Every UAV owns two random streams derived from the scenario seed, one for
//! mobility and one for fading, so all schemes see identical trajectories and
//! gains for a given seed.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::{rank_ascending, sample_fading, ChannelSnapshot, EnvironmentParams};
use crate::error::{Error, Result};
use crate::link::{energy_efficiency, pair_rates, step_energy, target_rate, PowerProfile};
use crate::matching::{
    greedy_pairing, match_pairs, nongreedy_pairing, EnergyTable, PairingAssignment, PreferenceLists,
};
use crate::mobility::{CellGeometry, SpeedRange, UavKinematics};
use crate::power_opt::{
    espa_min_power_strong, espa_min_power_weak, meets_power_gap, min_power_strong, min_power_weak,
    optimize_pairwise, BisectionConfig, PairPowers, PairingParams, PowerBounds, PowerSolver,
    SearchOutcome,
};

macro_rules! keyword_enum {
    ($(#[$meta:meta])* $name:ident, $key:literal { $($variant:ident => $text:literal),+ $(,)? }) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum $name {
            $($variant),+
        }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self {
                    $($name::$variant => $text),+
                }
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(self.as_str())
            }
        }

        impl FromStr for $name {
            type Err = Error;

            fn from_str(s: &str) -> Result<Self> {
                match s {
                    $($text => Ok($name::$variant),)+
                    _ => Err(Error::config(
                        $key,
                        format!("unknown value `{s}`, expected one of: {}", [$($text),+].join(", ")),
                    )),
                }
            }
        }
    };
}

keyword_enum!(
    /// Pairing strategy.
    Scheme, "scheme" {
        Proposed => "proposed",
        Greedy => "greedy",
        NonGreedy => "nongreedy",
    }
);

keyword_enum!(
    /// Power search used by the proposed scheme.
    PowerScheme, "power_scheme" {
        Bisect => "bisect",
        Espa => "espa",
        Fixed => "fixed",
    }
);

keyword_enum!(
    /// When the proposed scheme re-pairs.
    RepairPolicy, "repair_policy" {
        Triggered => "triggered",
        EveryStep => "every_step",
    }
);

keyword_enum!(
    /// Whether small-scale fading is redrawn every step or drawn once.
    FadingMode, "fading" {
        PerStep => "per_step",
        Frozen => "frozen",
    }
);

/// Full description of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub k_total: usize,
    pub t_total: usize,
    pub dt: f64,
    pub cell: CellGeometry,
    pub speeds: SpeedRange,
    pub env: EnvironmentParams,
    pub p_min: f64,
    pub p_max: f64,
    /// Transmit SNR `p_max / n0` in dB.
    pub snr_db: f64,
    pub e_fly: f64,
    pub ch_th: f64,
    pub p_th: f64,
    pub tolerance_frac: f64,
    /// Half-width of the gain band around the gain at pairing time.
    pub drift_db: f64,
    pub scheme: Scheme,
    pub power_scheme: PowerScheme,
    pub repair_policy: RepairPolicy,
    pub fading: FadingMode,
    pub seed: u64,
    pub bisection: BisectionConfig,
    pub espa_grid_step: f64,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            k_total: 20,
            t_total: 300,
            dt: 1.0,
            cell: CellGeometry::default(),
            speeds: SpeedRange::default(),
            env: EnvironmentParams::default(),
            p_min: 0.0,
            p_max: 1.0,
            snr_db: 10.0,
            e_fly: 1.0,
            ch_th: 0.1,
            p_th: 0.1,
            tolerance_frac: 0.1,
            drift_db: 6.0,
            scheme: Scheme::Proposed,
            power_scheme: PowerScheme::Bisect,
            repair_policy: RepairPolicy::Triggered,
            fading: FadingMode::PerStep,
            seed: 0,
            bisection: BisectionConfig::default(),
            espa_grid_step: 1e-3,
        }
    }
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_total < 2 || !self.k_total.is_multiple_of(2) {
            return Err(Error::config("k_total", "must be even and >= 2"));
        }
        if self.t_total < 1 {
            return Err(Error::config("t_total", "must be >= 1"));
        }
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::config("dt", "must be > 0"));
        }
        self.cell.validate()?;
        self.speeds.validate()?;
        self.env.validate()?;
        if !self.snr_db.is_finite() {
            return Err(Error::config("snr_db", "must be finite"));
        }
        self.profile().validate()?;
        if !(self.ch_th >= 0.0) || !self.ch_th.is_finite() {
            return Err(Error::config("ch_th", "must be >= 0"));
        }
        if !(self.p_th >= 0.0) || !self.p_th.is_finite() {
            return Err(Error::config("p_th", "must be >= 0"));
        }
        if !(0.0..1.0).contains(&self.tolerance_frac) {
            return Err(Error::config("tolerance_frac", "must be in [0, 1)"));
        }
        if !(self.drift_db > 0.0) {
            return Err(Error::config("drift_db", "must be > 0"));
        }
        self.bisection.validate()?;
        if !(self.espa_grid_step > 0.0) || self.espa_grid_step > self.p_max - self.p_min {
            return Err(Error::config(
                "espa_grid_step",
                "must be in (0, p_max - p_min]",
            ));
        }
        Ok(())
    }

    pub fn noise_n0(&self) -> f64 {
        self.p_max / 10f64.powf(self.snr_db / 10.0)
    }

    pub fn profile(&self) -> PowerProfile {
        PowerProfile {
            p_min: self.p_min,
            p_max: self.p_max,
            noise_n0: self.noise_n0(),
            e_fly: self.e_fly,
        }
    }

    pub fn bounds(&self) -> Result<PowerBounds> {
        PowerBounds::new(self.p_min, self.p_max)
    }

    pub fn solver(&self) -> PowerSolver {
        match self.power_scheme {
            PowerScheme::Bisect => PowerSolver::Bisection(self.bisection),
            PowerScheme::Espa => PowerSolver::Espa {
                grid_step: self.espa_grid_step,
            },
            PowerScheme::Fixed => PowerSolver::Fixed,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RepairCause {
    GainDrift,
    RateViolation,
    PowerGap,
}

impl RepairCause {
    pub fn tag(self) -> &'static str {
        match self {
            RepairCause::GainDrift => "gain-drift",
            RepairCause::RateViolation => "rate-violation",
            RepairCause::PowerGap => "power-gap",
        }
    }
}

/// A co-channel pair. `strong` had the higher gain when the pair was formed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActivePair {
    pub id: u64,
    pub strong: usize,
    pub weak: usize,
    /// Formed by the matching, as opposed to rank pairing or the fallback
    /// for UAVs the matching left unmatched.
    pub matched: bool,
}

/// Thresholds of the re-pair trigger.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RepairRule {
    pub tolerance_frac: f64,
    pub drift_db: f64,
    pub p_th: f64,
}

/// UAVs to re-pair, with the conditions that flagged them. Partners of
/// flagged UAVs join `pool` without a cause of their own.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairDecision {
    pub pool: Vec<usize>,
    pub flagged: Vec<(usize, RepairCause)>,
}

impl RepairDecision {
    pub fn is_empty(&self) -> bool {
        self.pool.is_empty()
    }

    pub fn count(&self, cause: RepairCause) -> usize {
        self.flagged.iter().filter(|(_, c)| *c == cause).count()
    }
}

/// Evaluates the re-pair conditions for a complete assignment.
///
/// A UAV is flagged when its gain left the `±drift_db` band around its gain
/// at pairing time, or when its pair's power gap (stronger member minus
/// weaker member, by current gain) is below `p_th`. Rate violations flag UAVs
/// only when more than `tolerance_frac` of the population misses its target.
pub fn needs_repair(
    pairs: &[ActivePair],
    p_tx: &[f64],
    gain_at_pairing: &[f64],
    rates: &[f64],
    snapshot: &ChannelSnapshot,
    targets: &[f64],
    rule: &RepairRule,
) -> RepairDecision {
    let k_total = snapshot.len();
    let mut flagged = Vec::new();

    for (k, &g0) in gain_at_pairing.iter().enumerate().take(k_total) {
        let drift = 10.0 * (snapshot.gain(k) / g0).log10();
        if drift.abs() > rule.drift_db {
            flagged.push((k, RepairCause::GainDrift));
        }
    }
    let violators: Vec<usize> = (0..k_total).filter(|&k| rates[k] < targets[k]).collect();
    if violators.len() as f64 > rule.tolerance_frac * k_total as f64 {
        flagged.extend(violators.iter().map(|&k| (k, RepairCause::RateViolation)));
    }
    for pair in pairs {
        let (hi, lo) = if snapshot.gain(pair.strong) >= snapshot.gain(pair.weak) {
            (pair.strong, pair.weak)
        } else {
            (pair.weak, pair.strong)
        };
        if !meets_power_gap(p_tx[hi], p_tx[lo], rule.p_th) {
            flagged.push((pair.strong, RepairCause::PowerGap));
            flagged.push((pair.weak, RepairCause::PowerGap));
        }
    }
    flagged.sort_unstable();
    flagged.dedup();

    let mut in_pool = vec![false; k_total];
    for &(k, _) in &flagged {
        in_pool[k] = true;
    }
    for pair in pairs {
        if in_pool[pair.strong] || in_pool[pair.weak] {
            in_pool[pair.strong] = true;
            in_pool[pair.weak] = true;
        }
    }
    let pool = (0..k_total).filter(|&k| in_pool[k]).collect();
    RepairDecision { pool, flagged }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UavRecord {
    pub uav_id: usize,
    pub gain: f64,
    pub p_tx: f64,
    pub rate: f64,
    pub target: f64,
    pub kappa: bool,
    pub energy_cum: f64,
    /// Accumulated `rate * dt`.
    pub throughput_cum: f64,
    pub pair_id: u64,
}

/// What the pairing stage did in one step.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RepairEvent {
    pub pool_size: usize,
    pub gain_drift: usize,
    pub rate_violation: usize,
    pub power_gap: usize,
    /// Pairs formed outside the matching because it left UAVs unmatched.
    pub fallback_pairs: usize,
}

impl RepairEvent {
    pub fn happened(&self) -> bool {
        self.pool_size > 0
    }

    pub fn incomplete_matching(&self) -> bool {
        self.fallback_pairs > 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRecord {
    pub time: usize,
    pub uavs: Vec<UavRecord>,
    pub eta_ee: f64,
    pub kappa_count: usize,
    pub repair: RepairEvent,
}

/// Work counters accumulated over a run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Counters {
    /// Steps at which any pairs were re-formed.
    pub repair_steps: usize,
    /// Calls into the power optimizer and matching.
    pub matching_calls: usize,
    /// Pairs submitted to the matching, summed over calls.
    pub matched_pairs: usize,
    /// Power-search evaluations.
    pub solver_evaluations: usize,
    pub fallback_pairs: usize,
}

pub struct Simulation {
    cfg: ScenarioConfig,
    n0: f64,
    bounds: PowerBounds,
    solver: PowerSolver,
    uavs: Vec<UavKinematics>,
    mobility_rngs: Vec<ChaCha8Rng>,
    fading_rngs: Vec<ChaCha8Rng>,
    fading: Vec<f64>,
    pairs: Vec<ActivePair>,
    p_tx: Vec<f64>,
    gain_at_pairing: Vec<f64>,
    pair_of: Vec<u64>,
    next_pair_id: u64,
    energy_cum: Vec<f64>,
    throughput_cum: Vec<f64>,
    time: usize,
    counters: Counters,
}

fn uav_stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

impl Simulation {
    pub fn new(cfg: ScenarioConfig) -> Result<Self> {
        cfg.validate()?;
        let k = cfg.k_total;
        let mut mobility_rngs: Vec<ChaCha8Rng> = (0..k as u64)
            .map(|id| uav_stream(cfg.seed, 2 * id))
            .collect();
        let fading_rngs = (0..k as u64)
            .map(|id| uav_stream(cfg.seed, 2 * id + 1))
            .collect();
        let uavs = mobility_rngs
            .iter_mut()
            .enumerate()
            .map(|(id, rng)| UavKinematics::spawn(id, rng, &cfg.cell, &cfg.speeds))
            .collect::<Result<Vec<_>>>()?;
        Ok(Simulation {
            n0: cfg.noise_n0(),
            bounds: cfg.bounds()?,
            solver: cfg.solver(),
            uavs,
            mobility_rngs,
            fading_rngs,
            fading: vec![1.0; k],
            pairs: Vec::new(),
            p_tx: vec![0.0; k],
            gain_at_pairing: vec![0.0; k],
            pair_of: vec![0; k],
            next_pair_id: 0,
            energy_cum: vec![0.0; k],
            throughput_cum: vec![0.0; k],
            time: 0,
            counters: Counters::default(),
            cfg,
        })
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.cfg
    }

    pub fn time(&self) -> usize {
        self.time
    }

    pub fn counters(&self) -> Counters {
        self.counters
    }

    pub fn pairs(&self) -> &[ActivePair] {
        &self.pairs
    }

    pub fn uavs(&self) -> &[UavKinematics] {
        &self.uavs
    }

    /// Current transmit power of every UAV.
    pub fn p_tx(&self) -> &[f64] {
        &self.p_tx
    }

    /// Gain of every UAV at the step its current pair was formed.
    pub fn gain_at_pairing(&self) -> &[f64] {
        &self.gain_at_pairing
    }

    /// Positions and fading for the current step, then the channel snapshot.
    fn observe(&mut self) -> Result<ChannelSnapshot> {
        let cfg = &self.cfg;
        if self.time > 0 {
            for (uav, rng) in self.uavs.iter_mut().zip(&mut self.mobility_rngs) {
                *uav = uav.advance(cfg.dt, rng, &cfg.cell, &cfg.speeds)?;
            }
        }
        if self.time == 0 || cfg.fading == FadingMode::PerStep {
            for (f, rng) in self.fading.iter_mut().zip(&mut self.fading_rngs) {
                *f = sample_fading(rng);
            }
        }
        let geometry: Vec<_> = self.uavs.iter().map(|u| u.geometry(&cfg.cell)).collect();
        ChannelSnapshot::compute(self.time, &geometry, &self.fading, &cfg.env)
    }

    fn current_rates(&self, gains: &[f64]) -> Vec<f64> {
        let mut rates = vec![0.0; self.cfg.k_total];
        for pair in &self.pairs {
            let (s, w) = (pair.strong, pair.weak);
            let (r_s, r_w) = pair_rates(self.p_tx[s], gains[s], self.p_tx[w], gains[w], self.n0);
            rates[s] = r_s;
            rates[w] = r_w;
        }
        rates
    }

    fn form_pair(
        &mut self,
        strong: usize,
        weak: usize,
        powers: PairPowers,
        matched: bool,
        gains: &[f64],
    ) {
        let id = self.next_pair_id;
        self.next_pair_id += 1;
        self.pairs.push(ActivePair {
            id,
            strong,
            weak,
            matched,
        });
        for (k, p) in [(strong, powers.strong), (weak, powers.weak)] {
            self.p_tx[k] = p;
            self.gain_at_pairing[k] = gains[k];
            self.pair_of[k] = id;
        }
    }

    fn single_power(&self, gain: f64, target: f64, interference: f64) -> Result<SearchOutcome> {
        let n0 = self.n0;
        Ok(match self.solver {
            PowerSolver::Bisection(cfg) if interference == 0.0 => {
                min_power_weak(gain, target, n0, self.bounds, &cfg)
            }
            PowerSolver::Bisection(cfg) => {
                min_power_strong(gain, target, interference, n0, self.bounds, &cfg)
            }
            PowerSolver::Espa { grid_step } if interference == 0.0 => {
                espa_min_power_weak(gain, target, n0, self.bounds, grid_step)?
            }
            PowerSolver::Espa { grid_step } => {
                espa_min_power_strong(gain, target, interference, n0, self.bounds, grid_step)?
            }
            PowerSolver::Fixed => SearchOutcome {
                power: Some(self.bounds.max),
                evaluations: 0,
            },
        })
    }

    /// Re-pairs `pool` among itself with the power optimizer and matching.
    /// Returns the number of fallback pairs.
    fn repair_proposed(
        &mut self,
        pool: &[usize],
        snapshot: &ChannelSnapshot,
        targets: &[f64],
    ) -> Result<usize> {
        let gains = snapshot.gains();
        let ranking = rank_ascending(&gains, pool.iter().copied());
        let params = PairingParams {
            ch_th: self.cfg.ch_th,
            p_th: self.cfg.p_th,
            n0: self.n0,
            bounds: self.bounds,
        };
        let matrix = optimize_pairwise(&ranking, &gains, targets, &params, &self.solver)?;
        let energies = EnergyTable::from_power_matrix(&matrix, self.cfg.e_fly, self.cfg.dt);
        let prefs =
            PreferenceLists::build(snapshot, &matrix, &energies, self.cfg.ch_th, self.cfg.p_th);
        let assignment = match_pairs(&prefs, &energies)?.assignment;
        self.counters.matching_calls += 1;
        self.counters.matched_pairs += ranking.len() / 2;
        self.counters.solver_evaluations += matrix.evaluations;

        self.pairs.retain(|p| {
            pool.binary_search(&p.strong).is_err() && pool.binary_search(&p.weak).is_err()
        });
        for (s, w) in assignment.local_pairs() {
            let p = matrix
                .powers(w, s)
                .ok_or_else(|| Error::Contract("matched pair without feasible powers".into()))?;
            let (i, j) = (assignment.strong_ids()[s], assignment.weak_ids()[w]);
            self.form_pair(i, j, p, true, &gains);
        }
        self.pair_leftovers(&assignment, &gains, targets)
    }

    /// Pairs the strongest unmatched strong UAV with the weakest unmatched
    /// weak UAV and so on, at individually minimal powers capped at `p_max`.
    fn pair_leftovers(
        &mut self,
        assignment: &PairingAssignment,
        gains: &[f64],
        targets: &[f64],
    ) -> Result<usize> {
        let mut strong: Vec<usize> = assignment
            .unmatched_strong()
            .into_iter()
            .map(|s| assignment.strong_ids()[s])
            .collect();
        let mut weak: Vec<usize> = assignment
            .unmatched_weak()
            .into_iter()
            .map(|w| assignment.weak_ids()[w])
            .collect();
        strong.sort_by(|&a, &b| gains[b].total_cmp(&gains[a]).then(a.cmp(&b)));
        weak.sort_by(|&a, &b| gains[a].total_cmp(&gains[b]).then(a.cmp(&b)));
        let p_max = self.bounds.max;
        for (&i, &j) in strong.iter().zip(&weak) {
            let out_j = self.single_power(gains[j], targets[j], 0.0)?;
            let p_j = out_j.power.unwrap_or(p_max);
            let out_i = self.single_power(gains[i], targets[i], p_j * gains[j])?;
            let p_i = out_i.power.unwrap_or(p_max);
            let p_i = match self.solver {
                PowerSolver::Fixed => p_i,
                _ => p_i.max(p_j + self.cfg.p_th).min(p_max),
            };
            self.counters.solver_evaluations += out_i.evaluations + out_j.evaluations;
            let powers = PairPowers {
                strong: p_i,
                weak: p_j,
            };
            self.form_pair(i, j, powers, false, gains);
        }
        self.counters.fallback_pairs += strong.len();
        Ok(strong.len())
    }

    fn repair_baseline(&mut self, snapshot: &ChannelSnapshot) -> Result<()> {
        let assignment = match self.cfg.scheme {
            Scheme::Greedy => greedy_pairing(snapshot)?,
            Scheme::NonGreedy => nongreedy_pairing(snapshot)?,
            Scheme::Proposed => unreachable!("baseline pairing requested for the proposed scheme"),
        };
        let gains = snapshot.gains();
        let p_max = self.bounds.max;
        self.pairs.clear();
        for (i, j) in assignment.pairs() {
            let p_i = match self.cfg.scheme {
                Scheme::Greedy => p_max,
                _ => (p_max * gains[j] / gains[i]).max(self.bounds.min),
            };
            let powers = PairPowers {
                strong: p_i,
                weak: p_max,
            };
            self.form_pair(i, j, powers, false, &gains);
        }
        self.counters.matching_calls += 1;
        self.counters.matched_pairs += assignment.pair_count();
        Ok(())
    }

    /// Advances one step and returns its metrics.
    pub fn step(&mut self) -> Result<MetricsRecord> {
        let snapshot = self.observe()?;
        let gains = snapshot.gains();
        let targets: Vec<f64> = gains
            .iter()
            .map(|&g| target_rate(self.cfg.p_max, g, self.n0))
            .collect();

        let mut event = RepairEvent::default();
        if self.cfg.scheme == Scheme::Proposed {
            let decision = if self.time == 0 || self.cfg.repair_policy == RepairPolicy::EveryStep {
                RepairDecision {
                    pool: (0..self.cfg.k_total).collect(),
                    flagged: Vec::new(),
                }
            } else {
                let rule = RepairRule {
                    tolerance_frac: self.cfg.tolerance_frac,
                    drift_db: self.cfg.drift_db,
                    p_th: self.cfg.p_th,
                };
                let rates = self.current_rates(&gains);
                needs_repair(
                    &self.pairs,
                    &self.p_tx,
                    &self.gain_at_pairing,
                    &rates,
                    &snapshot,
                    &targets,
                    &rule,
                )
            };
            event.gain_drift = decision.count(RepairCause::GainDrift);
            event.rate_violation = decision.count(RepairCause::RateViolation);
            event.power_gap = decision.count(RepairCause::PowerGap);
            if !decision.is_empty() {
                event.pool_size = decision.pool.len();
                event.fallback_pairs = self.repair_proposed(&decision.pool, &snapshot, &targets)?;
            }
        } else {
            event.pool_size = self.cfg.k_total;
            self.repair_baseline(&snapshot)?;
        }
        if event.happened() {
            self.counters.repair_steps += 1;
        }

        let rates = self.current_rates(&gains);
        let dt = self.cfg.dt;
        let mut uavs = Vec::with_capacity(self.cfg.k_total);
        for k in 0..self.cfg.k_total {
            self.energy_cum[k] += step_energy(self.p_tx[k], self.cfg.e_fly, dt)?;
            self.throughput_cum[k] += rates[k] * dt;
            uavs.push(UavRecord {
                uav_id: k,
                gain: gains[k],
                p_tx: self.p_tx[k],
                rate: rates[k],
                target: targets[k],
                kappa: rates[k] >= targets[k],
                energy_cum: self.energy_cum[k],
                throughput_cum: self.throughput_cum[k],
                pair_id: self.pair_of[k],
            });
        }
        let eta_ee = energy_efficiency(&self.throughput_cum, &self.energy_cum)?;
        let kappa_count = uavs.iter().filter(|u| u.kappa).count();
        let record = MetricsRecord {
            time: self.time,
            uavs,
            eta_ee,
            kappa_count,
            repair: event,
        };
        self.time += 1;
        Ok(record)
    }
}

/// Aggregates of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub scheme: Scheme,
    pub seed: u64,
    pub mean_eta_ee: f64,
    pub mean_kappa_frac: f64,
    pub total_energy: f64,
    pub repair_count: usize,
    pub counters: Counters,
}

impl RunSummary {
    pub fn from_records(
        cfg: &ScenarioConfig,
        records: &[MetricsRecord],
        counters: Counters,
    ) -> Self {
        let steps = records.len().max(1) as f64;
        let mean_eta_ee = records.iter().map(|r| r.eta_ee).sum::<f64>() / steps;
        let mean_kappa_frac = records
            .iter()
            .map(|r| r.kappa_count as f64 / cfg.k_total as f64)
            .sum::<f64>()
            / steps;
        let total_energy = records
            .last()
            .map_or(0.0, |r| r.uavs.iter().map(|u| u.energy_cum).sum());
        RunSummary {
            scheme: cfg.scheme,
            seed: cfg.seed,
            mean_eta_ee,
            mean_kappa_frac,
            total_energy,
            repair_count: records.iter().filter(|r| r.repair.happened()).count(),
            counters,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub records: Vec<MetricsRecord>,
    pub summary: RunSummary,
}

pub fn run(cfg: &ScenarioConfig) -> Result<RunOutput> {
    let mut sim = Simulation::new(cfg.clone())?;
    let records = (0..cfg.t_total)
        .map(|_| sim.step())
        .collect::<Result<Vec<_>>>()?;
    let summary = RunSummary::from_records(cfg, &records, sim.counters());
    Ok(RunOutput { records, summary })
}
