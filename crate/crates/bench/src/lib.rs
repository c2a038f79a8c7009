//! Seeded inputs shared by the benchmarks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use noma_uav::power_opt::{optimize_pairwise, PairingParams};
use noma_uav::{
    BisectionConfig, ChannelSnapshot, EnergyTable, PowerBounds, PowerMatrix, PowerSolver,
    PreferenceLists, UavChannel,
};

pub const N0: f64 = 0.1;

pub fn unit_bounds() -> PowerBounds {
    PowerBounds::new(0.0, 1.0).expect("unit bounds are valid")
}

/// One weak/strong pair: `(g_strong, g_weak, target_strong, target_weak)`.
pub fn pair_instance(seed: u64) -> (f64, f64, f64, f64) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: f64 = rng.random_range(-6.0f64..0.0).exp();
    let b: f64 = rng.random_range(-6.0f64..0.0).exp();
    let (g_weak, g_strong) = if a < b { (a, b) } else { (b, a) };
    let target = |g: f64| 0.5 * (1.0 + g / N0).log2();
    (g_strong, g_weak, target(g_strong), target(g_weak))
}

/// A pool of `2 * m` UAVs with solved powers, energies and preference lists.
pub struct PoolInstance {
    pub snapshot: ChannelSnapshot,
    pub gains: Vec<f64>,
    pub targets: Vec<f64>,
    pub params: PairingParams,
    pub matrix: PowerMatrix,
    pub table: EnergyTable,
    pub prefs: PreferenceLists,
}

pub fn pool_instance(seed: u64, m: usize) -> PoolInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let uavs: Vec<UavChannel> = (0..2 * m)
        .map(|uav_id| UavChannel {
            uav_id,
            pl_db: 0.0,
            fading_power: 1.0,
            gain: rng.random_range(-6.0f64..1.0).exp(),
        })
        .collect();
    let snapshot = ChannelSnapshot::from_channels(0, uavs).expect("valid snapshot");
    let gains = snapshot.gains();
    let targets: Vec<f64> = gains.iter().map(|&g| 0.5 * (1.0 + g / N0).log2()).collect();
    let params = PairingParams {
        ch_th: 0.1,
        p_th: 0.1,
        n0: N0,
        bounds: unit_bounds(),
    };
    let solver = PowerSolver::Bisection(BisectionConfig::default());
    let matrix = optimize_pairwise(snapshot.ranking(), &gains, &targets, &params, &solver)
        .expect("pool is even and ranked");
    let table = EnergyTable::from_power_matrix(&matrix, 1.0, 1.0);
    let prefs = PreferenceLists::build(&snapshot, &matrix, &table, params.ch_th, params.p_th);
    PoolInstance {
        snapshot,
        gains,
        targets,
        params,
        matrix,
        table,
        prefs,
    }
}
