//! Minimum transmit powers meeting per-UAV target rates.
//!
//! The weak UAV of a candidate pair is solved first because its rate does not
//! depend on its partner. The strong UAV is then solved against the weak
//! UAV's received power as fixed interference. Both searches bisect on the
//! power interval; an exhaustive grid scan (ESPA) is provided as a reference.

use crate::error::{Error, Result};
use crate::link::{interfered_rate, weak_rate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerBounds {
    pub min: f64,
    pub max: f64,
}

impl PowerBounds {
    pub fn new(min: f64, max: f64) -> Result<Self> {
        if !(min >= 0.0) || !(max > min) || !max.is_finite() {
            return Err(Error::config(
                "p_min/p_max",
                format!("need 0 <= p_min < p_max, got [{min}, {max}]"),
            ));
        }
        Ok(PowerBounds { min, max })
    }

    pub fn span(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionConfig {
    /// Stop once the bracketing upper power exceeds the target by at most this.
    pub rate_tol: f64,
    pub max_iters: u32,
}

impl Default for BisectionConfig {
    fn default() -> Self {
        BisectionConfig {
            rate_tol: 1e-4,
            max_iters: 60,
        }
    }
}

impl BisectionConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rate_tol > 0.0) {
            return Err(Error::config("rate_tol", "must be > 0"));
        }
        if self.max_iters < 1 {
            return Err(Error::config("max_iters", "must be >= 1"));
        }
        Ok(())
    }
}

/// Result of a single-UAV power search. `power` is `None` when even the
/// maximum power misses the target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchOutcome {
    pub power: Option<f64>,
    /// Bisection midpoints or grid points evaluated.
    pub evaluations: usize,
}

fn bisect<F: Fn(f64) -> f64>(
    rate: F,
    target: f64,
    bounds: PowerBounds,
    cfg: &BisectionConfig,
) -> SearchOutcome {
    if rate(bounds.min) >= target {
        return SearchOutcome {
            power: Some(bounds.min),
            evaluations: 0,
        };
    }
    if rate(bounds.max) < target {
        return SearchOutcome {
            power: None,
            evaluations: 0,
        };
    }
    // invariant: rate(lo) < target <= rate(hi)
    let (mut lo, mut hi) = (bounds.min, bounds.max);
    let mut evaluations = 0;
    while evaluations < cfg.max_iters as usize {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        evaluations += 1;
        let r = rate(mid);
        if r >= target {
            hi = mid;
            if r - target <= cfg.rate_tol {
                break;
            }
        } else {
            lo = mid;
        }
    }
    SearchOutcome {
        power: Some(hi),
        evaluations,
    }
}

/// Smallest power in `bounds` at which the weak UAV meets `target`.
pub fn min_power_weak(
    gain: f64,
    target: f64,
    n0: f64,
    bounds: PowerBounds,
    cfg: &BisectionConfig,
) -> SearchOutcome {
    bisect(|p| weak_rate(p, gain, n0), target, bounds, cfg)
}

/// Smallest power at which the strong UAV meets `target` while the weak
/// UAV's received power `interference` is treated as noise.
pub fn min_power_strong(
    gain: f64,
    target: f64,
    interference: f64,
    n0: f64,
    bounds: PowerBounds,
    cfg: &BisectionConfig,
) -> SearchOutcome {
    bisect(
        |p| interfered_rate(p, gain, interference, n0),
        target,
        bounds,
        cfg,
    )
}

fn grid(bounds: PowerBounds, step: f64) -> impl Iterator<Item = f64> {
    let n = (bounds.span() / step + 1e-9).floor() as usize;
    (0..=n).map(move |k| bounds.min + k as f64 * step)
}

fn check_step(grid_step: f64) -> Result<()> {
    if !(grid_step > 0.0) || !grid_step.is_finite() {
        return Err(Error::Contract(format!(
            "grid step must be > 0, got {grid_step}"
        )));
    }
    Ok(())
}

fn scan<F: Fn(f64) -> f64>(rate: F, target: f64, bounds: PowerBounds, step: f64) -> SearchOutcome {
    let mut evaluations = 0;
    let power = grid(bounds, step)
        .inspect(|_| evaluations += 1)
        .filter(|&p| rate(p) >= target)
        .fold(None, |best: Option<f64>, p| {
            Some(best.map_or(p, |b| b.min(p)))
        });
    SearchOutcome { power, evaluations }
}

/// Grid scan for the weak UAV; every grid point is evaluated.
pub fn espa_min_power_weak(
    gain: f64,
    target: f64,
    n0: f64,
    bounds: PowerBounds,
    grid_step: f64,
) -> Result<SearchOutcome> {
    check_step(grid_step)?;
    Ok(scan(|p| weak_rate(p, gain, n0), target, bounds, grid_step))
}

/// Grid scan for the strong UAV under fixed interference.
pub fn espa_min_power_strong(
    gain: f64,
    target: f64,
    interference: f64,
    n0: f64,
    bounds: PowerBounds,
    grid_step: f64,
) -> Result<SearchOutcome> {
    check_step(grid_step)?;
    Ok(scan(
        |p| interfered_rate(p, gain, interference, n0),
        target,
        bounds,
        grid_step,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPowers {
    pub strong: f64,
    pub weak: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EspaOutcome {
    pub powers: Option<PairPowers>,
    pub evaluations: usize,
}

/// Exhaustive-search reference: the lexicographically smallest grid pair
/// `(p_weak, p_strong)` meeting both targets.
#[allow(clippy::too_many_arguments)]
pub fn espa_oracle(
    gain_strong: f64,
    gain_weak: f64,
    target_strong: f64,
    target_weak: f64,
    n0: f64,
    bounds: PowerBounds,
    grid_step: f64,
) -> Result<EspaOutcome> {
    let weak = espa_min_power_weak(gain_weak, target_weak, n0, bounds, grid_step)?;
    let Some(p_weak) = weak.power else {
        return Ok(EspaOutcome {
            powers: None,
            evaluations: weak.evaluations,
        });
    };
    let strong = espa_min_power_strong(
        gain_strong,
        target_strong,
        p_weak * gain_weak,
        n0,
        bounds,
        grid_step,
    )?;
    Ok(EspaOutcome {
        powers: strong.power.map(|p_strong| PairPowers {
            strong: p_strong,
            weak: p_weak,
        }),
        evaluations: weak.evaluations + strong.evaluations,
    })
}

/// Absolute slack on the power-gap comparison. The strong floor is set to
/// `p_weak + p_th`, and subtracting back can land one ulp under `p_th`.
pub const POWER_GAP_SLACK: f64 = 1e-12;

/// Whether a pair's transmit powers are far enough apart for SIC.
pub fn meets_power_gap(p_strong: f64, p_weak: f64, p_th: f64) -> bool {
    p_strong - p_weak >= p_th - POWER_GAP_SLACK
}

/// How candidate-pair powers are chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerSolver {
    Bisection(BisectionConfig),
    Espa {
        grid_step: f64,
    },
    /// Both UAVs at `p_max`; no power-gap floor is applied.
    Fixed,
}

/// Thresholds and physical constants shared by every candidate pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairingParams {
    /// Minimum linear gain gap `|h_i|^2 - |h_j|^2`.
    pub ch_th: f64,
    /// Minimum transmit-power gap `p_i - p_j`.
    pub p_th: f64,
    pub n0: f64,
    pub bounds: PowerBounds,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EntryStatus {
    GapBelowThreshold,
    Infeasible,
    Feasible(PairPowers),
}

/// Minimum feasible powers for every (weak, strong-candidate) combination of
/// a ranked pool. Local indices address `weak_ids` and `strong_ids`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerMatrix {
    weak_ids: Vec<usize>,
    strong_ids: Vec<usize>,
    entries: Vec<EntryStatus>,
    /// Total solver work (bisection midpoints or grid points).
    pub evaluations: usize,
}

impl PowerMatrix {
    pub fn weak_ids(&self) -> &[usize] {
        &self.weak_ids
    }

    pub fn strong_ids(&self) -> &[usize] {
        &self.strong_ids
    }

    pub fn entry(&self, weak: usize, strong: usize) -> EntryStatus {
        self.entries[weak * self.strong_ids.len() + strong]
    }

    pub fn powers(&self, weak: usize, strong: usize) -> Option<PairPowers> {
        match self.entry(weak, strong) {
            EntryStatus::Feasible(p) => Some(p),
            _ => None,
        }
    }

    pub fn feasible_count(&self) -> usize {
        self.entries
            .iter()
            .filter(|e| matches!(e, EntryStatus::Feasible(_)))
            .count()
    }
}

/// Solves every cross-half candidate pair of an ascending `ranking`.
///
/// The bottom half of the ranking forms the weak set and the top half the
/// strong set. Pairs whose gain gap is below `ch_th` are gated out. For the
/// search-based solvers the strong power is lifted to at least
/// `p_weak + p_th`, so a feasible entry satisfies the rate targets, the
/// power ordering and the power gap together.
pub fn optimize_pairwise(
    ranking: &[usize],
    gains: &[f64],
    targets: &[f64],
    params: &PairingParams,
    solver: &PowerSolver,
) -> Result<PowerMatrix> {
    if !ranking.len().is_multiple_of(2) {
        return Err(Error::Contract(format!(
            "pairwise optimization needs an even pool, got {}",
            ranking.len()
        )));
    }
    if ranking.windows(2).any(|w| gains[w[0]] > gains[w[1]]) {
        return Err(Error::Contract("ranking must be ascending in gain".into()));
    }
    let m = ranking.len() / 2;
    let (weak_ids, strong_ids) = (ranking[..m].to_vec(), ranking[m..].to_vec());
    let bounds = params.bounds;
    let mut evaluations = 0;
    let mut entries = Vec::with_capacity(m * m);

    for &j in &weak_ids {
        let (g_j, t_j) = (gains[j], targets[j]);
        let gated = |i: usize| gains[i] - g_j < params.ch_th;
        let p_weak = if strong_ids.iter().all(|&i| gated(i)) {
            None
        } else {
            let out = match solver {
                PowerSolver::Bisection(cfg) => min_power_weak(g_j, t_j, params.n0, bounds, cfg),
                PowerSolver::Espa { grid_step } => {
                    espa_min_power_weak(g_j, t_j, params.n0, bounds, *grid_step)?
                }
                PowerSolver::Fixed => SearchOutcome {
                    power: (weak_rate(bounds.max, g_j, params.n0) >= t_j).then_some(bounds.max),
                    evaluations: 1,
                },
            };
            evaluations += out.evaluations;
            out.power
        };

        for &i in &strong_ids {
            if gated(i) {
                entries.push(EntryStatus::GapBelowThreshold);
                continue;
            }
            let Some(p_j) = p_weak else {
                entries.push(EntryStatus::Infeasible);
                continue;
            };
            let interference = p_j * g_j;
            let (g_i, t_i) = (gains[i], targets[i]);
            let out = match solver {
                PowerSolver::Bisection(cfg) => {
                    min_power_strong(g_i, t_i, interference, params.n0, bounds, cfg)
                }
                PowerSolver::Espa { grid_step } => {
                    espa_min_power_strong(g_i, t_i, interference, params.n0, bounds, *grid_step)?
                }
                PowerSolver::Fixed => SearchOutcome {
                    power: (interfered_rate(bounds.max, g_i, interference, params.n0) >= t_i)
                        .then_some(bounds.max),
                    evaluations: 1,
                },
            };
            evaluations += out.evaluations;
            let status = match out.power {
                None => EntryStatus::Infeasible,
                Some(p_i) if matches!(solver, PowerSolver::Fixed) => {
                    EntryStatus::Feasible(PairPowers {
                        strong: p_i,
                        weak: p_j,
                    })
                }
                Some(p_i) => {
                    let p_i = p_i.max(p_j + params.p_th);
                    // with p_th = 0 the floor can leave the powers equal
                    if p_i > bounds.max || p_i <= p_j {
                        EntryStatus::Infeasible
                    } else {
                        EntryStatus::Feasible(PairPowers {
                            strong: p_i,
                            weak: p_j,
                        })
                    }
                }
            };
            entries.push(status);
        }
    }

    Ok(PowerMatrix {
        weak_ids,
        strong_ids,
        entries,
        evaluations,
    })
}
