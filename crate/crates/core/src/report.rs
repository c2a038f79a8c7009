//! CSV rendering of run metrics, and recomputation of a run summary from its
//! per-step CSV.
//!
//! Output uses LF line endings and Rust's shortest round-trip float
//! formatting, so parsing a value back gives the identical `f64`.

use std::collections::HashSet;
use std::fmt::Write as _;

use crate::engine::{MetricsRecord, RunSummary};
use crate::error::{Error, Result};

pub const TIMESERIES_HEADER: &str = "t,uav_id,gain,p_tx,rate,target,kappa,energy_cum,pair_id";
pub const SUMMARY_HEADER: &str =
    "scheme,seed,mean_eta_ee,mean_kappa_frac,total_energy,repair_count";
pub const COMPARE_HEADER: &str = "seed,scheme,mean_eta_ee,mean_kappa_frac,total_energy";

pub fn timeseries_csv(records: &[MetricsRecord]) -> String {
    let mut out = String::with_capacity(64 * records.len() * 20);
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for r in records {
        for u in &r.uavs {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{}",
                r.time,
                u.uav_id,
                u.gain,
                u.p_tx,
                u.rate,
                u.target,
                u8::from(u.kappa),
                u.energy_cum,
                u.pair_id
            );
        }
    }
    out
}

pub fn summary_csv(summaries: &[RunSummary]) -> String {
    let mut out = String::from(SUMMARY_HEADER);
    out.push('\n');
    for s in summaries {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            s.scheme, s.seed, s.mean_eta_ee, s.mean_kappa_frac, s.total_energy, s.repair_count
        );
    }
    out
}

/// One row per summary, ordered by seed then scheme name.
pub fn compare_csv(summaries: &[RunSummary]) -> String {
    let mut rows: Vec<&RunSummary> = summaries.iter().collect();
    rows.sort_by(|a, b| (a.seed, a.scheme.as_str()).cmp(&(b.seed, b.scheme.as_str())));
    let mut out = String::from(COMPARE_HEADER);
    out.push('\n');
    for s in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            s.seed, s.scheme, s.mean_eta_ee, s.mean_kappa_frac, s.total_energy
        );
    }
    out
}

/// One parsed line of the per-step CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeseriesRow {
    pub t: usize,
    pub uav_id: usize,
    pub gain: f64,
    pub p_tx: f64,
    pub rate: f64,
    pub target: f64,
    pub kappa: bool,
    pub energy_cum: f64,
    pub pair_id: u64,
}

fn field<T: std::str::FromStr>(cols: &[&str], idx: usize, name: &str, line: usize) -> Result<T> {
    cols[idx].parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad `{name}` value `{}`", cols[idx]),
    })
}

pub fn parse_timeseries(text: &str) -> Result<Vec<TimeseriesRow>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h == TIMESERIES_HEADER => {}
        _ => {
            return Err(Error::Parse {
                line: 1,
                message: format!("expected header `{TIMESERIES_HEADER}`"),
            })
        }
    }
    lines
        .map(|(idx, l)| {
            let line = idx + 1;
            let cols: Vec<&str> = l.split(',').collect();
            if cols.len() != 9 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 9 columns, got {}", cols.len()),
                });
            }
            let kappa = match cols[6] {
                "0" => false,
                "1" => true,
                other => {
                    return Err(Error::Parse {
                        line,
                        message: format!("bad `kappa` value `{other}`"),
                    })
                }
            };
            Ok(TimeseriesRow {
                t: field(&cols, 0, "t", line)?,
                uav_id: field(&cols, 1, "uav_id", line)?,
                gain: field(&cols, 2, "gain", line)?,
                p_tx: field(&cols, 3, "p_tx", line)?,
                rate: field(&cols, 4, "rate", line)?,
                target: field(&cols, 5, "target", line)?,
                kappa,
                energy_cum: field(&cols, 7, "energy_cum", line)?,
                pair_id: field(&cols, 8, "pair_id", line)?,
            })
        })
        .collect()
}

/// Summary figures rebuilt from the per-step CSV alone.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecomputedSummary {
    pub mean_eta_ee: f64,
    pub mean_kappa_frac: f64,
    pub total_energy: f64,
    pub repair_count: usize,
}

/// Rebuilds the run aggregates from rows grouped by step in UAV order.
/// A step counts as a repair when any UAV carries a pair id not seen before.
pub fn summarize_timeseries(rows: &[TimeseriesRow], dt: f64) -> Result<RecomputedSummary> {
    let k_total = rows.iter().map(|r| r.uav_id + 1).max().unwrap_or(0);
    if k_total == 0 || !rows.len().is_multiple_of(k_total) {
        return Err(Error::Contract(
            "timeseries does not hold whole steps".into(),
        ));
    }
    let mut throughput = vec![0.0; k_total];
    let mut seen = HashSet::new();
    let (mut eta_sum, mut kappa_sum, mut repair_count) = (0.0, 0.0, 0);
    let steps = rows.chunks(k_total);
    let n_steps = steps.len();
    let mut total_energy = 0.0;
    for step in steps {
        let mut eta = 0.0;
        let mut fresh = false;
        for (k, r) in step.iter().enumerate() {
            if r.uav_id != k || r.t != step[0].t {
                return Err(Error::Contract(format!("rows out of order at t = {}", r.t)));
            }
            throughput[k] += r.rate * dt;
            eta += throughput[k] / r.energy_cum;
            fresh |= seen.insert(r.pair_id);
        }
        eta_sum += eta;
        kappa_sum += step.iter().filter(|r| r.kappa).count() as f64 / k_total as f64;
        repair_count += usize::from(fresh);
        total_energy = step.iter().map(|r| r.energy_cum).sum();
    }
    Ok(RecomputedSummary {
        mean_eta_ee: eta_sum / n_steps as f64,
        mean_kappa_frac: kappa_sum / n_steps as f64,
        total_energy,
        repair_count,
    })
}
