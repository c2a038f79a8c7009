//! Uplink NOMA simulator for cellular-connected UAVs.
//!
//! UAVs move inside a single cell, are split each step into a strong and a
//! weak half by channel gain, and are paired for two-user uplink NOMA. The
//! crate provides the channel model, minimum-power search, a stable
//! energy-based matching, rank-based baselines and a time-stepped engine.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod channel;
pub mod engine;
pub mod error;
pub mod link;
pub mod matching;
pub mod mobility;
pub mod power_opt;
pub mod report;
pub mod scenario;

pub use channel::{ChannelSnapshot, EnvironmentParams, UavChannel};
pub use engine::{
    run, FadingMode, MetricsRecord, PowerScheme, RepairPolicy, RunOutput, RunSummary,
    ScenarioConfig, Scheme, Simulation,
};
pub use error::{Error, Result};
pub use link::PowerProfile;
pub use matching::{match_pairs, EnergyTable, PairingAssignment, PreferenceLists};
pub use mobility::{CellGeometry, Point, SpeedRange};
pub use power_opt::{BisectionConfig, PowerBounds, PowerMatrix, PowerSolver};
pub use scenario::{parse_scenario, print_scenario};
