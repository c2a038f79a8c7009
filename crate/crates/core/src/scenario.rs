//! Line-oriented `key = value` scenario files.
//!
//! Blank lines and `#` comments are ignored; a `#` after a value starts a
//! trailing comment. Every key is optional and falls back to the value in
//! [`ScenarioConfig::default`]. Unknown and repeated keys are rejected.
//! [`print_scenario`] writes every key, and parsing its output yields the same
//! configuration.

use std::fmt::{Display, Write as _};
use std::str::FromStr;

use crate::engine::ScenarioConfig;
use crate::error::{Error, Result};

fn parse_value<T: FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    value.parse().map_err(|_| Error::Parse {
        line,
        message: format!("invalid value `{value}` for `{key}`"),
    })
}

macro_rules! scenario_keys {
    ($($key:literal => $($field:ident).+;)+) => {
        /// Every recognised key, in the order [`print_scenario`] writes them.
        pub const KEYS: &[&str] = &[$($key),+];

        fn assign(cfg: &mut ScenarioConfig, key: &str, value: &str, line: usize) -> Result<()> {
            match key {
                $($key => cfg.$($field).+ = parse_value(key, value, line)?,)+
                _ => {
                    return Err(Error::Parse {
                        line,
                        message: format!("unknown key `{key}`"),
                    })
                }
            }
            Ok(())
        }

        /// Serialises every key of `cfg`, one per line.
        pub fn print_scenario(cfg: &ScenarioConfig) -> String {
            let mut out = String::new();
            $(push(&mut out, $key, &cfg.$($field).+);)+
            out
        }
    };
}

fn push(out: &mut String, key: &str, value: &dyn Display) {
    let _ = writeln!(out, "{key} = {value}");
}

scenario_keys! {
    "k_total" => k_total;
    "t_total" => t_total;
    "dt" => dt;
    "seed" => seed;
    "scheme" => scheme;
    "power_scheme" => power_scheme;
    "repair_policy" => repair_policy;
    "fading" => fading;
    "bs_x" => cell.bs.x;
    "bs_y" => cell.bs.y;
    "cell_radius" => cell.radius;
    "min_horizontal" => cell.min_horizontal;
    "altitude" => cell.altitude;
    "speed_min" => speeds.min;
    "speed_max" => speeds.max;
    "zeta" => env.zeta;
    "delta" => env.delta;
    "loss_los_db" => env.loss_los_db;
    "loss_nlos_db" => env.loss_nlos_db;
    "psi" => env.psi;
    "p_min" => p_min;
    "p_max" => p_max;
    "snr_db" => snr_db;
    "e_fly" => e_fly;
    "ch_th" => ch_th;
    "p_th" => p_th;
    "tolerance_frac" => tolerance_frac;
    "drift_db" => drift_db;
    "rate_tol" => bisection.rate_tol;
    "max_iters" => bisection.max_iters;
    "espa_grid_step" => espa_grid_step;
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::default();
    let mut seen: Vec<&str> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(Error::Parse {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            });
        };
        let (key, value) = (key.trim(), value.trim());
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("missing value for `{key}`"),
            });
        }
        if seen.contains(&key) {
            return Err(Error::Parse {
                line,
                message: format!("`{key}` given more than once"),
            });
        }
        assign(&mut cfg, key, value, line)?;
        seen.push(key);
    }
    cfg.validate()?;
    Ok(cfg)
}
