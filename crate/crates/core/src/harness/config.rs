use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, NaiveDate};
use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::channel::ChannelParams;
use crate::orbital::{TimeGrid, WalkerSpec};
use crate::scheduler::{Capacity, Solver};

pub const DEFAULT_MAX_PAIR_DISTANCE_M: f64 = 2_250_000.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ConstellationSource {
    /// Two- or three-line element file.
    Tle(PathBuf),
    Walker(WalkerSpec),
    /// `satellite_id,unix_time_s,x_m,y_m,z_m` CSV of Earth-fixed positions.
    Ephemeris(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Placement {
    RandomOnLand {
        seed: u64,
        /// Defaults to the bundled 1° mask.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        mask: Option<PathBuf>,
    },
    /// `name,lat_deg,lon_deg,population` CSV.
    PopulationCenters(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGridConfig {
    /// RFC 3339 timestamp or `YYYY-MM-DD` (midnight UTC).
    pub start: String,
    #[serde(default = "default_slot_seconds")]
    pub slot_seconds: u32,
    #[serde(default = "default_slot_count")]
    pub slot_count: u32,
}

fn default_slot_seconds() -> u32 {
    60
}

fn default_slot_count() -> u32 {
    1440
}

fn one() -> Capacity {
    Capacity::Finite(1)
}

fn default_satellite_capacity() -> u32 {
    1
}

fn default_max_pair_distance() -> f64 {
    DEFAULT_MAX_PAIR_DISTANCE_M
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub constellation: ConstellationSource,
    pub placement: Placement,
    pub station_count: usize,
    /// Receivers per station, uniform.
    pub receivers: Capacity,
    #[serde(default = "one")]
    pub default_l: Capacity,
    /// Pairs each satellite can serve at once.
    #[serde(default = "default_satellite_capacity")]
    pub satellite_capacity: u32,
    #[serde(default = "default_max_pair_distance")]
    pub max_pair_distance_m: f64,
    /// Restricts the pair set to these `"a|b"` ids when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_allowlist: Option<Vec<String>>,
    pub time_grid: TimeGridConfig,
    #[serde(default)]
    pub channel: ChannelParams,
    pub solver: Solver,
    #[serde(default)]
    pub solver_seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    /// Directory relative paths resolve against; the config file's directory when loaded.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, HarnessError> {
        let text = fs::read_to_string(path)
            .map_err(|e| HarnessError::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| HarnessError::Config(format!("invalid config {}: {e}", path.display())))?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::Config(m));
        if self.station_count == 0 {
            return bad("station_count must be at least 1".into());
        }
        if self.receivers == Capacity::Finite(0) {
            return bad("receivers must be at least 1 or \"unbounded\"".into());
        }
        if self.default_l == Capacity::Finite(0) {
            return bad("default_l must be at least 1 or \"unbounded\"".into());
        }
        if !(self.max_pair_distance_m >= 0.0) {
            return bad(format!("max_pair_distance_m must be non-negative, got {}", self.max_pair_distance_m));
        }
        if self.time_grid.slot_seconds == 0 || self.time_grid.slot_count == 0 {
            return bad("time_grid needs positive slot_seconds and slot_count".into());
        }
        if let ConstellationSource::Walker(w) = &self.constellation {
            if w.planes == 0 || w.sats_per_plane == 0 || !(w.altitude_m > 0.0) {
                return bad("walker needs planes, sats_per_plane and altitude_m above zero".into());
            }
        }
        self.channel.validate().map_err(HarnessError::Config)?;
        self.time_grid()?;
        Ok(())
    }

    pub fn time_grid(&self) -> Result<TimeGrid, HarnessError> {
        let start = parse_start(&self.time_grid.start)?;
        Ok(TimeGrid::new(start, self.time_grid.slot_seconds, self.time_grid.slot_count))
    }
}

/// Unix seconds of an RFC 3339 timestamp or a bare UTC date.
pub fn parse_start(s: &str) -> Result<f64, HarnessError> {
    if let Ok(t) = DateTime::parse_from_rfc3339(s) {
        return Ok(t.timestamp() as f64 + f64::from(t.timestamp_subsec_nanos()) * 1e-9);
    }
    if let Ok(d) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
        return Ok(d.and_hms_opt(0, 0, 0).expect("midnight exists").and_utc().timestamp() as f64);
    }
    Err(HarnessError::Config(format!(
        "time_grid.start {s:?} is neither RFC 3339 nor YYYY-MM-DD"
    )))
}
