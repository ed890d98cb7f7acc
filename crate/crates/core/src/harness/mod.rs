//! Time-slotted scenario runner, metrics and CSV export.

mod config;
mod export;
mod metrics;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use config::{parse_start, ConstellationSource, Placement, ScenarioConfig, TimeGridConfig, DEFAULT_MAX_PAIR_DISTANCE_M};
pub use export::{export_csv, ASSIGNMENTS_HEADER, LONGEVITY_HEADER, PER_SLOT_HEADER, STATIONS_HEADER};
pub use metrics::{aggregate_metrics, longevity_histogram, median_episode_length, Summary};

use crate::orbital::{
    generate_walker_constellation, parse_ephemeris_csv, parse_tle_file, propagate_position, sun_elevation,
    EcefPosition, Ephemeris, OrbitalElements, PropagationError,
};
use crate::rng::SplitMix64;
use crate::scheduler::{SolveError, Solver};
use crate::topology::{
    build_pair_set, place_population_centers, place_random_on_land, read_population_centers, visibility_snapshot,
    GroundStation, LandMask, StationPair, TopologyError,
};

/// Sun elevation above which a station is in daylight, degrees (civil twilight).
pub const DAYLIGHT_SUN_ELEVATION_DEG: f64 = -6.0;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("{0}")]
    Config(String),
    #[error("{path}: {message}")]
    Input { path: PathBuf, message: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("slot {slot}: satellite {satellite}: {source}")]
    Propagation {
        slot: u32,
        satellite: String,
        #[source]
        source: PropagationError,
    },
    #[error("slot {slot}: {source}")]
    Solve {
        slot: u32,
        #[source]
        source: SolveError,
    },
}

fn read_input(path: &Path) -> Result<Vec<u8>, HarnessError> {
    fs::read(path).map_err(|source| HarnessError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn input_error(path: &Path, e: impl ToString) -> HarnessError {
    HarnessError::Input {
        path: path.to_path_buf(),
        message: e.to_string(),
    }
}

/// One connection served in a slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ServedConnection {
    pub satellite: String,
    pub pair: String,
    pub x: u32,
    /// Rate of a single connection, ebits/s.
    pub weight: f64,
    pub fidelity: Option<f64>,
    pub is_day: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlotResult {
    pub slot: u32,
    pub unix_time: f64,
    /// Sorted by `(satellite, pair)`.
    pub assignment: Vec<ServedConnection>,
    /// `Σ w x` over the assignment, ebits/s.
    pub aggregate_rate: f64,
    /// Rate-weighted mean fidelity of the served connections.
    pub mean_fidelity: Option<f64>,
    /// Connections per station, in the order of [`MetricsSeries::stations`].
    pub station_connections: Vec<u32>,
    /// Most satellites visible to any one pair.
    pub max_sats_per_pair: u32,
    /// Most pairs visible to any one satellite.
    pub max_pairs_per_sat: u32,
}

impl SlotResult {
    fn new(
        slot: u32,
        unix_time: f64,
        assignment: Vec<ServedConnection>,
        station_connections: Vec<u32>,
        max_sats_per_pair: u32,
        max_pairs_per_sat: u32,
    ) -> Self {
        let mut rate = 0.0;
        let mut fid_mass = 0.0;
        let mut fid_rate = 0.0;
        for c in &assignment {
            let r = c.weight * f64::from(c.x);
            rate += r;
            if let Some(f) = c.fidelity {
                fid_mass += r * f;
                fid_rate += r;
            }
        }
        Self {
            slot,
            unix_time,
            assignment,
            aggregate_rate: rate,
            mean_fidelity: (fid_rate > 0.0).then(|| fid_mass / fid_rate),
            station_connections,
            max_sats_per_pair,
            max_pairs_per_sat,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSeries {
    pub solver: Solver,
    pub stations: Vec<GroundStation>,
    pub slots: Vec<SlotResult>,
    /// Episode length in slots → number of episodes.
    pub longevity: BTreeMap<u32, u64>,
    pub station_mean_connections: Vec<f64>,
    pub day_fidelity: Option<f64>,
    pub night_fidelity: Option<f64>,
}

impl MetricsSeries {
    /// Folds per-slot results (in slot order) into the series metrics.
    pub fn from_slots(solver: Solver, stations: Vec<GroundStation>, slots: Vec<SlotResult>) -> Self {
        let keys: Vec<BTreeSet<(String, String)>> = slots
            .iter()
            .map(|s| s.assignment.iter().map(|c| (c.satellite.clone(), c.pair.clone())).collect())
            .collect();
        let longevity = longevity_histogram(&keys);
        let n = slots.len().max(1) as f64;
        let station_mean_connections = (0..stations.len())
            .map(|g| slots.iter().map(|s| f64::from(s.station_connections[g])).sum::<f64>() / n)
            .collect();
        let mut series = Self {
            solver,
            stations,
            slots,
            longevity,
            station_mean_connections,
            day_fidelity: None,
            night_fidelity: None,
        };
        let summary = aggregate_metrics(&series);
        series.day_fidelity = summary.day_fidelity;
        series.night_fidelity = summary.night_fidelity;
        series
    }
}

enum Orbits {
    Elements(Vec<OrbitalElements>),
    Tracks(Ephemeris),
}

impl Orbits {
    fn ids(&self) -> Vec<String> {
        match self {
            Orbits::Elements(els) => els.iter().map(|e| e.satellite_id.clone()).collect(),
            Orbits::Tracks(eph) => eph.satellite_ids().map(str::to_string).collect(),
        }
    }

    /// Positions at `t`, sorted by id. Satellites outside an ephemeris' time span are absent.
    fn positions(&self, slot: u32, t: f64) -> Result<Vec<(String, EcefPosition)>, HarnessError> {
        let mut out = Vec::new();
        match self {
            Orbits::Elements(els) => {
                for e in els {
                    let p = propagate_position(e, t).map_err(|source| HarnessError::Propagation {
                        slot,
                        satellite: e.satellite_id.clone(),
                        source,
                    })?;
                    out.push((e.satellite_id.clone(), p));
                }
            }
            Orbits::Tracks(eph) => {
                for id in eph.satellite_ids() {
                    if let Some(p) = eph.position_at(id, t) {
                        out.push((id.to_string(), p));
                    }
                }
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0));
        Ok(out)
    }
}

fn load_orbits(cfg: &ScenarioConfig, epoch: f64) -> Result<Orbits, HarnessError> {
    let orbits = match &cfg.constellation {
        ConstellationSource::Walker(spec) => Orbits::Elements(generate_walker_constellation(spec, epoch)),
        ConstellationSource::Tle(p) => {
            let path = cfg.resolve(p);
            let bytes = read_input(&path)?;
            let text = String::from_utf8(bytes).map_err(|e| input_error(&path, e))?;
            Orbits::Elements(parse_tle_file(&text).map_err(|e| input_error(&path, e))?)
        }
        ConstellationSource::Ephemeris(p) => {
            let path = cfg.resolve(p);
            let bytes = read_input(&path)?;
            Orbits::Tracks(parse_ephemeris_csv(bytes.as_slice()).map_err(|e| input_error(&path, e))?)
        }
    };
    let ids = orbits.ids();
    let unique: BTreeSet<&String> = ids.iter().collect();
    if unique.len() != ids.len() {
        return Err(HarnessError::Config("constellation has duplicate satellite ids".into()));
    }
    Ok(orbits)
}

/// Places the configured stations.
pub fn load_stations(cfg: &ScenarioConfig) -> Result<Vec<GroundStation>, HarnessError> {
    let topo = |path: &Path, e: TopologyError| match e {
        TopologyError::Io(source) => HarnessError::Io {
            path: path.to_path_buf(),
            source,
        },
        other => input_error(path, other),
    };
    match &cfg.placement {
        Placement::RandomOnLand { seed, mask } => {
            let path = mask
                .as_ref()
                .map_or_else(|| crate::bundled_data_dir().join("land_mask.bin"), |m| cfg.resolve(m));
            let mask = LandMask::from_bytes(read_input(&path)?).map_err(|e| topo(&path, e))?;
            place_random_on_land(cfg.station_count, *seed, &mask, cfg.receivers).map_err(|e| topo(&path, e))
        }
        Placement::PopulationCenters(p) => {
            let path = cfg.resolve(p);
            let bytes = read_input(&path)?;
            let rows = read_population_centers(bytes.as_slice()).map_err(|e| topo(&path, e))?;
            place_population_centers(cfg.station_count, &rows, cfg.receivers).map_err(|e| topo(&path, e))
        }
    }
}

/// The distance-feasible pair set, optionally restricted to the allowlist.
pub fn load_pairs(cfg: &ScenarioConfig, stations: &[GroundStation]) -> Result<Vec<StationPair>, HarnessError> {
    let mut pairs = build_pair_set(stations, cfg.max_pair_distance_m, cfg.default_l);
    if let Some(allow) = &cfg.pair_allowlist {
        let allow: BTreeSet<&str> = allow.iter().map(String::as_str).collect();
        pairs.retain(|p| allow.contains(p.id.as_str()));
    }
    Ok(pairs)
}

/// Runs every slot of the scenario (in parallel) and folds the metrics.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<MetricsSeries, HarnessError> {
    cfg.validate()?;
    let grid = cfg.time_grid()?;
    let orbits = load_orbits(cfg, grid.start)?;
    let sat_ids = orbits.ids();
    let stations = load_stations(cfg)?;
    let pairs = load_pairs(cfg, &stations)?;
    let station_index: BTreeMap<&str, usize> = stations.iter().enumerate().map(|(k, s)| (s.id.as_str(), k)).collect();
    let pair_ends: BTreeMap<&str, (usize, usize)> = pairs
        .iter()
        .map(|p| (p.id.as_str(), (station_index[p.a.as_str()], station_index[p.b.as_str()])))
        .collect();

    let slots = (0..grid.slot_count)
        .into_par_iter()
        .map(|slot| {
            let t = grid.slot_start(slot);
            let positions = orbits.positions(slot, t)?;
            let day: Vec<bool> = stations
                .iter()
                .map(|s| sun_elevation(&s.location, t) > DAYLIGHT_SUN_ELEVATION_DEG)
                .collect();
            let snap = visibility_snapshot(&positions, &stations, &pairs, &cfg.channel, slot, &day)
                .expect("pairs come from the same station list");
            let inst = snap.to_instance(&sat_ids, cfg.satellite_capacity, &stations, &pairs);
            let seed = SplitMix64::for_stream(cfg.solver_seed, u64::from(slot)).next_u64();
            let x = cfg
                .solver
                .solve(&inst, seed)
                .map_err(|source| HarnessError::Solve { slot, source })?;

            let mut per_pair: BTreeMap<&str, u32> = BTreeMap::new();
            let mut per_sat: BTreeMap<&str, u32> = BTreeMap::new();
            for c in &snap.connections {
                *per_pair.entry(c.pair.as_str()).or_default() += 1;
                *per_sat.entry(c.satellite.as_str()).or_default() += 1;
            }
            let details = snap.by_key();
            let mut station_connections = vec![0u32; stations.len()];
            let served = x
                .entries
                .iter()
                .map(|e| {
                    let d = details[&(e.satellite.as_str(), e.pair.as_str())];
                    let (a, b) = pair_ends[e.pair.as_str()];
                    station_connections[a] += e.x;
                    station_connections[b] += e.x;
                    ServedConnection {
                        satellite: e.satellite.clone(),
                        pair: e.pair.clone(),
                        x: e.x,
                        weight: d.weight,
                        fidelity: d.fidelity,
                        is_day: d.is_day,
                    }
                })
                .collect();
            Ok(SlotResult::new(
                slot,
                t,
                served,
                station_connections,
                per_pair.values().copied().max().unwrap_or(0),
                per_sat.values().copied().max().unwrap_or(0),
            ))
        })
        .collect::<Vec<Result<SlotResult, HarnessError>>>()
        // first failing slot wins, independent of thread timing
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;

    Ok(MetricsSeries::from_slots(cfg.solver, stations, slots))
}
