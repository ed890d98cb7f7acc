//! Ground-station placement, the station-pair set and per-slot visibility.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fs;
use std::io::Read;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::channel::{connection_weight, ChannelParams};
use crate::orbital::{elevation_angle, geodetic_to_ecef, great_circle_distance, EcefPosition, GeodeticPoint};
use crate::rng::SplitMix64;
use crate::scheduler::{Capacity, PairSpec, QsspInstance, SatelliteSpec, StationSpec, WeightSpec};

pub const MASK_ROWS: usize = 180;
pub const MASK_COLS: usize = 360;

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("land mask must be {expected} bytes, got {got}")]
    MaskSize { expected: usize, got: usize },
    #[error("land mask byte {index} is {value}, expected 0 or 1")]
    MaskValue { index: usize, value: u8 },
    #[error("land mask has no land cells")]
    NoLand,
    #[error("station count must be at least 1")]
    NoStations,
    #[error("population dataset has {available} rows, {requested} requested")]
    ShortDataset { available: usize, requested: usize },
    #[error("population dataset lists {0:?} more than once")]
    DuplicateCity(String),
    #[error("population dataset row {row}: {reason}")]
    BadRow { row: usize, reason: String },
    #[error("unknown station {0:?}")]
    UnknownStation(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// 1° land/sea grid. Row 0 spans latitudes 90°N to 89°N and column 0 starts at 180°W.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LandMask {
    cells: Vec<u8>,
}

impl LandMask {
    pub fn from_bytes(cells: Vec<u8>) -> Result<Self, TopologyError> {
        let expected = MASK_ROWS * MASK_COLS;
        if cells.len() != expected {
            return Err(TopologyError::MaskSize {
                expected,
                got: cells.len(),
            });
        }
        if let Some((index, &value)) = cells.iter().enumerate().find(|(_, &v)| v > 1) {
            return Err(TopologyError::MaskValue { index, value });
        }
        Ok(Self { cells })
    }

    pub fn load(path: &Path) -> Result<Self, TopologyError> {
        Self::from_bytes(fs::read(path)?)
    }

    /// Grid cell `(row, col)` containing a point.
    pub fn cell(latitude: f64, longitude: f64) -> (usize, usize) {
        let row = ((90.0 - latitude).floor().max(0.0) as usize).min(MASK_ROWS - 1);
        let col = ((longitude + 180.0).rem_euclid(360.0).floor() as usize).min(MASK_COLS - 1);
        (row, col)
    }

    pub fn is_land(&self, latitude: f64, longitude: f64) -> bool {
        let (row, col) = Self::cell(latitude, longitude);
        self.cells[row * MASK_COLS + col] == 1
    }

    pub fn land_cells(&self) -> usize {
        self.cells.iter().filter(|&&c| c == 1).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundStation {
    pub id: String,
    pub location: GeodeticPoint,
    pub receivers: Capacity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationPair {
    /// `"{a}|{b}"`.
    pub id: String,
    pub a: String,
    pub b: String,
    pub max_connections: Capacity,
}

/// Stations drawn uniformly over the sphere and resampled until on land.
pub fn place_random_on_land(
    n: usize,
    seed: u64,
    mask: &LandMask,
    receivers: Capacity,
) -> Result<Vec<GroundStation>, TopologyError> {
    if n == 0 {
        return Err(TopologyError::NoStations);
    }
    if mask.land_cells() == 0 {
        return Err(TopologyError::NoLand);
    }
    let width = n.saturating_sub(1).to_string().len().max(3);
    let mut rng = SplitMix64::new(seed);
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let longitude = -180.0 + 360.0 * rng.next_f64();
        let latitude = (2.0 * rng.next_f64() - 1.0).asin().to_degrees();
        if mask.is_land(latitude, longitude) {
            out.push(GroundStation {
                id: format!("gs{:0width$}", out.len()),
                location: GeodeticPoint::on_ground(latitude, longitude),
                receivers,
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
pub struct PopulationCenter {
    pub name: String,
    pub lat_deg: f64,
    pub lon_deg: f64,
    pub population: u64,
}

/// Reads `name,lat_deg,lon_deg,population` rows.
pub fn read_population_centers<R: Read>(reader: R) -> Result<Vec<PopulationCenter>, TopologyError> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut rows = Vec::new();
    let mut names = BTreeSet::new();
    for (row, rec) in rdr.deserialize::<PopulationCenter>().enumerate() {
        let c = rec?;
        if c.name.trim().is_empty() {
            return Err(TopologyError::BadRow {
                row: row + 1,
                reason: "empty name".into(),
            });
        }
        if !(-90.0..=90.0).contains(&c.lat_deg) || !(-180.0..=180.0).contains(&c.lon_deg) {
            return Err(TopologyError::BadRow {
                row: row + 1,
                reason: format!("coordinates ({}, {}) out of range", c.lat_deg, c.lon_deg),
            });
        }
        if !names.insert(c.name.clone()) {
            return Err(TopologyError::DuplicateCity(c.name));
        }
        rows.push(c);
    }
    Ok(rows)
}

/// The `n` most populous centres, ties by name.
pub fn place_population_centers(
    n: usize,
    dataset: &[PopulationCenter],
    receivers: Capacity,
) -> Result<Vec<GroundStation>, TopologyError> {
    if n == 0 {
        return Err(TopologyError::NoStations);
    }
    if dataset.len() < n {
        return Err(TopologyError::ShortDataset {
            available: dataset.len(),
            requested: n,
        });
    }
    let mut sorted: Vec<&PopulationCenter> = dataset.iter().collect();
    sorted.sort_by(|a, b| b.population.cmp(&a.population).then_with(|| a.name.cmp(&b.name)));
    Ok(sorted
        .into_iter()
        .take(n)
        .map(|c| GroundStation {
            id: c.name.clone(),
            location: GeodeticPoint::on_ground(c.lat_deg, c.lon_deg),
            receivers,
        })
        .collect())
}

/// Every unordered station pair within `max_pair_distance` meters, sorted by id.
pub fn build_pair_set(stations: &[GroundStation], max_pair_distance: f64, default_l: Capacity) -> Vec<StationPair> {
    let mut pairs = Vec::new();
    for (k, s) in stations.iter().enumerate() {
        for t in &stations[k + 1..] {
            if great_circle_distance(&s.location, &t.location) > max_pair_distance {
                continue;
            }
            let (a, b) = if s.id < t.id { (s, t) } else { (t, s) };
            pairs.push(StationPair {
                id: format!("{}|{}", a.id, b.id),
                a: a.id.clone(),
                b: b.id.clone(),
                max_connections: default_l.min(a.receivers).min(b.receivers),
            });
        }
    }
    pairs.sort_by(|x, y| x.id.cmp(&y.id));
    pairs
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SnapshotConnection {
    pub satellite: String,
    pub pair: String,
    /// Entangled bits per second.
    pub weight: f64,
    pub fidelity: Option<f64>,
    /// Whether the daytime dark-click level applied.
    pub is_day: bool,
}

/// Connections available in one slot, sorted by `(satellite, pair)`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct VisibilitySnapshot {
    pub slot_index: u32,
    pub connections: Vec<SnapshotConnection>,
}

/// Connections whose satellite clears the elevation limit at both stations of
/// the pair. A pair is in daylight when either of its stations is.
pub fn visibility_snapshot(
    sats: &[(String, EcefPosition)],
    stations: &[GroundStation],
    pairs: &[StationPair],
    params: &ChannelParams,
    slot: u32,
    day_flags: &[bool],
) -> Result<VisibilitySnapshot, TopologyError> {
    assert_eq!(stations.len(), day_flags.len(), "one day flag per station");
    let index: HashMap<&str, usize> = stations.iter().enumerate().map(|(k, s)| (s.id.as_str(), k)).collect();
    let lookup = |id: &str| index.get(id).copied().ok_or_else(|| TopologyError::UnknownStation(id.to_string()));
    let pair_ends = pairs
        .iter()
        .map(|p| Ok((lookup(&p.a)?, lookup(&p.b)?)))
        .collect::<Result<Vec<_>, TopologyError>>()?;
    let gs: Vec<EcefPosition> = stations.iter().map(|s| geodetic_to_ecef(&s.location)).collect();

    let mut connections = Vec::new();
    for (sat_id, pos) in sats {
        let visible: Vec<bool> = gs
            .iter()
            .map(|g| elevation_angle(g, pos).map_or(false, |el| el >= params.theta_e))
            .collect();
        for (p, &(a, b)) in pairs.iter().zip(&pair_ends) {
            if !(visible[a] && visible[b]) {
                continue;
            }
            let is_day = day_flags[a] || day_flags[b];
            let m = connection_weight(pos, &gs[a], &gs[b], params, is_day);
            if m.rate > 0.0 && m.rate.is_finite() {
                connections.push(SnapshotConnection {
                    satellite: sat_id.clone(),
                    pair: p.id.clone(),
                    weight: m.rate,
                    fidelity: m.fidelity,
                    is_day,
                });
            }
        }
    }
    connections.sort_by(|x, y| (&x.satellite, &x.pair).cmp(&(&y.satellite, &y.pair)));
    connections.dedup_by(|x, y| x.satellite == y.satellite && x.pair == y.pair);
    Ok(VisibilitySnapshot {
        slot_index: slot,
        connections,
    })
}

impl VisibilitySnapshot {
    /// Scheduling instance over all `satellites` (each with capacity `sat_capacity`).
    pub fn to_instance(
        &self,
        satellites: &[String],
        sat_capacity: u32,
        stations: &[GroundStation],
        pairs: &[StationPair],
    ) -> QsspInstance {
        QsspInstance::new(
            satellites
                .iter()
                .map(|id| SatelliteSpec {
                    id: id.clone(),
                    capacity: sat_capacity,
                })
                .collect(),
            stations
                .iter()
                .map(|s| StationSpec {
                    id: s.id.clone(),
                    receivers: s.receivers,
                })
                .collect(),
            pairs
                .iter()
                .map(|p| PairSpec {
                    id: p.id.clone(),
                    a: p.a.clone(),
                    b: p.b.clone(),
                    max_connections: p.max_connections,
                })
                .collect(),
            self.connections
                .iter()
                .map(|c| WeightSpec {
                    satellite: c.satellite.clone(),
                    pair: c.pair.clone(),
                    weight: c.weight,
                })
                .collect(),
        )
        .expect("snapshot ids come from the same stations and pairs")
    }

    /// Lookup of connection details by `(satellite, pair)`.
    pub fn by_key(&self) -> BTreeMap<(&str, &str), &SnapshotConnection> {
        self.connections
            .iter()
            .map(|c| ((c.satellite.as_str(), c.pair.as_str()), c))
            .collect()
    }
}
