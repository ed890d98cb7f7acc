use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum InstanceError {
    #[error("duplicate {kind} id {id:?}")]
    DuplicateId { kind: &'static str, id: String },
    #[error("unknown {kind} id {id:?}")]
    UnknownId { kind: &'static str, id: String },
    #[error("pair {0:?} joins a station to itself")]
    SelfPair(String),
    #[error("weight of ({satellite:?}, {pair:?}) must be positive and finite, got {weight}")]
    BadWeight {
        satellite: String,
        pair: String,
        weight: f64,
    },
    #[error("duplicate weight entry for ({0:?}, {1:?})")]
    DuplicateWeight(String, String),
}

/// A resource bound that may be absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Capacity {
    Finite(u32),
    Unbounded,
}

impl Capacity {
    pub fn finite(self) -> Option<u32> {
        match self {
            Capacity::Finite(c) => Some(c),
            Capacity::Unbounded => None,
        }
    }

    pub fn min(self, other: Capacity) -> Capacity {
        match (self, other) {
            (Capacity::Finite(a), Capacity::Finite(b)) => Capacity::Finite(a.min(b)),
            (Capacity::Finite(a), Capacity::Unbounded) | (Capacity::Unbounded, Capacity::Finite(a)) => {
                Capacity::Finite(a)
            }
            _ => Capacity::Unbounded,
        }
    }

    pub fn admits(self, used: u64) -> bool {
        match self {
            Capacity::Finite(c) => used <= u64::from(c),
            Capacity::Unbounded => true,
        }
    }
}

impl fmt::Display for Capacity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Capacity::Finite(c) => write!(f, "{c}"),
            Capacity::Unbounded => f.write_str("unbounded"),
        }
    }
}

impl Serialize for Capacity {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Capacity::Finite(c) => s.serialize_u32(*c),
            Capacity::Unbounded => s.serialize_str("unbounded"),
        }
    }
}

impl<'de> Deserialize<'de> for Capacity {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(u32),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(c) => Ok(Capacity::Finite(c)),
            Raw::Text(t) if t == "unbounded" => Ok(Capacity::Unbounded),
            Raw::Text(t) => Err(serde::de::Error::custom(format!(
                "capacity must be a non-negative integer or \"unbounded\", got {t:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SatelliteSpec {
    pub id: String,
    /// Number of pairs the satellite can serve at once (T_i).
    pub capacity: u32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StationSpec {
    pub id: String,
    /// Receivers at the station (R_g).
    pub receivers: Capacity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSpec {
    pub id: String,
    pub a: String,
    pub b: String,
    /// Connections the pair accepts (L_j).
    pub max_connections: Capacity,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub satellite: String,
    pub pair: String,
    pub weight: f64,
}

/// JSON document form of an instance.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct InstanceDoc {
    #[serde(default)]
    pub satellites: Vec<SatelliteSpec>,
    #[serde(default)]
    pub stations: Vec<StationSpec>,
    #[serde(default)]
    pub pairs: Vec<PairSpec>,
    #[serde(default)]
    pub weights: Vec<WeightSpec>,
}

/// A satellite-pair combination with positive weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Connection {
    pub satellite: usize,
    pub pair: usize,
    pub weight: f64,
}

/// One slot's scheduling problem. Entities are stored sorted by id and
/// referenced by index; connections are sorted by `(satellite id, pair id)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QsspInstance {
    pub(crate) satellites: Vec<SatelliteSpec>,
    pub(crate) stations: Vec<StationSpec>,
    pub(crate) pairs: Vec<PairSpec>,
    pub(crate) pair_stations: Vec<(usize, usize)>,
    pub(crate) connections: Vec<Connection>,
    pub(crate) by_satellite: Vec<Vec<usize>>,
    pub(crate) by_pair: Vec<Vec<usize>>,
    pub(crate) by_station: Vec<Vec<usize>>,
    sat_index: BTreeMap<String, usize>,
    pair_index: BTreeMap<String, usize>,
    station_index: BTreeMap<String, usize>,
}

fn index_of<T>(items: &[T], id: impl Fn(&T) -> &str, kind: &'static str) -> Result<BTreeMap<String, usize>, InstanceError> {
    let mut map = BTreeMap::new();
    for (k, item) in items.iter().enumerate() {
        if map.insert(id(item).to_string(), k).is_some() {
            return Err(InstanceError::DuplicateId {
                kind,
                id: id(item).to_string(),
            });
        }
    }
    Ok(map)
}

impl QsspInstance {
    pub fn new(
        mut satellites: Vec<SatelliteSpec>,
        mut stations: Vec<StationSpec>,
        mut pairs: Vec<PairSpec>,
        weights: Vec<WeightSpec>,
    ) -> Result<Self, InstanceError> {
        satellites.sort_by(|a, b| a.id.cmp(&b.id));
        stations.sort_by(|a, b| a.id.cmp(&b.id));
        pairs.sort_by(|a, b| a.id.cmp(&b.id));
        let sat_index = index_of(&satellites, |s| &s.id, "satellite")?;
        let station_index = index_of(&stations, |s| &s.id, "station")?;
        let pair_index = index_of(&pairs, |p| &p.id, "pair")?;

        let station = |id: &str| {
            station_index.get(id).copied().ok_or_else(|| InstanceError::UnknownId {
                kind: "station",
                id: id.to_string(),
            })
        };
        let mut pair_stations = Vec::with_capacity(pairs.len());
        for p in &pairs {
            let (a, b) = (station(&p.a)?, station(&p.b)?);
            if a == b {
                return Err(InstanceError::SelfPair(p.id.clone()));
            }
            pair_stations.push((a.min(b), a.max(b)));
        }

        let mut seen = BTreeSet::new();
        let mut connections = Vec::with_capacity(weights.len());
        for w in weights {
            let satellite = *sat_index.get(&w.satellite).ok_or_else(|| InstanceError::UnknownId {
                kind: "satellite",
                id: w.satellite.clone(),
            })?;
            let pair = *pair_index.get(&w.pair).ok_or_else(|| InstanceError::UnknownId {
                kind: "pair",
                id: w.pair.clone(),
            })?;
            if !(w.weight > 0.0 && w.weight.is_finite()) {
                return Err(InstanceError::BadWeight {
                    satellite: w.satellite,
                    pair: w.pair,
                    weight: w.weight,
                });
            }
            if !seen.insert((satellite, pair)) {
                return Err(InstanceError::DuplicateWeight(w.satellite, w.pair));
            }
            connections.push(Connection {
                satellite,
                pair,
                weight: w.weight,
            });
        }
        connections.sort_by_key(|c| (c.satellite, c.pair));

        let mut by_satellite = vec![Vec::new(); satellites.len()];
        let mut by_pair = vec![Vec::new(); pairs.len()];
        let mut by_station = vec![Vec::new(); stations.len()];
        for (k, c) in connections.iter().enumerate() {
            by_satellite[c.satellite].push(k);
            by_pair[c.pair].push(k);
            let (a, b) = pair_stations[c.pair];
            by_station[a].push(k);
            by_station[b].push(k);
        }

        Ok(Self {
            satellites,
            stations,
            pairs,
            pair_stations,
            connections,
            by_satellite,
            by_pair,
            by_station,
            sat_index,
            pair_index,
            station_index,
        })
    }

    pub fn from_doc(doc: InstanceDoc) -> Result<Self, InstanceError> {
        Self::new(doc.satellites, doc.stations, doc.pairs, doc.weights)
    }

    pub fn to_doc(&self) -> InstanceDoc {
        InstanceDoc {
            satellites: self.satellites.clone(),
            stations: self.stations.clone(),
            pairs: self.pairs.clone(),
            weights: self
                .connections
                .iter()
                .map(|c| WeightSpec {
                    satellite: self.satellites[c.satellite].id.clone(),
                    pair: self.pairs[c.pair].id.clone(),
                    weight: c.weight,
                })
                .collect(),
        }
    }

    pub fn satellites(&self) -> &[SatelliteSpec] {
        &self.satellites
    }

    pub fn stations(&self) -> &[StationSpec] {
        &self.stations
    }

    pub fn pairs(&self) -> &[PairSpec] {
        &self.pairs
    }

    pub fn connections(&self) -> &[Connection] {
        &self.connections
    }

    /// Station indices `(a, b)` of a pair, `a < b`.
    pub fn pair_stations(&self, pair: usize) -> (usize, usize) {
        self.pair_stations[pair]
    }

    pub fn satellite_index(&self, id: &str) -> Option<usize> {
        self.sat_index.get(id).copied()
    }

    pub fn pair_index(&self, id: &str) -> Option<usize> {
        self.pair_index.get(id).copied()
    }

    pub fn station_index(&self, id: &str) -> Option<usize> {
        self.station_index.get(id).copied()
    }

    /// Weight of `(satellite, pair)`; zero when the connection is absent.
    pub fn weight(&self, satellite: usize, pair: usize) -> f64 {
        self.by_satellite[satellite]
            .iter()
            .map(|&k| self.connections[k])
            .find(|c| c.pair == pair)
            .map_or(0.0, |c| c.weight)
    }

    /// Largest multiplicity a connection can take on its own.
    pub fn connection_bound(&self, k: usize) -> u32 {
        let c = self.connections[k];
        let (a, b) = self.pair_stations[c.pair];
        let cap = Capacity::Finite(self.satellites[c.satellite].capacity)
            .min(self.pairs[c.pair].max_connections)
            .min(self.stations[a].receivers)
            .min(self.stations[b].receivers);
        cap.finite().expect("satellite capacity is finite")
    }

    /// Copy of the instance with every station's receivers replaced.
    pub fn with_receivers(&self, receivers: Capacity) -> Self {
        let mut doc = self.to_doc();
        for s in &mut doc.stations {
            s.receivers = receivers;
        }
        Self::from_doc(doc).expect("already validated")
    }
}

impl Serialize for QsspInstance {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.to_doc().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QsspInstance {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let doc = InstanceDoc::deserialize(d)?;
        QsspInstance::from_doc(doc).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssignmentEntry {
    pub satellite: String,
    pub pair: String,
    pub x: u32,
}

/// Values of the decision variables, with the objective they achieve.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Assignment {
    pub objective: f64,
    /// Nonzero `x_ij`, sorted by `(satellite, pair)`.
    pub entries: Vec<AssignmentEntry>,
}

impl Assignment {
    /// Builds an assignment from per-connection multiplicities.
    pub fn from_multiplicities(inst: &QsspInstance, x: &[u32]) -> Self {
        debug_assert_eq!(x.len(), inst.connections.len());
        let mut objective = 0.0;
        let mut entries = Vec::new();
        for (c, &m) in inst.connections.iter().zip(x) {
            if m > 0 {
                objective += c.weight * f64::from(m);
                entries.push(AssignmentEntry {
                    satellite: inst.satellites[c.satellite].id.clone(),
                    pair: inst.pairs[c.pair].id.clone(),
                    x: m,
                });
            }
        }
        Self { objective, entries }
    }

    pub fn total_connections(&self) -> u64 {
        self.entries.iter().map(|e| u64::from(e.x)).sum()
    }

    pub fn get(&self, satellite: &str, pair: &str) -> u32 {
        self.entries
            .iter()
            .find(|e| e.satellite == satellite && e.pair == pair)
            .map_or(0, |e| e.x)
    }
}
