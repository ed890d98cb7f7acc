use std::fmt;

use super::{Assignment, Capacity, InstanceError, QsspInstance};

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    Satellite { id: String, used: u64, capacity: u32 },
    Pair { id: String, used: u64, capacity: u32 },
    Station { id: String, used: u64, capacity: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, id, used, cap) = match self {
            Violation::Satellite { id, used, capacity } => ("satellite", id, used, capacity),
            Violation::Pair { id, used, capacity } => ("pair", id, used, capacity),
            Violation::Station { id, used, capacity } => ("station", id, used, capacity),
        };
        write!(f, "{kind} {id} uses {used} of {cap}")
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the satellite, pair and receiver constraints of `x` against `inst`.
/// Integrality and non-negativity hold by construction of [`Assignment`].
pub fn verify_feasible(inst: &QsspInstance, x: &Assignment) -> Result<FeasibilityReport, InstanceError> {
    let mut sat_used = vec![0u64; inst.satellites.len()];
    let mut pair_used = vec![0u64; inst.pairs.len()];
    let mut station_used = vec![0u64; inst.stations.len()];
    for e in &x.entries {
        let i = inst.satellite_index(&e.satellite).ok_or_else(|| InstanceError::UnknownId {
            kind: "satellite",
            id: e.satellite.clone(),
        })?;
        let j = inst.pair_index(&e.pair).ok_or_else(|| InstanceError::UnknownId {
            kind: "pair",
            id: e.pair.clone(),
        })?;
        let m = u64::from(e.x);
        sat_used[i] += m;
        pair_used[j] += m;
        let (a, b) = inst.pair_stations[j];
        station_used[a] += m;
        station_used[b] += m;
    }

    let mut report = FeasibilityReport::default();
    for (s, &used) in inst.satellites.iter().zip(&sat_used) {
        if used > u64::from(s.capacity) {
            report.violations.push(Violation::Satellite {
                id: s.id.clone(),
                used,
                capacity: s.capacity,
            });
        }
    }
    for (p, &used) in inst.pairs.iter().zip(&pair_used) {
        if let Capacity::Finite(capacity) = p.max_connections {
            if used > u64::from(capacity) {
                report.violations.push(Violation::Pair {
                    id: p.id.clone(),
                    used,
                    capacity,
                });
            }
        }
    }
    for (g, &used) in inst.stations.iter().zip(&station_used) {
        if let Capacity::Finite(capacity) = g.receivers {
            if used > u64::from(capacity) {
                report.violations.push(Violation::Station {
                    id: g.id.clone(),
                    used,
                    capacity,
                });
            }
        }
    }
    Ok(report)
}
