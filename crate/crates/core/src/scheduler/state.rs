use std::collections::BTreeSet;

use thiserror::Error;

use super::{Assignment, QsspInstance};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    #[error("connection {0} is not live")]
    NotLive(usize),
    #[error("connection {0} has no residual capacity")]
    Exhausted(usize),
}

/// Residual capacities, partial assignment and live connection set `C`
/// shared by the greedy heuristics.
#[derive(Debug, Clone)]
pub struct WorkingState<'a> {
    pub(crate) inst: &'a QsspInstance,
    pub(crate) sat_left: Vec<u32>,
    /// `None` for unbounded.
    pub(crate) pair_left: Vec<Option<u32>>,
    pub(crate) station_left: Vec<Option<u32>>,
    pub(crate) x: Vec<u32>,
    /// Live connection indices; index order is `(satellite id, pair id)` order.
    pub(crate) live: BTreeSet<usize>,
}

impl<'a> WorkingState<'a> {
    /// Full residuals; `C` holds every positive-weight connection whose
    /// resources are all nonzero.
    pub fn new(inst: &'a QsspInstance) -> Self {
        let mut state = Self {
            inst,
            sat_left: inst.satellites.iter().map(|s| s.capacity).collect(),
            pair_left: inst.pairs.iter().map(|p| p.max_connections.finite()).collect(),
            station_left: inst.stations.iter().map(|g| g.receivers.finite()).collect(),
            x: vec![0; inst.connections.len()],
            live: BTreeSet::new(),
        };
        state.live = (0..inst.connections.len()).filter(|&k| state.has_room(k)).collect();
        state
    }

    /// Whether every resource used by connection `k` has at least one unit left.
    pub fn has_room(&self, k: usize) -> bool {
        let c = self.inst.connections[k];
        let (a, b) = self.inst.pair_stations[c.pair];
        let open = |left: Option<u32>| left.map_or(true, |l| l > 0);
        self.sat_left[c.satellite] > 0
            && open(self.pair_left[c.pair])
            && open(self.station_left[a])
            && open(self.station_left[b])
    }

    pub fn live(&self) -> &BTreeSet<usize> {
        &self.live
    }

    pub fn is_done(&self) -> bool {
        self.live.is_empty()
    }

    /// Serves connection `k` once: `x += 1`, every resource on it loses a
    /// unit, and every connection of an entity that ran out leaves `C`.
    pub fn update_state(&mut self, k: usize) -> Result<(), StateError> {
        if !self.live.contains(&k) {
            return Err(StateError::NotLive(k));
        }
        if !self.has_room(k) {
            return Err(StateError::Exhausted(k));
        }
        let inst = self.inst;
        let c = inst.connections[k];
        let (a, b) = inst.pair_stations[c.pair];
        self.x[k] += 1;

        self.sat_left[c.satellite] -= 1;
        if self.sat_left[c.satellite] == 0 {
            for k2 in &inst.by_satellite[c.satellite] {
                self.live.remove(k2);
            }
        }
        if let Some(l) = self.pair_left[c.pair].as_mut() {
            *l -= 1;
            if *l == 0 {
                for k2 in &inst.by_pair[c.pair] {
                    self.live.remove(k2);
                }
            }
        }
        for g in [a, b] {
            if let Some(r) = self.station_left[g].as_mut() {
                *r -= 1;
                if *r == 0 {
                    for k2 in &inst.by_station[g] {
                        self.live.remove(k2);
                    }
                }
            }
        }
        Ok(())
    }

    pub fn multiplicities(&self) -> &[u32] {
        &self.x
    }

    pub fn into_assignment(self) -> Assignment {
        Assignment::from_multiplicities(self.inst, &self.x)
    }
}
