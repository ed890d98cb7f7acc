use thiserror::Error;

use super::{solve_global_greedy, Assignment, QsspInstance};

/// Largest search tree the exact solver will explore.
pub const EXACT_NODE_LIMIT: f64 = 1e7;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExactError {
    #[error("instance too large for the exact solver: search tree bound {bound:.3e} exceeds {limit:.0e} nodes")]
    TooLarge { bound: f64, limit: f64 },
}

/// Upper bound on the branch-and-bound tree size.
///
/// Any partial assignment extends to a leaf by zeros, so the tree has at most
/// `leaves * (depth + 1)` nodes. Leaves are bounded by the product over
/// satellites of the number of allocation vectors within `T_i` and the
/// per-connection bounds.
pub fn search_tree_bound(inst: &QsspInstance) -> f64 {
    let mut leaves = 1.0f64;
    for (i, conns) in inst.by_satellite.iter().enumerate() {
        let t = inst.satellites[i].capacity as usize;
        // ways[s] = allocation vectors using exactly s units so far
        let mut ways = vec![0.0f64; t + 1];
        ways[0] = 1.0;
        for &k in conns {
            let m = (inst.connection_bound(k) as usize).min(t);
            let mut next = vec![0.0f64; t + 1];
            for (s, &w) in ways.iter().enumerate() {
                if w == 0.0 {
                    continue;
                }
                for add in 0..=m.min(t - s) {
                    next[s + add] += w;
                }
            }
            ways = next;
        }
        leaves *= ways.iter().sum::<f64>();
    }
    leaves * (inst.connections.len() + 1) as f64
}

struct Search<'a> {
    inst: &'a QsspInstance,
    sat_left: Vec<u32>,
    pair_left: Vec<Option<u32>>,
    station_left: Vec<Option<u32>>,
    x: Vec<u32>,
    best: f64,
    best_x: Vec<u32>,
}

impl Search<'_> {
    fn room(&self, k: usize) -> u32 {
        let c = self.inst.connections[k];
        let (a, b) = self.inst.pair_stations[c.pair];
        let mut m = self.sat_left[c.satellite];
        for left in [self.pair_left[c.pair], self.station_left[a], self.station_left[b]] {
            if let Some(l) = left {
                m = m.min(l);
            }
        }
        m
    }

    fn optimistic(&self, from: usize) -> f64 {
        (from..self.inst.connections.len())
            .map(|k| self.inst.connections[k].weight * f64::from(self.room(k)))
            .sum()
    }

    fn take(&mut self, k: usize, m: u32, sign: i64) {
        let c = self.inst.connections[k];
        let (a, b) = self.inst.pair_stations[c.pair];
        let apply = |v: &mut u32| *v = (i64::from(*v) - sign * i64::from(m)) as u32;
        apply(&mut self.sat_left[c.satellite]);
        if let Some(l) = self.pair_left[c.pair].as_mut() {
            apply(l);
        }
        for g in [a, b] {
            if let Some(r) = self.station_left[g].as_mut() {
                apply(r);
            }
        }
    }

    fn dfs(&mut self, k: usize, value: f64) {
        if k == self.inst.connections.len() {
            if value > self.best {
                self.best = value;
                self.best_x.clone_from(&self.x);
            }
            return;
        }
        if value + self.optimistic(k) <= self.best {
            return;
        }
        let w = self.inst.connections[k].weight;
        for m in (0..=self.room(k)).rev() {
            self.take(k, m, 1);
            self.x[k] = m;
            self.dfs(k + 1, value + w * f64::from(m));
            self.x[k] = 0;
            self.take(k, m, -1);
        }
    }
}

/// Provably optimal assignment by depth-first branch-and-bound over connection
/// multiplicities, highest multiplicity first, seeded with the global greedy
/// incumbent.
pub fn solve_exact(inst: &QsspInstance) -> Result<Assignment, ExactError> {
    let bound = search_tree_bound(inst);
    if bound > EXACT_NODE_LIMIT {
        return Err(ExactError::TooLarge {
            bound,
            limit: EXACT_NODE_LIMIT,
        });
    }
    let greedy = solve_global_greedy(inst);
    let mut best_x = vec![0; inst.connections.len()];
    for (k, c) in inst.connections.iter().enumerate() {
        best_x[k] = greedy.get(&inst.satellites[c.satellite].id, &inst.pairs[c.pair].id);
    }
    let best = inst
        .connections
        .iter()
        .zip(&best_x)
        .map(|(c, &m)| c.weight * f64::from(m))
        .sum();
    let mut search = Search {
        inst,
        sat_left: inst.satellites.iter().map(|s| s.capacity).collect(),
        pair_left: inst.pairs.iter().map(|p| p.max_connections.finite()).collect(),
        station_left: inst.stations.iter().map(|g| g.receivers.finite()).collect(),
        x: vec![0; inst.connections.len()],
        best,
        best_x,
    };
    search.dfs(0, 0.0);
    Ok(Assignment::from_multiplicities(inst, &search.best_x))
}
