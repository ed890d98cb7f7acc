use std::collections::BTreeMap;

use super::{Assignment, QsspInstance, WorkingState};
use crate::matching::{max_weight_b_matching, CapacitatedBipartiteGraph};

/// Receiver-agnostic b-matching rounds, each followed by a receiver backoff.
///
/// Every round matches the live connections against residual `T_i` and `L_j`,
/// then removes single units from the lightest connection touching an
/// overloaded station until all receivers fit. What survives is committed.
/// A round either commits at least one unit or finds the live set empty, so
/// the loop ends after at most `Σ T_i` rounds.
pub fn solve_greedy_backoff(inst: &QsspInstance) -> Assignment {
    let mut st = WorkingState::new(inst);
    loop {
        if st.is_done() {
            break;
        }
        let mut tentative = match_round(&st);
        let removed = back_off(&st, &mut tentative);
        for (&k, &m) in &tentative {
            for _ in 0..m {
                st.update_state(k).expect("backed-off matching fits the residuals");
            }
        }
        if !removed {
            break;
        }
    }
    st.into_assignment()
}

/// Tentative multiplicities from one b-matching over the live connections.
fn match_round(st: &WorkingState<'_>) -> BTreeMap<usize, u32> {
    let inst = st.inst;
    let mut left = BTreeMap::new();
    let mut right = BTreeMap::new();
    for &k in &st.live {
        let c = inst.connections[k];
        let n = left.len();
        left.entry(c.satellite).or_insert(n);
        let n = right.len();
        right.entry(c.pair).or_insert(n);
    }
    let mut left_caps = vec![0; left.len()];
    for (&i, &li) in &left {
        left_caps[li] = st.sat_left[i];
    }
    let mut right_caps = vec![0u32; right.len()];
    for (&j, &rj) in &right {
        right_caps[rj] = match st.pair_left[j] {
            Some(l) => l,
            // an uncapped pair can never take more than its satellites offer
            None => inst.by_pair[j]
                .iter()
                .filter(|k| st.live.contains(k))
                .map(|&k| st.sat_left[inst.connections[k].satellite])
                .fold(0u32, u32::saturating_add),
        };
    }
    let mut g = CapacitatedBipartiteGraph::new(left_caps, right_caps).expect("live entities have room");
    let mut local = BTreeMap::new();
    for &k in &st.live {
        let c = inst.connections[k];
        let (li, rj) = (left[&c.satellite], right[&c.pair]);
        g.add_edge(li, rj, c.weight).expect("connections are unique and positive");
        local.insert((li, rj), k);
    }
    max_weight_b_matching(&g)
        .multiplicities
        .into_iter()
        .map(|(li, rj, m)| (local[&(li, rj)], m))
        .collect()
}

/// Drops units until every station's receivers fit; true if anything was dropped.
fn back_off(st: &WorkingState<'_>, tentative: &mut BTreeMap<usize, u32>) -> bool {
    let inst = st.inst;
    let mut load = vec![0u64; inst.stations.len()];
    for (&k, &m) in tentative.iter() {
        let (a, b) = inst.pair_stations[inst.connections[k].pair];
        load[a] += u64::from(m);
        load[b] += u64::from(m);
    }
    let over = |load: &[u64], g: usize| st.station_left[g].map_or(false, |r| load[g] > u64::from(r));

    let mut removed = false;
    loop {
        let mut victim: Option<usize> = None;
        for (&k, &m) in tentative.iter() {
            if m == 0 {
                continue;
            }
            let (a, b) = inst.pair_stations[inst.connections[k].pair];
            if !(over(&load, a) || over(&load, b)) {
                continue;
            }
            // keys iterate in (satellite, pair) order, so strict < keeps the first on ties
            if victim.map_or(true, |v| inst.connections[k].weight < inst.connections[v].weight) {
                victim = Some(k);
            }
        }
        let Some(k) = victim else { break };
        *tentative.get_mut(&k).expect("victim is tentative") -= 1;
        let (a, b) = inst.pair_stations[inst.connections[k].pair];
        load[a] -= 1;
        load[b] -= 1;
        removed = true;
    }
    tentative.retain(|_, m| *m > 0);
    removed
}
