use super::{Assignment, QsspInstance, WorkingState};
use crate::rng::SplitMix64;

/// Uniform picks from the live set until it is empty.
pub fn solve_random(inst: &QsspInstance, seed: u64) -> Assignment {
    let mut rng = SplitMix64::new(seed);
    let mut st = WorkingState::new(inst);
    while !st.is_done() {
        let idx = rng.next_index(st.live.len());
        let k = *st.live.iter().nth(idx).expect("index below live count");
        st.update_state(k).expect("picked from the live set");
    }
    st.into_assignment()
}

/// Uniform pair from F', then its best satellite.
pub fn solve_local_greedy(inst: &QsspInstance, seed: u64) -> Assignment {
    let mut rng = SplitMix64::new(seed);
    let mut st = WorkingState::new(inst);
    while !st.is_done() {
        // live indices are sorted by (satellite, pair); collect distinct pairs in id order
        let mut open_pairs: Vec<usize> = st.live.iter().map(|&k| inst.connections[k].pair).collect();
        open_pairs.sort_unstable();
        open_pairs.dedup();
        let j = open_pairs[rng.next_index(open_pairs.len())];

        let mut best: Option<usize> = None;
        for &k in &inst.by_pair[j] {
            if !st.live.contains(&k) {
                continue;
            }
            // by_pair is in satellite order, so strict comparison keeps the lowest id on ties
            if best.map_or(true, |b| inst.connections[k].weight > inst.connections[b].weight) {
                best = Some(k);
            }
        }
        st.update_state(best.expect("pair in F' has a live connection"))
            .expect("picked from the live set");
    }
    st.into_assignment()
}

/// Repeatedly serves the heaviest live connection.
///
/// Weights are fixed, so the argmax sequence is the connection list sorted by
/// descending weight, each entry served until it leaves the live set.
pub fn solve_global_greedy(inst: &QsspInstance) -> Assignment {
    let mut order: Vec<usize> = (0..inst.connections.len()).collect();
    order.sort_by(|&a, &b| {
        inst.connections[b]
            .weight
            .total_cmp(&inst.connections[a].weight)
            .then(a.cmp(&b))
    });
    let mut st = WorkingState::new(inst);
    for k in order {
        while st.live.contains(&k) {
            st.update_state(k).expect("live connection has room");
        }
    }
    st.into_assignment()
}

#[cfg(test)]
mod tests {
    use super::super::test_fixtures::{greedy_trap, random_instance};
    use super::super::verify_feasible;
    use super::*;

    fn parse(json: &str) -> QsspInstance {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn singleton_live_set() {
        let inst = parse(
            r#"{"satellites": [{"id": "s", "capacity": 3}],
                "stations": [{"id": "a", "receivers": 1}, {"id": "b", "receivers": 1}],
                "pairs": [{"id": "a|b", "a": "a", "b": "b", "max_connections": 2}],
                "weights": [{"satellite": "s", "pair": "a|b", "weight": 2.5}]}"#,
        );
        for seed in 0..5 {
            let x = solve_random(&inst, seed);
            assert_eq!(x.get("s", "a|b"), 1);
            assert_eq!(x.objective, 2.5);
        }
    }

    #[test]
    fn random_is_seed_deterministic() {
        let mut rng = SplitMix64::new(5);
        for _ in 0..50 {
            let inst = random_instance(&mut rng, 5, 5, 3, false);
            assert_eq!(solve_random(&inst, 99), solve_random(&inst, 99));
            assert_eq!(solve_local_greedy(&inst, 99), solve_local_greedy(&inst, 99));
        }
    }

    #[test]
    fn local_greedy_takes_best_satellite() {
        let inst = parse(
            r#"{"satellites": [{"id": "s1", "capacity": 1}, {"id": "s2", "capacity": 1}],
                "stations": [{"id": "a", "receivers": 1}, {"id": "b", "receivers": 1}],
                "pairs": [{"id": "a|b", "a": "a", "b": "b", "max_connections": 1}],
                "weights": [{"satellite": "s1", "pair": "a|b", "weight": 2},
                            {"satellite": "s2", "pair": "a|b", "weight": 9}]}"#,
        );
        let x = solve_local_greedy(&inst, 0);
        assert_eq!(x.get("s2", "a|b"), 1);
        assert_eq!(x.objective, 9.0);
    }

    #[test]
    fn local_greedy_tie_goes_to_lowest_id() {
        let inst = parse(
            r#"{"satellites": [{"id": "zeta", "capacity": 1}, {"id": "alpha", "capacity": 1}],
                "stations": [{"id": "a", "receivers": 1}, {"id": "b", "receivers": 1}],
                "pairs": [{"id": "a|b", "a": "a", "b": "b", "max_connections": 1}],
                "weights": [{"satellite": "zeta", "pair": "a|b", "weight": 4},
                            {"satellite": "alpha", "pair": "a|b", "weight": 4}]}"#,
        );
        let x = solve_local_greedy(&inst, 7);
        assert_eq!(x.get("alpha", "a|b"), 1);
        assert_eq!(x.get("zeta", "a|b"), 0);
    }

    #[test]
    fn global_greedy_forced_argmax() {
        let inst = parse(
            r#"{"satellites": [{"id": "s1", "capacity": 1}],
                "stations": [{"id": "a", "receivers": 1}, {"id": "b", "receivers": 1},
                             {"id": "c", "receivers": 1}, {"id": "d", "receivers": 1}],
                "pairs": [{"id": "j1", "a": "a", "b": "b", "max_connections": 1},
                          {"id": "j2", "a": "c", "b": "d", "max_connections": 1}],
                "weights": [{"satellite": "s1", "pair": "j1", "weight": 5},
                            {"satellite": "s1", "pair": "j2", "weight": 3}]}"#,
        );
        let x = solve_global_greedy(&inst);
        assert_eq!(x.objective, 5.0);
        assert_eq!(x.get("s1", "j1"), 1);
    }

    #[test]
    fn global_greedy_trap() {
        let x = solve_global_greedy(&greedy_trap());
        assert_eq!(x.objective, 10.0);
    }

    /// Literal transcription of the argmax loop, for comparison with the sorted sweep.
    fn global_greedy_naive(inst: &QsspInstance) -> Assignment {
        let mut st = WorkingState::new(inst);
        while !st.is_done() {
            let mut best = None::<usize>;
            for &k in st.live.iter() {
                if best.map_or(true, |b| inst.connections[k].weight > inst.connections[b].weight) {
                    best = Some(k);
                }
            }
            st.update_state(best.unwrap()).unwrap();
        }
        st.into_assignment()
    }

    #[test]
    fn global_greedy_matches_naive_loop() {
        let mut rng = SplitMix64::new(17);
        for _ in 0..300 {
            let free = rng.next_f64() < 0.3;
            let inst = random_instance(&mut rng, 5, 5, 3, free);
            assert_eq!(solve_global_greedy(&inst), global_greedy_naive(&inst));
        }
    }

    #[test]
    fn heuristics_are_feasible() {
        let mut rng = SplitMix64::new(3);
        for t in 0..300 {
            let inst = random_instance(&mut rng, 6, 6, 3, t % 4 == 0);
            for x in [
                solve_random(&inst, t),
                solve_local_greedy(&inst, t),
                solve_global_greedy(&inst),
            ] {
                let r = verify_feasible(&inst, &x).unwrap();
                assert!(r.is_feasible(), "{:?}", r.violations);
            }
        }
    }
}
