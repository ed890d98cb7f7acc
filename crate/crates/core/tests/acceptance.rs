//! Acceptance criteria. Run with `cargo test --test acceptance -- --nocapture`
//! to see one PASS/FAIL line per criterion.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use qsat::channel::photon_number_dist;
use qsat::harness::{aggregate_metrics, export_csv, run_scenario, ScenarioConfig, Summary};
use qsat::matching::{max_weight_b_matching, CapacitatedBipartiteGraph};
use qsat::orbital::{footprint_radius, OrbitalElements};
use qsat::rng::SplitMix64;
use qsat::scheduler::{
    brute_force_3dm, reduce_3dm_to_qssp, solve_exact, solve_global_greedy, solve_greedy_backoff,
    solve_local_greedy, solve_random, verify_feasible, Capacity, InstanceDoc, PairSpec, QsspInstance,
    SatelliteSpec, Solver, StationSpec, ThreeDmInstance, WeightSpec,
};

fn report(name: &str, ok: bool, elapsed: Duration, limit: Option<Duration>, detail: &str) {
    let in_time = limit.map_or(true, |l| elapsed <= l);
    let status = if ok && in_time { "PASS" } else { "FAIL" };
    let budget = limit.map_or(String::new(), |l| format!(" (limit {:.0} s)", l.as_secs_f64()));
    println!("[{status}] {name}: {detail}; {:.2} s{budget}", elapsed.as_secs_f64());
    assert!(ok, "{name}: {detail}");
    assert!(in_time, "{name}: took {:.1} s{budget}", elapsed.as_secs_f64());
}

/// Random instance: |S| <= 4, |F| <= 4 over up to 5 stations, capacities in 0..=2
/// (pairs sometimes uncapped), integer weights in 1..=10.
fn random_instance(rng: &mut SplitMix64, unbounded_receivers: bool) -> QsspInstance {
    let ns = 1 + rng.next_index(4);
    let nf = 1 + rng.next_index(4);
    let ng = 2 + rng.next_index(4);
    let cap = |rng: &mut SplitMix64| rng.next_index(3) as u32;
    let mut doc = InstanceDoc::default();
    for g in 0..ng {
        let receivers = if unbounded_receivers {
            Capacity::Unbounded
        } else {
            Capacity::Finite(cap(rng))
        };
        doc.stations.push(StationSpec { id: format!("g{g}"), receivers });
    }
    for j in 0..nf {
        let a = rng.next_index(ng);
        let b = (a + 1 + rng.next_index(ng - 1)) % ng;
        let max_connections = if rng.next_index(5) == 0 {
            Capacity::Unbounded
        } else {
            Capacity::Finite(cap(rng))
        };
        doc.pairs.push(PairSpec {
            id: format!("f{j}"),
            a: format!("g{a}"),
            b: format!("g{b}"),
            max_connections,
        });
    }
    for i in 0..ns {
        doc.satellites.push(SatelliteSpec { id: format!("s{i}"), capacity: cap(rng) });
        for j in 0..nf {
            if rng.next_index(3) > 0 {
                doc.weights.push(WeightSpec {
                    satellite: format!("s{i}"),
                    pair: format!("f{j}"),
                    weight: (1 + rng.next_index(10)) as f64,
                });
            }
        }
    }
    QsspInstance::from_doc(doc).unwrap()
}

/// Full enumeration of multiplicity vectors with every constraint checked at the leaves.
fn enumeration_oracle(inst: &QsspInstance) -> f64 {
    let doc = inst.to_doc();
    let sat_cap = |id: &str| doc.satellites.iter().find(|s| s.id == id).unwrap().capacity;
    let pair = |id: &str| doc.pairs.iter().find(|p| p.id == id).unwrap();
    let recv = |id: &str| doc.stations.iter().find(|s| s.id == id).unwrap().receivers;
    let conns: Vec<(&str, &PairSpec, f64)> =
        doc.weights.iter().map(|w| (w.satellite.as_str(), pair(&w.pair), w.weight)).collect();
    // any multiplicity above the satellite's capacity is infeasible on its own
    let bound: Vec<u32> = conns.iter().map(|c| sat_cap(c.0)).collect();
    let mut x = vec![0u32; conns.len()];
    let mut best = 0.0f64;
    loop {
        let mut feasible = true;
        let mut value = 0.0;
        let fits = |cap: Capacity, used: u32| match cap {
            Capacity::Finite(c) => used <= c,
            Capacity::Unbounded => true,
        };
        for s in &doc.satellites {
            let used: u32 = conns.iter().zip(&x).filter(|(c, _)| c.0 == s.id).map(|(_, m)| m).sum();
            feasible &= used <= s.capacity;
        }
        for p in &doc.pairs {
            let used: u32 = conns.iter().zip(&x).filter(|(c, _)| c.1.id == p.id).map(|(_, m)| m).sum();
            feasible &= fits(p.max_connections, used);
        }
        for g in &doc.stations {
            let used: u32 = conns
                .iter()
                .zip(&x)
                .filter(|(c, _)| c.1.a == g.id || c.1.b == g.id)
                .map(|(_, m)| m)
                .sum();
            feasible &= fits(recv(&g.id), used);
        }
        if feasible {
            for (c, &m) in conns.iter().zip(&x) {
                value += c.2 * f64::from(m);
            }
            best = best.max(value);
        }
        let mut k = 0;
        while k < x.len() && x[k] == bound[k] {
            x[k] = 0;
            k += 1;
        }
        if k == x.len() {
            return best;
        }
        x[k] += 1;
    }
}

#[test]
fn solver_vs_oracle() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x5EED_0001);
    let mut mismatches = 0;
    let mut heuristic_excess = 0;
    for t in 0..500u64 {
        let inst = random_instance(&mut rng, false);
        let exact = solve_exact(&inst).unwrap().objective;
        if exact != enumeration_oracle(&inst) {
            mismatches += 1;
        }
        let heur = [
            solve_random(&inst, t).objective,
            solve_local_greedy(&inst, t).objective,
            solve_global_greedy(&inst).objective,
            solve_greedy_backoff(&inst).objective,
        ];
        heuristic_excess += heur.iter().filter(|&&h| h > exact).count();
    }
    report(
        "solver vs enumeration oracle",
        mismatches == 0 && heuristic_excess == 0,
        start.elapsed(),
        Some(Duration::from_secs(30)),
        &format!("500 instances, {mismatches} exact mismatches, {heuristic_excess} heuristic results above exact"),
    );
}

#[test]
fn greedy_backoff_optimal_without_receiver_limits() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x5EED_0002);
    let mut mismatches = 0;
    for _ in 0..200 {
        let inst = random_instance(&mut rng, true);
        if solve_greedy_backoff(&inst).objective != solve_exact(&inst).unwrap().objective {
            mismatches += 1;
        }
    }
    report(
        "greedy_backoff optimal with unbounded receivers",
        mismatches == 0,
        start.elapsed(),
        Some(Duration::from_secs(30)),
        &format!("200 instances, {mismatches} mismatches"),
    );
}

/// Largest pairwise-disjoint hyperedge set by include/exclude recursion.
fn max_3dm(edges: &[(String, String, String)], used: &mut [BTreeSet<String>; 3], k: usize) -> usize {
    if k == edges.len() {
        return 0;
    }
    let skip = max_3dm(edges, used, k + 1);
    let (a, b, c) = &edges[k];
    if used[0].contains(a) || used[1].contains(b) || used[2].contains(c) {
        return skip;
    }
    used[0].insert(a.clone());
    used[1].insert(b.clone());
    used[2].insert(c.clone());
    let take = 1 + max_3dm(edges, used, k + 1);
    used[0].remove(a);
    used[1].remove(b);
    used[2].remove(c);
    skip.max(take)
}

#[test]
fn three_dm_reduction_equivalence() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x5EED_0003);
    let mut mismatches = 0;
    for _ in 0..200 {
        let sizes = [1 + rng.next_index(5), 1 + rng.next_index(5), 1 + rng.next_index(5)];
        let v: Vec<Vec<String>> = sizes
            .iter()
            .enumerate()
            .map(|(k, &n)| (0..n).map(|i| format!("{}{i}", ["u", "v", "w"][k])).collect())
            .collect();
        let mut edges = BTreeSet::new();
        let target = rng.next_index(9);
        for _ in 0..target {
            edges.insert((
                v[0][rng.next_index(sizes[0])].clone(),
                v[1][rng.next_index(sizes[1])].clone(),
                v[2][rng.next_index(sizes[2])].clone(),
            ));
        }
        let h = ThreeDmInstance {
            v1: v[0].clone(),
            v2: v[1].clone(),
            v3: v[2].clone(),
            edges: edges.into_iter().collect(),
        };
        let brute = brute_force_3dm(&h).unwrap();
        let (inst, _) = reduce_3dm_to_qssp(&h).unwrap();
        let exact = solve_exact(&inst).unwrap().objective;
        let independent = max_3dm(&h.edges, &mut Default::default(), 0);
        if exact != brute as f64 || brute != independent {
            mismatches += 1;
        }
    }
    report(
        "3D matching reduction equivalence",
        mismatches == 0,
        start.elapsed(),
        Some(Duration::from_secs(60)),
        &format!("200 hypergraphs, {mismatches} mismatches"),
    );
}

fn brute_force_b_matching(left: &[u32], right: &[u32], edges: &[(usize, usize, f64)]) -> f64 {
    fn rec(k: usize, edges: &[(usize, usize, f64)], lu: &mut [u32], ru: &mut [u32], acc: f64) -> f64 {
        if k == edges.len() {
            return acc;
        }
        let (i, j, w) = edges[k];
        let mut best = rec(k + 1, edges, lu, ru, acc);
        let mut m = 0;
        while lu[i] > 0 && ru[j] > 0 {
            lu[i] -= 1;
            ru[j] -= 1;
            m += 1;
            best = best.max(rec(k + 1, edges, lu, ru, acc + w * f64::from(m)));
        }
        lu[i] += m;
        ru[j] += m;
        best
    }
    rec(0, edges, &mut left.to_vec(), &mut right.to_vec(), 0.0)
}

#[test]
fn b_matching_optimality() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x5EED_0004);
    let mut worst = 0.0f64;
    for _ in 0..500 {
        let nl = 1 + rng.next_index(4);
        let nr = 1 + rng.next_index(4);
        let left: Vec<u32> = (0..nl).map(|_| 1 + rng.next_index(3) as u32).collect();
        let right: Vec<u32> = (0..nr).map(|_| 1 + rng.next_index(3) as u32).collect();
        let mut g = CapacitatedBipartiteGraph::new(left.clone(), right.clone()).unwrap();
        let mut edges = Vec::new();
        for i in 0..nl {
            for j in 0..nr {
                if rng.next_f64() < 0.6 {
                    let w = 0.01 + 10.0 * rng.next_f64();
                    g.add_edge(i, j, w).unwrap();
                    edges.push((i, j, w));
                }
            }
        }
        let got = max_weight_b_matching(&g).total_weight;
        worst = worst.max((got - brute_force_b_matching(&left, &right, &edges)).abs());
    }
    report(
        "b-matching optimality",
        worst <= 1e-9,
        start.elapsed(),
        Some(Duration::from_secs(30)),
        &format!("500 graphs, max |flow - brute force| = {worst:.3e}"),
    );
}

#[test]
fn geometry_checks() {
    let start = Instant::now();
    let fp = footprint_radius(550e3, 20.0);
    let period = OrbitalElements {
        satellite_id: "x".into(),
        epoch: 0.0,
        inclination: 53.0,
        raan: 0.0,
        eccentricity: 0.0,
        arg_perigee: 0.0,
        mean_anomaly_at_epoch: 0.0,
        mean_motion: OrbitalElements::mean_motion_for_altitude(550e3),
    }
    .period_seconds()
        / 60.0;
    let ok = (fp - 1_125e3).abs() <= 10e3 && (2.0 * fp - 2_250e3).abs() <= 20e3 && (94.0..=102.0).contains(&period);
    report(
        "geometry",
        ok,
        start.elapsed(),
        None,
        &format!(
            "footprint(550 km, 20 deg) = {:.1} km, 2 x footprint = {:.1} km, period = {period:.2} min",
            fp / 1e3,
            2.0 * fp / 1e3
        ),
    );
}

#[test]
fn photon_statistics() {
    let start = Instant::now();
    let mut worst_sum = 0.0f64;
    for ns in [0.01, 0.078, 0.5, 2.0] {
        // the tail beyond n terms is (n+1+ns)/(1+ns) * (ns/(1+ns))^(n+1) * ... ; sum until negligible
        let mut total = 0.0;
        let mut n = 0;
        loop {
            let p = photon_number_dist(ns, n).unwrap();
            total += p;
            n += 1;
            if p < 1e-18 && n > 10 {
                break;
            }
        }
        worst_sum = worst_sum.max((total - 1.0f64).abs());
    }
    let p0 = photon_number_dist(0.078, 0).unwrap();
    let direct = 1.0 / (1.078f64 * 1.078);
    let ok = worst_sum <= 1e-12 && (p0 - direct).abs() <= 1e-12;
    report(
        "photon statistics",
        ok,
        start.elapsed(),
        None,
        &format!("max |sum p(n) - 1| = {worst_sum:.2e}, p(0; 0.078) = {p0:.15} vs {direct:.15}"),
    );
}

#[test]
fn feasibility_fuzzing() {
    let start = Instant::now();
    let mut rng = SplitMix64::new(0x5EED_0007);
    let mut violations = [0usize; 4];
    for t in 0..1000u64 {
        let unbounded = t % 4 == 0;
        let inst = random_instance(&mut rng, unbounded);
        let outs = [
            solve_random(&inst, t),
            solve_local_greedy(&inst, t),
            solve_global_greedy(&inst),
            solve_greedy_backoff(&inst),
        ];
        for (k, x) in outs.iter().enumerate() {
            if !verify_feasible(&inst, x).unwrap().is_feasible() {
                violations[k] += 1;
            }
        }
    }
    report(
        "feasibility fuzzing",
        violations.iter().all(|&v| v == 0),
        start.elapsed(),
        Some(Duration::from_secs(60)),
        &format!("1000 instances per heuristic, infeasible outputs (random, local, global, backoff) = {violations:?}"),
    );
}

fn synthetic(solver: Solver, receivers: u32) -> ScenarioConfig {
    let path = qsat::bundled_data_dir().join("synthetic_scenario.json");
    let mut cfg = ScenarioConfig::load(&path).unwrap();
    cfg.solver = solver;
    cfg.receivers = Capacity::Finite(receivers);
    cfg
}

fn run(solver: Solver, receivers: u32) -> Summary {
    aggregate_metrics(&run_scenario(&synthetic(solver, receivers)).unwrap())
}

struct TrendRuns {
    gb: Summary,
    gg: Summary,
    rnd: Summary,
    lg: Summary,
    gb5: Summary,
    gg5: Summary,
    elapsed: Duration,
}

/// The six scenario runs shared by the trend checks, computed once.
fn trend_runs() -> &'static TrendRuns {
    static RUNS: OnceLock<TrendRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let start = Instant::now();
        let runs = TrendRuns {
            gb: run(Solver::GreedyBackoff, 1),
            gg: run(Solver::GlobalGreedy, 1),
            rnd: run(Solver::Random, 1),
            lg: run(Solver::LocalGreedy, 1),
            gb5: run(Solver::GreedyBackoff, 5),
            gg5: run(Solver::GlobalGreedy, 5),
            elapsed: start.elapsed(),
        };
        println!(
            "  synthetic scenario, 6 runs of 1440 slots in {:.2} s: mean rate (ebits/s) greedy_backoff {:.4e}, \
             global_greedy {:.4e}, random {:.4e}, local_greedy {:.4e}; at R_g = 5: greedy_backoff {:.4e}, global_greedy {:.4e}",
            runs.elapsed.as_secs_f64(),
            runs.gb.mean_rate,
            runs.gg.mean_rate,
            runs.rnd.mean_rate,
            runs.lg.mean_rate,
            runs.gb5.mean_rate,
            runs.gg5.mean_rate
        );
        runs
    })
}

const TREND_LIMIT: Duration = Duration::from_secs(600);

#[test]
fn trend_rate_ordering() {
    let r = trend_runs();
    let (gb, gg, rnd, lg) = (r.gb.mean_rate, r.gg.mean_rate, r.rnd.mean_rate, r.lg.mean_rate);
    let close = (gb - gg).abs() <= 0.05 * gb.max(gg);
    let ok = close && gb.min(gg) >= rnd && rnd >= lg;
    report(
        "trend: rate ordering greedy_backoff ~ global_greedy >= random >= local_greedy",
        ok,
        r.elapsed,
        Some(TREND_LIMIT),
        &format!(
            "greedy_backoff/global_greedy = {:.4}, random/local_greedy = {:.4}, global_greedy/random = {:.4}",
            gb / gg,
            rnd / lg,
            gg / rnd
        ),
    );
}

#[test]
fn trend_receivers() {
    let r = trend_runs();
    let gain_gb = r.gb5.mean_rate / r.gb.mean_rate - 1.0;
    let gain_gg = r.gg5.mean_rate / r.gg.mean_rate - 1.0;
    report(
        "trend: receivers 1 -> 5 improves mean rate by >= 10%",
        gain_gb >= 0.10 && gain_gg >= 0.10,
        r.elapsed,
        Some(TREND_LIMIT),
        &format!("greedy_backoff {:+.1}%, global_greedy {:+.1}%", 100.0 * gain_gb, 100.0 * gain_gg),
    );
}

#[test]
fn trend_day_night_fidelity() {
    let r = trend_runs();
    let pairs: Vec<(&str, f64, f64)> = [("greedy_backoff", &r.gb), ("global_greedy", &r.gg), ("random", &r.rnd), ("local_greedy", &r.lg)]
        .iter()
        .map(|(n, s)| (*n, s.day_fidelity.unwrap_or(f64::NAN), s.night_fidelity.unwrap_or(f64::NAN)))
        .collect();
    let detail: Vec<String> = pairs.iter().map(|(n, d, ni)| format!("{n} day {d:.4} night {ni:.4}")).collect();
    report(
        "trend: rate-weighted fidelity day < night",
        pairs.iter().all(|(_, d, n)| d < n),
        r.elapsed,
        Some(TREND_LIMIT),
        &detail.join(", "),
    );
}

#[test]
fn trend_longevity() {
    let r = trend_runs();
    report(
        "trend: greedy_backoff median episode length >= local_greedy",
        r.gb.median_longevity >= r.lg.median_longevity,
        r.elapsed,
        Some(TREND_LIMIT),
        &format!(
            "medians {} vs {}, multi-slot episode share {:.3} vs {:.3}",
            r.gb.median_longevity, r.lg.median_longevity, r.gb.multi_slot_fraction, r.lg.multi_slot_fraction
        ),
    );
}

fn export_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    ["per_slot.csv", "assignments.csv", "longevity.csv", "stations.csv"]
        .iter()
        .map(|f| (f.to_string(), fs::read(dir.join(f)).unwrap()))
        .collect()
}

#[test]
fn determinism() {
    let start = Instant::now();
    let mut identical = true;
    for solver in [Solver::Random, Solver::LocalGreedy, Solver::GreedyBackoff] {
        let cfg = synthetic(solver, 1);
        let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
        export_csv(&run_scenario(&cfg).unwrap(), a.path()).unwrap();
        export_csv(&run_scenario(&cfg).unwrap(), b.path()).unwrap();
        identical &= export_bytes(a.path()) == export_bytes(b.path());
    }
    report(
        "determinism",
        identical,
        start.elapsed(),
        None,
        "two runs per solver (random, local_greedy, greedy_backoff) give byte-identical CSVs",
    );
}
