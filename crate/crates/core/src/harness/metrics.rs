use std::collections::{BTreeMap, BTreeSet};
use std::hash::Hash;

use serde::{Deserialize, Serialize};

use super::MetricsSeries;

/// Histogram of maximal runs of consecutive slots in which a key is present.
pub fn longevity_histogram<K: Ord + Clone + Hash>(slots: &[BTreeSet<K>]) -> BTreeMap<u32, u64> {
    let mut open: BTreeMap<K, u32> = BTreeMap::new();
    let mut hist = BTreeMap::new();
    for present in slots {
        let mut next = BTreeMap::new();
        for k in present {
            next.insert(k.clone(), open.get(k).copied().unwrap_or(0) + 1);
        }
        for (k, len) in open {
            if !present.contains(&k) {
                *hist.entry(len).or_insert(0) += 1;
            }
        }
        open = next;
    }
    for len in open.into_values() {
        *hist.entry(len).or_insert(0) += 1;
    }
    hist
}

/// Lower median episode length; zero for an empty histogram.
pub fn median_episode_length(hist: &BTreeMap<u32, u64>) -> u32 {
    let total: u64 = hist.values().sum();
    if total == 0 {
        return 0;
    }
    let target = (total + 1) / 2;
    let mut seen = 0;
    for (&len, &count) in hist {
        seen += count;
        if seen >= target {
            return len;
        }
    }
    unreachable!("target is within the total count")
}

fn multi_slot_fraction(hist: &BTreeMap<u32, u64>) -> f64 {
    let total: u64 = hist.values().sum();
    let multi: u64 = hist.range(2..).map(|(_, &c)| c).sum();
    if total == 0 {
        0.0
    } else {
        multi as f64 / total as f64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub slot_count: usize,
    /// Time-averaged aggregate rate, ebits/s.
    pub mean_rate: f64,
    /// Rate-weighted mean fidelity over all served connections.
    pub mean_fidelity: Option<f64>,
    pub day_fidelity: Option<f64>,
    pub night_fidelity: Option<f64>,
    /// `Σ w x` summed over slots, split by the day flag.
    pub day_rate_mass: f64,
    pub night_rate_mass: f64,
    /// `Σ w x F`, split by the day flag.
    pub day_fidelity_mass: f64,
    pub night_fidelity_mass: f64,
    pub mean_connections: f64,
    pub station_mean_connections: Vec<f64>,
    pub max_sats_per_pair: Vec<u32>,
    pub max_pairs_per_sat: Vec<u32>,
    pub median_longevity: u32,
    /// Share of episodes lasting more than one slot.
    pub multi_slot_fraction: f64,
}

pub fn aggregate_metrics(series: &MetricsSeries) -> Summary {
    let n = series.slots.len();
    let mut rate_sum = 0.0;
    let mut conns = 0u64;
    let (mut day_rate, mut night_rate, mut day_fid, mut night_fid) = (0.0, 0.0, 0.0, 0.0);
    for s in &series.slots {
        rate_sum += s.aggregate_rate;
        for c in &s.assignment {
            conns += u64::from(c.x);
            let Some(f) = c.fidelity else { continue };
            let r = c.weight * f64::from(c.x);
            if c.is_day {
                day_rate += r;
                day_fid += r * f;
            } else {
                night_rate += r;
                night_fid += r * f;
            }
        }
    }
    let ratio = |num: f64, den: f64| (den > 0.0).then(|| num / den);
    let per_slot = |v: f64| if n == 0 { 0.0 } else { v / n as f64 };
    Summary {
        slot_count: n,
        mean_rate: per_slot(rate_sum),
        mean_fidelity: ratio(day_fid + night_fid, day_rate + night_rate),
        day_fidelity: ratio(day_fid, day_rate),
        night_fidelity: ratio(night_fid, night_rate),
        day_rate_mass: day_rate,
        night_rate_mass: night_rate,
        day_fidelity_mass: day_fid,
        night_fidelity_mass: night_fid,
        mean_connections: per_slot(conns as f64),
        station_mean_connections: series.station_mean_connections.clone(),
        max_sats_per_pair: series.slots.iter().map(|s| s.max_sats_per_pair).collect(),
        max_pairs_per_sat: series.slots.iter().map(|s| s.max_pairs_per_sat).collect(),
        median_longevity: median_episode_length(&series.longevity),
        multi_slot_fraction: multi_slot_fraction(&series.longevity),
    }
}
