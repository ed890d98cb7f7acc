use std::fs::{self, File};
use std::path::{Path, PathBuf};

use super::{HarnessError, MetricsSeries};

pub const PER_SLOT_HEADER: [&str; 8] = [
    "slot",
    "unix_time_s",
    "solver",
    "aggregate_rate_ebits_s",
    "mean_fidelity",
    "num_connections",
    "max_sats_per_pair",
    "max_pairs_per_sat",
];
pub const ASSIGNMENTS_HEADER: [&str; 6] = ["slot", "satellite_id", "pair_id", "x", "weight_ebits_s", "fidelity"];
pub const LONGEVITY_HEADER: [&str; 2] = ["duration_slots", "count"];
pub const STATIONS_HEADER: [&str; 5] = ["station_id", "lat_deg", "lon_deg", "receivers", "mean_connections"];

fn opt(v: Option<f64>) -> String {
    v.map(|f| f.to_string()).unwrap_or_default()
}

struct Sink {
    path: PathBuf,
    w: csv::Writer<File>,
}

impl Sink {
    fn create(dir: &Path, name: &str, header: &[&str]) -> Result<Self, HarnessError> {
        let path = dir.join(name);
        let file = File::create(&path).map_err(|source| HarnessError::Io {
            path: path.clone(),
            source,
        })?;
        let mut sink = Self {
            path,
            w: csv::Writer::from_writer(file),
        };
        sink.row(header)?;
        Ok(sink)
    }

    fn row<I, T>(&mut self, fields: I) -> Result<(), HarnessError>
    where
        I: IntoIterator<Item = T>,
        T: AsRef<[u8]>,
    {
        self.w.write_record(fields).map_err(|e| self.fail(e.into()))
    }

    fn finish(mut self) -> Result<PathBuf, HarnessError> {
        self.w.flush().map_err(|e| self.fail(e))?;
        Ok(self.path)
    }

    fn fail(&self, source: std::io::Error) -> HarnessError {
        HarnessError::Io {
            path: self.path.clone(),
            source,
        }
    }
}

/// Writes `per_slot.csv`, `assignments.csv`, `longevity.csv` and `stations.csv`
/// into `dir`, creating it if needed. Rows are slot-major, then sorted by id.
pub fn export_csv(series: &MetricsSeries, dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(dir).map_err(|source| HarnessError::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut written = Vec::new();

    let mut slots: Vec<_> = series.slots.iter().collect();
    slots.sort_by_key(|s| s.slot);

    let mut per_slot = Sink::create(dir, "per_slot.csv", &PER_SLOT_HEADER)?;
    for s in &slots {
        let num: u64 = s.assignment.iter().map(|c| u64::from(c.x)).sum();
        per_slot.row([
            s.slot.to_string(),
            s.unix_time.to_string(),
            series.solver.name().to_string(),
            s.aggregate_rate.to_string(),
            opt(s.mean_fidelity),
            num.to_string(),
            s.max_sats_per_pair.to_string(),
            s.max_pairs_per_sat.to_string(),
        ])?;
    }
    written.push(per_slot.finish()?);

    let mut assignments = Sink::create(dir, "assignments.csv", &ASSIGNMENTS_HEADER)?;
    for s in &slots {
        let mut rows: Vec<_> = s.assignment.iter().collect();
        rows.sort_by(|a, b| (&a.satellite, &a.pair).cmp(&(&b.satellite, &b.pair)));
        for c in rows {
            assignments.row([
                s.slot.to_string(),
                c.satellite.clone(),
                c.pair.clone(),
                c.x.to_string(),
                c.weight.to_string(),
                opt(c.fidelity),
            ])?;
        }
    }
    written.push(assignments.finish()?);

    let mut longevity = Sink::create(dir, "longevity.csv", &LONGEVITY_HEADER)?;
    for (len, count) in &series.longevity {
        longevity.row([len.to_string(), count.to_string()])?;
    }
    written.push(longevity.finish()?);

    let mut stations = Sink::create(dir, "stations.csv", &STATIONS_HEADER)?;
    let mut order: Vec<usize> = (0..series.stations.len()).collect();
    order.sort_by(|&a, &b| series.stations[a].id.cmp(&series.stations[b].id));
    for g in order {
        let s = &series.stations[g];
        stations.row([
            s.id.clone(),
            s.location.latitude.to_string(),
            s.location.longitude.to_string(),
            s.receivers.to_string(),
            series.station_mean_connections.get(g).copied().unwrap_or(0.0).to_string(),
        ])?;
    }
    written.push(stations.finish()?);

    Ok(written)
}
