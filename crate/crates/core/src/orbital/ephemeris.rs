use std::collections::BTreeMap;
use std::io::Read;

use thiserror::Error;

use super::EcefPosition;

const HEADER: [&str; 5] = ["satellite_id", "unix_time_s", "x_m", "y_m", "z_m"];

#[derive(Debug, Error)]
pub enum EphemerisError {
    #[error("ephemeris header must be {expected:?}, found {found:?}")]
    Header { expected: String, found: String },
    #[error("ephemeris row {row}: {message}")]
    Row { row: usize, message: String },
    #[error("ephemeris CSV: {0}")]
    Csv(#[from] csv::Error),
}

/// Precomputed Earth-fixed positions per satellite, linearly interpolated in time.
#[derive(Debug, Clone, Default)]
pub struct Ephemeris {
    tracks: BTreeMap<String, Vec<(f64, EcefPosition)>>,
}

impl Ephemeris {
    pub fn satellite_ids(&self) -> impl Iterator<Item = &str> {
        self.tracks.keys().map(String::as_str)
    }

    pub fn len(&self) -> usize {
        self.tracks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tracks.is_empty()
    }

    pub fn insert(&mut self, id: &str, t: f64, pos: EcefPosition) {
        let track = self.tracks.entry(id.to_string()).or_default();
        let at = track.partition_point(|(s, _)| *s < t);
        track.insert(at, (t, pos));
    }

    /// Position at `t`, or `None` outside the sampled interval.
    pub fn position_at(&self, id: &str, t: f64) -> Option<EcefPosition> {
        let track = self.tracks.get(id)?;
        let hi = track.partition_point(|(s, _)| *s < t);
        if hi < track.len() && track[hi].0 == t {
            return Some(track[hi].1);
        }
        if hi == 0 || hi == track.len() {
            return None;
        }
        let (t0, p0) = track[hi - 1];
        let (t1, p1) = track[hi];
        let f = (t - t0) / (t1 - t0);
        Some(EcefPosition::new(
            p0.x + f * (p1.x - p0.x),
            p0.y + f * (p1.y - p0.y),
            p0.z + f * (p1.z - p0.z),
        ))
    }
}

/// Reads `satellite_id,unix_time_s,x_m,y_m,z_m` rows (header required).
pub fn parse_ephemeris_csv<R: Read>(reader: R) -> Result<Ephemeris, EphemerisError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != HEADER {
        return Err(EphemerisError::Header {
            expected: HEADER.join(","),
            found: header.join(","),
        });
    }
    let mut eph = Ephemeris::default();
    for (k, rec) in rdr.records().enumerate() {
        let row = k + 2;
        let rec = rec?;
        let num = |i: usize| -> Result<f64, EphemerisError> {
            rec[i].parse::<f64>().map_err(|e| EphemerisError::Row {
                row,
                message: format!("{}: {e}", HEADER[i]),
            })
        };
        let pos = EcefPosition::new(num(2)?, num(3)?, num(4)?);
        eph.insert(&rec[0], num(1)?, pos);
    }
    Ok(eph)
}
