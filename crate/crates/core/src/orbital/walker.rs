use serde::{Deserialize, Serialize};

use super::{normalize_deg, OrbitalElements};

/// Walker delta pattern `inclination: total/planes/phasing` of circular orbits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WalkerSpec {
    pub planes: u32,
    pub sats_per_plane: u32,
    pub inclination_deg: f64,
    pub altitude_m: f64,
    #[serde(default)]
    pub phasing: u32,
}

/// Satellite `k` of plane `p` gets RAAN `360 p / P` and mean anomaly
/// `360 k / S + 360 F p / (P S)`. Ids are `W{p:02}-{k:02}`, which sort plane-major.
pub fn generate_walker_constellation(spec: &WalkerSpec, epoch: f64) -> Vec<OrbitalElements> {
    assert!(spec.planes >= 1 && spec.sats_per_plane >= 1);
    let total = f64::from(spec.planes * spec.sats_per_plane);
    let mean_motion = OrbitalElements::mean_motion_for_altitude(spec.altitude_m);
    let mut out = Vec::with_capacity(total as usize);
    for p in 0..spec.planes {
        let raan = 360.0 * f64::from(p) / f64::from(spec.planes);
        for k in 0..spec.sats_per_plane {
            let anomaly = 360.0 * f64::from(k) / f64::from(spec.sats_per_plane)
                + 360.0 * f64::from(spec.phasing) * f64::from(p) / total;
            out.push(OrbitalElements {
                satellite_id: format!("W{p:02}-{k:02}"),
                epoch,
                inclination: spec.inclination_deg,
                raan: normalize_deg(raan),
                eccentricity: 0.0,
                arg_perigee: 0.0,
                mean_anomaly_at_epoch: normalize_deg(anomaly),
                mean_motion,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn spec(planes: u32, per: u32) -> WalkerSpec {
        WalkerSpec {
            planes,
            sats_per_plane: per,
            inclination_deg: 53.0,
            altitude_m: 550e3,
            phasing: 1,
        }
    }

    #[test]
    fn single_satellite() {
        let els = generate_walker_constellation(&spec(1, 1), 0.0);
        assert_eq!(els.len(), 1);
        assert_eq!(els[0].inclination, 53.0);
        assert_eq!(els[0].eccentricity, 0.0);
    }

    #[test]
    fn planes_evenly_spaced() {
        let els = generate_walker_constellation(&spec(4, 5), 0.0);
        assert_eq!(els.len(), 20);
        let raans: BTreeSet<u64> = els.iter().map(|e| (e.raan * 1e6).round() as u64).collect();
        let raans: Vec<f64> = raans.into_iter().map(|r| r as f64 / 1e6).collect();
        assert_eq!(raans, vec![0.0, 90.0, 180.0, 270.0]);
        let ids: BTreeSet<&str> = els.iter().map(|e| e.satellite_id.as_str()).collect();
        assert_eq!(ids.len(), 20);
    }

    #[test]
    fn in_plane_spacing_and_phasing() {
        let els = generate_walker_constellation(&spec(4, 5), 0.0);
        assert_eq!(els[1].mean_anomaly_at_epoch - els[0].mean_anomaly_at_epoch, 72.0);
        // phasing offset between planes: 360 * F / T = 18 degrees
        assert!((els[5].mean_anomaly_at_epoch - 18.0).abs() < 1e-12);
    }

    #[test]
    fn period_at_550_km() {
        let els = generate_walker_constellation(&spec(2, 2), 0.0);
        for e in els {
            let minutes = e.period_seconds() / 60.0;
            assert!((minutes - 95.6).abs() < 0.2, "{minutes}");
        }
    }
}
